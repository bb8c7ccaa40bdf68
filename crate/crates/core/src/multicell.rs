//! Several single-antenna cells sharing one RedRIS. There is no joint precoding across
//! BSs; each user applies its own complex receive scaling `α_m`.

use alloc::vec::Vec;

use nalgebra::Complex;
use rand::Rng;

use crate::cascade::LensCascade;
use crate::channel::{ChannelSet, DftOperator};
use crate::error::Result;
use crate::linalg::{frob2, CMatrix, CVector, C64};
use crate::matching::MatchingMatrix;
use crate::perm_opt::OptimizerState;
use crate::precoding::{per_user_mmse, receive_scaling_multicell, sum_rate};
use crate::single_cell::{AlternatingOptions, Evaluation};

/// Result of [`optimize_multicell`], reporting the lowest-objective iterate.
#[derive(Debug, Clone)]
pub struct MultiCellSolution {
    pub matching: MatchingMatrix,
    pub alphas: Vec<C64>,
    /// Sum-MSE objective for `t = 0, 1, …`.
    pub objective_trace: Vec<f64>,
    pub best_iteration: usize,
    pub mmse: Vec<f64>,
    pub sum_rate: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl MultiCellSolution {
    pub fn objective(&self) -> f64 {
        self.objective_trace[self.best_iteration]
    }
}

/// `v_m = √P · row_m(H)ᵀ`, the effective gains seen by user `m`.
pub fn user_gain_vector(h: &CMatrix, m: usize, power: f64) -> CVector {
    h.row(m).transpose() * Complex::new(libm::sqrt(power), 0.0)
}

/// Per-user optimal scalings for effective channel `h` (M×M).
pub fn optimal_scalings(h: &CMatrix, power: f64, noise_var: f64) -> Result<Vec<C64>> {
    (0..h.nrows())
        .map(|m| receive_scaling_multicell(&user_gain_vector(h, m, power), m, noise_var))
        .collect()
}

/// `‖Diag(α) H √P − I‖²_F + σ²‖α‖²`.
pub fn multicell_objective(h: &CMatrix, alphas: &[C64], power: f64, noise_var: f64) -> f64 {
    let g = scaled_gain(h, alphas, power);
    let m = h.nrows();
    frob2(&(g - CMatrix::identity(m, m))) + noise_var * alphas.iter().map(|a| a.norm_sqr()).sum::<f64>()
}

/// `Diag(α) H √P`.
pub fn scaled_gain(h: &CMatrix, alphas: &[C64], power: f64) -> CMatrix {
    let sqrt_p = libm::sqrt(power);
    let mut g = h.clone();
    for (m, a) in alphas.iter().enumerate() {
        let mut row = g.row_mut(m);
        row *= *a * sqrt_p;
    }
    g
}

/// Alternates one R-LS + projection round on `Υ` at fixed `α`
/// (`A = Diag(α)H_suᴴU`, `B = UH_bs√P`, `Z = I − Diag(α)H_buᴴ√P`) with a full sweep of
/// closed-form `α_m` updates. Stops when the objective's relative change drops below `ε`
/// or after `max_iter` rounds.
pub fn optimize_multicell<R: Rng + ?Sized>(
    channels: &ChannelSet,
    dft: &DftOperator,
    power: f64,
    noise_var: f64,
    opts: &AlternatingOptions,
    rng: &mut R,
) -> Result<MultiCellSolution> {
    let cascade = LensCascade::new(channels, dft)?;
    let m = cascade.users();
    let init = opts.initial_matching(cascade.ports(), rng)?;
    let sqrt_p = Complex::new(libm::sqrt(power), 0.0);
    let b = &cascade.right * sqrt_p;
    let identity = CMatrix::identity(m, m);

    let mut h = cascade.effective(&init);
    let mut alphas = optimal_scalings(&h, power, noise_var)?;
    let mut objective = multicell_objective(&h, &alphas, power, noise_var);
    let mut state = OptimizerState::new(init.size());
    let mut best = (init.clone(), alphas.clone(), 0usize);
    let mut trace = alloc::vec![objective];
    let mut converged = false;

    for t in 1..=opts.max_iter {
        let diag = CMatrix::from_diagonal(&CVector::from_vec(alphas.clone()));
        let a = &diag * &cascade.left;
        let z = &identity - &diag * &cascade.direct * sqrt_p;
        let matching = state.step(&a, &b, &z, opts.gamma0)?;

        h = cascade.effective(&matching);
        alphas = optimal_scalings(&h, power, noise_var)?;
        let prev = objective;
        objective = multicell_objective(&h, &alphas, power, noise_var);
        trace.push(objective);
        if objective < trace[best.2] {
            best = (matching, alphas.clone(), t);
        }
        if (objective - prev).abs() < opts.eps * prev {
            converged = true;
            break;
        }
    }

    let (matching, alphas, best_iteration) = best;
    let h = cascade.effective(&matching);
    let g = scaled_gain(&h, &alphas, power);
    let mmse = per_user_mmse(&g, &alphas, noise_var)?;
    Ok(MultiCellSolution {
        sum_rate: sum_rate(&mmse)?,
        mmse,
        iterations: trace.len() - 1,
        converged,
        best_iteration,
        objective_trace: trace,
        matching,
        alphas,
    })
}

/// Scores a fixed matching in the multi-cell model with optimal per-user scalings.
pub fn evaluate_multicell(
    channels: &ChannelSet,
    dft: &DftOperator,
    matching: &MatchingMatrix,
    power: f64,
    noise_var: f64,
) -> Result<Evaluation> {
    let h = crate::cascade::effective_channel(channels, dft, matching)?;
    evaluate_multicell_channel(&h, power, noise_var)
}

/// Scores an effective channel `H` (M×M) with optimal per-user scalings.
pub fn evaluate_multicell_channel(h: &CMatrix, power: f64, noise_var: f64) -> Result<Evaluation> {
    let alphas = optimal_scalings(h, power, noise_var)?;
    evaluate_multicell_with_scalings(h, &alphas, power, noise_var)
}

/// Scores an effective channel under given scalings, e.g. ones designed on estimated
/// channels.
pub fn evaluate_multicell_with_scalings(
    h: &CMatrix,
    alphas: &[C64],
    power: f64,
    noise_var: f64,
) -> Result<Evaluation> {
    let g = scaled_gain(h, alphas, power);
    let mmse = per_user_mmse(&g, alphas, noise_var)?;
    Ok(Evaluation {
        sum_rate: sum_rate(&mmse)?,
        mmse,
        alphas: alphas.to_vec(),
    })
}
