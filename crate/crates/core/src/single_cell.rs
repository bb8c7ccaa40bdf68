//! Joint optimization of the switching matrix, the MMSE precoder, and the receive scaling
//! for one multi-antenna BS.

use alloc::vec::Vec;

use nalgebra::Complex;
use rand::Rng;

use crate::cascade::LensCascade;
use crate::channel::{ChannelSet, DftOperator};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::matching::MatchingMatrix;
use crate::perm_opt::{OptimizerState, Regularization};
use crate::precoding::{mmse_precoder, mse_for_channel, single_cell_user_mmse, sum_rate, Precoder};
use alloc::format;

/// Options shared by the alternating optimizers.
#[derive(Debug, Clone, PartialEq)]
pub struct AlternatingOptions {
    pub gamma0: Regularization,
    /// Relative objective change that ends the alternation.
    pub eps: f64,
    pub max_iter: usize,
    /// Starting matching; drawn uniformly at random when absent.
    pub init: Option<MatchingMatrix>,
}

impl Default for AlternatingOptions {
    fn default() -> Self {
        Self {
            gamma0: Regularization::default(),
            eps: 1e-4,
            max_iter: 50,
            init: None,
        }
    }
}

impl AlternatingOptions {
    pub(crate) fn initial_matching<R: Rng + ?Sized>(
        &self,
        ports: usize,
        rng: &mut R,
    ) -> Result<MatchingMatrix> {
        match &self.init {
            Some(m) if m.size() != ports => Err(Error::DimensionMismatch(format!(
                "initial matching has {} ports, expected {ports}",
                m.size()
            ))),
            Some(m) => Ok(m.clone()),
            None => MatchingMatrix::random(ports, rng),
        }
    }
}

/// Result of [`optimize_single_cell`]. The reported matching and precoder belong to the
/// iterate with the smallest MSE.
#[derive(Debug, Clone)]
pub struct SingleCellSolution {
    pub matching: MatchingMatrix,
    pub precoder: Precoder,
    /// `E_t` for `t = 0, 1, …`.
    pub mse_trace: Vec<f64>,
    /// Index into `mse_trace` of the reported iterate.
    pub best_iteration: usize,
    /// Per-user MMSE and sum rate of the reported iterate, on the channels optimized for.
    pub mmse: Vec<f64>,
    pub sum_rate: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Every projected matching, starting with the initialization.
    pub matching_trace: Vec<MatchingMatrix>,
}

impl SingleCellSolution {
    pub fn mse(&self) -> f64 {
        self.mse_trace[self.best_iteration]
    }
}

/// Alternates one R-LS + projection round on `Υ` (with `A = αH_suᴴU`, `B = UH_bsF`,
/// `Z = I − αH_buᴴF`) with the closed-form precoder update, until
/// `|E_t − E_{t−1}| < ε E_{t−1}` or `max_iter` rounds.
pub fn optimize_single_cell<R: Rng + ?Sized>(
    channels: &ChannelSet,
    dft: &DftOperator,
    power: f64,
    noise_var: f64,
    opts: &AlternatingOptions,
    rng: &mut R,
) -> Result<SingleCellSolution> {
    let cascade = LensCascade::new(channels, dft)?;
    let m = cascade.users();
    let k = cascade.ports();
    let init = opts.initial_matching(k, rng)?;

    let mut matching = init.clone();
    let mut h = cascade.effective(&matching);
    let mut precoder = mmse_precoder(&h, power, noise_var)?;
    let mut mse = mse_for_channel(&h, &precoder, noise_var);

    let mut state = OptimizerState::new(init.size());
    let mut best = (matching.clone(), precoder.clone(), 0usize);
    let mut mse_trace = alloc::vec![mse];
    let mut matching_trace = alloc::vec![matching.clone()];
    let mut converged = false;
    let identity = CMatrix::identity(m, m);

    for t in 1..=opts.max_iter {
        let alpha = Complex::new(precoder.alpha, 0.0);
        let a = &cascade.left * alpha;
        let b = &cascade.right * &precoder.f;
        let z = &identity - &cascade.direct * &precoder.f * alpha;
        matching = state.step(&a, &b, &z, opts.gamma0)?;

        h = cascade.effective(&matching);
        precoder = mmse_precoder(&h, power, noise_var)?;
        let prev = mse;
        mse = mse_for_channel(&h, &precoder, noise_var);
        mse_trace.push(mse);
        matching_trace.push(matching.clone());
        if mse < mse_trace[best.2] {
            best = (matching.clone(), precoder.clone(), t);
        }
        if (mse - prev).abs() < opts.eps * prev {
            converged = true;
            break;
        }
    }

    let (matching, precoder, best_iteration) = best;
    let h = cascade.effective(&matching);
    let mmse = single_cell_user_mmse(&h, &precoder, noise_var)?;
    Ok(SingleCellSolution {
        sum_rate: sum_rate(&mmse)?,
        mmse,
        iterations: mse_trace.len() - 1,
        converged,
        best_iteration,
        mse_trace,
        matching_trace,
        matching,
        precoder,
    })
}

/// Scores of a fixed configuration.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub sum_rate: f64,
    pub mmse: Vec<f64>,
    /// Receive scaling of each user (the shared real `α` in the single-cell model).
    pub alphas: Vec<C64>,
}

/// Recomputes the MMSE precoder for `matching` on `channels` and scores it.
pub fn evaluate_solution(
    channels: &ChannelSet,
    dft: &DftOperator,
    matching: &MatchingMatrix,
    power: f64,
    noise_var: f64,
) -> Result<Evaluation> {
    let h = crate::cascade::effective_channel(channels, dft, matching)?;
    evaluate_single_cell_channel(&h, power, noise_var)
}

/// Scores an effective channel `H` (M×N) under the single-cell MMSE precoder.
pub fn evaluate_single_cell_channel(h: &CMatrix, power: f64, noise_var: f64) -> Result<Evaluation> {
    let precoder = mmse_precoder(h, power, noise_var)?;
    evaluate_with_precoder(h, &precoder, noise_var)
}

/// Scores an effective channel under a given precoder, e.g. one designed on estimated
/// channels.
pub fn evaluate_with_precoder(h: &CMatrix, precoder: &Precoder, noise_var: f64) -> Result<Evaluation> {
    let mmse = single_cell_user_mmse(h, precoder, noise_var)?;
    Ok(Evaluation {
        sum_rate: sum_rate(&mmse)?,
        alphas: alloc::vec![Complex::new(precoder.alpha, 0.0); h.nrows()],
        mmse,
    })
}
