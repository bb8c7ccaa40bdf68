//! Reference schemes: a reflective RIS with optimized unit-modulus phase shifts, and a
//! RedRIS with an unoptimized random switching matrix.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::Complex;
use rand::Rng;

use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::linalg::{cis, CMatrix, CVector, C64};
use crate::matching::MatchingMatrix;
use crate::multicell::{multicell_objective, optimal_scalings, scaled_gain};
use crate::perm_opt::Regularization;
use crate::precoding::{
    mmse_precoder, mse_for_channel, per_user_mmse, single_cell_user_mmse, sum_rate, Precoder,
};

/// Diagonal phase-shift matrix `Θ = Diag(e^{jθ})`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseShiftMatrix {
    pub theta: Vec<f64>,
}

impl PhaseShiftMatrix {
    pub fn new(theta: Vec<f64>) -> Self {
        Self { theta }
    }

    pub fn zeros(size: usize) -> Self {
        Self {
            theta: alloc::vec![0.0; size],
        }
    }

    pub fn random<R: Rng + ?Sized>(size: usize, rng: &mut R) -> Self {
        Self {
            theta: (0..size).map(|_| rng.random_range(-PI..PI)).collect(),
        }
    }

    /// Nearest unit-modulus point to each entry of `x`. Zero entries keep phase 0.
    pub fn project(x: &CVector) -> Self {
        Self {
            theta: x.iter().map(|z| libm::atan2(z.im, z.re)).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.theta.len()
    }

    pub fn diagonal(&self) -> CVector {
        CVector::from_iterator(self.size(), self.theta.iter().map(|&t| cis(t)))
    }

    pub fn to_dense(&self) -> CMatrix {
        CMatrix::from_diagonal(&self.diagonal())
    }
}

/// `H_suᴴ Θ H_bs + H_buᴴ`, with no lens transforms.
pub fn reflective_effective_channel(channels: &ChannelSet, phases: &PhaseShiftMatrix) -> Result<CMatrix> {
    let (k, _, _) = channels.dims()?;
    if phases.size() != k {
        return Err(Error::DimensionMismatch(format!(
            "phase vector has {} entries, surface has {k} elements",
            phases.size()
        )));
    }
    Ok(reflective_channel(channels, &phases.diagonal()))
}

fn reflective_channel(channels: &ChannelSet, diag: &CVector) -> CMatrix {
    let mut scaled = channels.h_bs.clone();
    for (k, d) in diag.iter().enumerate() {
        let mut row = scaled.row_mut(k);
        row *= *d;
    }
    channels.h_su.adjoint() * scaled + channels.h_bu.adjoint()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReflectiveOptions {
    /// Ridge weight; `Relative(c)` means `c · Σ_k (AᴴA)_kk (BBᴴ)_kk / K`.
    pub gamma0: Regularization,
    pub eps: f64,
    pub max_iter: usize,
    /// Starting phases; uniform on `[−π, π)` when absent.
    pub init: Option<PhaseShiftMatrix>,
}

impl Default for ReflectiveOptions {
    fn default() -> Self {
        Self {
            gamma0: Regularization::Relative(DEFAULT_REFLECTIVE_GAMMA0_SCALE),
            eps: 1e-4,
            max_iter: 50,
            init: None,
        }
    }
}

impl ReflectiveOptions {
    fn initial_phases<R: Rng + ?Sized>(&self, size: usize, rng: &mut R) -> Result<PhaseShiftMatrix> {
        match &self.init {
            Some(p) if p.size() != size => Err(Error::DimensionMismatch(format!(
                "initial phases have {} entries, expected {size}",
                p.size()
            ))),
            Some(p) => Ok(p.clone()),
            None => Ok(PhaseShiftMatrix::random(size, rng)),
        }
    }
}

/// Regularized least squares over the diagonal of `Θ`:
///
/// `min_x ‖A Diag(x) B − Z‖²_F + γ₀‖x − x̄‖²`, solved from
/// `(AᴴA ∘ (BBᴴ)ᵀ + γ₀I) x = diag(AᴴZBᴴ) + γ₀x̄`.
pub fn diagonal_rls(a: &CMatrix, b: &CMatrix, z: &CMatrix, x_bar: &CVector, gamma0: f64) -> Result<CVector> {
    let k = a.ncols();
    if b.nrows() != k || x_bar.len() != k || z.nrows() != a.nrows() || z.ncols() != b.ncols() {
        return Err(Error::DimensionMismatch("diagonal R-LS operands disagree".into()));
    }
    if !(gamma0 > 0.0) {
        return Err(Error::Domain(format!("regularization {gamma0} must be positive")));
    }
    let aha = a.adjoint() * a;
    let bbh = b * b.adjoint();
    let mut lhs = aha.component_mul(&bbh.transpose());
    for i in 0..k {
        lhs[(i, i)] += Complex::new(gamma0, 0.0);
    }
    let rhs = (a.adjoint() * z * b.adjoint()).diagonal() + x_bar * Complex::new(gamma0, 0.0);
    match lhs.clone().cholesky() {
        Some(ch) => Ok(ch.solve(&rhs)),
        None => lhs
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Singular("diagonal R-LS system is singular".into())),
    }
}

/// Default `c` of [`diagonal_gamma0`].
pub const DEFAULT_REFLECTIVE_GAMMA0_SCALE: f64 = 1e-2;

/// `γ₀` for [`diagonal_rls`]: `Relative(c)` scales the mean curvature
/// `Σ_k (AᴴA)_kk (BBᴴ)_kk / K`.
pub fn diagonal_gamma0(a: &CMatrix, b: &CMatrix, reg: Regularization) -> f64 {
    match reg {
        Regularization::Fixed(g) => g,
        Regularization::Relative(c) => {
            let k = a.ncols().max(1);
            let s: f64 = (0..a.ncols())
                .map(|i| a.column(i).norm_squared() * b.row(i).norm_squared())
                .sum();
            let g = c * s / k as f64;
            if g > 0.0 {
                g
            } else {
                1e-12
            }
        }
    }
}

/// Reflective-RIS baseline for one multi-antenna BS.
#[derive(Debug, Clone)]
pub struct ReflectiveSolution {
    pub phases: PhaseShiftMatrix,
    pub precoder: Precoder,
    pub mse_trace: Vec<f64>,
    pub best_iteration: usize,
    pub mmse: Vec<f64>,
    pub sum_rate: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Alternates the diagonal R-LS with phase projection (at fixed `α`, `F`) and the MMSE
/// precoder update, with the same stopping rule and best-iterate rule as the RedRIS
/// optimizer.
pub fn reflective_ris_optimize<R: Rng + ?Sized>(
    channels: &ChannelSet,
    power: f64,
    noise_var: f64,
    opts: &ReflectiveOptions,
    rng: &mut R,
) -> Result<ReflectiveSolution> {
    let (k, _, m) = channels.dims()?;
    let mut phases = opts.initial_phases(k, rng)?;
    let direct = channels.h_bu.adjoint();
    let h_su_h = channels.h_su.adjoint();
    let identity = CMatrix::identity(m, m);

    let mut h = reflective_effective_channel(channels, &phases)?;
    let mut precoder = mmse_precoder(&h, power, noise_var)?;
    let mut mse = mse_for_channel(&h, &precoder, noise_var);
    let mut best = (phases.clone(), precoder.clone(), 0usize);
    let mut trace = alloc::vec![mse];
    let mut converged = false;

    for t in 1..=opts.max_iter {
        let alpha = Complex::new(precoder.alpha, 0.0);
        let a = &h_su_h * alpha;
        let b = &channels.h_bs * &precoder.f;
        let z = &identity - &direct * &precoder.f * alpha;
        let gamma0 = diagonal_gamma0(&a, &b, opts.gamma0);
        let x = diagonal_rls(&a, &b, &z, &CVector::zeros(k), gamma0)?;
        phases = PhaseShiftMatrix::project(&x);

        h = reflective_effective_channel(channels, &phases)?;
        precoder = mmse_precoder(&h, power, noise_var)?;
        let prev = mse;
        mse = mse_for_channel(&h, &precoder, noise_var);
        trace.push(mse);
        if mse < trace[best.2] {
            best = (phases.clone(), precoder.clone(), t);
        }
        if (mse - prev).abs() < opts.eps * prev {
            converged = true;
            break;
        }
    }

    let (phases, precoder, best_iteration) = best;
    let h = reflective_effective_channel(channels, &phases)?;
    let mmse = single_cell_user_mmse(&h, &precoder, noise_var)?;
    Ok(ReflectiveSolution {
        sum_rate: sum_rate(&mmse)?,
        mmse,
        iterations: trace.len() - 1,
        converged,
        best_iteration,
        mse_trace: trace,
        phases,
        precoder,
    })
}

/// Reflective-RIS baseline in the multi-cell model.
#[derive(Debug, Clone)]
pub struct ReflectiveMultiCellSolution {
    pub phases: PhaseShiftMatrix,
    pub alphas: Vec<C64>,
    pub objective_trace: Vec<f64>,
    pub best_iteration: usize,
    pub mmse: Vec<f64>,
    pub sum_rate: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Multi-cell counterpart of [`reflective_ris_optimize`]: `A = Diag(α)H_suᴴ`,
/// `B = H_bs√P`, `Z = I − Diag(α)H_buᴴ√P`, followed by the per-user scaling sweep.
pub fn reflective_ris_optimize_multicell<R: Rng + ?Sized>(
    channels: &ChannelSet,
    power: f64,
    noise_var: f64,
    opts: &ReflectiveOptions,
    rng: &mut R,
) -> Result<ReflectiveMultiCellSolution> {
    let (k, _, m) = channels.dims()?;
    let mut phases = opts.initial_phases(k, rng)?;
    let sqrt_p = Complex::new(libm::sqrt(power), 0.0);
    let direct = channels.h_bu.adjoint();
    let h_su_h = channels.h_su.adjoint();
    let b = &channels.h_bs * sqrt_p;
    let identity = CMatrix::identity(m, m);

    let mut h = reflective_effective_channel(channels, &phases)?;
    let mut alphas = optimal_scalings(&h, power, noise_var)?;
    let mut objective = multicell_objective(&h, &alphas, power, noise_var);
    let mut best = (phases.clone(), alphas.clone(), 0usize);
    let mut trace = alloc::vec![objective];
    let mut converged = false;

    for t in 1..=opts.max_iter {
        let diag = CMatrix::from_diagonal(&CVector::from_vec(alphas.clone()));
        let a = &diag * &h_su_h;
        let z = &identity - &diag * &direct * sqrt_p;
        let gamma0 = diagonal_gamma0(&a, &b, opts.gamma0);
        let x = diagonal_rls(&a, &b, &z, &CVector::zeros(k), gamma0)?;
        phases = PhaseShiftMatrix::project(&x);

        h = reflective_effective_channel(channels, &phases)?;
        alphas = optimal_scalings(&h, power, noise_var)?;
        let prev = objective;
        objective = multicell_objective(&h, &alphas, power, noise_var);
        trace.push(objective);
        if objective < trace[best.2] {
            best = (phases.clone(), alphas.clone(), t);
        }
        if (objective - prev).abs() < opts.eps * prev {
            converged = true;
            break;
        }
    }

    let (phases, alphas, best_iteration) = best;
    let h = reflective_effective_channel(channels, &phases)?;
    let mmse = per_user_mmse(&scaled_gain(&h, &alphas, power), &alphas, noise_var)?;
    Ok(ReflectiveMultiCellSolution {
        sum_rate: sum_rate(&mmse)?,
        mmse,
        iterations: trace.len() - 1,
        converged,
        best_iteration,
        objective_trace: trace,
        phases,
        alphas,
    })
}

/// RedRIS with an unoptimized, uniformly random switching matrix.
pub fn random_switching<R: Rng + ?Sized>(size: usize, rng: &mut R) -> Result<MatchingMatrix> {
    if size == 0 || !size.is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "port count {size} must be positive and even"
        )));
    }
    MatchingMatrix::random(size, rng)
}
