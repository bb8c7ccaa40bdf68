//! Minimization of `‖A X B − Z‖²_F` over symmetric zero-diagonal permutation matrices.
//!
//! The solver alternates a regularized least-squares (R-LS) module, which solves the
//! unconstrained problem with a proximity term `γ₀‖X − X̄‖²_F`, and a projection module
//! that maps onto perfect matchings. The two modules exchange extrinsic estimates: each
//! removes its own prior contribution before handing its output to the other.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{Complex, SVD};

use crate::error::{Error, Result};
use crate::linalg::{frob2, CMatrix, RMatrix};
use crate::matching::{check_even, MatchingMatrix};

/// Largest port count [`brute_force_matching`] accepts.
pub const BRUTE_FORCE_MAX_PORTS: usize = 10;

/// Below this fraction of `γ₀` the extrinsic precision is treated as zero.
const DEGENERATE_PRECISION: f64 = 1e-12;

/// Greedy projection onto perfect matchings.
///
/// Ignores the diagonal and the imaginary part of `x_tilde`. Pairs are taken in order of
/// decreasing `Re{X̃_ij} + Re{X̃_ji}`; among equal scores the lexicographically smallest
/// `(i, j)` wins. A pair is accepted when neither port is already taken.
pub fn greedy_project(x_tilde: &CMatrix) -> Result<MatchingMatrix> {
    let w = x_tilde.map(|z| z.re);
    greedy_project_real(&w)
}

/// [`greedy_project`] on a real weight matrix.
pub fn greedy_project_real(w: &RMatrix) -> Result<MatchingMatrix> {
    if !w.is_square() {
        return Err(Error::InvalidDimension("projection input must be square".into()));
    }
    let k = w.nrows();
    check_even(k)?;
    let mut scored: Vec<(f64, usize, usize)> = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in (i + 1)..k {
            scored.push((w[(i, j)] + w[(j, i)], i, j));
        }
    }
    // Stable sort keeps the lexicographic (i, j) order among equal scores.
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut m = MatchingMatrix::empty(k);
    let mut remaining = k / 2;
    for (_, i, j) in scored {
        if m.partner(i).is_none() && m.partner(j).is_none() {
            m.connect(i, j)?;
            remaining -= 1;
            if remaining == 0 {
                break;
            }
        }
    }
    Ok(m)
}

/// Exhaustive maximizer of `Tr(X W)` over perfect matchings, for `K ≤ 10`.
/// Ties keep the first matching found in enumeration order.
pub fn brute_force_matching(w: &RMatrix) -> Result<MatchingMatrix> {
    let mut best: Option<(f64, MatchingMatrix)> = None;
    for_each_matching(w.nrows(), |m| {
        let score = m.trace_with(w);
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, m.clone()));
        }
    })?;
    Ok(best.expect("at least one matching exists").1)
}

/// Calls `visit` on every perfect matching of `k` ports, `(k−1)!!` in total.
/// Returns the number of matchings visited.
pub fn for_each_matching<F: FnMut(&MatchingMatrix)>(k: usize, mut visit: F) -> Result<usize> {
    check_even(k)?;
    if k > BRUTE_FORCE_MAX_PORTS {
        return Err(Error::TooLarge(format!(
            "exhaustive matching over {k} ports exceeds the limit of {BRUTE_FORCE_MAX_PORTS}"
        )));
    }
    fn recurse<F: FnMut(&MatchingMatrix)>(m: &mut MatchingMatrix, visit: &mut F, count: &mut usize) {
        let Some(i) = (0..m.size()).find(|&i| m.partner(i).is_none()) else {
            *count += 1;
            visit(m);
            return;
        };
        for j in (i + 1)..m.size() {
            if m.partner(j).is_none() {
                m.connect(i, j).expect("both ports are free");
                recurse(m, visit, count);
                m.disconnect(i, j).expect("pair was just connected");
            }
        }
    }
    let mut m = MatchingMatrix::empty(k);
    let mut count = 0;
    recurse(&mut m, &mut visit, &mut count);
    Ok(count)
}

/// Output of [`rls_solve`].
#[derive(Debug, Clone)]
pub struct RlsSolution {
    /// Minimizer `X̃_R-LS`.
    pub x: CMatrix,
    /// `γ̃_R-LS = K² / tr((CᴴC + γ₀I)⁻¹)` with `C = Bᵀ ⊗ A`.
    pub precision: f64,
}

/// Minimizes `‖A X B − Z‖²_F + γ₀‖X − X̄‖²_F` over complex `K×K` matrices.
///
/// Uses the eigenstructure of `AᴴA` and `BBᴴ` (obtained from thin SVDs of `A` and `B`)
/// to solve `AᴴA X BBᴴ + γ₀X = AᴴZBᴴ + γ₀X̄` without forming the `K²×K²` system. Outside
/// the joint range of the two factors the solution is simply `R / γ₀`, so only an
/// `r_A × r_B` block needs the elementwise division by `λ_p μ_q + γ₀`.
pub fn rls_solve(a: &CMatrix, b: &CMatrix, z: &CMatrix, x_bar: &CMatrix, gamma0: f64) -> Result<RlsSolution> {
    let k = a.ncols();
    if b.nrows() != k || z.nrows() != a.nrows() || z.ncols() != b.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "A is {:?}, B is {:?}, Z is {:?}",
            a.shape(),
            b.shape(),
            z.shape()
        )));
    }
    if x_bar.shape() != (k, k) {
        return Err(Error::DimensionMismatch(format!(
            "X̄ is {:?}, expected ({k}, {k})",
            x_bar.shape()
        )));
    }
    if !(gamma0 > 0.0) || !gamma0.is_finite() {
        return Err(Error::Domain(format!("gamma0 = {gamma0} must be positive")));
    }

    let svd_a = SVD::new(a.clone(), false, true);
    let v_a = svd_a.v_t.expect("requested").adjoint(); // K × r_A
    let lambda: Vec<f64> = svd_a.singular_values.iter().map(|s| s * s).collect();
    let svd_b = SVD::new(b.clone(), true, false);
    let u_b = svd_b.u.expect("requested"); // K × r_B
    let mu: Vec<f64> = svd_b.singular_values.iter().map(|s| s * s).collect();

    let rhs = a.adjoint() * z * b.adjoint() + x_bar * Complex::new(gamma0, 0.0);
    let w = v_a.adjoint() * &rhs * &u_b;
    let mut correction = w.clone();
    let mut trace = (k * k - lambda.len() * mu.len()) as f64 / gamma0;
    for (p, lp) in lambda.iter().enumerate() {
        for (q, mq) in mu.iter().enumerate() {
            let denom = lp * mq + gamma0;
            trace += 1.0 / denom;
            correction[(p, q)] *= -(lp * mq) / (gamma0 * denom);
        }
    }
    let x = rhs / Complex::new(gamma0, 0.0) + &v_a * correction * u_b.adjoint();
    Ok(RlsSolution {
        x,
        precision: (k * k) as f64 / trace,
    })
}

/// Scale `c` of the default `γ₀ = c · tr(AᴴA) · tr(BBᴴ) / K²`.
pub const DEFAULT_GAMMA0_SCALE: f64 = 10.0;

/// `c · tr(AᴴA) · tr(BBᴴ) / K²`, i.e. `c` times the mean eigenvalue of `CᴴC`.
pub fn relative_gamma0(a: &CMatrix, b: &CMatrix, scale: f64) -> f64 {
    let k = a.ncols().max(1) as f64;
    scale * frob2(a) * frob2(b) / (k * k)
}

pub fn default_gamma0(a: &CMatrix, b: &CMatrix) -> f64 {
    relative_gamma0(a, b, DEFAULT_GAMMA0_SCALE)
}

/// Choice of the R-LS regularization weight `γ₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularization {
    /// `γ₀ = c · tr(AᴴA) · tr(BBᴴ) / K²`, recomputed from the operands at every step.
    Relative(f64),
    Fixed(f64),
}

impl Default for Regularization {
    fn default() -> Self {
        Regularization::Relative(DEFAULT_GAMMA0_SCALE)
    }
}

impl Regularization {
    /// `Relative` falls back to `c` itself when `A` or `B` carries no energy, where any
    /// positive value leaves `X̄` unchanged.
    pub fn resolve(&self, a: &CMatrix, b: &CMatrix) -> f64 {
        match *self {
            Regularization::Relative(c) => {
                let g = relative_gamma0(a, b, c);
                if g > 0.0 {
                    g
                } else {
                    c
                }
            }
            Regularization::Fixed(g) => g,
        }
    }
}

/// `‖A X B − Z‖²_F` for a matching `X`.
pub fn matching_objective(a: &CMatrix, b: &CMatrix, z: &CMatrix, x: &MatchingMatrix) -> f64 {
    frob2(&(a * x.apply_left(b) - z))
}

/// Tuning of [`optimize_matching`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchingOptions {
    pub gamma0: Regularization,
    /// Relative change threshold of the stop rule.
    pub eps: f64,
    pub max_iter: usize,
}

impl Default for MatchingOptions {
    fn default() -> Self {
        Self {
            gamma0: Regularization::default(),
            eps: 1e-4,
            max_iter: 50,
        }
    }
}

/// Extrinsic state carried between R-LS/projection rounds.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    /// Extrinsic estimate `X̄` fed to the R-LS module.
    pub x_bar: CMatrix,
    /// Regularization used in the most recent step.
    pub gamma0: f64,
    /// Extrinsic precision `γ̃` of the most recent step.
    pub gamma_ext: f64,
    /// Completed steps.
    pub iteration: usize,
    /// Objective of each projected iterate, starting with the initialization.
    pub trace: Vec<f64>,
    /// Steps at which `γ̃` vanished and `X̃ = X̃_R-LS` was used instead.
    pub degenerate_steps: Vec<usize>,
}

impl OptimizerState {
    /// Starts from the uninformative estimate `X̄₀ = 0`. Seeding it with the initial matching
    /// lets the prior outvote the data on every entry that `A` and `B` cannot observe, so
    /// the first projection returns that matching again.
    pub fn new(ports: usize) -> Self {
        Self {
            x_bar: CMatrix::zeros(ports, ports),
            gamma0: 0.0,
            gamma_ext: 0.0,
            iteration: 0,
            trace: Vec::new(),
            degenerate_steps: Vec::new(),
        }
    }

    /// One R-LS + projection round with extrinsic exchange; returns the projected `X̂`.
    pub fn step(
        &mut self,
        a: &CMatrix,
        b: &CMatrix,
        z: &CMatrix,
        gamma0: Regularization,
    ) -> Result<MatchingMatrix> {
        let gamma0 = gamma0.resolve(a, b);
        let rls = rls_solve(a, b, z, &self.x_bar, gamma0)?;
        let gamma_ext = rls.precision - gamma0;
        self.iteration += 1;
        let degenerate = !(gamma_ext > DEGENERATE_PRECISION * gamma0) || !gamma_ext.is_finite();
        let x_tilde = if degenerate {
            self.degenerate_steps.push(self.iteration);
            rls.x
        } else {
            (rls.x * Complex::new(rls.precision / gamma_ext, 0.0))
                - &self.x_bar * Complex::new(gamma0 / gamma_ext, 0.0)
        };
        let x_hat = greedy_project(&x_tilde)?;
        let gamma_ext = if degenerate { 0.0 } else { gamma_ext };
        self.x_bar = x_hat.to_dense_complex() * Complex::new((gamma0 + gamma_ext) / gamma0, 0.0)
            - x_tilde * Complex::new(gamma_ext / gamma0, 0.0);
        self.gamma0 = gamma0;
        self.gamma_ext = gamma_ext;
        Ok(x_hat)
    }
}

/// Alternating R-LS/projection search for `argmin ‖A X B − Z‖²_F` over perfect matchings.
///
/// Stops once `‖X̂_t − X̂_{t−1}‖²_F ≤ ε‖X̂_{t−1}‖²_F` or after `max_iter` steps, and returns
/// the lowest-objective iterate seen (the initialization included).
pub fn optimize_matching(
    a: &CMatrix,
    b: &CMatrix,
    z: &CMatrix,
    opts: &MatchingOptions,
    init: &MatchingMatrix,
) -> Result<(MatchingMatrix, OptimizerState)> {
    let k = a.ncols();
    if init.size() != k {
        return Err(Error::DimensionMismatch(format!(
            "initial matching has {} ports, A has {k} columns",
            init.size()
        )));
    }
    check_even(k)?;
    let mut state = OptimizerState::new(k);
    let mut best = init.clone();
    let mut best_obj = matching_objective(a, b, z, init);
    state.trace.push(best_obj);
    let mut prev = init.clone();
    for _ in 0..opts.max_iter {
        let x_hat = state.step(a, b, z, opts.gamma0)?;
        let obj = matching_objective(a, b, z, &x_hat);
        state.trace.push(obj);
        if obj < best_obj {
            best_obj = obj;
            best = x_hat.clone();
        }
        let moved = x_hat.distance2(&prev);
        let scale = prev.rank() as f64;
        prev = x_hat;
        if moved <= opts.eps * scale {
            break;
        }
    }
    Ok((best, state))
}

/// All `(k−1)!!` perfect matchings of `k ≤ 10` ports.
pub fn all_matchings(k: usize) -> Result<Vec<MatchingMatrix>> {
    let mut out = vec![];
    for_each_matching(k, |m| out.push(m.clone()))?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::to_complex;

    fn example_weights() -> RMatrix {
        let mut w = RMatrix::zeros(4, 4);
        let mut set = |i: usize, j: usize, v: f64| {
            w[(i, j)] = v;
            w[(j, i)] = v;
        };
        set(0, 1, 5.0);
        set(0, 2, 1.0);
        set(1, 3, 1.0);
        set(2, 3, 2.0);
        w
    }

    #[test]
    fn greedy_on_worked_example() {
        let w = example_weights();
        let m = greedy_project(&to_complex(&w)).unwrap();
        assert_eq!(m.pairs(), vec![(0, 1), (2, 3)]);
        assert_eq!(m.trace_with(&w), 14.0);
    }

    #[test]
    fn brute_force_candidates_score_14_4_0() {
        let w = example_weights();
        let mut scores: Vec<f64> = all_matchings(4)
            .unwrap()
            .iter()
            .map(|m| m.trace_with(&w))
            .collect();
        scores.sort_by(|a, b| b.total_cmp(a));
        assert_eq!(scores, vec![14.0, 4.0, 0.0]);
        let best = brute_force_matching(&w).unwrap();
        assert_eq!(best.pairs(), vec![(0, 1), (2, 3)]);
    }

    #[test]
    fn all_ones_ties_break_lexicographically() {
        let k = 8;
        let w = RMatrix::from_fn(k, k, |i, j| if i == j { 0.0 } else { 1.0 });
        let m = greedy_project_real(&w).unwrap();
        assert_eq!(m, MatchingMatrix::consecutive(k).unwrap());
        assert_eq!(m.trace_with(&w), k as f64);
    }

    #[test]
    fn diagonal_is_ignored() {
        let mut w = example_weights();
        for i in 0..4 {
            w[(i, i)] = 100.0;
        }
        let m = greedy_project_real(&w).unwrap();
        assert!(m.to_dense().diagonal().iter().all(|&d| d == 0.0));
        assert_eq!(m.pairs(), vec![(0, 1), (2, 3)]);
    }

    #[test]
    fn odd_sizes_rejected() {
        assert!(matches!(
            greedy_project_real(&RMatrix::zeros(3, 3)),
            Err(Error::InvalidDimension(_))
        ));
        assert!(brute_force_matching(&RMatrix::zeros(12, 12)).is_err());
    }

    #[test]
    fn matching_counts() {
        assert_eq!(for_each_matching(2, |_| {}).unwrap(), 1);
        assert_eq!(for_each_matching(6, |_| {}).unwrap(), 15);
        assert_eq!(for_each_matching(10, |_| {}).unwrap(), 945);
        let m = brute_force_matching(&RMatrix::zeros(2, 2)).unwrap();
        assert_eq!(m.pairs(), vec![(0, 1)]);
    }

    #[test]
    fn rls_identity_factors_halve_target() {
        let k = 4;
        let i = CMatrix::identity(k, k);
        let z = CMatrix::from_fn(k, k, |r, c| Complex::new(r as f64 - c as f64, 0.5 * c as f64));
        let sol = rls_solve(&i, &i, &z, &CMatrix::zeros(k, k), 1.0).unwrap();
        assert!((sol.x - &z * Complex::new(0.5, 0.0)).norm() < 1e-12);
        assert!((sol.precision - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rls_large_gamma_returns_prior() {
        let k = 4;
        let a = CMatrix::from_fn(2, k, |r, c| Complex::new((r + c) as f64, 1.0));
        let b = CMatrix::from_fn(k, 3, |r, c| Complex::new(1.0, (r * c) as f64));
        let z = CMatrix::from_fn(2, 3, |r, c| Complex::new(r as f64, c as f64));
        let x_bar = MatchingMatrix::consecutive(k).unwrap().to_dense_complex();
        let energy = frob2(&a) * frob2(&b);
        let sol = rls_solve(&a, &b, &z, &x_bar, 1e12 * energy).unwrap();
        assert!((&sol.x - &x_bar).norm() / x_bar.norm() < 1e-6);
        assert!(rls_solve(&a, &b, &z, &x_bar, 0.0).is_err());
        assert!(rls_solve(&a, &b, &z, &x_bar, -1.0).is_err());
    }

    #[test]
    fn zero_iterations_returns_init() {
        let k = 4;
        let a = CMatrix::from_fn(2, k, |r, c| Complex::new((r + c) as f64, 0.0));
        let b = CMatrix::from_fn(k, 2, |r, c| Complex::new(1.0, (r + c) as f64));
        let z = CMatrix::identity(2, 2);
        let init = MatchingMatrix::from_pairs(k, &[(0, 3), (1, 2)]).unwrap();
        let opts = MatchingOptions {
            max_iter: 0,
            ..Default::default()
        };
        let (m, state) = optimize_matching(&a, &b, &z, &opts, &init).unwrap();
        assert_eq!(m, init);
        assert_eq!(state.iteration, 0);
    }
}
