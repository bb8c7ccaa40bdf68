#![allow(dead_code)]

//! Independent reference computations shared by the integration tests.

use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use redris_core::cascade::LensCascade;
use redris_core::channel::complex_normal;
use redris_core::linalg::{CMatrix, CVector, RMatrix, C64};
use redris_core::matching::MatchingMatrix;
use redris_core::reduction::ChannelScore;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cmat<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

pub fn cvec<R: Rng>(len: usize, rng: &mut R) -> CVector {
    CVector::from_fn(len, |_, _| complex_normal(rng))
}

pub fn rel_err(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// `(X, γ̃)` from the lifted system `(CᴴC + γ₀I) vec X = Cᴴ vec Z + γ₀ vec X̄`, `C = Bᵀ ⊗ A`.
pub fn dense_rls(a: &CMatrix, b: &CMatrix, z: &CMatrix, x_bar: &CMatrix, gamma0: f64) -> (CMatrix, f64) {
    let k = a.ncols();
    let c = b.transpose().kronecker(a);
    let g = Complex::new(gamma0, 0.0);
    let lhs = c.adjoint() * &c + DMatrix::identity(k * k, k * k) * g;
    let vec_z = DVector::from_column_slice(z.as_slice());
    let vec_xbar = DVector::from_column_slice(x_bar.as_slice());
    let rhs = c.adjoint() * vec_z + vec_xbar * g;
    let inv = lhs.try_inverse().expect("regularized system is invertible");
    let x = &inv * rhs;
    let trace: f64 = (0..k * k).map(|i| inv[(i, i)].re).sum();
    (
        CMatrix::from_column_slice(k, k, x.as_slice()),
        (k * k) as f64 / trace,
    )
}

/// `(‖AᴴA X BBᴴ + γ₀X − AᴴZBᴴ − γ₀X̄‖, ‖AᴴZBᴴ‖ + γ₀‖X̄‖)`.
pub fn rls_residual(
    a: &CMatrix,
    b: &CMatrix,
    z: &CMatrix,
    x_bar: &CMatrix,
    gamma0: f64,
    x: &CMatrix,
) -> (f64, f64) {
    let g = Complex::new(gamma0, 0.0);
    let azb = a.adjoint() * z * b.adjoint();
    let r = a.adjoint() * a * x * (b * b.adjoint()) + x * g - &azb - x_bar * g;
    (r.norm(), azb.norm() + gamma0 * x_bar.norm())
}

/// Random real weights with `W_ij + W_ji ≥ 0` off the diagonal.
pub fn nonnegative_weights<R: Rng>(k: usize, rng: &mut R) -> RMatrix {
    RMatrix::from_fn(k, k, |_, _| rng.random_range(0.0..1.0))
}

pub fn weight(m: &MatchingMatrix, w: &RMatrix) -> f64 {
    m.pairs().iter().map(|&(i, j)| w[(i, j)] + w[(j, i)]).sum()
}

/// Checks every structural property of a perfect matching from its dense view.
pub fn dense_structure_ok(m: &MatchingMatrix) -> bool {
    let x = m.to_dense();
    let k = x.nrows();
    let symmetric = x == x.transpose();
    let zero_diag = (0..k).all(|i| x[(i, i)] == 0.0);
    let involution = &x * &x == RMatrix::identity(k, k);
    let rows = (0..k).all(|i| x.row(i).sum() == 1.0);
    let binary = x.iter().all(|&v| v == 0.0 || v == 1.0);
    symmetric && zero_diag && involution && rows && binary
}

/// `‖α v − e_m‖² + σ²|α|²`.
pub fn scaling_cost(v: &CVector, m: usize, alpha: C64, noise_var: f64) -> f64 {
    let mut cost = noise_var * alpha.norm_sqr();
    for (j, vj) in v.iter().enumerate() {
        let t = if j == m { 1.0 } else { 0.0 };
        cost += (alpha * vj - Complex::new(t, 0.0)).norm_sqr();
    }
    cost
}

/// Smallest cost over a 32×32 grid on a box around the origin scaled to `1/‖v‖`.
pub fn scaling_grid_min(v: &CVector, m: usize, noise_var: f64) -> f64 {
    let r = 2.0 / (v.norm_squared() + noise_var).sqrt();
    let n = 32;
    let mut best = f64::INFINITY;
    for p in 0..n {
        for q in 0..n {
            let re = -r + 2.0 * r * p as f64 / (n - 1) as f64;
            let im = -r + 2.0 * r * q as f64 / (n - 1) as f64;
            best = best.min(scaling_cost(v, m, Complex::new(re, im), noise_var));
        }
    }
    best
}

pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Minimizer of `scaling_cost` by golden-section search on the real part, then on the
/// imaginary part. The cost has no cross term between the two, so one pass is exact.
pub fn scaling_refined(v: &CVector, m: usize, noise_var: f64) -> C64 {
    let r = 2.0 / (v.norm_squared() + noise_var).sqrt();
    let tol = 1e-12 * r;
    let re = golden_section(|x| scaling_cost(v, m, Complex::new(x, 0.0), noise_var), -r, r, tol);
    let im = golden_section(|y| scaling_cost(v, m, Complex::new(re, y), noise_var), -r, r, tol);
    Complex::new(re, im)
}

/// Every way of keeping `keep` of the pairs of `full`.
pub fn sub_matchings(full: &MatchingMatrix, keep: usize) -> Vec<MatchingMatrix> {
    let pairs = full.pairs();
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    fn rec(
        pairs: &[(usize, usize)],
        start: usize,
        keep: usize,
        chosen: &mut Vec<(usize, usize)>,
        size: usize,
        out: &mut Vec<MatchingMatrix>,
    ) {
        if chosen.len() == keep {
            out.push(MatchingMatrix::from_pairs(size, chosen).unwrap());
            return;
        }
        for i in start..pairs.len() {
            chosen.push(pairs[i]);
            rec(pairs, i + 1, keep, chosen, size, out);
            chosen.pop();
        }
    }
    rec(&pairs, 0, keep, &mut chosen, full.size(), &mut out);
    out
}

/// Lowest-scoring sub-matching of `full` with `budget` connected ports.
pub fn best_sub_matching<S: ChannelScore>(
    cascade: &LensCascade,
    full: &MatchingMatrix,
    scorer: &S,
    budget: usize,
) -> (MatchingMatrix, f64) {
    sub_matchings(full, budget / 2)
        .into_iter()
        .map(|m| {
            let s = scorer.score(&cascade.effective(&m)).unwrap();
            (m, s)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
}

/// Beam-domain cascade on 8 ports where two BS beams feed two user beams and every
/// other beam is weak. Returns the cascade, the full matching that links the planted
/// beams, and the two planted pairs.
pub fn planted_two_beam<R: Rng>(
    users: usize,
    antennas: usize,
    leak: f64,
    rng: &mut R,
) -> (LensCascade, MatchingMatrix, [(usize, usize); 2]) {
    let k = 8;
    let mut ports: Vec<usize> = (0..k).collect();
    for i in (1..k).rev() {
        let j = rng.random_range(0..=i);
        ports.swap(i, j);
    }
    let pairs: Vec<(usize, usize)> = ports.chunks(2).map(|c| (c[0], c[1])).collect();
    let planted = [pairs[0], pairs[1]];
    let mut left = cmat(users, k, rng) * Complex::new(leak, 0.0);
    let mut right = cmat(k, antennas, rng) * Complex::new(leak, 0.0);
    for &(bs_beam, user_beam) in &planted {
        right.set_row(bs_beam, &cmat(1, antennas, rng).row(0));
        left.set_column(user_beam, &cmat(users, 1, rng).column(0));
    }
    let full = MatchingMatrix::from_pairs(k, &pairs).unwrap();
    let cascade = LensCascade {
        left,
        right,
        direct: CMatrix::zeros(users, antennas),
    };
    (cascade, full, planted)
}

pub fn same_support(a: &MatchingMatrix, b: &MatchingMatrix) -> bool {
    a.is_subset_of(b) && b.is_subset_of(a)
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Two-port selection by direct summation over the raw matrices.
pub fn two_port_scan(h_bs: &CMatrix, h_su: &CVector, u: &CMatrix) -> (usize, usize) {
    let k = u.nrows();
    let bs: Vec<f64> = (0..k)
        .map(|i| {
            (0..h_bs.ncols())
                .map(|n| {
                    let mut s = Complex::new(0.0, 0.0);
                    for q in 0..k {
                        s += u[(i, q)] * h_bs[(q, n)];
                    }
                    s.norm_sqr()
                })
                .sum()
        })
        .collect();
    let user: Vec<f64> = (0..k)
        .map(|j| {
            let mut s = Complex::new(0.0, 0.0);
            for q in 0..k {
                s += h_su[q].conj() * u[(q, j)];
            }
            s.norm_sqr()
        })
        .collect();
    let i = argmax(&bs);
    let mut j = argmax(&user);
    if j == i {
        let mut masked = user.clone();
        masked[i] = f64::NEG_INFINITY;
        j = argmax(&masked);
    }
    (i, j)
}
