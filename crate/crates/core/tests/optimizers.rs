mod common;

use common::*;
use nalgebra::Complex;
use rand::Rng;
use redris_core::channel::{gen_channel_set, make_dft_operator, ChannelScenario, ChannelSet, DftOperator};
use redris_core::effective_channel;
use redris_core::linalg::{CMatrix, C64};
use redris_core::matching::MatchingMatrix;
use redris_core::multicell::{evaluate_multicell, multicell_objective, optimal_scalings, optimize_multicell};
use redris_core::perm_opt::all_matchings;
use redris_core::precoding::{mmse_precoder, receive_scaling_multicell, system_mse};
use redris_core::single_cell::{evaluate_solution, optimize_single_cell, AlternatingOptions};

/// Channels whose beam-domain factors are `left` (M×K) and `right` (K×N).
fn from_beams(dft: &DftOperator, left: &CMatrix, right: &CMatrix) -> ChannelSet {
    let u = dft.matrix();
    ChannelSet {
        h_bs: u.adjoint() * right,
        h_su: (left * u.adjoint()).adjoint(),
        h_bu: CMatrix::zeros(right.ncols(), left.nrows()),
        noise_var: 0.01,
    }
}

fn mse_of(ch: &ChannelSet, dft: &DftOperator, m: &MatchingMatrix, p: f64) -> f64 {
    let h = effective_channel(ch, dft, m).unwrap();
    let pre = mmse_precoder(&h, p, ch.noise_var).unwrap();
    system_mse(ch, dft, m, &pre, ch.noise_var).unwrap()
}

#[test]
fn single_cell_finds_the_dominant_matching() {
    let dft = make_dft_operator(4).unwrap();
    let mut left = CMatrix::zeros(1, 4);
    left[(0, 0)] = Complex::new(1.0, 0.0);
    let mut right = CMatrix::from_element(4, 2, Complex::new(0.1, 0.0));
    right.set_row(
        1,
        &CMatrix::from_row_slice(1, 2, &[Complex::new(1.0, 0.0), Complex::new(0.0, 1.0)]).row(0),
    );
    let ch = from_beams(&dft, &left, &right);
    let brute = all_matchings(4)
        .unwrap()
        .into_iter()
        .min_by(|a, b| mse_of(&ch, &dft, a, 1.0).total_cmp(&mse_of(&ch, &dft, b, 1.0)))
        .unwrap();
    for seed in 0..10 {
        let sol = optimize_single_cell(
            &ch,
            &dft,
            1.0,
            ch.noise_var,
            &AlternatingOptions::default(),
            &mut rng(seed),
        )
        .unwrap();
        assert_eq!(sol.matching, brute);
    }
}

#[test]
fn single_cell_trace_and_stop_rule() {
    let dft = make_dft_operator(16).unwrap();
    let scenario = ChannelScenario::single_cell(4, 16, 16);
    let p = 1.0;
    for seed in 0..20 {
        let mut r = rng(100 + seed);
        let ch = gen_channel_set(&scenario, &mut r).unwrap();
        let opts = AlternatingOptions::default();
        let sol = optimize_single_cell(&ch, &dft, p, ch.noise_var, &opts, &mut r).unwrap();
        assert!(sol.mse() <= sol.mse_trace[0]);
        for (t, m) in sol.matching_trace.iter().enumerate() {
            assert!(m.satisfies_invariants());
            let e = mse_of(&ch, &dft, m, p);
            assert!((e - sol.mse_trace[t]).abs() <= 1e-10 * e.max(1.0));
        }
        let n = sol.mse_trace.len();
        if sol.converged {
            let (a, b) = (sol.mse_trace[n - 2], sol.mse_trace[n - 1]);
            assert!((b - a).abs() < opts.eps * a);
        } else {
            assert_eq!(sol.iterations, opts.max_iter);
        }
        let reported = sol.mmse.iter().sum::<f64>();
        assert!((reported - sol.mse()).abs() <= 1e-10 * reported.max(1.0));
    }
}

#[test]
fn single_cell_beats_random_switching() {
    let dft = make_dft_operator(16).unwrap();
    let scenario = ChannelScenario::single_cell(4, 16, 16);
    let p = 1.0;
    let mut wins = 0;
    for seed in 0..100 {
        let mut r = rng(200 + seed);
        let ch = gen_channel_set(&scenario, &mut r).unwrap();
        let sol =
            optimize_single_cell(&ch, &dft, p, ch.noise_var, &AlternatingOptions::default(), &mut r).unwrap();
        let random = MatchingMatrix::random(16, &mut r).unwrap();
        let rand_rate = evaluate_solution(&ch, &dft, &random, p, ch.noise_var)
            .unwrap()
            .sum_rate;
        wins += usize::from(sol.sum_rate >= rand_rate);
    }
    assert!(wins >= 90, "won {wins} of 100");
}

fn orthogonal_two_cell(dft: &DftOperator) -> ChannelSet {
    // BS j radiates on beam j, user m listens on beam m + 2. The 5% leakage keeps every
    // own-cell gain nonzero; with exact zeros a user whose scaling starts at 0 drops out
    // of the matching step for good.
    let leak = Complex::new(0.05, 0.0);
    let mut left = CMatrix::from_element(2, 4, leak);
    left[(0, 2)] = Complex::new(1.0, 0.0);
    left[(1, 3)] = Complex::new(1.0, 0.0);
    let mut right = CMatrix::from_element(4, 2, leak);
    right[(0, 0)] = Complex::new(1.0, 0.0);
    right[(1, 1)] = Complex::new(1.0, 0.0);
    from_beams(dft, &left, &right)
}

#[test]
fn multicell_matches_exhaustive_search() {
    let dft = make_dft_operator(4).unwrap();
    let ch = orthogonal_two_cell(&dft);
    let p = 1.0;
    let objective = |m: &MatchingMatrix| {
        let h = effective_channel(&ch, &dft, m).unwrap();
        let a = optimal_scalings(&h, p, ch.noise_var).unwrap();
        multicell_objective(&h, &a, p, ch.noise_var)
    };
    let brute = all_matchings(4)
        .unwrap()
        .into_iter()
        .min_by(|a, b| objective(a).total_cmp(&objective(b)))
        .unwrap();
    assert_eq!(brute, MatchingMatrix::from_pairs(4, &[(0, 2), (1, 3)]).unwrap());
    for seed in 0..10 {
        let sol = optimize_multicell(
            &ch,
            &dft,
            p,
            ch.noise_var,
            &AlternatingOptions::default(),
            &mut rng(seed),
        )
        .unwrap();
        assert_eq!(sol.matching, brute);
        assert!(sol.objective() <= sol.objective_trace[0]);
    }
}

#[test]
fn scalings_are_coordinatewise_optimal() {
    let scenario = ChannelScenario::multi_cell(4, 16);
    let dft = make_dft_operator(16).unwrap();
    let p = 1e-2;
    let mut r = rng(300);
    for _ in 0..10 {
        let ch = gen_channel_set(&scenario, &mut r).unwrap();
        let m = MatchingMatrix::random(16, &mut r).unwrap();
        let h = effective_channel(&ch, &dft, &m).unwrap();
        let alphas = optimal_scalings(&h, p, ch.noise_var).unwrap();
        let best = multicell_objective(&h, &alphas, p, ch.noise_var);
        for _ in 0..50 {
            let u = r.random_range(0..4);
            let mut other = alphas.clone();
            let scale = alphas[u].norm().max(1e-30);
            other[u] += Complex::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)) * scale;
            assert!(best <= multicell_objective(&h, &other, p, ch.noise_var) * (1.0 + 1e-12));
        }
    }
}

#[test]
fn one_cell_reduces_to_the_scalar_link() {
    let scenario = ChannelScenario::multi_cell(1, 16);
    let dft = make_dft_operator(16).unwrap();
    let mut r = rng(301);
    let ch = gen_channel_set(&scenario, &mut r).unwrap();
    let p = 1.0;
    let sol = optimize_multicell(&ch, &dft, p, ch.noise_var, &AlternatingOptions::default(), &mut r).unwrap();
    let h = effective_channel(&ch, &dft, &sol.matching).unwrap();
    let v = nalgebra::DVector::from_element(1, h[(0, 0)] * p.sqrt());
    let alpha: C64 = receive_scaling_multicell(&v, 0, ch.noise_var).unwrap();
    assert!((alpha - sol.alphas[0]).norm() <= 1e-12 * alpha.norm());
}

#[test]
fn multicell_beats_random_switching() {
    let scenario = ChannelScenario::multi_cell(8, 64);
    let dft = make_dft_operator(64).unwrap();
    let p = 1.0;
    let mut wins = 0;
    for seed in 0..100 {
        let mut r = rng(400 + seed);
        let ch = gen_channel_set(&scenario, &mut r).unwrap();
        let sol =
            optimize_multicell(&ch, &dft, p, ch.noise_var, &AlternatingOptions::default(), &mut r).unwrap();
        let random = MatchingMatrix::random(64, &mut r).unwrap();
        let rand_rate = evaluate_multicell(&ch, &dft, &random, p, ch.noise_var)
            .unwrap()
            .sum_rate;
        wins += usize::from(sol.sum_rate >= rand_rate);
    }
    assert!(wins >= 90, "won {wins} of 100");
}
