//! Port reduction: greedy removal of connected pairs down to a connection budget, and the
//! closed-form two-port selection for a single user.

use alloc::format;
use alloc::vec::Vec;

use crate::cascade::LensCascade;
use crate::channel::{ChannelSet, DftOperator};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::matching::MatchingMatrix;
use crate::multicell::{multicell_objective, optimal_scalings};
use crate::precoding::{mmse_precoder, mse_for_channel};

/// Scores an effective channel; lower is better.
pub trait ChannelScore {
    fn score(&self, h: &CMatrix) -> Result<f64>;
}

/// Single-cell MSE with the MMSE precoder recomputed for the candidate.
#[derive(Debug, Clone, Copy)]
pub struct SingleCellScore {
    pub power: f64,
    pub noise_var: f64,
}

impl ChannelScore for SingleCellScore {
    fn score(&self, h: &CMatrix) -> Result<f64> {
        let precoder = mmse_precoder(h, self.power, self.noise_var)?;
        Ok(mse_for_channel(h, &precoder, self.noise_var))
    }
}

/// Multi-cell sum objective with the per-user scalings recomputed for the candidate.
#[derive(Debug, Clone, Copy)]
pub struct MultiCellScore {
    pub power: f64,
    pub noise_var: f64,
}

impl ChannelScore for MultiCellScore {
    fn score(&self, h: &CMatrix) -> Result<f64> {
        let alphas = optimal_scalings(h, self.power, self.noise_var)?;
        Ok(multicell_objective(h, &alphas, self.power, self.noise_var))
    }
}

/// One removal: the pair taken out and the score of every candidate at that step.
#[derive(Debug, Clone)]
pub struct ReductionStep {
    pub removed: (usize, usize),
    pub score: f64,
    pub rank_after: usize,
    pub candidates: Vec<((usize, usize), f64)>,
}

#[derive(Debug, Clone)]
pub struct ReductionTrace {
    pub matching: MatchingMatrix,
    pub steps: Vec<ReductionStep>,
}

/// Removes one pair at a time from `full`, each time the pair whose removal leaves the
/// lowest score, until `budget` ports stay connected. Candidates are scored through a
/// rank-2 downdate of the current effective channel.
pub fn universal_reduce_with<S: ChannelScore>(
    cascade: &LensCascade,
    full: &MatchingMatrix,
    scorer: &S,
    budget: usize,
) -> Result<ReductionTrace> {
    if !budget.is_multiple_of(2) {
        return Err(Error::Domain(format!("port budget {budget} must be even")));
    }
    if full.size() != cascade.ports() {
        return Err(Error::DimensionMismatch(format!(
            "matching has {} ports, channels have {}",
            full.size(),
            cascade.ports()
        )));
    }
    let mut matching = full.clone();
    let mut steps = Vec::new();
    if budget >= matching.rank() {
        if budget > matching.rank() {
            log::warn!(
                "port budget {budget} exceeds the {} connected ports; nothing removed",
                matching.rank()
            );
        }
        return Ok(ReductionTrace { matching, steps });
    }

    let mut h = cascade.effective(&matching);
    while matching.rank() > budget {
        let mut candidates = Vec::with_capacity(matching.num_pairs());
        let mut best: Option<((usize, usize), f64, CMatrix)> = None;
        for (i, j) in matching.pairs() {
            let h_without = &h - pair_contribution(cascade, i, j);
            let s = scorer.score(&h_without)?;
            candidates.push(((i, j), s));
            if best.as_ref().is_none_or(|b| s < b.1) {
                best = Some(((i, j), s, h_without));
            }
        }
        let ((i, j), score, h_next) = best.expect("a matching above budget has pairs");
        matching.disconnect(i, j)?;
        h = h_next;
        steps.push(ReductionStep {
            removed: (i, j),
            score,
            rank_after: matching.rank(),
            candidates,
        });
    }
    Ok(ReductionTrace { matching, steps })
}

/// `L e_i R_j + L e_j R_i`, the part of `LΥR` carried by the pair `(i, j)`.
fn pair_contribution(cascade: &LensCascade, i: usize, j: usize) -> CMatrix {
    let li = cascade.left.column(i);
    let lj = cascade.left.column(j);
    li * cascade.right.row(j) + lj * cascade.right.row(i)
}

/// Single-cell reduction of `full` to `budget` connected ports.
pub fn universal_reduce(
    full: &MatchingMatrix,
    channels: &ChannelSet,
    dft: &DftOperator,
    power: f64,
    noise_var: f64,
    budget: usize,
) -> Result<MatchingMatrix> {
    let cascade = LensCascade::new(channels, dft)?;
    let scorer = SingleCellScore { power, noise_var };
    Ok(universal_reduce_with(&cascade, full, &scorer, budget)?.matching)
}

/// Multi-cell reduction of `full` to `budget` connected ports.
pub fn universal_reduce_multicell(
    full: &MatchingMatrix,
    channels: &ChannelSet,
    dft: &DftOperator,
    power: f64,
    noise_var: f64,
    budget: usize,
) -> Result<MatchingMatrix> {
    let cascade = LensCascade::new(channels, dft)?;
    let scorer = MultiCellScore { power, noise_var };
    Ok(universal_reduce_with(&cascade, full, &scorer, budget)?.matching)
}

/// Energy captured by each BS-side beam: `Σ_n |(U H_bs)_in|²`.
pub fn bs_beam_energies(h_bs: &CMatrix, dft: &DftOperator) -> Result<Vec<f64>> {
    check_ports(h_bs.nrows(), dft)?;
    let h1 = dft.matrix() * h_bs;
    Ok(h1.row_iter().map(|r| r.norm_squared()).collect())
}

/// Energy captured by each user-side beam: `|(h_suᴴ U)_j|²`.
pub fn user_beam_energies(h_su: &CVector, dft: &DftOperator) -> Result<Vec<f64>> {
    check_ports(h_su.len(), dft)?;
    let h2 = h_su.adjoint() * dft.matrix();
    Ok(h2.iter().map(|v| v.norm_sqr()).collect())
}

fn check_ports(k: usize, dft: &DftOperator) -> Result<()> {
    if k != dft.size() {
        return Err(Error::DimensionMismatch(format!(
            "channel has {k} ports, DFT operator has size {}",
            dft.size()
        )));
    }
    Ok(())
}

/// Index of the largest entry, lowest index on ties, optionally skipping one index.
fn argmax(values: &[f64], skip: Option<usize>) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if Some(i) == skip {
            continue;
        }
        if best.is_none_or(|b| v > values[b]) {
            best = Some(i);
        }
    }
    best
}

/// Two-port selection for one user: `î` maximizes the BS-side beam energy and `ĵ` the
/// user-side beam energy. When both coincide `ĵ` falls back to the second-best user beam.
pub fn two_port_select(h_bs: &CMatrix, h_su: &CVector, dft: &DftOperator) -> Result<(usize, usize)> {
    if dft.size() < 2 {
        return Err(Error::InvalidDimension(
            "two-port selection needs at least two ports".into(),
        ));
    }
    let e1 = bs_beam_energies(h_bs, dft)?;
    let e2 = user_beam_energies(h_su, dft)?;
    let i = argmax(&e1, None).expect("nonempty");
    let mut j = argmax(&e2, None).expect("nonempty");
    if j == i {
        j = argmax(&e2, Some(i)).expect("at least two ports");
    }
    Ok((i, j))
}

/// Matching that connects only the two selected ports.
pub fn two_port_matching(channels: &ChannelSet, dft: &DftOperator) -> Result<MatchingMatrix> {
    if channels.h_su.ncols() != 1 {
        return Err(Error::InvalidDimension(format!(
            "two-port selection is for a single user, got {}",
            channels.h_su.ncols()
        )));
    }
    let h_su: CVector = channels.h_su.column(0).into_owned();
    let (i, j) = two_port_select(&channels.h_bs, &h_su, dft)?;
    MatchingMatrix::from_pairs(dft.size(), &[(i, j)])
}
