//! Seeded Monte Carlo runs. Every scheme in a trial sees the same channel realization;
//! designs use the (possibly corrupted) estimate and are scored on the true channels.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use redris_core::baselines::{
    random_switching, reflective_effective_channel, reflective_ris_optimize,
    reflective_ris_optimize_multicell, ReflectiveOptions,
};
use redris_core::channel::{
    corrupt_channel_set, dbm_to_watts, gen_channel_set, ChannelScenario, ChannelSet, CsiErrorModel,
    DftOperator,
};
use redris_core::linalg::{CMatrix, C64};
use redris_core::multicell::{evaluate_multicell_with_scalings, optimal_scalings, optimize_multicell};
use redris_core::perm_opt::Regularization;
use redris_core::precoding::{mmse_precoder, Precoder};
use redris_core::reduction::{two_port_matching, universal_reduce, universal_reduce_multicell};
use redris_core::single_cell::{evaluate_with_precoder, optimize_single_cell, AlternatingOptions};
use redris_core::{effective_channel, MatchingMatrix};
use serde::{Deserialize, Serialize};

use crate::config::{ScenarioConfig, Scheme};

const STREAM_CHANNEL: u64 = 0;
const STREAM_CSI: u64 = 1;

/// Generator for sub-stream `sub` of trial `trial`: ChaCha8 keyed by `seed`, with the
/// stream id `trial · 256 + sub`.
pub fn trial_rng(seed: u64, trial: usize, sub: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((trial as u64) << 8) | sub);
    rng
}

/// One `(scheme, trial, K, M, κ, P)` cell of the results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub scheme: Scheme,
    pub trial: usize,
    #[serde(rename = "P_dBm")]
    pub p_dbm: f64,
    #[serde(rename = "K")]
    pub ports: usize,
    #[serde(rename = "M")]
    pub users: usize,
    #[serde(rename = "N")]
    pub bs_antennas: usize,
    #[serde(rename = "Np")]
    pub connected: usize,
    pub kappa: f64,
    #[serde(rename = "sum_rate_bps_hz")]
    pub sum_rate: f64,
    pub mmse: Vec<f64>,
    pub iterations: usize,
    pub wall_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Record wall-clock time per scheme. Off by default so that output is reproducible.
    pub timing: bool,
    /// Worker threads; rayon's default when absent.
    pub threads: Option<usize>,
}

/// Runs every trial of `config` with default options.
pub fn run_experiment(config: &ScenarioConfig) -> anyhow::Result<Vec<TrialRecord>> {
    run_experiment_with(config, &RunOptions::default())
}

pub fn run_experiment_with(config: &ScenarioConfig, opts: &RunOptions) -> anyhow::Result<Vec<TrialRecord>> {
    config.validate()?;
    let run = || -> Vec<TrialRecord> {
        let mut records = Vec::new();
        for &k in &config.port_values() {
            for &m in &config.user_values() {
                let scenario = config.channel_scenario(k, m);
                let per_trial: Vec<Vec<TrialRecord>> = (0..config.trials)
                    .into_par_iter()
                    .map(|t| run_trial(config, &scenario, t, opts.timing))
                    .collect();
                records.extend(per_trial.into_iter().flatten());
            }
        }
        sort_records(config, &mut records);
        records
    };
    match opts.threads {
        Some(n) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()?
            .install(run)),
        None => Ok(run()),
    }
}

/// Orders records by (scheme as listed in the config, K, M, κ, P, trial).
fn sort_records(config: &ScenarioConfig, records: &mut [TrialRecord]) {
    let scheme_pos = |s: Scheme| config.schemes.iter().position(|&x| x == s).unwrap_or(usize::MAX);
    let pos = |v: &[f64], x: f64| v.iter().position(|&y| y == x).unwrap_or(usize::MAX);
    let kappas = config.kappa_values();
    let powers = config.power_values();
    let ports = config.port_values();
    let users = config.user_values();
    records.sort_by_key(|r| {
        (
            scheme_pos(r.scheme),
            ports.iter().position(|&k| k == r.ports),
            users.iter().position(|&m| m == r.users),
            pos(&kappas, r.kappa),
            pos(&powers, r.p_dbm),
            r.trial,
        )
    });
}

/// What a scheme hands to the scorer: a surface configuration and the transmit/receive
/// design computed on the estimated channels.
#[derive(Clone)]
enum Design {
    Lens {
        matching: MatchingMatrix,
        tx: TxDesign,
    },
    Reflective {
        phases: redris_core::baselines::PhaseShiftMatrix,
        tx: TxDesign,
    },
}

#[derive(Clone)]
enum TxDesign {
    Precoder(Precoder),
    Scalings(Vec<C64>),
}

#[derive(Clone)]
struct Outcome {
    design: Design,
    iterations: usize,
    wall_ms: f64,
}

struct TrialContext<'a> {
    config: &'a ScenarioConfig,
    truth: &'a ChannelSet,
    estimate: &'a ChannelSet,
    dft: &'a DftOperator,
    power: f64,
    noise_var: f64,
    trial: usize,
    timing: bool,
}

fn run_trial(
    config: &ScenarioConfig,
    scenario: &ChannelScenario,
    trial: usize,
    timing: bool,
) -> Vec<TrialRecord> {
    let k = scenario.ris_ports;
    let m = scenario.users;
    let template = |scheme: Scheme, p_dbm: f64, kappa: f64| TrialRecord {
        scheme,
        trial,
        p_dbm,
        ports: k,
        users: m,
        bs_antennas: scenario.tx_width(),
        connected: k,
        kappa,
        sum_rate: f64::NAN,
        mmse: Vec::new(),
        iterations: 0,
        wall_ms: 0.0,
        error: None,
    };
    let mut out = Vec::new();
    let truth = gen_channel_set(scenario, &mut trial_rng(config.seed, trial, STREAM_CHANNEL));
    let dft = DftOperator::new(k);
    let (truth, dft) = match (truth, dft) {
        (Ok(t), Ok(d)) => (t, d),
        (Err(e), _) | (_, Err(e)) => {
            log::warn!("trial {trial}: channel generation failed: {e}");
            for &kappa in &config.kappa_values() {
                for &p in &config.power_values() {
                    for &s in &config.schemes {
                        let mut r = template(s, p, kappa);
                        r.error = Some(e.to_string());
                        out.push(r);
                    }
                }
            }
            return out;
        }
    };

    for &kappa in &config.kappa_values() {
        let model = CsiErrorModel::new(kappa).expect("validated kappa");
        let estimate = corrupt_channel_set(&truth, &model, &mut trial_rng(config.seed, trial, STREAM_CSI));
        for &p_dbm in &config.power_values() {
            let ctx = TrialContext {
                config,
                truth: &truth,
                estimate: &estimate,
                dft: &dft,
                power: dbm_to_watts(p_dbm),
                noise_var: truth.noise_var,
                trial,
                timing,
            };
            let mut full_cache: Option<Result<Outcome, String>> = None;
            for &scheme in &config.schemes {
                let mut rec = template(scheme, p_dbm, kappa);
                let result = ctx.run_scheme(scheme, &mut full_cache).and_then(|o| {
                    let (sum_rate, mmse, connected) = ctx.score(&o.design)?;
                    Ok((o, sum_rate, mmse, connected))
                });
                match result {
                    Ok((o, sum_rate, mmse, connected)) => {
                        rec.sum_rate = sum_rate;
                        rec.mmse = mmse;
                        rec.connected = connected;
                        rec.iterations = o.iterations;
                        rec.wall_ms = o.wall_ms;
                    }
                    Err(e) => {
                        log::warn!("trial {trial}, {scheme} at {p_dbm} dBm: {e}");
                        rec.error = Some(e);
                    }
                }
                out.push(rec);
            }
        }
    }
    out
}

impl TrialContext<'_> {
    fn alternating(&self) -> AlternatingOptions {
        AlternatingOptions {
            gamma0: self.config.optimizer.regularization(),
            eps: self.config.optimizer.eps,
            max_iter: self.config.optimizer.max_iter,
            init: None,
        }
    }

    fn reflective_options(&self) -> ReflectiveOptions {
        ReflectiveOptions {
            gamma0: Regularization::Relative(self.config.optimizer.reflective_gamma0_scale),
            eps: self.config.optimizer.eps,
            max_iter: self.config.optimizer.max_iter,
            init: None,
        }
    }

    fn multi_cell(&self) -> bool {
        self.config.multi_cell
    }

    fn scheme_rng(&self, scheme: Scheme) -> ChaCha8Rng {
        trial_rng(self.config.seed, self.trial, scheme.stream())
    }

    /// Transmit/receive design for a fixed lens matching on the estimated channels.
    fn lens_tx(&self, matching: &MatchingMatrix) -> Result<TxDesign, String> {
        let h = effective_channel(self.estimate, self.dft, matching).map_err(|e| e.to_string())?;
        self.tx_for(&h)
    }

    fn tx_for(&self, h: &CMatrix) -> Result<TxDesign, String> {
        if self.multi_cell() {
            optimal_scalings(h, self.power, self.noise_var)
                .map(TxDesign::Scalings)
                .map_err(|e| e.to_string())
        } else {
            mmse_precoder(h, self.power, self.noise_var)
                .map(TxDesign::Precoder)
                .map_err(|e| e.to_string())
        }
    }

    fn optimize_full(&self) -> Result<Outcome, String> {
        let start = Instant::now();
        let mut rng = self.scheme_rng(Scheme::RedrisFull);
        let opts = self.alternating();
        let (matching, tx, iterations) = if self.multi_cell() {
            let sol = optimize_multicell(
                self.estimate,
                self.dft,
                self.power,
                self.noise_var,
                &opts,
                &mut rng,
            )
            .map_err(|e| e.to_string())?;
            (sol.matching, TxDesign::Scalings(sol.alphas), sol.iterations)
        } else {
            let sol = optimize_single_cell(
                self.estimate,
                self.dft,
                self.power,
                self.noise_var,
                &opts,
                &mut rng,
            )
            .map_err(|e| e.to_string())?;
            (sol.matching, TxDesign::Precoder(sol.precoder), sol.iterations)
        };
        Ok(Outcome {
            design: Design::Lens { matching, tx },
            iterations,
            wall_ms: self.elapsed(start),
        })
    }

    fn elapsed(&self, start: Instant) -> f64 {
        if self.timing {
            start.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        }
    }

    fn run_scheme(
        &self,
        scheme: Scheme,
        full_cache: &mut Option<Result<Outcome, String>>,
    ) -> Result<Outcome, String> {
        match scheme {
            Scheme::RedrisFull => {
                let o = full_cache.get_or_insert_with(|| self.optimize_full());
                o.clone()
            }
            Scheme::RedrisPartial => {
                let full = full_cache.get_or_insert_with(|| self.optimize_full()).clone()?;
                let start = Instant::now();
                let Design::Lens { matching, .. } = &full.design else {
                    unreachable!("full scheme designs a lens matching")
                };
                let budget = self.config.budget_for(self.dft.size());
                let reduce = if self.multi_cell() {
                    universal_reduce_multicell
                } else {
                    universal_reduce
                };
                let reduced = reduce(
                    matching,
                    self.estimate,
                    self.dft,
                    self.power,
                    self.noise_var,
                    budget,
                )
                .map_err(|e| e.to_string())?;
                let tx = self.lens_tx(&reduced)?;
                Ok(Outcome {
                    design: Design::Lens {
                        matching: reduced,
                        tx,
                    },
                    iterations: full.iterations,
                    wall_ms: full.wall_ms + self.elapsed(start),
                })
            }
            Scheme::RedrisTwoPort => {
                let start = Instant::now();
                let matching = two_port_matching(self.estimate, self.dft).map_err(|e| e.to_string())?;
                let tx = self.lens_tx(&matching)?;
                Ok(Outcome {
                    design: Design::Lens { matching, tx },
                    iterations: 0,
                    wall_ms: self.elapsed(start),
                })
            }
            Scheme::RedrisRandom => {
                let start = Instant::now();
                let mut rng = self.scheme_rng(scheme);
                let matching = random_switching(self.dft.size(), &mut rng).map_err(|e| e.to_string())?;
                let tx = self.lens_tx(&matching)?;
                Ok(Outcome {
                    design: Design::Lens { matching, tx },
                    iterations: 0,
                    wall_ms: self.elapsed(start),
                })
            }
            Scheme::Reflective => {
                let start = Instant::now();
                let mut rng = self.scheme_rng(scheme);
                let opts = self.reflective_options();
                let (phases, tx, iterations) = if self.multi_cell() {
                    let sol = reflective_ris_optimize_multicell(
                        self.estimate,
                        self.power,
                        self.noise_var,
                        &opts,
                        &mut rng,
                    )
                    .map_err(|e| e.to_string())?;
                    (sol.phases, TxDesign::Scalings(sol.alphas), sol.iterations)
                } else {
                    let sol =
                        reflective_ris_optimize(self.estimate, self.power, self.noise_var, &opts, &mut rng)
                            .map_err(|e| e.to_string())?;
                    (sol.phases, TxDesign::Precoder(sol.precoder), sol.iterations)
                };
                Ok(Outcome {
                    design: Design::Reflective { phases, tx },
                    iterations,
                    wall_ms: self.elapsed(start),
                })
            }
        }
    }

    /// Sum rate, per-user MMSE, and number of connected ports on the true channels.
    fn score(&self, design: &Design) -> Result<(f64, Vec<f64>, usize), String> {
        let (h, tx, connected) = match design {
            Design::Lens { matching, tx } => (
                effective_channel(self.truth, self.dft, matching).map_err(|e| e.to_string())?,
                tx,
                matching.rank(),
            ),
            Design::Reflective { phases, tx } => (
                reflective_effective_channel(self.truth, phases).map_err(|e| e.to_string())?,
                tx,
                phases.size(),
            ),
        };
        let ev = match tx {
            TxDesign::Precoder(p) => evaluate_with_precoder(&h, p, self.noise_var),
            TxDesign::Scalings(a) => evaluate_multicell_with_scalings(&h, a, self.power, self.noise_var),
        }
        .map_err(|e| e.to_string())?;
        Ok((ev.sum_rate, ev.mmse, connected))
    }
}
