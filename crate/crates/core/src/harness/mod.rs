//! Batch experiments: M-sweeps, success heat maps and speedup reports.
//!
//! Every trial is a pure function of the configuration and its position
//! `(s, protocol, M, trial)`. Seeds are derived from that position, never from
//! draw order, so the worker count changes wall time and nothing else.
//!
//! Seed derivation, with `mix(w₁, …, w_k) = f(… f(f(w₁) ^ w₂) … ^ w_k)` and
//! `f` the splitmix64 finalizer:
//!
//! * trial stream: `mix(seed, s, tag, M, trial)`, tag 1 for CS and 2 for no CS;
//! * Hamiltonian: `mix(seed, s, 0, M, trial)`, shared by both protocols so the
//!   curves are paired; with `fixed_hamiltonian` it is `mix(seed, s, 0, 0, 0)`.

mod config;
mod heatmap;
mod output;
mod report;
pub mod selftest;
mod svg;
mod sweep;

pub use config::{grid_values, ExperimentConfig, MeasurementSpec, OutputPaths, SparsitySpec, DEFAULT_GRID, DEFAULT_TRIALS};
pub use heatmap::{run_heatmap, spearman, HeatCell, HeatGrid};
pub use output::{
    heatmap_csv, meta_path, read_sweep_csv, sweep_csv, sweep_rows, write_outputs, RunMeta, SweepRow, HEATMAP_HEADER, SWEEP_HEADER,
};
pub use report::{pair_reports, speedup_report, speedup_reports, transition_point, Speedup, SpeedupReport};
pub use svg::{heatmap_svg, sweep_svg};
pub use sweep::{run_sweep, SweepCurve, SweepPair, SweepPoint};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hamiltonian::{random_hamiltonian, SparseHamiltonian};
use crate::pipeline::{run_trial, Protocol, TrialOptions, TrialResult, TrialSeeds};

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn mix_seed(words: &[u64]) -> u64 {
    words.iter().fold(0, |h, &w| splitmix64(h ^ w))
}

/// One trial's position in an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialKey {
    pub s: usize,
    pub protocol: Protocol,
    pub m: usize,
    pub trial: usize,
}

impl TrialKey {
    pub fn trial_seed(&self, master: u64) -> u64 {
        mix_seed(&[master, self.s as u64, self.protocol.tag(), self.m as u64, self.trial as u64])
    }

    pub fn hamiltonian_seed(&self, master: u64, fixed: bool) -> u64 {
        if fixed {
            mix_seed(&[master, self.s as u64, 0, 0, 0])
        } else {
            mix_seed(&[master, self.s as u64, 0, self.m as u64, self.trial as u64])
        }
    }
}

/// Hamiltonian used at `key`.
pub fn trial_hamiltonian(cfg: &ExperimentConfig, key: &TrialKey) -> Result<SparseHamiltonian> {
    let mut rng = ChaCha8Rng::seed_from_u64(key.hamiltonian_seed(cfg.seed, cfg.fixed_hamiltonian));
    random_hamiltonian(cfg.n, key.s, cfg.policy, &mut rng)
}

/// Run the trial at `key`.
pub fn run_keyed_trial(cfg: &ExperimentConfig, opts: &TrialOptions, key: &TrialKey) -> Result<TrialResult> {
    let h = trial_hamiltonian(cfg, key)?;
    let seeds = TrialSeeds {
        master: cfg.seed,
        trial: key.trial_seed(cfg.seed),
        circuit: None,
    };
    let mut result = run_trial(key.protocol, &h, cfg.eta_beta, key.m, seeds, opts)?;
    result.policy = Some(cfg.policy);
    Ok(result)
}

/// What the aggregates need from one trial.
#[derive(Debug, Clone, PartialEq)]
pub enum TrialOutcome {
    Done { error: f64, success: bool, converged: bool },
    Failed(String),
}

impl TrialOutcome {
    fn of(result: Result<TrialResult>) -> Self {
        match result {
            Ok(r) if r.metrics.normalized_error.is_finite() => TrialOutcome::Done {
                error: r.metrics.normalized_error,
                success: r.metrics.success,
                converged: r.solver.converged,
            },
            Ok(r) => TrialOutcome::Failed(format!("non-finite error {}", r.metrics.normalized_error)),
            Err(e) => TrialOutcome::Failed(e.to_string()),
        }
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    if jobs == 0 {
        return Err(Error::Config("jobs must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Resource(e.to_string()))
}

/// Run every key on `jobs` workers; the output is in key order.
pub fn run_keys(cfg: &ExperimentConfig, keys: &[TrialKey], jobs: usize) -> Result<Vec<TrialOutcome>> {
    let opts = cfg.trial_options();
    let pool = pool(jobs)?;
    Ok(pool.install(|| {
        keys.par_iter()
            .map(|key| TrialOutcome::of(run_keyed_trial(cfg, &opts, key)))
            .collect()
    }))
}

/// Type-7 sample quantile of sorted data.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}
