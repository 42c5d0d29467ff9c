use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::SupportPolicy;
use crate::pauli::{check_qubits, signal_len};
use crate::pipeline::{NoCsOrder, TrialOptions, DEFAULT_THRESHOLD};
use crate::recovery::SolverOptions;

pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_GRID: usize = 16;

/// Which sparsities to run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SparsitySpec {
    Single(usize),
    List(Vec<usize>),
    /// `g` points `round(i·N/g)`, `i = 1..=g`.
    Grid(usize),
}

/// Which measurement counts to run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementSpec {
    List(Vec<usize>),
    Range { min: usize, max: usize, step: usize },
    Grid(usize),
}

/// `round(i·total/g)` for `i = 1..=g`, duplicates removed.
pub fn grid_values(total: usize, g: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (1..=g).map(|i| (2 * i * total + g) / (2 * g)).filter(|&v| v >= 1).collect();
    out.dedup();
    out
}

impl SparsitySpec {
    pub fn values(&self, n: usize) -> Vec<usize> {
        match self {
            SparsitySpec::Single(s) => vec![*s],
            SparsitySpec::List(v) => v.clone(),
            SparsitySpec::Grid(g) => grid_values(signal_len(n), *g),
        }
    }

    fn grid(&self) -> Option<usize> {
        match self {
            SparsitySpec::Grid(g) => Some(*g),
            _ => None,
        }
    }
}

impl MeasurementSpec {
    pub fn values(&self, n: usize) -> Vec<usize> {
        match self {
            MeasurementSpec::List(v) => v.clone(),
            MeasurementSpec::Range { min, max, step } => {
                if *step == 0 {
                    return Vec::new();
                }
                (*min..=*max).step_by(*step).collect()
            }
            MeasurementSpec::Grid(g) => grid_values(signal_len(n), *g),
        }
    }

    fn grid(&self) -> Option<usize> {
        match self {
            MeasurementSpec::Grid(g) => Some(*g),
            _ => None,
        }
    }
}

/// Optional output locations; the CLI fills these from flags.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputPaths {
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    pub eta_beta: f64,
    #[serde(default = "default_policy")]
    pub policy: SupportPolicy,
    pub sparsity: SparsitySpec,
    pub measurements: MeasurementSpec,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default)]
    pub circuit_length: Option<usize>,
    #[serde(default)]
    pub solver: SolverOptions,
    /// `None` picks the order paired with the policy.
    #[serde(default)]
    pub nocs_order: Option<NoCsOrder>,
    #[serde(default)]
    pub noise_sigma: f64,
    /// Reuse one Hamiltonian for every trial of a sparsity (diagnostic).
    #[serde(default)]
    pub fixed_hamiltonian: bool,
    #[serde(default)]
    pub output: OutputPaths,
}

fn default_policy() -> SupportPolicy {
    SupportPolicy::UniformRandom
}

fn default_trials() -> usize {
    DEFAULT_TRIALS
}

fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}

impl ExperimentConfig {
    /// Defaults everywhere except the required fields.
    pub fn new(n: usize, eta_beta: f64, sparsity: SparsitySpec, measurements: MeasurementSpec) -> Self {
        Self {
            n,
            eta_beta,
            policy: default_policy(),
            sparsity,
            measurements,
            trials: DEFAULT_TRIALS,
            seed: 0,
            threshold: DEFAULT_THRESHOLD,
            circuit_length: None,
            solver: SolverOptions::default(),
            nocs_order: None,
            noise_sigma: 0.0,
            fixed_hamiltonian: false,
            output: OutputPaths::default(),
        }
    }

    pub fn sparsities(&self) -> Vec<usize> {
        self.sparsity.values(self.n)
    }

    pub fn measurement_counts(&self) -> Vec<usize> {
        self.measurements.values(self.n)
    }

    pub fn nocs_order(&self) -> NoCsOrder {
        self.nocs_order.unwrap_or_else(|| NoCsOrder::for_policy(self.policy))
    }

    pub fn trial_options(&self) -> TrialOptions {
        TrialOptions {
            circuit_length: self.circuit_length,
            solver: self.solver,
            threshold: self.threshold,
            weight_ordered: true,
            nocs_order: self.nocs_order(),
            noise_sigma: self.noise_sigma,
        }
    }

    /// Every grid point must satisfy the trial preconditions.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        check_qubits(self.n)?;
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if !(self.eta_beta > 0.0 && self.eta_beta.is_finite()) {
            return bad(format!("eta_beta must be positive and finite, got {}", self.eta_beta));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return bad(format!("threshold must be positive, got {}", self.threshold));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad(format!("noise_sigma must be >= 0, got {}", self.noise_sigma));
        }
        if self.circuit_length == Some(0) {
            return bad("circuit_length must be at least 1".into());
        }
        let grids = [self.sparsity.grid(), self.measurements.grid()];
        if let Some(g) = grids.into_iter().flatten().find(|&g| g < 2) {
            return bad(format!("grid resolution must be at least 2, got {g}"));
        }
        if let MeasurementSpec::Range { step: 0, .. } = self.measurements {
            return bad("M step must be at least 1".into());
        }
        self.solver.validate().map_err(|e| Error::Config(e.to_string()))?;

        let total = signal_len(self.n);
        let limit = self.policy.admissible_count(self.n);
        let ss = self.sparsities();
        if ss.is_empty() {
            return bad("no sparsity values".into());
        }
        for &s in &ss {
            if s == 0 || s > limit {
                return bad(format!("s = {s} outside 1..={limit} for policy {}", self.policy.as_str()));
            }
        }
        let ms = self.measurement_counts();
        if ms.is_empty() {
            return bad("no measurement counts".into());
        }
        if ms.windows(2).any(|w| w[0] >= w[1]) {
            return bad("measurement counts must be strictly increasing".into());
        }
        for &m in &ms {
            if m == 0 || m > total {
                return bad(format!("M = {m} outside 1..={total}"));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
