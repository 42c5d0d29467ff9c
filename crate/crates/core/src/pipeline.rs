//! One reconstruction trial, end to end, for either protocol.
//!
//! CS: Gibbs state → random circuit → weight-ordered measurement plan →
//! compression rows → exact measurements → basis pursuit → state → log map.
//! The recovered vector already estimates the polarization of the *original*
//! state (the rotation lives in `C`), so no inverse rotation is applied.
//!
//! No CS: direct Pauli expectations on the unrotated state, unmeasured
//! components set to zero, then the same log map.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{circuit_unitary, sample_circuit};
use crate::error::{domain, Result};
use crate::hamiltonian::{SparseHamiltonian, SupportPolicy};
use crate::linalg::{frobenius, CMatrix};
use crate::recovery::{basis_pursuit, no_cs_estimate, SolverOptions};
use crate::sensing::{build_compression_matrix, measure_direct, select_measurements, simulate_measurements, weight_class_plan};
use crate::thermal::{gibbs_state, hamiltonian_from_state, state_from_polarization, PolarizationVector};

/// Default success threshold on the normalized error.
pub const DEFAULT_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Protocol {
    #[serde(rename = "CS")]
    Cs,
    #[serde(rename = "NoCS")]
    NoCs,
}

impl Protocol {
    pub fn as_str(&self) -> &'static str {
        match self {
            Protocol::Cs => "CS",
            Protocol::NoCs => "NoCS",
        }
    }

    pub(crate) fn tag(&self) -> u64 {
        match self {
            Protocol::Cs => 1,
            Protocol::NoCs => 2,
        }
    }
}

impl std::str::FromStr for Protocol {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cs" => Ok(Protocol::Cs),
            "nocs" | "no-cs" => Ok(Protocol::NoCs),
            other => Err(domain!("unknown protocol {other:?}")),
        }
    }
}

/// How the no-CS baseline picks its measurements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoCsOrder {
    /// Uniform random distinct indices, stable-sorted by weight.
    WeightSortedRandom,
    /// All weight-1 strings (shuffled), then all weight-2, and so on.
    WeightClass,
}

impl NoCsOrder {
    /// Default pairing used by the experiments.
    pub fn for_policy(policy: SupportPolicy) -> Self {
        match policy {
            SupportPolicy::UniformRandom => NoCsOrder::WeightSortedRandom,
            SupportPolicy::TwoLocal => NoCsOrder::WeightClass,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOptions {
    /// Circuit length override; `None` means `n^8`.
    pub circuit_length: Option<usize>,
    pub solver: SolverOptions,
    pub threshold: f64,
    /// Stable-sort the CS measurement plan by weight.
    pub weight_ordered: bool,
    pub nocs_order: NoCsOrder,
    /// Gaussian measurement noise (experimental; 0 disables it).
    pub noise_sigma: f64,
}

impl Default for TrialOptions {
    fn default() -> Self {
        Self {
            circuit_length: None,
            solver: SolverOptions::default(),
            threshold: DEFAULT_THRESHOLD,
            weight_ordered: true,
            nocs_order: NoCsOrder::WeightSortedRandom,
            noise_sigma: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// `‖H_est - H‖_F / η`.
    pub frobenius_error_over_eta: f64,
    /// `‖H_est - H‖_F / ‖H‖_F`.
    pub normalized_error: f64,
    pub success: bool,
    /// The log map had to clip a non-positive eigenvalue.
    pub clipped: bool,
}

/// Compares `βH_est` with the true Hamiltonian.
pub fn compute_metrics(beta_h_est: &CMatrix, truth: &SparseHamiltonian, eta_beta: f64, threshold: f64) -> Result<Metrics> {
    if truth.sparsity() == 0 {
        return Err(domain!("normalized error is undefined for H = 0"));
    }
    if !(eta_beta > 0.0) {
        return Err(domain!("ηβ must be positive"));
    }
    let dim = 1usize << truth.n();
    if beta_h_est.shape() != (dim, dim) {
        return Err(domain!("estimate is {:?}, expected {dim}x{dim}", beta_h_est.shape()));
    }
    let beta_h = truth.matrix(eta_beta);
    let diff = frobenius(&(beta_h_est - &beta_h));
    let normalized_error = diff / frobenius(&beta_h);
    Ok(Metrics {
        frobenius_error_over_eta: diff / eta_beta,
        normalized_error,
        success: normalized_error < threshold,
        clipped: false,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverDiagnostics {
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    pub gram_fallback: bool,
    pub polished: bool,
    /// Smallest eigenvalue of the reconstructed state.
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialSeeds {
    pub master: u64,
    pub trial: u64,
    pub circuit: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub protocol: Protocol,
    pub n: usize,
    pub s: usize,
    pub policy: Option<SupportPolicy>,
    pub eta_beta: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub metrics: Metrics,
    pub solver: SolverDiagnostics,
    pub seeds: TrialSeeds,
    pub circuit_length: Option<usize>,
    pub plan: Vec<usize>,
    pub wall_time_s: f64,
}

impl TrialResult {
    pub fn to_json_line(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

fn check_trial(h: &SparseHamiltonian, eta_beta: f64, m: usize) -> Result<()> {
    if h.sparsity() == 0 {
        return Err(domain!("trials need a nonzero Hamiltonian"));
    }
    if !(eta_beta > 0.0 && eta_beta.is_finite()) {
        return Err(domain!("ηβ must be positive and finite, got {eta_beta}"));
    }
    if m == 0 {
        return Err(domain!("at least one measurement is required"));
    }
    Ok(())
}

struct Finished {
    metrics: Metrics,
    min_eigenvalue: f64,
}

fn finish(v_est: Vec<f64>, h: &SparseHamiltonian, eta_beta: f64, threshold: f64) -> Result<Finished> {
    let v_est = PolarizationVector::new(h.n(), v_est)?;
    let estimate = state_from_polarization(&v_est)?;
    let (beta_h_est, diag) = hamiltonian_from_state(&estimate.matrix)?;
    let mut metrics = compute_metrics(&beta_h_est, h, eta_beta, threshold)?;
    metrics.clipped = diag.clipped;
    Ok(Finished {
        metrics,
        min_eigenvalue: estimate.min_eigenvalue,
    })
}

/// Compressed-sensing trial with `M` measurements. All randomness comes from `seeds.trial`.
pub fn run_cs_trial(
    h: &SparseHamiltonian,
    eta_beta: f64,
    m: usize,
    seeds: TrialSeeds,
    opts: &TrialOptions,
) -> Result<TrialResult> {
    check_trial(h, eta_beta, m)?;
    let start = Instant::now();
    let n = h.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seeds.trial);
    let circuit_seed: u64 = rng.gen();
    let plan = select_measurements(n, m, &mut rng, opts.weight_ordered)?;

    let rho = gibbs_state(&h.matrix(eta_beta))?;
    let circuit = sample_circuit(n, opts.circuit_length, circuit_seed)?;
    let u = circuit_unitary(&circuit)?;
    let mut c = build_compression_matrix(&u, &plan)?;
    c.circuit_seed = Some(circuit_seed);
    let y = simulate_measurements(&rho, &u, &plan, opts.noise_sigma, &mut rng)?;
    let solver = SolverOptions {
        noise_sigma: opts.noise_sigma,
        ..opts.solver
    };
    let recovery = basis_pursuit(&c.rows, &y, &solver)?;
    let done = finish(recovery.estimate, h, eta_beta, opts.threshold)?;

    Ok(TrialResult {
        protocol: Protocol::Cs,
        n,
        s: h.sparsity(),
        policy: None,
        eta_beta,
        m,
        metrics: done.metrics,
        solver: SolverDiagnostics {
            iterations: recovery.iterations,
            residual: recovery.residual,
            converged: recovery.converged,
            gram_fallback: recovery.gram_fallback,
            polished: recovery.polished,
            min_eigenvalue: done.min_eigenvalue,
        },
        seeds: TrialSeeds {
            circuit: Some(circuit_seed),
            ..seeds
        },
        circuit_length: Some(circuit.length),
        plan: plan.indices,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Truncated-tomography trial with `M` direct measurements.
pub fn run_no_cs_trial(
    h: &SparseHamiltonian,
    eta_beta: f64,
    m: usize,
    seeds: TrialSeeds,
    opts: &TrialOptions,
) -> Result<TrialResult> {
    check_trial(h, eta_beta, m)?;
    let start = Instant::now();
    let n = h.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seeds.trial);
    let plan = match opts.nocs_order {
        NoCsOrder::WeightSortedRandom => select_measurements(n, m, &mut rng, true)?,
        NoCsOrder::WeightClass => weight_class_plan(n, m, &mut rng)?,
    };
    let rho = gibbs_state(&h.matrix(eta_beta))?;
    let y = measure_direct(&rho, &plan)?;
    let v_est = no_cs_estimate(&plan, &y)?;
    let done = finish(v_est.into_vec(), h, eta_beta, opts.threshold)?;

    Ok(TrialResult {
        protocol: Protocol::NoCs,
        n,
        s: h.sparsity(),
        policy: None,
        eta_beta,
        m,
        metrics: done.metrics,
        solver: SolverDiagnostics {
            converged: true,
            min_eigenvalue: done.min_eigenvalue,
            ..Default::default()
        },
        seeds: TrialSeeds { circuit: None, ..seeds },
        circuit_length: None,
        plan: plan.indices,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

pub fn run_trial(
    protocol: Protocol,
    h: &SparseHamiltonian,
    eta_beta: f64,
    m: usize,
    seeds: TrialSeeds,
    opts: &TrialOptions,
) -> Result<TrialResult> {
    match protocol {
        Protocol::Cs => run_cs_trial(h, eta_beta, m, seeds, opts),
        Protocol::NoCs => run_no_cs_trial(h, eta_beta, m, seeds, opts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::random_hamiltonian;
    use crate::linalg::ONE;

    fn seeds(trial: u64) -> TrialSeeds {
        TrialSeeds {
            master: 0,
            trial,
            circuit: None,
        }
    }

    fn fast() -> TrialOptions {
        TrialOptions {
            circuit_length: Some(3usize.pow(4)),
            ..Default::default()
        }
    }

    #[test]
    fn metric_examples() {
        let h = SparseHamiltonian::new(2, [(1, 0.5), (6, -0.25)]).unwrap();
        let exact = compute_metrics(&h.matrix(0.1), &h, 0.1, 1e-4).unwrap();
        assert_eq!(exact.normalized_error, 0.0);
        assert!(exact.success);

        let zero = compute_metrics(&CMatrix::zeros(4, 4), &h, 0.1, 1e-4).unwrap();
        assert!((zero.normalized_error - 1.0).abs() < 1e-15);
        assert!(!zero.success);

        let double = compute_metrics(&(h.matrix(0.1) * ONE.scale(2.0)), &h, 0.1, 1e-4).unwrap();
        assert!((double.normalized_error - 1.0).abs() < 1e-14);
        let h_norm = frobenius(&h.matrix(1.0));
        assert!((double.frobenius_error_over_eta - h_norm).abs() < 1e-12);

        let empty = SparseHamiltonian::new(2, []).unwrap();
        assert!(compute_metrics(&CMatrix::zeros(4, 4), &empty, 0.1, 1e-4).is_err());
    }

    #[test]
    fn zero_hamiltonian_is_rejected() {
        let empty = SparseHamiltonian::new(3, []).unwrap();
        assert!(run_cs_trial(&empty, 0.1, 5, seeds(1), &fast()).is_err());
        assert!(run_no_cs_trial(&empty, 0.1, 5, seeds(1), &fast()).is_err());
    }

    #[test]
    fn full_measurement_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hamiltonian(3, 1, SupportPolicy::UniformRandom, &mut rng).unwrap();
        let cs = run_cs_trial(&h, 0.1, 63, seeds(4), &fast()).unwrap();
        assert!(cs.metrics.normalized_error < 1e-6, "{:?}", cs.metrics);
        let nocs = run_no_cs_trial(&h, 0.1, 63, seeds(4), &fast()).unwrap();
        assert!(nocs.metrics.normalized_error < 1e-9);
    }

    #[test]
    fn trials_are_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let h = random_hamiltonian(3, 2, SupportPolicy::UniformRandom, &mut rng).unwrap();
        let a = run_cs_trial(&h, 0.1, 12, seeds(99), &fast()).unwrap();
        let b = run_cs_trial(&h, 0.1, 12, seeds(99), &fast()).unwrap();
        assert_eq!(a.metrics, b.metrics);
        assert_eq!(a.plan, b.plan);
        assert_eq!(a.seeds, b.seeds);
        assert_eq!(a.solver, b.solver);
    }

    #[test]
    fn no_cs_plateau_when_the_term_is_missed() {
        // only λ_1 is coupled; measuring only λ_63 learns nothing
        let h = SparseHamiltonian::new(3, [(1, 0.7)]).unwrap();
        let opts = fast();
        let mut trial = 0;
        let res = loop {
            let r = run_no_cs_trial(&h, 0.1, 1, seeds(trial), &opts).unwrap();
            if r.plan != vec![1] {
                break r;
            }
            trial += 1;
        };
        assert!((res.metrics.normalized_error - 1.0).abs() < 1e-9);
    }

    #[test]
    fn result_serializes_as_one_line() {
        let h = SparseHamiltonian::new(2, [(5, 0.5)]).unwrap();
        let res = run_no_cs_trial(&h, 0.1, 3, seeds(1), &fast()).unwrap();
        let line = res.to_json_line().unwrap();
        assert!(!line.contains('\n'));
        assert!(line.contains("\"protocol\":\"NoCS\""));
        let back: TrialResult = serde_json::from_str(&line).unwrap();
        assert_eq!(back, res);
    }
}
