//! Fast end-to-end invariant checks, each a few milliseconds.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{circuit_unitary, sample_circuit};
use crate::hamiltonian::{random_hamiltonian, SupportPolicy};
use crate::pauli::{pauli_matrix, signal_len, PauliIndex};
use crate::pipeline::{compute_metrics, run_cs_trial, TrialOptions, TrialSeeds};
use crate::recovery::{basis_pursuit, SolverOptions};
use crate::sensing::{build_compression_matrix, MeasurementPlan};
use crate::thermal::{gibbs_state, hamiltonian_from_state};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, value: Result<f64>, bound: f64) -> Check {
    match value {
        Ok(v) => Check {
            name,
            passed: v < bound,
            detail: format!("{v:.3e} (bound {bound:e})"),
        },
        Err(e) => Check {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

fn pauli_orthogonality() -> Result<f64> {
    let n = 2;
    let mut worst = 0.0f64;
    for a in 0..16 {
        for b in 0..16 {
            let pa = pauli_matrix(PauliIndex::new(n, a)?);
            let pb = pauli_matrix(PauliIndex::new(n, b)?);
            let tr = (pa * pb).trace();
            let want = if a == b { 4.0 } else { 0.0 };
            worst = worst.max((tr.re - want).abs() + tr.im.abs());
        }
    }
    Ok(worst)
}

fn log_round_trip() -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for eta_beta in [1e-4, 0.1, 1.0] {
        let h = random_hamiltonian(3, 4, SupportPolicy::UniformRandom, &mut rng)?;
        let rho = gibbs_state(&h.matrix(eta_beta))?;
        let (beta_h, _) = hamiltonian_from_state(rho.matrix())?;
        worst = worst.max(compute_metrics(&beta_h, &h, eta_beta, 1e-4)?.normalized_error);
    }
    Ok(worst)
}

fn compression_orthonormality() -> Result<f64> {
    let n = 3;
    let u = circuit_unitary(&sample_circuit(n, Some(729), 5)?)?;
    let plan = MeasurementPlan::new(n, (1..=signal_len(n)).collect(), false)?;
    Ok(build_compression_matrix(&u, &plan)?.orthonormality_deviation())
}

fn planted_recovery() -> Result<f64> {
    // rows 0..6 of a 15-point DCT-II basis, planted 1-sparse signal
    let (m, n) = (6, 15);
    let c = DMatrix::from_fn(m, n, |k, j| {
        let scale = if k == 0 {
            (1.0 / n as f64).sqrt()
        } else {
            (2.0 / n as f64).sqrt()
        };
        scale * (std::f64::consts::PI * (j as f64 + 0.5) * k as f64 / n as f64).cos()
    });
    let mut truth = vec![0.0; n];
    truth[4] = 0.7;
    let y: Vec<f64> = (0..m).map(|k| c[(k, 4)] * 0.7).collect();
    let res = basis_pursuit(&c, &y, &SolverOptions::default())?;
    Ok(res
        .estimate
        .iter()
        .zip(&truth)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

fn full_measurement_trial() -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let h = random_hamiltonian(2, 2, SupportPolicy::UniformRandom, &mut rng)?;
    let opts = TrialOptions {
        circuit_length: Some(256),
        ..Default::default()
    };
    let seeds = TrialSeeds {
        master: 0,
        trial: 11,
        circuit: None,
    };
    let a = run_cs_trial(&h, 0.1, signal_len(2), seeds, &opts)?;
    let b = run_cs_trial(&h, 0.1, signal_len(2), seeds, &opts)?;
    if a.metrics != b.metrics || a.plan != b.plan {
        return Ok(f64::INFINITY);
    }
    Ok(a.metrics.normalized_error)
}

pub fn run_selftest() -> Vec<Check> {
    vec![
        check("pauli-orthogonality", pauli_orthogonality(), 1e-12),
        check("log-map-round-trip", log_round_trip(), 1e-9),
        check("compression-orthonormality", compression_orthonormality(), 1e-9),
        check("planted-basis-pursuit", planted_recovery(), 1e-8),
        check("full-measurement-trial", full_measurement_trial(), 1e-6),
    ]
}
