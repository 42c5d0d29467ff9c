use serde::{Deserialize, Serialize};

use super::{quantile, run_keys, ExperimentConfig, TrialKey, TrialOutcome};
use crate::error::Result;
use crate::pipeline::Protocol;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    #[serde(rename = "M")]
    pub m: usize,
    pub trials: usize,
    pub median_err: f64,
    pub q1_err: f64,
    pub q3_err: f64,
    pub success_rate: f64,
    /// Trials that raised an error (counted as failures).
    pub failed: usize,
    /// CS trials whose solver hit the iteration cap.
    pub unconverged: usize,
}

impl SweepPoint {
    pub fn from_outcomes(m: usize, outcomes: &[TrialOutcome]) -> Self {
        let mut errors = Vec::with_capacity(outcomes.len());
        let (mut successes, mut failed, mut unconverged) = (0, 0, 0);
        for o in outcomes {
            match o {
                TrialOutcome::Done {
                    error,
                    success,
                    converged,
                } => {
                    errors.push(*error);
                    successes += usize::from(*success);
                    unconverged += usize::from(!*converged);
                }
                TrialOutcome::Failed(_) => failed += 1,
            }
        }
        errors.sort_by(f64::total_cmp);
        Self {
            m,
            trials: outcomes.len(),
            median_err: quantile(&errors, 0.5),
            q1_err: quantile(&errors, 0.25),
            q3_err: quantile(&errors, 0.75),
            success_rate: successes as f64 / outcomes.len() as f64,
            failed,
            unconverged,
        }
    }
}

/// One protocol's error curve over M, with M strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub protocol: Protocol,
    pub points: Vec<SweepPoint>,
}

impl SweepCurve {
    pub fn ms(&self) -> Vec<usize> {
        self.points.iter().map(|p| p.m).collect()
    }

    pub fn medians(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.median_err).collect()
    }
}

/// CS and no-CS curves at one sparsity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPair {
    pub s: usize,
    pub cs: SweepCurve,
    pub nocs: SweepCurve,
}

/// Both protocols at every (s, M) of the configuration.
pub fn run_sweep(cfg: &ExperimentConfig, jobs: usize) -> Result<Vec<SweepPair>> {
    cfg.validate()?;
    let ss = cfg.sparsities();
    let ms = cfg.measurement_counts();
    let protocols = [Protocol::Cs, Protocol::NoCs];

    let mut keys = Vec::with_capacity(ss.len() * ms.len() * 2 * cfg.trials);
    for &s in &ss {
        for protocol in protocols {
            for &m in &ms {
                for trial in 0..cfg.trials {
                    keys.push(TrialKey { s, protocol, m, trial });
                }
            }
        }
    }
    let outcomes = run_keys(cfg, &keys, jobs)?;

    let mut chunks = outcomes.chunks(cfg.trials);
    let mut pairs = Vec::with_capacity(ss.len());
    for &s in &ss {
        let mut curves = protocols.map(|protocol| SweepCurve {
            protocol,
            points: Vec::with_capacity(ms.len()),
        });
        for curve in curves.iter_mut() {
            for &m in &ms {
                let chunk = chunks.next().expect("one chunk per point");
                curve.points.push(SweepPoint::from_outcomes(m, chunk));
            }
        }
        let [cs, nocs] = curves;
        pairs.push(SweepPair { s, cs, nocs });
    }
    Ok(pairs)
}
