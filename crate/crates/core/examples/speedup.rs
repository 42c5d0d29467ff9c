//! Measurement savings of compressed sensing over truncated tomography.
//!
//! M* is the first sampled M from which the median error stays below the
//! threshold; the speedup is M*(no CS) / M*(CS).

use hamiltonian_cs::hamiltonian::SupportPolicy;
use hamiltonian_cs::harness::{pair_reports, run_sweep, ExperimentConfig, MeasurementSpec, SparsitySpec};

fn main() -> hamiltonian_cs::Result<()> {
    for policy in [SupportPolicy::UniformRandom, SupportPolicy::TwoLocal] {
        let mut cfg = ExperimentConfig::new(
            3,
            0.1,
            SparsitySpec::List(vec![1, 2]),
            MeasurementSpec::Range {
                min: 1,
                max: 63,
                step: 1,
            },
        );
        cfg.policy = policy;
        cfg.trials = 15;
        cfg.seed = 9;
        let pairs = run_sweep(&cfg, 1)?;
        for r in pair_reports(cfg.n, policy.as_str(), cfg.eta_beta, &pairs, cfg.threshold) {
            println!("{}", serde_json::to_string(&r)?);
        }
    }
    Ok(())
}
