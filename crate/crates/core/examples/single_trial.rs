//! One compressed-sensing trial next to one truncated-tomography trial.

use hamiltonian_cs::hamiltonian::{random_hamiltonian, SupportPolicy};
use hamiltonian_cs::pipeline::{run_cs_trial, run_no_cs_trial, TrialOptions, TrialSeeds};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hamiltonian_cs::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let h = random_hamiltonian(3, 2, SupportPolicy::UniformRandom, &mut rng)?;
    let opts = TrialOptions::default();
    for m in [4, 12, 24] {
        let seeds = TrialSeeds {
            master: 11,
            trial: m as u64,
            circuit: None,
        };
        let cs = run_cs_trial(&h, 0.1, m, seeds, &opts)?;
        let nocs = run_no_cs_trial(&h, 0.1, m, seeds, &opts)?;
        println!(
            "M={m:<3} CS error {:.1e} ({} iterations)   no-CS error {:.1e}",
            cs.metrics.normalized_error, cs.solver.iterations, nocs.metrics.normalized_error
        );
    }
    println!(
        "{}",
        run_cs_trial(
            &h,
            0.1,
            12,
            TrialSeeds {
                master: 11,
                trial: 0,
                circuit: None
            },
            &opts
        )?
        .to_json_line()?
    );
    Ok(())
}
