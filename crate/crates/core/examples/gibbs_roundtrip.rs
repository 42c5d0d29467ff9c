//! Thermal state of a sparse Hamiltonian and its exact inversion.

use hamiltonian_cs::hamiltonian::{random_hamiltonian, SupportPolicy};
use hamiltonian_cs::pipeline::compute_metrics;
use hamiltonian_cs::thermal::{gibbs_state, hamiltonian_from_state, polarization_vector, state_from_polarization};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hamiltonian_cs::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let h = random_hamiltonian(3, 4, SupportPolicy::UniformRandom, &mut rng)?;
    println!("couplings: {:?}", h.terms());

    for eta_beta in [1e-4, 0.1, 1.0] {
        let rho = gibbs_state(&h.matrix(eta_beta))?;
        let v = polarization_vector(&rho);
        let support = v.as_slice().iter().filter(|x| x.abs() > 1e-12).count();
        let est = state_from_polarization(&v)?;
        let (beta_h, _) = hamiltonian_from_state(&est.matrix)?;
        let err = compute_metrics(&beta_h, &h, eta_beta, 1e-4)?.normalized_error;
        println!(
            "ηβ={eta_beta:<6} |v|²={:.3e} nonzeros={support:<2} purity={:.6} round-trip error={err:.1e}",
            v.norm_sqr(),
            rho.purity()
        );
    }
    Ok(())
}
