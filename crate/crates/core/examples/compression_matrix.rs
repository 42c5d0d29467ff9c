//! Rows of the compression matrix and the measurements they predict.

use hamiltonian_cs::circuit::{circuit_unitary, sample_circuit};
use hamiltonian_cs::hamiltonian::{random_hamiltonian, SupportPolicy};
use hamiltonian_cs::sensing::{build_compression_matrix, select_measurements, simulate_measurements, MeasurementPlan};
use hamiltonian_cs::thermal::{gibbs_state, polarization_vector};
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hamiltonian_cs::Result<()> {
    let n = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let u = circuit_unitary(&sample_circuit(n, None, 5)?)?;

    let full = MeasurementPlan::new(n, (1..=63).collect(), false)?;
    let c_full = build_compression_matrix(&u, &full)?;
    println!("full 63×63 matrix: |CCᵀ - I|max = {:.2e}", c_full.orthonormality_deviation());

    let plan = select_measurements(n, 12, &mut rng, true)?;
    println!("measuring {:?}", plan.indices);
    let c = build_compression_matrix(&u, &plan)?;

    // y = Cv: the rotated-state measurements are linear in the original polarization
    let h = random_hamiltonian(n, 3, SupportPolicy::UniformRandom, &mut rng)?;
    let rho = gibbs_state(&h.matrix(0.1))?;
    let v = DVector::from_column_slice(polarization_vector(&rho).as_slice());
    let y = simulate_measurements(&rho, &u, &plan, 0.0, &mut rng)?;
    let gap = (&c.rows * v - DVector::from_column_slice(&y)).amax();
    println!("|Cv - y|max = {gap:.2e}");
    Ok(())
}
