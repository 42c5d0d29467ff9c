//! Sampling a Clifford+T circuit and checking its unitary.

use hamiltonian_cs::circuit::{circuit_unitary, default_length, gate_set_size, sample_circuit};
use hamiltonian_cs::linalg::unitarity_deviation;

fn main() -> hamiltonian_cs::Result<()> {
    let n = 3;
    println!(
        "{} gates to choose from, default length {}",
        gate_set_size(n),
        default_length(n)
    );
    let spec = sample_circuit(n, None, 2024)?;
    println!("first gates: {:?}", &spec.gates()[..6]);
    let u = circuit_unitary(&spec)?;
    println!("|U†U - I|max = {:.2e}", unitarity_deviation(&u));

    // the same seed always gives the same circuit
    let again = sample_circuit(n, None, 2024)?;
    assert_eq!(spec.gates(), again.gates());
    Ok(())
}
