//! Pauli strings: indexing, weights, and the trace-orthogonality of the basis.

use hamiltonian_cs::pauli::{count_of_weight, pauli_coefficients, pauli_matrix, PauliIndex};

fn main() -> hamiltonian_cs::Result<()> {
    let n = 2;
    for a in 0..16 {
        let p = PauliIndex::new(n, a)?;
        println!("{a:>2}  {}  weight {}", p.label(), p.weight());
    }
    for w in 0..=3 {
        println!("three qubits, weight {w}: {} strings", count_of_weight(3, w));
    }

    // Tr(λ_a λ_b) = 2^n δ_ab, so a Pauli matrix expands to a single coefficient
    let zx = pauli_matrix(PauliIndex::from_digits(&[3, 1])?);
    let coeffs = pauli_coefficients(&zx)?;
    let nonzero: Vec<(usize, f64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.abs() > 1e-12)
        .map(|(i, &c)| (i + 1, c))
        .collect();
    println!("ZX expands to {nonzero:?}");
    Ok(())
}
