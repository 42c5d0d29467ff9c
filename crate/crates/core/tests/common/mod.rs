//! Shared basis-pursuit fixtures.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hamiltonian_cs::circuit::{circuit_unitary, sample_circuit};
use hamiltonian_cs::sensing::{build_compression_matrix, select_measurements};

/// Every basic feasible point of `min ‖w‖₁ s.t. Cw = y` has a support of at
/// most M linearly independent columns; the optimum is among them.
pub fn oracle_min_l1(c: &DMatrix<f64>, y: &[f64]) -> f64 {
    let (m, n) = c.shape();
    let yv = DVector::from_column_slice(y);
    let mut best = f64::INFINITY;
    for k in 1..=m {
        let mut subset: Vec<usize> = (0..k).collect();
        loop {
            let sub = c.select_columns(&subset);
            let svd = sub.clone().svd(true, true);
            let smallest = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
            if smallest > 1e-9 {
                let w = svd.solve(&yv, 1e-12).unwrap();
                if (&sub * &w - &yv).norm() < 1e-10 {
                    best = best.min(w.iter().map(|x| x.abs()).sum());
                }
            }
            // next k-subset in lexicographic order
            let mut i = k;
            while i > 0 && subset[i - 1] == n - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            subset[i - 1] += 1;
            for j in i..k {
                subset[j] = subset[j - 1] + 1;
            }
        }
    }
    best
}

/// `M` rows of a random two-qubit compression matrix (N = 15).
pub fn tiny_instance(seed: u64, m: usize, sparsity: usize) -> (DMatrix<f64>, Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = circuit_unitary(&sample_circuit(2, Some(256), rng.gen()).unwrap()).unwrap();
    let plan = select_measurements(2, m, &mut rng, true).unwrap();
    let c = build_compression_matrix(&u, &plan).unwrap().rows;
    let mut cols: Vec<usize> = (0..15).collect();
    cols.shuffle(&mut rng);
    let mut w0 = vec![0.0; 15];
    for &j in &cols[..sparsity] {
        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        w0[j] = sign * rng.gen_range(0.1..1.0);
    }
    let y = (&c * DVector::from_column_slice(&w0)).iter().copied().collect();
    (c, y, w0)
}
