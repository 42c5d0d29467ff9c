//! ℓ1 recovery of a planted sparse vector from a few orthonormal rows.

use hamiltonian_cs::recovery::{basis_pursuit, l1_norm, SolverOptions};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> hamiltonian_cs::Result<()> {
    let (m, n) = (20, 63);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = DMatrix::from_fn(n, m, |_, _| rng.gen_range(-1.0..1.0));
    let c = g.qr().q().transpose();

    let mut truth = vec![0.0; n];
    for (j, val) in [(4, 0.8), (17, -0.3), (40, 0.55)] {
        truth[j] = val;
    }
    let y: Vec<f64> = (0..m).map(|k| (0..n).map(|j| c[(k, j)] * truth[j]).sum()).collect();

    let res = basis_pursuit(&c, &y, &SolverOptions::default())?;
    let err = res
        .estimate
        .iter()
        .zip(&truth)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!(
        "{} iterations, converged={}, polished={}, residual={:.1e}",
        res.iterations, res.converged, res.polished, res.residual
    );
    println!(
        "‖w‖₁ = {:.6} (truth {:.6}), max error {err:.1e}",
        l1_norm(&res.estimate),
        l1_norm(&truth)
    );
    Ok(())
}
