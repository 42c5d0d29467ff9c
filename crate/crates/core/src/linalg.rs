//! Small dense linear-algebra helpers shared by the state and circuit code.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest elementwise deviation `max |A - A†|`.
pub fn hermitian_deviation(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = (a[(i, j)] - a[(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

/// `(A + A†) / 2`.
pub fn symmetrize(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Largest elementwise deviation `max |U†U - I|`.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    let prod = u.adjoint() * u;
    let mut worst = 0.0f64;
    for j in 0..prod.ncols() {
        for i in 0..prod.nrows() {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((prod[(i, j)] - target).norm());
        }
    }
    worst
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Sweep cap for the Jacobi eigensolver; convergence is quadratic, so a
/// handful of sweeps suffices in practice.
const MAX_SWEEPS: usize = 64;

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// The input is re-symmetrized first so the spectrum is real by construction.
/// Eigenvalues are returned in ascending order with matching eigenvector columns.
pub fn hermitian_eigh(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if !a.is_square() {
        return Err(Error::Domain(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let d = a.nrows();
    let mut m = symmetrize(a);
    if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Numerical("non-finite matrix entry".into()));
    }
    for i in 0..d {
        m[(i, i)].im = 0.0;
    }
    let mut v = CMatrix::identity(d, d);
    let scale = frobenius(&m);

    let mut converged = scale == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off: f64 = (0..d)
            .flat_map(|p| (p + 1..d).map(move |q| (p, q)))
            .map(|(p, q)| m[(p, q)].norm_sqr())
            .sum();
        if off.sqrt() <= f64::EPSILON * 1e-3 * scale {
            converged = true;
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::Numerical("Hermitian eigendecomposition did not converge".into()));
    }

    let values: Vec<f64> = (0..d).map(|i| m[(i, i)].re).collect();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let sorted_vals = order.iter().map(|&i| values[i]).collect();
    let sorted_vecs = CMatrix::from_fn(d, d, |r, c| v[(r, order[c])]);
    Ok((sorted_vals, sorted_vecs))
}

/// One Jacobi rotation annihilating `m[(p, q)]`; `v` accumulates the rotations.
fn rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let (app, aqq) = (m[(p, p)].re, m[(q, q)].re);
    // negligible against both diagonal entries: drop it
    if app.abs() + 100.0 * mag == app.abs() && aqq.abs() + 100.0 * mag == aqq.abs() {
        m[(p, q)] = ZERO;
        m[(q, p)] = ZERO;
        return;
    }
    // G = diag(1, e^{-iφ}) · [[c, s], [-s, c]] in the (p, q) plane
    let phase = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
    let c = 1.0 / t.hypot(1.0);
    let s = t * c;
    let w = phase.conj();
    let d = m.nrows();

    for r in 0..d {
        let (xp, xq) = (m[(r, p)], m[(r, q)] * w);
        m[(r, p)] = xp * c - xq * s;
        m[(r, q)] = xp * s + xq * c;
    }
    for r in 0..d {
        let (xp, xq) = (m[(p, r)], m[(q, r)] * phase);
        m[(p, r)] = xp * c - xq * s;
        m[(q, r)] = xp * s + xq * c;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)].im = 0.0;
    m[(q, q)].im = 0.0;
    for r in 0..d {
        let (xp, xq) = (v[(r, p)], v[(r, q)] * w);
        v[(r, p)] = xp * c - xq * s;
        v[(r, q)] = xp * s + xq * c;
    }
}

/// Applies a real function to the spectrum: `V diag(f(λ)) V†`.
pub fn hermitian_function(values: &[f64], vectors: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let dim = vectors.nrows();
    let mut scaled = vectors.clone();
    for (c, &lam) in values.iter().enumerate() {
        let s = f(lam);
        for r in 0..dim {
            scaled[(r, c)] *= s;
        }
    }
    let out = scaled * vectors.adjoint();
    symmetrize(&out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigh_recovers_diagonal_spectrum() {
        let a = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(3.0, 0.0),
            Complex64::new(-1.0, 0.0),
        ]));
        let (vals, vecs) = hermitian_eigh(&a).unwrap();
        assert_eq!(vals, vec![-1.0, 3.0]);
        let back = hermitian_function(&vals, &vecs, |x| x);
        assert!(frobenius(&(back - a)) < 1e-14);
    }

    fn random_hermitian(d: usize, seed: u64) -> CMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a = CMatrix::from_fn(d, d, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        symmetrize(&a)
    }

    #[test]
    fn eigh_reconstructs_random_hermitian() {
        for (d, seed) in [(1, 0), (2, 1), (5, 2), (16, 3), (32, 4)] {
            let a = random_hermitian(d, seed);
            let (vals, vecs) = hermitian_eigh(&a).unwrap();
            assert!(vals.windows(2).all(|w| w[0] <= w[1]));
            assert!(unitarity_deviation(&vecs) < 1e-13);
            let back = hermitian_function(&vals, &vecs, |x| x);
            assert!(frobenius(&(back - &a)) < 1e-13 * (d as f64));
            // the trace is the eigenvalue sum
            assert!((vals.iter().sum::<f64>() - a.trace().re).abs() < 1e-12);
        }
    }

    #[test]
    fn eigh_handles_degenerate_antidiagonal() {
        // antidiagonal ±a: each eigenvalue four-fold degenerate
        let signs = [-1.0, -1.0, 1.0, 1.0, 1.0, 1.0, -1.0, -1.0];
        let a = CMatrix::from_fn(8, 8, |i, j| {
            if i + j == 7 {
                Complex64::new(signs[i] * 0.0042579, 0.0)
            } else {
                ZERO
            }
        });
        let (vals, vecs) = hermitian_eigh(&a).unwrap();
        assert!(vals[..4].iter().all(|v| (v + 0.0042579).abs() < 1e-17));
        assert!(vals[4..].iter().all(|v| (v - 0.0042579).abs() < 1e-17));
        let back = hermitian_function(&vals, &vecs, |x| x);
        assert!(frobenius(&(back - &a)) < 1e-17);
    }

    #[test]
    fn eigh_of_zero_and_bad_input() {
        let (vals, vecs) = hermitian_eigh(&CMatrix::zeros(3, 3)).unwrap();
        assert_eq!(vals, vec![0.0; 3]);
        assert_eq!(vecs, CMatrix::identity(3, 3));
        assert!(hermitian_eigh(&CMatrix::zeros(2, 3)).is_err());
        let mut nan = CMatrix::identity(2, 2);
        nan[(0, 1)] = Complex64::new(f64::NAN, 0.0);
        assert!(hermitian_eigh(&nan).is_err());
    }

    #[test]
    fn deviation_of_hermitian_is_zero() {
        let a = CMatrix::from_row_slice(2, 2, &[ONE, Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0), ONE]);
        assert_eq!(hermitian_deviation(&a), 0.0);
        assert!(unitarity_deviation(&CMatrix::identity(4, 4)) == 0.0);
    }
}
