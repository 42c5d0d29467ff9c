//! Gibbs states, polarization vectors, and the log-map Hamiltonian estimate.
//!
//! All matrix functions go through a Hermitian eigendecomposition of the
//! re-symmetrized input.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::{hermitian_deviation, hermitian_eigh, hermitian_function, CMatrix, ONE};
use crate::pauli::{coefficients_unchecked, matrix_from_coefficients, qubits_of, signal_len, HERMITIAN_TOL};

/// Smallest eigenvalue admitted into the matrix logarithm.
pub const EIGEN_CLIP: f64 = 1e-12;

const STATE_TOL: f64 = 1e-10;

/// A physical state: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    n: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates the density-matrix invariants to `1e-10`.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(domain!("density matrix must be square"));
        }
        let n = qubits_of(matrix.nrows())?;
        let dev = hermitian_deviation(&matrix);
        if dev > STATE_TOL {
            return Err(domain!("state is not Hermitian (deviation {dev:.3e})"));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > STATE_TOL {
            return Err(domain!("state trace is {tr}, expected 1"));
        }
        let (vals, _) = hermitian_eigh(&matrix)?;
        if vals[0] < -STATE_TOL {
            return Err(domain!("state has negative eigenvalue {:.3e}", vals[0]));
        }
        Ok(Self { n, matrix })
    }

    /// Maximally mixed state `I / 2^n`.
    pub fn maximally_mixed(n: usize) -> Result<Self> {
        crate::pauli::check_qubits(n)?;
        let dim = 1usize << n;
        Ok(Self {
            n,
            matrix: CMatrix::identity(dim, dim) / ONE.scale(dim as f64),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Purity `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }
}

/// Pauli-basis coordinates `v_a = Tr(λ_a ρ)` for `a = 1..4^n-1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarizationVector {
    n: usize,
    v: Vec<f64>,
}

impl PolarizationVector {
    pub fn new(n: usize, v: Vec<f64>) -> Result<Self> {
        crate::pauli::check_qubits(n)?;
        if v.len() != signal_len(n) {
            return Err(domain!(
                "polarization vector has length {}, expected {}",
                v.len(),
                signal_len(n)
            ));
        }
        Ok(Self { n, v })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, vec![0.0; signal_len(n)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.v
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.v
    }

    /// Component for Pauli index `a` (1-based, matching the signal layout).
    pub fn get(&self, a: usize) -> f64 {
        self.v[a - 1]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.v.iter().map(|x| x * x).sum()
    }
}

/// `ρ = exp(-βH) / Tr exp(-βH)`.
///
/// The spectrum is shifted by its minimum before exponentiating, so large
/// `βH` never overflows.
pub fn gibbs_state(beta_h: &CMatrix) -> Result<DensityMatrix> {
    if !beta_h.is_square() {
        return Err(domain!("βH must be square"));
    }
    let n = qubits_of(beta_h.nrows())?;
    let dev = hermitian_deviation(beta_h);
    if dev > HERMITIAN_TOL {
        return Err(domain!("βH is not Hermitian (deviation {dev:.3e})"));
    }
    let (energies, vecs) = hermitian_eigh(beta_h)?;
    let dim = energies.len() as f64;
    let e_min = energies[0];
    // e^{-(E_i - E_min)} = 1 + m_i; working with m_i keeps the deviation of
    // each weight from 1/d exact when the spectrum is narrow
    let m: Vec<f64> = energies.iter().map(|e| (-(e - e_min)).exp_m1()).collect();
    let m_sum: f64 = m.iter().sum();
    let partition = dim + m_sum;
    if !(partition.is_finite() && partition > 0.0) {
        return Err(Error::Numerical(format!("partition function is {partition}")));
    }
    let deviations: Vec<f64> = m.iter().map(|mi| (dim * mi - m_sum) / (dim * partition)).collect();
    let mut matrix = hermitian_function(&deviations, &vecs, |q| q);
    for i in 0..matrix.nrows() {
        matrix[(i, i)] += 1.0 / dim;
    }
    Ok(DensityMatrix { n, matrix })
}

/// `v_a = Tr(λ_a ρ)`.
pub fn polarization_vector(rho: &DensityMatrix) -> PolarizationVector {
    let scale = (1usize << rho.n) as f64;
    let coeffs = coefficients_unchecked(rho.n, &rho.matrix);
    PolarizationVector {
        n: rho.n,
        v: coeffs[1..].iter().map(|c| c * scale).collect(),
    }
}

/// A reconstructed state that may fail to be positive semidefinite.
#[derive(Debug, Clone)]
pub struct StateEstimate {
    pub matrix: CMatrix,
    pub min_eigenvalue: f64,
}

impl StateEstimate {
    pub fn is_physical(&self) -> bool {
        self.min_eigenvalue >= -STATE_TOL
    }
}

/// `2^-n (I + Σ_a v_a λ_a)`; positivity is reported, not enforced.
pub fn state_from_polarization(v: &PolarizationVector) -> Result<StateEstimate> {
    let scale = 1.0 / (1usize << v.n) as f64;
    let mut coeffs = Vec::with_capacity(v.v.len() + 1);
    coeffs.push(scale);
    coeffs.extend(v.v.iter().map(|x| x * scale));
    let matrix = matrix_from_coefficients(&coeffs)?;
    let (vals, _) = hermitian_eigh(&matrix)?;
    Ok(StateEstimate {
        matrix,
        min_eigenvalue: vals[0],
    })
}

/// What happened inside the log-map estimate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LogDiagnostics {
    /// At least one eigenvalue was raised to [`EIGEN_CLIP`].
    pub clipped: bool,
    /// Smallest eigenvalue before clipping.
    pub min_eigenvalue: f64,
}

/// `βH_est = 2^-n Tr(ln ρ) I - ln ρ`, traceless by construction.
pub fn hamiltonian_from_state(rho_est: &CMatrix) -> Result<(CMatrix, LogDiagnostics)> {
    if !rho_est.is_square() {
        return Err(domain!("state estimate must be square"));
    }
    qubits_of(rho_est.nrows())?;
    let dev = hermitian_deviation(rho_est);
    if dev > 1e-8 {
        return Err(domain!("state estimate is not Hermitian (deviation {dev:.3e})"));
    }
    let tr = rho_est.trace();
    if (tr - ONE).norm() > 1e-8 {
        return Err(domain!("state estimate trace is {tr}, expected 1"));
    }
    // decompose the traceless part so the small spectral deviations around
    // tr/d are resolved to their own precision
    let dim = rho_est.nrows();
    let level = tr.re / dim as f64;
    let mut traceless = rho_est.clone();
    for i in 0..dim {
        traceless[(i, i)] -= level;
    }
    let (offsets, vecs) = hermitian_eigh(&traceless)?;
    let min_eigenvalue = level + offsets[0];
    let clipped = min_eigenvalue < EIGEN_CLIP;
    // ln p_i - ln(level); the common ln(level) cancels in the shift below
    let logs: Vec<f64> = offsets
        .iter()
        .map(|&x| {
            if level + x < EIGEN_CLIP {
                (EIGEN_CLIP / level).ln()
            } else {
                (x / level).ln_1p()
            }
        })
        .collect();
    let mean_log = logs.iter().sum::<f64>() / dim as f64;
    // the shifted spectrum sums to zero exactly, which makes the result traceless
    let shifted: Vec<f64> = logs.iter().map(|l| mean_log - l).collect();
    let beta_h = hermitian_function(&shifted, &vecs, |x| x);
    Ok((beta_h, LogDiagnostics { clipped, min_eigenvalue }))
}
