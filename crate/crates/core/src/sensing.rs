//! Measurement plans, compression-matrix rows, and exact measurement simulation.
//!
//! Measuring `λ_k` on the rotated state `UρU†` gives
//! `y_k = Tr(λ_k UρU†) = Σ_b C_kb v_b` with `C_kb = 2^-n Tr(λ_k U λ_b U†)`,
//! so each row of `C` is the Pauli expansion of `U†λ_kU`.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::circuit::UNITARITY_TOL;
use crate::error::{domain, Result};
use crate::linalg::{unitarity_deviation, CMatrix};
use crate::pauli::{coefficients_unchecked, signal_len, weight_of, PauliBits, PauliIndex};
use crate::thermal::DensityMatrix;

/// Ordered list of distinct Pauli strings to measure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementPlan {
    pub n: usize,
    pub indices: Vec<usize>,
    pub weight_ordered: bool,
}

impl MeasurementPlan {
    pub fn new(n: usize, indices: Vec<usize>, weight_ordered: bool) -> Result<Self> {
        crate::pauli::check_qubits(n)?;
        let len = signal_len(n);
        let mut seen = vec![false; len + 1];
        for &a in &indices {
            if a == 0 || a > len {
                return Err(domain!("measurement index {a} not in 1..={len}"));
            }
            if std::mem::replace(&mut seen[a], true) {
                return Err(domain!("measurement index {a} repeated"));
            }
        }
        if weight_ordered && indices.windows(2).any(|w| weight_of(n, w[0]) > weight_of(n, w[1])) {
            return Err(domain!("plan flagged weight-ordered but weights decrease"));
        }
        Ok(Self {
            n,
            indices,
            weight_ordered,
        })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// First `m` entries of this plan.
    pub fn truncated(&self, m: usize) -> Self {
        Self {
            n: self.n,
            indices: self.indices[..m.min(self.indices.len())].to_vec(),
            weight_ordered: self.weight_ordered,
        }
    }
}

fn check_count(n: usize, m: usize) -> Result<()> {
    crate::pauli::check_qubits(n)?;
    if m == 0 || m > signal_len(n) {
        return Err(domain!("measurement count {m} not in 1..={}", signal_len(n)));
    }
    Ok(())
}

/// `M` distinct indices uniform without replacement, optionally stable-sorted by weight.
pub fn select_measurements<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R, weight_ordered: bool) -> Result<MeasurementPlan> {
    check_count(n, m)?;
    let mut indices: Vec<usize> = rand::seq::index::sample(rng, signal_len(n), m)
        .into_iter()
        .map(|i| i + 1)
        .collect();
    if weight_ordered {
        indices.sort_by_key(|&a| weight_of(n, a));
    }
    Ok(MeasurementPlan {
        n,
        indices,
        weight_ordered,
    })
}

/// Every weight-1 string in random order, then every weight-2 string, and so
/// on, truncated to the first `M`.
pub fn weight_class_plan<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<MeasurementPlan> {
    check_count(n, m)?;
    let mut indices = Vec::with_capacity(signal_len(n));
    for w in 1..=n {
        let mut class: Vec<usize> = (1..=signal_len(n)).filter(|&a| weight_of(n, a) == w).collect();
        class.shuffle(rng);
        indices.extend(class);
    }
    indices.truncate(m);
    Ok(MeasurementPlan {
        n,
        indices,
        weight_ordered: true,
    })
}

/// `M × (4^n - 1)` rows of the Pauli-basis conjugation matrix.
#[derive(Debug, Clone)]
pub struct CompressionMatrix {
    pub rows: DMatrix<f64>,
    pub plan: MeasurementPlan,
    pub circuit_seed: Option<u64>,
}

impl CompressionMatrix {
    pub fn nrows(&self) -> usize {
        self.rows.nrows()
    }

    /// Largest deviation of `CCᵀ` from the identity.
    pub fn orthonormality_deviation(&self) -> f64 {
        gram_deviation(&self.rows)
    }
}

pub(crate) fn gram_deviation(c: &DMatrix<f64>) -> f64 {
    let gram = c * c.transpose();
    let mut worst = 0.0f64;
    for j in 0..gram.ncols() {
        for i in 0..gram.nrows() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - target).abs());
        }
    }
    worst
}

fn check_unitary(u: &CMatrix, n: usize) -> Result<()> {
    let dim = 1usize << n;
    if u.nrows() != dim || u.ncols() != dim {
        return Err(domain!("unitary is {}x{}, expected {dim}x{dim}", u.nrows(), u.ncols()));
    }
    let dev = unitarity_deviation(u);
    if dev > UNITARITY_TOL {
        return Err(domain!("matrix is not unitary (deviation {dev:.3e})"));
    }
    Ok(())
}

fn row_unchecked(u: &CMatrix, k: PauliIndex) -> Vec<f64> {
    let n = k.n();
    let dim = 1usize << n;
    // U†λ_kU, with λ_k applied as a signed row permutation of U
    let bits: PauliBits = k.bits();
    let mut lam_u = CMatrix::zeros(dim, dim);
    for r in 0..dim {
        let src = r ^ bits.x;
        let e = bits.entry(src);
        for c in 0..dim {
            lam_u[(r, c)] = u[(src, c)] * e;
        }
    }
    let mut conj = u.adjoint() * lam_u;
    conj = crate::linalg::symmetrize(&conj);
    let coeffs = coefficients_unchecked(n, &conj);
    coeffs[1..].to_vec()
}

/// Row `k` of `C`: the Pauli coefficients of `U†λ_kU` for `b = 1..4^n-1`.
pub fn compression_row(u: &CMatrix, k: PauliIndex) -> Result<Vec<f64>> {
    check_unitary(u, k.n())?;
    if k.is_identity() {
        return Err(domain!("the identity string carries no signal"));
    }
    Ok(row_unchecked(u, k))
}

/// Stacks [`compression_row`] for every plan entry, in plan order.
pub fn build_compression_matrix(u: &CMatrix, plan: &MeasurementPlan) -> Result<CompressionMatrix> {
    check_unitary(u, plan.n)?;
    let cols = signal_len(plan.n);
    let mut rows = DMatrix::zeros(plan.len(), cols);
    for (i, &a) in plan.indices.iter().enumerate() {
        let row = row_unchecked(u, PauliIndex::new(plan.n, a)?);
        for (j, x) in row.into_iter().enumerate() {
            rows[(i, j)] = x;
        }
    }
    Ok(CompressionMatrix {
        rows,
        plan: plan.clone(),
        circuit_seed: None,
    })
}

/// `y_k = Tr(λ_k UρU†)`, plus i.i.d. Gaussian noise when `noise_sigma > 0`.
pub fn simulate_measurements<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    u: &CMatrix,
    plan: &MeasurementPlan,
    noise_sigma: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if plan.n != rho.n() {
        return Err(domain!("plan is for {} qubits but the state has {}", plan.n, rho.n()));
    }
    if !(noise_sigma >= 0.0) {
        return Err(domain!("noise standard deviation must be >= 0"));
    }
    check_unitary(u, plan.n)?;
    let rotated = u * rho.matrix() * u.adjoint();
    let mut y: Vec<f64> = plan
        .indices
        .iter()
        .map(|&a| PauliBits::new(plan.n, a).trace_with(&rotated).re)
        .collect();
    if noise_sigma > 0.0 {
        let normal = Normal::new(0.0, noise_sigma).map_err(|e| domain!("{e}"))?;
        for yk in &mut y {
            *yk += normal.sample(rng);
        }
    }
    Ok(y)
}

/// Direct measurements `Tr(λ_k ρ)` without any rotation.
pub fn measure_direct(rho: &DensityMatrix, plan: &MeasurementPlan) -> Result<Vec<f64>> {
    if plan.n != rho.n() {
        return Err(domain!("plan is for {} qubits but the state has {}", plan.n, rho.n()));
    }
    Ok(plan
        .indices
        .iter()
        .map(|&a| PauliBits::new(plan.n, a).trace_with(rho.matrix()).re)
        .collect())
}
