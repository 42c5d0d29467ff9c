//! Sparse Hamiltonians `H = -η Σ_a J_a λ_a`.
//!
//! Only the product `ηβ` ever enters a simulation, so the energy scale is
//! stored as `η = 1` and the dimensionless knob is supplied when the matrix
//! `βH` is realized.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::{hermitian_deviation, CMatrix};
use crate::pauli::{check_qubits, coefficients_unchecked, num_paulis, qubits_of, weight_of, PauliBits, HERMITIAN_TOL};

/// Smallest coupling magnitude drawn by [`random_hamiltonian`].
pub const MIN_COUPLING: f64 = 0.1;

/// Digit convention stamped into Hamiltonian files.
pub const CONVENTION: &str = "a1-most-significant";

/// Which Pauli strings may carry a nonzero coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SupportPolicy {
    /// Any non-identity string.
    #[serde(alias = "random")]
    UniformRandom,
    /// Strings acting on one or two qubits.
    TwoLocal,
}

impl SupportPolicy {
    pub fn admits(&self, n: usize, a: usize) -> bool {
        match self {
            SupportPolicy::UniformRandom => a != 0,
            SupportPolicy::TwoLocal => matches!(weight_of(n, a), 1 | 2),
        }
    }

    /// All admissible indices in ascending order.
    pub fn admissible(&self, n: usize) -> Vec<usize> {
        (1..num_paulis(n)).filter(|&a| self.admits(n, a)).collect()
    }

    pub fn admissible_count(&self, n: usize) -> usize {
        match self {
            SupportPolicy::UniformRandom => num_paulis(n) - 1,
            SupportPolicy::TwoLocal => 3 * n + 9 * n * (n - 1) / 2,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SupportPolicy::UniformRandom => "random",
            SupportPolicy::TwoLocal => "two-local",
        }
    }
}

impl std::str::FromStr for SupportPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" | "uniform-random" => Ok(SupportPolicy::UniformRandom),
            "two-local" => Ok(SupportPolicy::TwoLocal),
            other => Err(domain!("unknown support policy {other:?}")),
        }
    }
}

/// `H = -η Σ_a J_a λ_a` with `|J_a| ≤ 1` and no identity term.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHamiltonian {
    n: usize,
    eta: f64,
    terms: BTreeMap<usize, f64>,
}

impl SparseHamiltonian {
    pub fn new(n: usize, terms: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        Self::with_eta(n, 1.0, terms)
    }

    pub fn with_eta(n: usize, eta: f64, terms: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        check_qubits(n)?;
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(domain!("energy scale must be positive, got {eta}"));
        }
        let mut map = BTreeMap::new();
        for (a, j) in terms {
            if a == 0 || a >= num_paulis(n) {
                return Err(domain!("term index {a} not in 1..{}", num_paulis(n)));
            }
            if !(j.abs() <= 1.0) {
                return Err(domain!("coupling J_{a} = {j} violates |J| <= 1"));
            }
            if map.insert(a, j).is_some() {
                return Err(domain!("duplicate term index {a}"));
            }
        }
        Ok(Self { n, eta, terms: map })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Sparsity `s`.
    pub fn sparsity(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &BTreeMap<usize, f64> {
        &self.terms
    }

    pub fn coupling(&self, a: usize) -> f64 {
        self.terms.get(&a).copied().unwrap_or(0.0)
    }

    /// Dense `βH = -(ηβ) Σ J_a λ_a`, traceless by construction.
    pub fn matrix(&self, eta_beta: f64) -> CMatrix {
        let dim = 1usize << self.n;
        let mut m = CMatrix::zeros(dim, dim);
        for (&a, &j) in &self.terms {
            let bits = PauliBits::new(self.n, a);
            let coef = -eta_beta * j;
            for col in 0..dim {
                m[(col ^ bits.x, col)] += bits.entry(col) * coef;
            }
        }
        m
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&HamiltonianFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: HamiltonianFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

/// On-disk form: `{ "n", "eta", "convention", "terms": [[a, J], …] }`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HamiltonianFile {
    n: usize,
    eta: f64,
    #[serde(default = "default_convention")]
    convention: String,
    terms: Vec<(usize, f64)>,
}

fn default_convention() -> String {
    CONVENTION.to_string()
}

impl From<&SparseHamiltonian> for HamiltonianFile {
    fn from(h: &SparseHamiltonian) -> Self {
        Self {
            n: h.n,
            eta: h.eta,
            convention: CONVENTION.to_string(),
            terms: h.terms.iter().map(|(&a, &j)| (a, j)).collect(),
        }
    }
}

impl TryFrom<HamiltonianFile> for SparseHamiltonian {
    type Error = Error;

    fn try_from(file: HamiltonianFile) -> Result<Self> {
        if file.convention != CONVENTION {
            return Err(domain!("unsupported index convention {:?}", file.convention));
        }
        SparseHamiltonian::with_eta(file.n, file.eta, file.terms)
    }
}

/// Draws `s` distinct admissible indices uniformly without replacement.
pub fn random_support<R: Rng + ?Sized>(n: usize, s: usize, policy: SupportPolicy, rng: &mut R) -> Result<Vec<usize>> {
    check_qubits(n)?;
    let pool = policy.admissible(n);
    if s > pool.len() {
        return Err(domain!(
            "sparsity {s} exceeds the {} admissible indices of policy {}",
            pool.len(),
            policy.as_str()
        ));
    }
    let mut picked: Vec<usize> = sample(rng, pool.len(), s).into_iter().map(|i| pool[i]).collect();
    picked.sort_unstable();
    Ok(picked)
}

/// Random Hamiltonian with `|J_a|` uniform on `[0.1, 1]` and a random sign.
pub fn random_hamiltonian<R: Rng + ?Sized>(n: usize, s: usize, policy: SupportPolicy, rng: &mut R) -> Result<SparseHamiltonian> {
    let support = random_support(n, s, policy, rng)?;
    let terms: Vec<(usize, f64)> = support
        .into_iter()
        .map(|a| {
            let magnitude = rng.gen_range(MIN_COUPLING..=1.0);
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            (a, sign * magnitude)
        })
        .collect();
    SparseHamiltonian::new(n, terms)
}

/// `(ηJ)_a = -2^-n Tr(λ_a Hmat)` for `a = 1..4^n-1`.
///
/// Applied to `βH` this yields `(ηβ) J_a`.
pub fn couplings_from_matrix(hmat: &CMatrix) -> Result<Vec<f64>> {
    if !hmat.is_square() {
        return Err(domain!("matrix is not square"));
    }
    let n = qubits_of(hmat.nrows())?;
    let dev = hermitian_deviation(hmat);
    if dev > HERMITIAN_TOL {
        return Err(domain!("matrix is not Hermitian (deviation {dev:.3e})"));
    }
    Ok(coefficients_unchecked(n, hmat)[1..].iter().map(|c| -c).collect())
}
