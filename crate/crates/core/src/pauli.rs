//! n-qubit Pauli strings.
//!
//! A Pauli string is indexed by an n-digit base-4 number `a = a_1 a_2 … a_n`
//! with `λ_a = σ_{a_1} ⊗ σ_{a_2} ⊗ … ⊗ σ_{a_n}` and `σ_0..σ_3 = I, X, Y, Z`.
//! The digit `a_1` is the most significant one and is the leftmost Kronecker
//! factor ("qubit 1"), which in turn is the most significant bit of a
//! computational-basis index.
//!
//! Every Pauli string is a signed permutation matrix, so traces against it are
//! computed from the bit masks directly instead of through dense products.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::linalg::{hermitian_deviation, CMatrix, ZERO};

/// Largest supported qubit count. A 6-qubit density matrix is 64×64 and its
/// signal vector already has 4095 entries.
pub const MAX_QUBITS: usize = 6;

/// Tolerance used when checking that an input matrix is Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// `4^n`, the number of Pauli strings including the identity.
pub fn num_paulis(n: usize) -> usize {
    1usize << (2 * n)
}

/// `4^n - 1`, the length of a polarization (signal) vector.
pub fn signal_len(n: usize) -> usize {
    num_paulis(n) - 1
}

pub(crate) fn check_qubits(n: usize) -> Result<()> {
    if n == 0 {
        return Err(domain!("qubit count must be positive"));
    }
    if n > MAX_QUBITS {
        return Err(Error::Resource(format!("{n} qubits exceeds the cap of {MAX_QUBITS}")));
    }
    Ok(())
}

/// Qubit count of a `2^n × 2^n` matrix.
pub(crate) fn qubits_of(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(domain!("matrix dimension {dim} is not 2^n with n >= 1"));
    }
    let n = dim.trailing_zeros() as usize;
    check_qubits(n)?;
    Ok(n)
}

/// Index of an n-qubit Pauli string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliIndex {
    n: usize,
    a: usize,
}

impl PauliIndex {
    pub fn new(n: usize, a: usize) -> Result<Self> {
        check_qubits(n)?;
        if a >= num_paulis(n) {
            return Err(domain!("Pauli index {a} out of range for n = {n}"));
        }
        Ok(Self { n, a })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(n, 0)
    }

    /// Builds an index from base-4 digits, most significant first.
    pub fn from_digits(digits: &[u8]) -> Result<Self> {
        let mut a = 0usize;
        for &d in digits {
            if d > 3 {
                return Err(domain!("Pauli digit {d} is not in 0..=3"));
            }
            a = a * 4 + d as usize;
        }
        Self::new(digits.len(), a)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self) -> usize {
        self.a
    }

    pub fn is_identity(&self) -> bool {
        self.a == 0
    }

    /// Base-4 digits `[a_1, …, a_n]`, most significant first.
    pub fn digits(&self) -> Vec<u8> {
        digits_of(self.n, self.a)
    }

    /// Number of non-identity tensor factors.
    pub fn weight(&self) -> usize {
        weight_of(self.n, self.a)
    }

    /// String form such as `"XIZ"` (leftmost character is qubit 1).
    pub fn label(&self) -> String {
        self.digits().iter().map(|&d| b"IXYZ"[d as usize] as char).collect()
    }

    pub(crate) fn bits(&self) -> PauliBits {
        PauliBits::new(self.n, self.a)
    }
}

impl fmt::Display for PauliIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for PauliIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let digits = s
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(0),
                'X' => Ok(1),
                'Y' => Ok(2),
                'Z' => Ok(3),
                other => Err(domain!("invalid Pauli character {other:?} in {s:?}")),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::from_digits(&digits)
    }
}

impl Serialize for PauliIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        (self.n, self.a).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PauliIndex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Pair(usize, usize),
            Label(String),
        }
        let parsed = match Repr::deserialize(deserializer)? {
            Repr::Pair(n, a) => PauliIndex::new(n, a),
            Repr::Label(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

pub(crate) fn digits_of(n: usize, a: usize) -> Vec<u8> {
    (0..n).rev().map(|k| ((a >> (2 * k)) & 3) as u8).collect()
}

pub(crate) fn weight_of(n: usize, a: usize) -> usize {
    (0..n).filter(|k| (a >> (2 * k)) & 3 != 0).count()
}

/// Number of n-qubit Pauli strings of exactly weight `w`: `C(n, w) 3^w`.
pub fn count_of_weight(n: usize, w: usize) -> usize {
    if w > n {
        return 0;
    }
    let mut binom = 1usize;
    for i in 0..w {
        binom = binom * (n - i) / (i + 1);
    }
    binom * 3usize.pow(w as u32)
}

/// Bit-mask form of a Pauli string: `λ|j⟩ = i^{ny} (-1)^{|j ∧ z|} |j ⊕ x⟩`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PauliBits {
    pub x: usize,
    pub z: usize,
    ny: u32,
}

impl PauliBits {
    pub fn new(n: usize, a: usize) -> Self {
        let (mut x, mut z, mut ny) = (0usize, 0usize, 0u32);
        for k in 0..n {
            // digit k counted from the least significant end acts on basis bit k
            let bit = 1usize << k;
            match (a >> (2 * k)) & 3 {
                1 => x |= bit,
                2 => {
                    x |= bit;
                    z |= bit;
                    ny += 1;
                }
                3 => z |= bit,
                _ => {}
            }
        }
        Self { x, z, ny }
    }

    fn phase(&self) -> Complex64 {
        match self.ny % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    /// Matrix element `λ[col ⊕ x, col]`.
    #[inline]
    pub fn entry(&self, col: usize) -> Complex64 {
        let sign = if (col & self.z).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        self.phase() * sign
    }

    /// `Tr(λ A)`.
    pub fn trace_with(&self, a: &CMatrix) -> Complex64 {
        let dim = a.nrows();
        let mut acc = ZERO;
        for c in 0..dim {
            // (λA)[c, c] = λ[c, r] A[r, c] with r = c ⊕ x
            let r = c ^ self.x;
            let sign = if (r & self.z).count_ones().is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            acc += a[(r, c)] * sign;
        }
        acc * self.phase()
    }
}

/// Dense `2^n × 2^n` matrix of `λ_a`.
pub fn pauli_matrix(index: PauliIndex) -> CMatrix {
    let dim = 1usize << index.n;
    let bits = index.bits();
    let mut m = CMatrix::zeros(dim, dim);
    for c in 0..dim {
        m[(c ^ bits.x, c)] = bits.entry(c);
    }
    m
}

/// Lazily populated cache of dense Pauli matrices for one qubit count.
///
/// Each entry is written at most once and may be read from many threads.
pub struct PauliMatrixTable {
    n: usize,
    cache: Vec<OnceLock<CMatrix>>,
}

impl PauliMatrixTable {
    pub fn new(n: usize) -> Result<Self> {
        check_qubits(n)?;
        Ok(Self {
            n,
            cache: (0..num_paulis(n)).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize) -> Result<&CMatrix> {
        let index = PauliIndex::new(self.n, a)?;
        Ok(self.cache[a].get_or_init(|| pauli_matrix(index)))
    }

    /// Number of matrices materialized so far.
    pub fn cached(&self) -> usize {
        self.cache.iter().filter(|c| c.get().is_some()).count()
    }
}

/// `Tr(λ_a A)` for a square `2^n × 2^n` matrix.
pub fn pauli_trace(index: PauliIndex, a: &CMatrix) -> Result<Complex64> {
    let dim = 1usize << index.n;
    if a.nrows() != dim || a.ncols() != dim {
        return Err(domain!("matrix is {}x{}, expected {dim}x{dim}", a.nrows(), a.ncols()));
    }
    Ok(index.bits().trace_with(a))
}

/// Pauli-basis coefficients `c_a = 2^-n Tr(λ_a A)` for `a = 0..4^n`.
pub fn pauli_coefficients(a: &CMatrix) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(domain!("matrix is not square"));
    }
    let n = qubits_of(a.nrows())?;
    let dev = hermitian_deviation(a);
    if dev > HERMITIAN_TOL {
        return Err(domain!("matrix is not Hermitian (deviation {dev:.3e})"));
    }
    Ok(coefficients_unchecked(n, a))
}

/// Expansion without validation; callers guarantee shape and hermiticity.
pub(crate) fn coefficients_unchecked(n: usize, a: &CMatrix) -> Vec<f64> {
    let scale = 1.0 / (1usize << n) as f64;
    (0..num_paulis(n))
        .map(|idx| PauliBits::new(n, idx).trace_with(a).re * scale)
        .collect()
}

/// `Σ_a c_a λ_a` for a coefficient vector of length `4^n`.
pub fn matrix_from_coefficients(c: &[f64]) -> Result<CMatrix> {
    let len = c.len();
    if len < 4 || !len.is_power_of_two() || !len.trailing_zeros().is_multiple_of(2) {
        return Err(domain!("coefficient vector length {len} is not 4^n"));
    }
    let n = (len.trailing_zeros() / 2) as usize;
    check_qubits(n)?;
    let dim = 1usize << n;
    let mut m = CMatrix::zeros(dim, dim);
    for (idx, &coef) in c.iter().enumerate() {
        if coef == 0.0 {
            continue;
        }
        let bits = PauliBits::new(n, idx);
        for col in 0..dim {
            m[(col ^ bits.x, col)] += bits.entry(col) * coef;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius, unitarity_deviation, ONE};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Explicit Kronecker products of the 2x2 Pauli matrices.
    fn kron_oracle(digits: &[u8]) -> CMatrix {
        let sigma = |d: u8| -> CMatrix {
            let z = ZERO;
            let entries = match d {
                0 => [ONE, z, z, ONE],
                1 => [z, ONE, ONE, z],
                2 => [z, c(0.0, -1.0), c(0.0, 1.0), z],
                _ => [ONE, z, z, -ONE],
            };
            CMatrix::from_row_slice(2, 2, &entries)
        };
        digits
            .iter()
            .fold(CMatrix::identity(1, 1), |acc, &d| acc.kronecker(&sigma(d)))
    }

    #[test]
    fn digits_examples() {
        assert_eq!(PauliIndex::new(3, 0).unwrap().digits(), vec![0, 0, 0]);
        assert_eq!(PauliIndex::new(3, 3).unwrap().digits(), vec![0, 0, 3]);
        assert_eq!(PauliIndex::new(3, 63).unwrap().digits(), vec![3, 3, 3]);
        assert!(PauliIndex::new(3, 64).is_err());
        assert_eq!(PauliIndex::new(3, 3).unwrap().label(), "IIZ");
    }

    #[test]
    fn weight_examples() {
        assert_eq!(PauliIndex::new(3, 0).unwrap().weight(), 0);
        assert_eq!(PauliIndex::new(3, 3).unwrap().weight(), 1);
        let idx = PauliIndex::from_digits(&[1, 0, 2]).unwrap();
        assert_eq!(idx.value(), 18);
        assert_eq!(idx.weight(), 2);
    }

    #[test]
    fn weight_class_counts() {
        for n in 1..=5 {
            let mut counts = vec![0usize; n + 1];
            for a in 0..num_paulis(n) {
                counts[weight_of(n, a)] += 1;
            }
            assert_eq!(counts[1], 3 * n);
            assert_eq!(count_of_weight(n, 2), 9 * n * (n - 1) / 2);
            for (w, &cnt) in counts.iter().enumerate() {
                assert_eq!(cnt, count_of_weight(n, w));
            }
        }
    }

    #[test]
    fn label_round_trip() {
        let idx: PauliIndex = "XIZ".parse().unwrap();
        assert_eq!(idx.digits(), vec![1, 0, 3]);
        assert_eq!(idx.to_string(), "XIZ");
        assert!("XQ".parse::<PauliIndex>().is_err());
        let json = serde_json::to_string(&idx).unwrap();
        assert_eq!(json, "[3,19]");
        let back: PauliIndex = serde_json::from_str(&json).unwrap();
        assert_eq!(back, idx);
        let from_label: PauliIndex = serde_json::from_str("\"XIZ\"").unwrap();
        assert_eq!(from_label, idx);
    }

    #[test]
    fn matrix_examples() {
        let x = pauli_matrix(PauliIndex::new(1, 1).unwrap());
        assert_eq!(x, CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]));
        let id = pauli_matrix(PauliIndex::new(2, 0).unwrap());
        assert_eq!(id, CMatrix::identity(4, 4));
        let zz = pauli_matrix(PauliIndex::from_digits(&[3, 3]).unwrap());
        let expected = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![ONE, -ONE, -ONE, ONE]));
        assert_eq!(zz, expected);
    }

    #[test]
    fn matrices_match_kronecker_oracle() {
        for n in 1..=3 {
            for a in 0..num_paulis(n) {
                let idx = PauliIndex::new(n, a).unwrap();
                let m = pauli_matrix(idx);
                assert_eq!(m, kron_oracle(&idx.digits()), "n={n} a={a}");
                assert_eq!(hermitian_deviation(&m), 0.0);
                assert!(unitarity_deviation(&m) < 1e-15);
                let tr = m.trace();
                if a == 0 {
                    assert_eq!(tr, c((1 << n) as f64, 0.0));
                } else {
                    assert_eq!(tr, ZERO);
                }
            }
        }
    }

    #[test]
    fn orthogonality_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n = rng.gen_range(1..=4);
            let a = rng.gen_range(0..num_paulis(n));
            let b = if rng.gen_bool(0.3) {
                a
            } else {
                rng.gen_range(0..num_paulis(n))
            };
            let ma = pauli_matrix(PauliIndex::new(n, a).unwrap());
            let mb = pauli_matrix(PauliIndex::new(n, b).unwrap());
            let inner = (&ma * &mb).trace() / (1 << n) as f64;
            let expect = if a == b { ONE } else { ZERO };
            assert!((inner - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn table_caches_lazily() {
        let table = PauliMatrixTable::new(3).unwrap();
        assert_eq!(table.cached(), 0);
        let m = table.get(5).unwrap().clone();
        assert_eq!(table.cached(), 1);
        assert_eq!(&m, table.get(5).unwrap());
        assert!(table.get(64).is_err());
        assert!(matches!(PauliMatrixTable::new(7), Err(Error::Resource(_))));
    }

    #[test]
    fn coefficient_examples() {
        let c_id = pauli_coefficients(&CMatrix::identity(4, 4)).unwrap();
        assert_eq!(c_id[0], 1.0);
        assert!(c_id[1..].iter().all(|&x| x == 0.0));
        let c_x = pauli_coefficients(&pauli_matrix(PauliIndex::new(1, 1).unwrap())).unwrap();
        assert_eq!(c_x, vec![0.0, 1.0, 0.0, 0.0]);

        let bad = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        assert!(matches!(pauli_coefficients(&bad), Err(Error::Domain(_))));

        assert_eq!(
            matrix_from_coefficients(&[1.0, 0.0, 0.0, 0.0]).unwrap(),
            CMatrix::identity(2, 2)
        );
        assert_eq!(matrix_from_coefficients(&[0.0; 16]).unwrap(), CMatrix::zeros(4, 4));
        assert!(matrix_from_coefficients(&[0.0; 8]).is_err());
    }

    #[test]
    fn random_hermitian_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=3 {
            let dim = 1 << n;
            let raw = CMatrix::from_fn(dim, dim, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let herm = crate::linalg::symmetrize(&raw);
            let coeffs = pauli_coefficients(&herm).unwrap();
            let back = matrix_from_coefficients(&coeffs).unwrap();
            let worst = (back - &herm).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(worst < 1e-10);
            assert!(frobenius(&herm) > 0.0);
        }
    }
}
