//! Random circuits over the gate set `{H, P, P†, T = R(π/8), CNOT}`.
//!
//! A circuit is a sequence `g_1 … g_L` drawn uniformly with replacement from
//! every single-qubit copy of `H, P, P†, T` and every ordered CNOT pair. The
//! realized unitary is `U = g_L ⋯ g_1`, i.e. `g_1` acts on a state first.
//! Qubits are numbered from 1 and qubit 1 is the most significant basis bit.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::{unitarity_deviation, CMatrix};
use crate::pauli::check_qubits;

/// Unitarity is asserted to this tolerance after every realization.
pub const UNITARITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    Hadamard(usize),
    Phase(usize),
    PhaseDagger(usize),
    /// `R(π/8) = diag(1, e^{iπ/4})`.
    T(usize),
    Cnot {
        control: usize,
        target: usize,
    },
}

impl Gate {
    fn validate(&self, n: usize) -> Result<()> {
        let in_range = |q: usize| (1..=n).contains(&q);
        let ok = match *self {
            Gate::Hadamard(q) | Gate::Phase(q) | Gate::PhaseDagger(q) | Gate::T(q) => in_range(q),
            Gate::Cnot { control, target } => in_range(control) && in_range(target) && control != target,
        };
        if ok {
            Ok(())
        } else {
            Err(domain!("gate {self:?} is invalid for {n} qubits"))
        }
    }
}

/// Size of the gate set: `4n` single-qubit gates plus `n(n-1)` ordered CNOTs.
pub fn gate_set_size(n: usize) -> usize {
    4 * n + n * n.saturating_sub(1)
}

/// The gate set in a fixed enumeration order.
pub fn gate_set(n: usize) -> Vec<Gate> {
    let mut gates = Vec::with_capacity(gate_set_size(n));
    for q in 1..=n {
        gates.extend([Gate::Hadamard(q), Gate::Phase(q), Gate::PhaseDagger(q), Gate::T(q)]);
    }
    for control in 1..=n {
        for target in 1..=n {
            if control != target {
                gates.push(Gate::Cnot { control, target });
            }
        }
    }
    gates
}

/// Default circuit length `n^8`.
pub fn default_length(n: usize) -> usize {
    n.pow(8)
}

/// A sampled circuit. Only `(n, length, seed)` are serialized; the gate list
/// is regenerated from the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub n: usize,
    pub length: usize,
    pub seed: u64,
    #[serde(skip)]
    gates: Vec<Gate>,
}

impl CircuitSpec {
    /// Explicit gate list, mainly for tests. The seed is recorded as 0.
    pub fn from_gates(n: usize, gates: Vec<Gate>) -> Result<Self> {
        check_qubits(n)?;
        for g in &gates {
            g.validate(n)?;
        }
        Ok(Self {
            n,
            length: gates.len(),
            seed: 0,
            gates,
        })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn is_default_length(&self) -> bool {
        self.length == default_length(self.n)
    }

    /// Regenerates the gate list after deserialization.
    pub fn rehydrate(&mut self) -> Result<()> {
        let fresh = sample_circuit(self.n, Some(self.length), self.seed)?;
        self.gates = fresh.gates;
        Ok(())
    }
}

/// Draws `length` gates (default `n^8`) uniformly with replacement.
pub fn sample_circuit(n: usize, length: Option<usize>, seed: u64) -> Result<CircuitSpec> {
    check_qubits(n)?;
    let length = length.unwrap_or_else(|| default_length(n));
    let set = gate_set(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gates = (0..length).map(|_| set[rng.gen_range(0..set.len())]).collect();
    Ok(CircuitSpec { n, length, seed, gates })
}

/// Row-major dense accumulator that gates are multiplied into from the left.
struct Accumulator {
    n: usize,
    dim: usize,
    data: Vec<Complex64>,
}

impl Accumulator {
    fn identity(n: usize) -> Self {
        let dim = 1usize << n;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self { n, dim, data }
    }

    fn bit(&self, qubit: usize) -> usize {
        1usize << (self.n - qubit)
    }

    fn scale_rows(&mut self, qubit: usize, factor: Complex64) {
        let bit = self.bit(qubit);
        let dim = self.dim;
        for (r, row) in self.data.chunks_exact_mut(dim).enumerate() {
            if r & bit != 0 {
                row.iter_mut().for_each(|z| *z *= factor);
            }
        }
    }

    fn hadamard(&mut self, qubit: usize) {
        let bit = self.bit(qubit);
        let dim = self.dim;
        for r0 in (0..dim).filter(|r| r & bit == 0) {
            let r1 = r0 | bit;
            for c in 0..dim {
                let a = self.data[r0 * dim + c];
                let b = self.data[r1 * dim + c];
                self.data[r0 * dim + c] = (a + b) * FRAC_1_SQRT_2;
                self.data[r1 * dim + c] = (a - b) * FRAC_1_SQRT_2;
            }
        }
    }

    fn cnot(&mut self, control: usize, target: usize) {
        let cbit = self.bit(control);
        let tbit = self.bit(target);
        let dim = self.dim;
        for r0 in (0..dim).filter(|r| r & cbit != 0 && r & tbit == 0) {
            let r1 = r0 | tbit;
            for c in 0..dim {
                self.data.swap(r0 * dim + c, r1 * dim + c);
            }
        }
    }

    fn apply(&mut self, gate: Gate) {
        match gate {
            Gate::Hadamard(q) => self.hadamard(q),
            Gate::Phase(q) => self.scale_rows(q, Complex64::new(0.0, 1.0)),
            Gate::PhaseDagger(q) => self.scale_rows(q, Complex64::new(0.0, -1.0)),
            Gate::T(q) => self.scale_rows(q, Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2)),
            Gate::Cnot { control, target } => self.cnot(control, target),
        }
    }

    fn into_matrix(self) -> CMatrix {
        CMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }
}

/// Realizes `U = g_L ⋯ g_1` and checks unitarity to [`UNITARITY_TOL`].
pub fn circuit_unitary(spec: &CircuitSpec) -> Result<CMatrix> {
    check_qubits(spec.n)?;
    if spec.gates.len() != spec.length {
        return Err(domain!(
            "circuit holds {} gates but records length {}; rehydrate it first",
            spec.gates.len(),
            spec.length
        ));
    }
    let mut acc = Accumulator::identity(spec.n);
    for &g in &spec.gates {
        g.validate(spec.n)?;
        acc.apply(g);
    }
    let u = acc.into_matrix();
    let dev = unitarity_deviation(&u);
    if dev > UNITARITY_TOL {
        return Err(Error::Numerical(format!("circuit lost unitarity (deviation {dev:.3e})")));
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius, hermitian_eigh, ONE, ZERO};
    use crate::pauli::{pauli_matrix, PauliIndex};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Single-qubit gate lifted to n qubits via Kronecker products.
    fn lift(n: usize, qubit: usize, g: &CMatrix) -> CMatrix {
        let mut out = CMatrix::identity(1, 1);
        for q in 1..=n {
            let factor = if q == qubit { g.clone() } else { CMatrix::identity(2, 2) };
            out = out.kronecker(&factor);
        }
        out
    }

    fn dense_gate(n: usize, gate: Gate) -> CMatrix {
        let s = FRAC_1_SQRT_2;
        let single = |e: [Complex64; 4]| CMatrix::from_row_slice(2, 2, &e);
        match gate {
            Gate::Hadamard(q) => lift(n, q, &single([c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)])),
            Gate::Phase(q) => lift(n, q, &single([ONE, ZERO, ZERO, c(0.0, 1.0)])),
            Gate::PhaseDagger(q) => lift(n, q, &single([ONE, ZERO, ZERO, c(0.0, -1.0)])),
            Gate::T(q) => lift(n, q, &single([ONE, ZERO, ZERO, c(s, s)])),
            Gate::Cnot { control, target } => {
                let dim = 1 << n;
                let cb = 1 << (n - control);
                let tb = 1 << (n - target);
                CMatrix::from_fn(dim, dim, |r, col| {
                    let image = if col & cb != 0 { col ^ tb } else { col };
                    if r == image {
                        ONE
                    } else {
                        ZERO
                    }
                })
            }
        }
    }

    #[test]
    fn gate_set_sizes() {
        assert_eq!(gate_set_size(1), 4);
        assert_eq!(gate_set_size(2), 10);
        assert_eq!(gate_set_size(3), 18);
        for n in 1..=5 {
            assert_eq!(gate_set(n).len(), gate_set_size(n));
        }
        let cnots = gate_set(3).iter().filter(|g| matches!(g, Gate::Cnot { .. })).count();
        assert_eq!(cnots, 6);
    }

    #[test]
    fn default_lengths() {
        assert_eq!(sample_circuit(3, None, 1).unwrap().gates().len(), 6561);
        assert_eq!(default_length(5), 390_625);
    }

    #[test]
    fn tiny_circuits() {
        let empty = CircuitSpec::from_gates(2, vec![]).unwrap();
        assert_eq!(circuit_unitary(&empty).unwrap(), CMatrix::identity(4, 4));
        let h = circuit_unitary(&CircuitSpec::from_gates(1, vec![Gate::Hadamard(1)]).unwrap()).unwrap();
        let s = FRAC_1_SQRT_2;
        let expected = CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]);
        assert!(frobenius(&(h - expected)) < 1e-15);
        let hh = circuit_unitary(&CircuitSpec::from_gates(1, vec![Gate::Hadamard(1); 2]).unwrap()).unwrap();
        assert!(frobenius(&(hh - CMatrix::identity(2, 2))) < 1e-12);
        assert!(CircuitSpec::from_gates(2, vec![Gate::Cnot { control: 1, target: 1 }]).is_err());
        assert!(CircuitSpec::from_gates(2, vec![Gate::T(3)]).is_err());
    }

    #[test]
    fn realization_matches_dense_product() {
        let spec = sample_circuit(3, Some(200), 77).unwrap();
        let mut dense = CMatrix::identity(8, 8);
        for &g in spec.gates() {
            dense = dense_gate(3, g) * dense;
        }
        let u = circuit_unitary(&spec).unwrap();
        assert!(frobenius(&(u - dense)) < 1e-10);
    }

    #[test]
    fn determinism_and_rehydration() {
        let a = sample_circuit(3, Some(500), 42).unwrap();
        let b = sample_circuit(3, Some(500), 42).unwrap();
        assert_eq!(a.gates(), b.gates());
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"{"n":3,"length":500,"seed":42}"#);
        let mut back: CircuitSpec = serde_json::from_str(&json).unwrap();
        assert!(circuit_unitary(&back).is_err());
        back.rehydrate().unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn gate_frequencies_are_uniform() {
        let n = 3;
        let len = 180_000;
        let spec = sample_circuit(n, Some(len), 9).unwrap();
        let set = gate_set(n);
        let p = 1.0 / set.len() as f64;
        let mean = len as f64 * p;
        let sigma = (len as f64 * p * (1.0 - p)).sqrt();
        for g in &set {
            let count = spec.gates().iter().filter(|x| *x == g).count() as f64;
            assert!((count - mean).abs() < 5.0 * sigma, "{g:?}: {count}");
        }
    }

    #[test]
    fn conjugation_preserves_pauli_spectrum() {
        let spec = sample_circuit(3, None, 5).unwrap();
        let u = circuit_unitary(&spec).unwrap();
        for a in [1usize, 17, 42, 63] {
            let lam = pauli_matrix(PauliIndex::new(3, a).unwrap());
            let rotated = &u * lam * u.adjoint();
            let (vals, _) = hermitian_eigh(&rotated).unwrap();
            for (i, v) in vals.iter().enumerate() {
                let expect = if i < 4 { -1.0 } else { 1.0 };
                assert!((v - expect).abs() < 1e-8);
            }
        }
    }
}
