use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hamiltonian_cs::circuit::{circuit_unitary, sample_circuit};
use hamiltonian_cs::hamiltonian::{random_hamiltonian, SupportPolicy};
use hamiltonian_cs::linalg::{frobenius, CMatrix};
use hamiltonian_cs::pauli::{matrix_from_coefficients, pauli_coefficients, pauli_matrix, PauliIndex};
use hamiltonian_cs::sensing::{build_compression_matrix, select_measurements, MeasurementPlan};
use hamiltonian_cs::thermal::{gibbs_state, hamiltonian_from_state, polarization_vector, state_from_polarization};

fn random_state(n: usize, s: usize, eta_beta: f64, seed: u64) -> hamiltonian_cs::thermal::DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = random_hamiltonian(n, s, SupportPolicy::UniformRandom, &mut rng).unwrap();
    gibbs_state(&h.matrix(eta_beta)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weight_is_permutation_invariant(digits in prop::collection::vec(0u8..4, 1..=6), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let a = PauliIndex::from_digits(&digits).unwrap();
        let mut shuffled = digits.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let b = PauliIndex::from_digits(&shuffled).unwrap();
        prop_assert_eq!(a.weight(), b.weight());
        prop_assert!(a.weight() <= digits.len());
    }

    #[test]
    fn products_close_up_to_a_phase(n in 1usize..=3, a in 0usize..64, b in 0usize..64) {
        let d = 1usize << (2 * n);
        let (a, b) = (a % d, b % d);
        // digitwise the product index is the XOR of the bit-pair encodings
        let pa = PauliIndex::new(n, a).unwrap();
        let pb = PauliIndex::new(n, b).unwrap();
        let digits: Vec<u8> = pa.digits().iter().zip(pb.digits()).map(|(&x, y)| {
            let bits = |k: u8| match k { 0 => (0, 0), 1 => (1, 0), 2 => (1, 1), _ => (0, 1) };
            let ((x1, z1), (x2, z2)) = (bits(x), bits(y));
            match (x1 ^ x2, z1 ^ z2) { (0, 0) => 0, (1, 0) => 1, (1, 1) => 2, _ => 3 }
        }).collect();
        let c = PauliIndex::from_digits(&digits).unwrap();
        let prod = pauli_matrix(pa) * pauli_matrix(pb);
        let target = pauli_matrix(c);
        let phase = (target.adjoint() * &prod).trace() / Complex64::new((1usize << n) as f64, 0.0);
        prop_assert!((phase.norm() - 1.0).abs() < 1e-12);
        prop_assert!(frobenius(&(prod - target * phase)) < 1e-12);
    }

    #[test]
    fn expansion_round_trip(n in 1usize..=3, seed in any::<u64>()) {
        use rand::Rng;
        let d = 1usize << n;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = CMatrix::from_fn(d, d, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let a = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
        let back = matrix_from_coefficients(&pauli_coefficients(&a).unwrap()).unwrap();
        prop_assert!(frobenius(&(back - a)) < 1e-10);
    }

    #[test]
    fn purity_identity(n in 1usize..=4, s in 1usize..=6, eb in prop::sample::select(vec![1e-4, 0.1, 1.0]), seed in any::<u64>()) {
        let s = s.min(3 * n);
        let rho = random_state(n, s, eb, seed);
        let v = polarization_vector(&rho);
        let d = (1usize << n) as f64;
        prop_assert!((v.norm_sqr() - (d * rho.purity() - 1.0)).abs() < 1e-10);
    }

    #[test]
    fn state_and_log_identities(n in 1usize..=4, s in 1usize..=6, eb in prop::sample::select(vec![1e-4, 0.1, 1.0]), seed in any::<u64>()) {
        let s = s.min(3 * n);
        let rho = random_state(n, s, eb, seed);
        let v = polarization_vector(&rho);
        let est = state_from_polarization(&v).unwrap();
        prop_assert!(frobenius(&(&est.matrix - rho.matrix())) < 1e-10);
        prop_assert!(est.is_physical());
        let (bh, _) = hamiltonian_from_state(&est.matrix).unwrap();
        prop_assert!(bh.trace().norm() < 1e-12);
    }

    #[test]
    fn partial_compression_is_a_contraction(m in 1usize..=63, seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = circuit_unitary(&sample_circuit(3, Some(500), rng.gen()).unwrap()).unwrap();
        let plan = select_measurements(3, m, &mut rng, true).unwrap();
        let c = build_compression_matrix(&u, &plan).unwrap().rows;
        let v = DVector::from_fn(63, |_, _| rng.gen_range(-1.0..1.0));
        prop_assert!((&c * &v).norm() <= v.norm() + 1e-8);
    }
}

#[test]
fn full_compression_is_an_isometry() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let u = circuit_unitary(&sample_circuit(3, None, 41).unwrap()).unwrap();
    let plan = MeasurementPlan::new(3, (1..=63).collect(), false).unwrap();
    let c = build_compression_matrix(&u, &plan).unwrap().rows;
    for _ in 0..10 {
        use rand::Rng;
        let v = DVector::from_fn(63, |_, _| rng.gen_range(-1.0..1.0));
        assert!(((&c * &v).norm() - v.norm()).abs() < 1e-8);
    }
}

#[test]
fn colder_states_are_more_polarized() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10 {
        let h = random_hamiltonian(3, 3, SupportPolicy::UniformRandom, &mut rng).unwrap();
        let hot = polarization_vector(&gibbs_state(&h.matrix(1e-4)).unwrap());
        let cold = polarization_vector(&gibbs_state(&h.matrix(1.0)).unwrap());
        assert!(hot.norm_sqr() < cold.norm_sqr());
    }
}
