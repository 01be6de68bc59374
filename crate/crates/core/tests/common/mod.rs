#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use shadowalloc::{parse_hamiltonian, Pauli, PauliString, WeightedHamiltonian};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> WeightedHamiltonian {
    let text = std::fs::read_to_string(fixture_path(name)).unwrap();
    parse_hamiltonian(&text).unwrap()
}

pub const FIXTURES: [&str; 6] = [
    "two_qubit_mixed.txt",
    "two_qubit_heisenberg.txt",
    "two_qubit_field.txt",
    "three_qubit_ising.txt",
    "h2_sto3g_jw.txt",
    "six_qubit_heisenberg.txt",
];

pub const TWO_QUBIT_FIXTURES: [&str; 3] = [
    "two_qubit_mixed.txt",
    "two_qubit_heisenberg.txt",
    "two_qubit_field.txt",
];

fn single(label: Pauli) -> DMatrix<Complex64> {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let entries = match label {
        Pauli::I => [l, o, o, l],
        Pauli::X => [o, l, l, o],
        Pauli::Y => [o, -i, i, o],
        Pauli::Z => [l, o, o, -l],
    };
    DMatrix::from_row_slice(2, 2, &entries)
}

/// Dense matrix by Kronecker products, qubit 0 leftmost.
pub fn dense_pauli(p: &PauliString) -> DMatrix<Complex64> {
    let mut m = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    for label in p.labels() {
        m = m.kronecker(&single(label));
    }
    m
}

pub fn dense_hamiltonian(h: &WeightedHamiltonian) -> DMatrix<Complex64> {
    let d = 1usize << h.n_qubits();
    let mut m = DMatrix::<Complex64>::identity(d, d) * Complex64::new(h.identity_offset(), 0.0);
    for t in h.terms() {
        m += dense_pauli(&t.observable) * Complex64::new(t.coefficient, 0.0);
    }
    m
}

pub fn dense_ground_energy(h: &WeightedHamiltonian) -> f64 {
    dense_hamiltonian(h)
        .symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

pub fn all_strings(n: usize) -> Vec<PauliString> {
    let all = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    (0..4usize.pow(n as u32))
        .map(|mut k| {
            let mut labels = vec![Pauli::I; n];
            for q in (0..n).rev() {
                labels[q] = all[k % 4];
                k /= 4;
            }
            PauliString::from_labels(labels)
        })
        .collect()
}

pub fn random_string<R: Rng>(n: usize, rng: &mut R) -> PauliString {
    loop {
        let p = PauliString::from_labels(
            (0..n).map(|_| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..4)]),
        );
        if !p.is_identity() {
            return p;
        }
    }
}

/// Up to `max_terms` distinct non-identity terms with coefficients of
/// magnitude in `[0.05, 1]` and random sign.
pub fn random_hamiltonian<R: Rng>(n: usize, max_terms: usize, rng: &mut R) -> WeightedHamiltonian {
    let available = 4usize.pow(n as u32) - 1;
    let m = rng.random_range(1..=max_terms.min(available));
    let mut words: Vec<PauliString> = Vec::new();
    while words.len() < m {
        let p = random_string(n, rng);
        if !words.contains(&p) {
            words.push(p);
        }
    }
    let terms = words.into_iter().map(|p| {
        let mag = rng.random_range(0.05..=1.0);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        (sign * mag, p)
    });
    WeightedHamiltonian::new(n, terms, 0.0).unwrap()
}
