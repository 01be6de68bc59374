//! Dense statevector backend.
//!
//! Basis index convention: qubit 0 is the most significant bit of a
//! computational-basis index, and a measured bit 0 is reported as outcome
//! `+1`, bit 1 as `−1`.
//!
//! Hamiltonians are never materialized. A Pauli string acts on a basis state
//! as `P|b⟩ = i^{#Y} (−1)^{|b ∧ z|} |b ⊕ x⟩`, which costs `O(2^n)` per term.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::hamiltonian::WeightedHamiltonian;
use crate::pauli::{Pauli, PauliString};

pub const DEFAULT_MAX_QUBITS: usize = 14;

const NORM_TOLERANCE: f64 = 1e-10;

/// A normalized pure state on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        QuantumState { n, amplitudes }
    }

    /// Wraps an amplitude vector whose length is a power of two and whose
    /// norm is 1 within `1e-10`.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::Contract(format!(
                "amplitude vector length {len} is not a power of two"
            )));
        }
        let norm = norm_sqr(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Contract(format!("state norm² is {norm}, expected 1")));
        }
        Ok(QuantumState {
            n: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = norm_sqr(&amplitudes).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Contract("cannot normalize a zero vector".into()));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        QuantumState::from_amplitudes(amplitudes)
    }

    /// Product of single-qubit `+1` eigenstates of the labels in `basis`
    /// (identity positions are set to `|0⟩`).
    pub fn product_eigenstate(basis: &PauliString) -> Self {
        let n = basis.len();
        let mut state = QuantumState::zero(n);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for q in 0..n {
            let single = match basis.get(q) {
                Pauli::I | Pauli::Z => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                Pauli::X => [Complex64::new(r, 0.0), Complex64::new(r, 0.0)],
                Pauli::Y => [Complex64::new(r, 0.0), Complex64::new(0.0, r)],
            };
            // state currently has qubit q in |0⟩; map to `single`
            let bit = 1usize << (n - 1 - q);
            for b in 0..state.amplitudes.len() {
                if b & bit == 0 {
                    let a = state.amplitudes[b];
                    state.amplitudes[b] = a * single[0];
                    state.amplitudes[b | bit] = a * single[1];
                }
            }
        }
        state
    }

    /// Normalized complex Gaussian vector (Haar-distributed direction).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        use rand_distr::{Distribution, StandardNormal};
        let amps: Vec<Complex64> = (0..1usize << n)
            .map(|_| {
                Complex64::new(
                    StandardNormal.sample(&mut *rng),
                    StandardNormal.sample(&mut *rng),
                )
            })
            .collect();
        QuantumState::normalized(amps).expect("gaussian vector is nonzero")
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Text form: a header line `n <qubits>` followed by one `re im` pair per
    /// amplitude in basis-index order. `#` comments are allowed.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "n {}", self.n).unwrap();
        for a in &self.amplitudes {
            writeln!(out, "{:.17e} {:.17e}", a.re, a.im).unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line, header) = lines.next().ok_or(Error::Format {
            line: 1,
            message: "missing \"n <qubits>\" header".into(),
        })?;
        let n: usize = header
            .strip_prefix('n')
            .and_then(|rest| rest.trim().parse().ok())
            .ok_or_else(|| Error::Format {
                line,
                message: format!("expected \"n <qubits>\", got {header:?}"),
            })?;
        if n > 30 {
            return Err(Error::ResourceCap {
                what: "state file",
                n,
                cap: 30,
            });
        }
        let mut amps = Vec::with_capacity(1 << n);
        for (line, content) in lines {
            let parts: Vec<&str> = content.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| Error::Format {
                    line,
                    message: format!("unparsable number {s:?}"),
                })
            };
            match parts.as_slice() {
                [re, im] => amps.push(Complex64::new(parse(re)?, parse(im)?)),
                _ => {
                    return Err(Error::Format {
                        line,
                        message: "expected \"<re> <im>\"".into(),
                    })
                }
            }
        }
        if amps.len() != 1 << n {
            return Err(Error::Format {
                line: 0,
                message: format!("expected {} amplitudes, found {}", 1usize << n, amps.len()),
            });
        }
        QuantumState::from_amplitudes(amps)
    }
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

const I_POWERS: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

/// Precomputed action of one Pauli string on basis indices.
#[derive(Debug, Clone, Copy)]
struct PauliAction {
    x: usize,
    z: usize,
    phase: Complex64,
}

impl PauliAction {
    fn new(p: &PauliString) -> Self {
        let (x, z) = p.index_masks();
        PauliAction {
            x,
            z,
            phase: I_POWERS[p.y_count() % 4],
        }
    }

    #[inline]
    fn coefficient(&self, b: usize) -> Complex64 {
        if (b & self.z).count_ones().is_multiple_of(2) {
            self.phase
        } else {
            -self.phase
        }
    }

    /// `out += scale · P v`
    fn apply_add(&self, scale: f64, v: &[Complex64], out: &mut [Complex64]) {
        for (b, &amp) in v.iter().enumerate() {
            out[b ^ self.x] += amp * self.coefficient(b) * scale;
        }
    }
}

/// Returns `P v` for a single Pauli string.
pub fn apply_pauli(p: &PauliString, v: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    PauliAction::new(p).apply_add(1.0, v, &mut out);
    out
}

/// Matrix-free `H` (including its identity offset).
pub struct HamiltonianOperator {
    actions: Vec<(f64, PauliAction)>,
    offset: f64,
    dim: usize,
}

impl HamiltonianOperator {
    pub fn new(h: &WeightedHamiltonian) -> Self {
        HamiltonianOperator {
            actions: h
                .terms()
                .iter()
                .map(|t| (t.coefficient, PauliAction::new(&t.observable)))
                .collect(),
            offset: h.identity_offset(),
            dim: 1 << h.n_qubits(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = v.iter().map(|a| a * self.offset).collect();
        for (c, act) in &self.actions {
            act.apply_add(*c, v, &mut out);
        }
        out
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::ResourceCap {
            what: "statevector simulation",
            n,
            cap,
        });
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct GroundState {
    /// Lowest eigenvalue including the identity offset.
    pub energy: f64,
    pub state: QuantumState,
    /// `‖H v − E v‖₂` of the returned vector.
    pub residual: f64,
}

pub fn ground_state(h: &WeightedHamiltonian) -> Result<GroundState> {
    ground_state_with_cap(h, DEFAULT_MAX_QUBITS)
}

/// Restarted Lanczos with full reorthogonalization on the matrix-free
/// operator. Converged when the residual drops below `1e-8 ‖h‖₁`.
pub fn ground_state_with_cap(h: &WeightedHamiltonian, cap: usize) -> Result<GroundState> {
    check_cap(h.n_qubits(), cap)?;
    let op = HamiltonianOperator::new(h);
    let tolerance = 1e-8 * h.norms().l1;
    let dim = op.dim();
    let krylov = dim.min(80);
    const MAX_RESTARTS: usize = 200;

    let mut rng = crate::rng::from_seed(0x5eed_1a2c);
    let mut start = QuantumState::random(h.n_qubits(), &mut rng).amplitudes;
    let mut best: Option<(f64, Vec<Complex64>, f64)> = None;

    for _ in 0..MAX_RESTARTS {
        let vector = lanczos_pass(&op, &start, krylov);
        let hv = op.apply(&vector);
        let energy = inner(&vector, &hv).re;
        let residual = hv
            .iter()
            .zip(&vector)
            .map(|(a, b)| (a - b * energy).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if best.as_ref().is_none_or(|b| residual < b.2) {
            best = Some((energy, vector.clone(), residual));
        }
        if residual <= tolerance {
            return Ok(GroundState {
                energy,
                state: QuantumState::normalized(vector)?,
                residual,
            });
        }
        start = vector;
    }
    let residual = best.map(|b| b.2).unwrap_or(f64::INFINITY);
    Err(Error::NonConvergence {
        residual,
        tolerance,
    })
}

/// One Lanczos pass of at most `steps` vectors from `start`; returns the
/// normalized Ritz vector of the lowest Ritz value.
fn lanczos_pass(op: &HamiltonianOperator, start: &[Complex64], steps: usize) -> Vec<Complex64> {
    let norm = norm_sqr(start).sqrt();
    let mut basis: Vec<Vec<Complex64>> = vec![start.iter().map(|a| a / norm).collect()];
    let mut diag = Vec::new();
    let mut off = Vec::new();
    loop {
        let j = basis.len() - 1;
        let mut w = op.apply(&basis[j]);
        let a = inner(&basis[j], &w).re;
        diag.push(a);
        // two rounds of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for v in &basis {
                let c = inner(v, &w);
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= c * vi;
                }
            }
        }
        let beta = norm_sqr(&w).sqrt();
        if basis.len() == steps || beta <= 1e-13 * (a.abs() + 1.0) {
            break;
        }
        off.push(beta);
        basis.push(w.into_iter().map(|x| x / beta).collect());
    }
    let (values, vectors) = tridiagonal_eigen(&diag, &off);
    let k = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    let mut ritz = vec![Complex64::new(0.0, 0.0); op.dim()];
    for (v, s) in basis.iter().zip(&vectors[k]) {
        for (r, x) in ritz.iter_mut().zip(v) {
            *r += x * s;
        }
    }
    let norm = norm_sqr(&ritz).sqrt();
    ritz.iter_mut().for_each(|r| *r /= norm);
    ritz
}

/// Eigen-decomposition of the symmetric tridiagonal matrix with diagonal
/// `diag` and off-diagonal `off` by implicit QL iterations. Returns the
/// eigenvalues and, for each, its eigenvector as a row.
fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e: Vec<f64> = off.iter().copied().chain(std::iter::once(0.0)).collect();
    e.truncate(n);
    // z[i][k]: component i of eigenvector k
    let mut z = vec![vec![0.0; n]; n];
    for (i, row) in z.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.iter_mut() {
                    let t = row[i + 1];
                    row[i + 1] = s * row[i] + c * t;
                    row[i] = c * row[i] - s * t;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    let vectors = (0..n).map(|k| (0..n).map(|i| z[i][k]).collect()).collect();
    (d, vectors)
}

/// `⟨ψ|O|ψ⟩`.
pub fn expectation(state: &QuantumState, obs: &PauliString) -> Result<f64> {
    if obs.len() != state.n {
        return Err(Error::LengthMismatch {
            expected: state.n,
            found: obs.len(),
        });
    }
    let act = PauliAction::new(obs);
    let amps = &state.amplitudes;
    let value: Complex64 = amps
        .iter()
        .enumerate()
        .map(|(b, &a)| amps[b ^ act.x].conj() * act.coefficient(b) * a)
        .sum();
    Ok(value.re)
}

/// `⟨ψ|H|ψ⟩` including the identity offset.
pub fn energy(state: &QuantumState, h: &WeightedHamiltonian) -> Result<f64> {
    let mut e = h.identity_offset();
    for t in h.terms() {
        e += t.coefficient * expectation(state, &t.observable)?;
    }
    Ok(e)
}

/// One shot in a full-support product basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementRecord {
    pub setting: PauliString,
    /// `+1` for bit 0, `−1` for bit 1, indexed by qubit.
    pub outcome: Vec<i8>,
}

impl MeasurementRecord {
    /// Product of outcomes over `support(obs)`: a single-shot sample of
    /// `⟨obs⟩` when `obs` is qubit-wise compatible with the setting.
    pub fn parity(&self, obs: &PauliString) -> i8 {
        obs.support().iter().map(|&q| self.outcome[q]).product()
    }
}

/// Rotates amplitudes so that a computational-basis measurement realizes
/// the product basis `setting`: `X -> H`, `Y -> H S†`, `Z -> 1`.
pub fn rotate_to_basis(state: &QuantumState, setting: &PauliString) -> Result<Vec<Complex64>> {
    check_full_setting(state, setting)?;
    let n = state.n;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = state.amplitudes.clone();
    for q in 0..n {
        let label = setting.get(q);
        if label == Pauli::Z {
            continue;
        }
        let bit = 1usize << (n - 1 - q);
        for b in 0..amps.len() {
            if b & bit != 0 {
                continue;
            }
            let a0 = amps[b];
            let mut a1 = amps[b | bit];
            if label == Pauli::Y {
                a1 *= Complex64::new(0.0, -1.0);
            }
            amps[b] = (a0 + a1) * r;
            amps[b | bit] = (a0 - a1) * r;
        }
    }
    Ok(amps)
}

fn check_full_setting(state: &QuantumState, setting: &PauliString) -> Result<()> {
    if setting.len() != state.n {
        return Err(Error::LengthMismatch {
            expected: state.n,
            found: setting.len(),
        });
    }
    if !setting.is_full_support() {
        return Err(Error::Contract(format!(
            "measurement setting {setting} does not have full support"
        )));
    }
    Ok(())
}

fn cumulative(amps: &[Complex64]) -> Vec<f64> {
    let mut acc = 0.0;
    amps.iter()
        .map(|a| {
            acc += a.norm_sqr();
            acc
        })
        .collect()
}

fn draw<R: Rng + ?Sized>(cdf: &[f64], n: usize, setting: &PauliString, rng: &mut R) -> MeasurementRecord {
    let total = *cdf.last().unwrap();
    let u: f64 = rng.random::<f64>() * total;
    let index = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
    let outcome = (0..n)
        .map(|q| if index >> (n - 1 - q) & 1 == 0 { 1 } else { -1 })
        .collect();
    MeasurementRecord {
        setting: setting.clone(),
        outcome,
    }
}

/// Samples one outcome of measuring every qubit of `state` in the basis
/// given by `setting`.
pub fn sample_outcome<R: Rng + ?Sized>(
    state: &QuantumState,
    setting: &PauliString,
    rng: &mut R,
) -> Result<MeasurementRecord> {
    let amps = rotate_to_basis(state, setting)?;
    Ok(draw(&cumulative(&amps), state.n, setting, rng))
}

/// Repeated sampling from a fixed state, caching the outcome distribution
/// of every setting seen so far.
pub struct Sampler<'s> {
    state: &'s QuantumState,
    cache: HashMap<PauliString, Vec<f64>>,
}

impl<'s> Sampler<'s> {
    pub fn new(state: &'s QuantumState) -> Self {
        Sampler {
            state,
            cache: HashMap::new(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(
        &mut self,
        setting: &PauliString,
        rng: &mut R,
    ) -> Result<MeasurementRecord> {
        if !self.cache.contains_key(setting) {
            let cdf = cumulative(&rotate_to_basis(self.state, setting)?);
            self.cache.insert(setting.clone(), cdf);
        }
        Ok(draw(&self.cache[setting], self.state.n, setting, rng))
    }
}
