//! Bit-packed Pauli strings.
//!
//! A string over `{I, X, Y, Z}` of length `n` is stored as two bit vectors in
//! the symplectic convention: `X -> (x=1, z=0)`, `Z -> (0, 1)`, `Y -> (1, 1)`.
//! Qubit 0 is the leftmost character of the text form. Phases are never
//! tracked; none of the compatibility or estimation logic depends on them.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const WORD: usize = 64;

/// Single-qubit Pauli label. The derived order `I < X < Y < Z` is the
/// lexicographic order used for deterministic tie-breaking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// A Pauli word of fixed length, used both for observables and (when every
/// position is non-identity) for measurement settings.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

impl PauliString {
    /// The all-identity string on `n` qubits.
    pub fn identity(n: usize) -> Self {
        let words = n.div_ceil(WORD);
        PauliString {
            n,
            x: vec![0; words],
            z: vec![0; words],
        }
    }

    pub fn from_labels<I: IntoIterator<Item = Pauli>>(labels: I) -> Self {
        let labels: Vec<Pauli> = labels.into_iter().collect();
        let mut p = PauliString::identity(labels.len());
        for (q, &label) in labels.iter().enumerate() {
            p.set(q, label);
        }
        p
    }

    /// Number of qubits.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        assert!(qubit < self.n, "qubit {qubit} out of range for length {}", self.n);
        let (w, b) = (qubit / WORD, qubit % WORD);
        Pauli::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    pub fn set(&mut self, qubit: usize, label: Pauli) {
        assert!(qubit < self.n, "qubit {qubit} out of range for length {}", self.n);
        let (w, b) = (qubit / WORD, qubit % WORD);
        let (xb, zb) = label.bits();
        let mask = 1u64 << b;
        self.x[w] = (self.x[w] & !mask) | if xb { mask } else { 0 };
        self.z[w] = (self.z[w] & !mask) | if zb { mask } else { 0 };
    }

    pub fn labels(&self) -> impl Iterator<Item = Pauli> + '_ {
        (0..self.n).map(move |q| self.get(q))
    }

    /// Qubit indices carrying a non-identity label, in increasing order.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.weight());
        for (w, (&x, &z)) in self.x.iter().zip(&self.z).enumerate() {
            let mut bits = x | z;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                out.push(w * WORD + b);
                bits &= bits - 1;
            }
        }
        out
    }

    /// Size of the support (the Pauli weight).
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    /// True when no position is the identity, i.e. the string is a complete
    /// measurement setting.
    pub fn is_full_support(&self) -> bool {
        self.weight() == self.n
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    fn check_len(&self, other: &PauliString) -> Result<()> {
        if self.n != other.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    /// General commutation: the number of positions where both labels are
    /// non-identity and differ is even.
    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_len(other)?;
        let anti: u32 = self
            .x
            .iter()
            .zip(&self.z)
            .zip(other.x.iter().zip(&other.z))
            .map(|((x1, z1), (x2, z2))| ((x1 & z2) ^ (z1 & x2)).count_ones())
            .sum();
        Ok(anti.is_multiple_of(2))
    }

    /// Qubit-wise commutation: at every position the labels agree or one of
    /// them is the identity.
    pub fn qwc(&self, other: &PauliString) -> Result<bool> {
        self.check_len(other)?;
        Ok(self.qwc_unchecked(other))
    }

    pub(crate) fn qwc_unchecked(&self, other: &PauliString) -> bool {
        debug_assert_eq!(self.n, other.n);
        self.x
            .iter()
            .zip(&self.z)
            .zip(other.x.iter().zip(&other.z))
            .all(|((x1, z1), (x2, z2))| {
                let both = (x1 | z1) & (x2 | z2);
                both & ((x1 ^ x2) | (z1 ^ z2)) == 0
            })
    }

    /// Copy the labels of `obs` into the idle (identity) positions of `self`.
    ///
    /// The pair must be qubit-wise compatible, so positions already assigned
    /// in `self` are left untouched.
    pub fn merge_idle(&self, obs: &PauliString) -> Result<PauliString> {
        if !self.qwc(obs)? {
            return Err(Error::Contract(format!(
                "merge_idle requires qubit-wise compatible strings, got {self} and {obs}"
            )));
        }
        Ok(PauliString {
            n: self.n,
            x: self.x.iter().zip(&obs.x).map(|(a, b)| a | b).collect(),
            z: self.z.iter().zip(&obs.z).map(|(a, b)| a | b).collect(),
        })
    }

    /// Replace every identity position with `label`.
    pub fn fill_idle(&self, label: Pauli) -> PauliString {
        let mut out = self.clone();
        for q in 0..self.n {
            if out.get(q) == Pauli::I {
                out.set(q, label);
            }
        }
        out
    }

    /// Row-major bit masks over computational-basis indices, where qubit 0 is
    /// the most significant bit of an index on `n` qubits. Only meaningful
    /// for `n <= 64`.
    pub(crate) fn index_masks(&self) -> (usize, usize) {
        debug_assert!(self.n <= 64);
        let (mut xm, mut zm) = (0usize, 0usize);
        for q in 0..self.n {
            let bit = 1usize << (self.n - 1 - q);
            let (xb, zb) = self.get(q).bits();
            if xb {
                xm |= bit;
            }
            if zb {
                zm |= bit;
            }
        }
        (xm, zm)
    }

    /// Number of `Y` labels.
    pub(crate) fn y_count(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x & z).count_ones() as usize)
            .sum()
    }
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.labels()
            .cmp(other.labels())
            .then(self.n.cmp(&other.n))
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for label in self.labels() {
            write!(f, "{}", label.as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses `^[IXYZ]+$`. Lowercase letters are rejected.
    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Contract("empty Pauli word".into()));
        }
        let labels = s
            .chars()
            .enumerate()
            .map(|(position, c)| Pauli::from_char(c).ok_or(Error::PauliParse { position, found: c }))
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::from_labels(labels))
    }
}
