//! Weighted Pauli decompositions `H = c·1 + Σ_i h_i O_i`.
//!
//! # File format
//!
//! UTF-8 text, one term per line: `<decimal coefficient> <pauli-word>`.
//! `#` starts a comment that runs to the end of the line and blank lines are
//! ignored. Qubit 0 is the leftmost character of the word. Repeated words are
//! merged by summing their coefficients, merged terms that are exactly zero
//! are dropped, and an all-identity word contributes to the identity offset.
//!
//! ```text
//! # H2 fragment
//! -0.81054798053732746 IIII
//! 0.17218393261915566  ZIII
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::pauli::PauliString;

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coefficient: f64,
    pub observable: PauliString,
}

/// A validated, canonically ordered Hamiltonian decomposition.
///
/// Terms are sorted by descending `|h_i|` with ties broken by the
/// lexicographic order of the observable. Observables are distinct, never the
/// identity, and have nonzero finite coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedHamiltonian {
    n_qubits: usize,
    terms: Vec<Term>,
    identity_offset: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub h_min: f64,
    pub h_max: f64,
}

/// Sums in a fixed order so the result does not depend on input order.
fn order_independent_sum(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum()
}

impl WeightedHamiltonian {
    /// Builds a Hamiltonian from raw `(coefficient, observable)` pairs,
    /// merging duplicates and routing identity terms into the offset.
    pub fn new<I>(n_qubits: usize, terms: I, identity_offset: f64) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, PauliString)>,
    {
        let mut offset_parts = vec![identity_offset];
        let mut grouped: BTreeMap<PauliString, Vec<f64>> = BTreeMap::new();
        for (coefficient, observable) in terms {
            if observable.len() != n_qubits {
                return Err(Error::LengthMismatch {
                    expected: n_qubits,
                    found: observable.len(),
                });
            }
            if !coefficient.is_finite() {
                return Err(Error::Domain {
                    parameter: "coefficient",
                    value: coefficient,
                    range: "finite reals".into(),
                });
            }
            if observable.is_identity() {
                offset_parts.push(coefficient);
            } else {
                grouped.entry(observable).or_default().push(coefficient);
            }
        }
        let identity_offset = order_independent_sum(offset_parts);
        let mut terms: Vec<Term> = grouped
            .into_iter()
            .map(|(observable, parts)| Term {
                coefficient: order_independent_sum(parts),
                observable,
            })
            .filter(|t| t.coefficient != 0.0)
            .collect();
        if terms.is_empty() {
            return Err(Error::EmptyHamiltonian { identity_offset });
        }
        terms.sort_by(|a, b| {
            b.coefficient
                .abs()
                .total_cmp(&a.coefficient.abs())
                .then_with(|| a.observable.cmp(&b.observable))
        });
        Ok(WeightedHamiltonian {
            n_qubits,
            terms,
            identity_offset,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Number of non-identity terms `M`.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn identity_offset(&self) -> f64 {
        self.identity_offset
    }

    pub fn observables(&self) -> impl Iterator<Item = &PauliString> + '_ {
        self.terms.iter().map(|t| &t.observable)
    }

    /// `|h_i|` in canonical term order.
    pub fn abs_coefficients(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.coefficient.abs()).collect()
    }

    pub fn norms(&self) -> Norms {
        let abs = self.abs_coefficients();
        Norms {
            l1: abs.iter().sum(),
            l2: abs.iter().map(|a| a * a).sum::<f64>().sqrt(),
            h_min: abs.iter().copied().fold(f64::INFINITY, f64::min),
            h_max: abs.iter().copied().fold(0.0, f64::max),
        }
    }

    /// The Hamiltonian restricted to the terms at `indices` (canonical
    /// order is preserved). The identity offset is kept.
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        WeightedHamiltonian::new(
            self.n_qubits,
            indices
                .iter()
                .map(|&i| (self.terms[i].coefficient, self.terms[i].observable.clone())),
            self.identity_offset,
        )
    }

    /// Canonical text form; reparsing it yields an identical value.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# n_qubits {} terms {}", self.n_qubits, self.terms.len()).unwrap();
        if self.identity_offset != 0.0 {
            writeln!(
                out,
                "{:.16e} {}",
                self.identity_offset,
                PauliString::identity(self.n_qubits)
            )
            .unwrap();
        }
        for t in &self.terms {
            writeln!(out, "{:.16e} {}", t.coefficient, t.observable).unwrap();
        }
        out
    }

    /// Hex SHA-256 of the canonical text form.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }
}

/// Parses the text format described in the module documentation.
pub fn parse_hamiltonian(text: &str) -> Result<WeightedHamiltonian> {
    let mut raw = Vec::new();
    let mut width: Option<(usize, usize)> = None;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut fields = content.split_whitespace();
        let (coef_text, word) = match (fields.next(), fields.next(), fields.next()) {
            (Some(c), Some(w), None) => (c, w),
            _ => {
                return Err(Error::Format {
                    line: line_no,
                    message: format!("expected \"<coefficient> <pauli-word>\", got {content:?}"),
                })
            }
        };
        let coefficient: f64 = coef_text.parse().map_err(|_| Error::Format {
            line: line_no,
            message: format!("unparsable coefficient {coef_text:?}"),
        })?;
        if !coefficient.is_finite() {
            return Err(Error::Format {
                line: line_no,
                message: format!("coefficient {coef_text:?} is not finite"),
            });
        }
        let observable: PauliString = word.parse().map_err(|e: Error| Error::Format {
            line: line_no,
            message: e.to_string(),
        })?;
        match width {
            None => width = Some((observable.len(), line_no)),
            Some((n, first)) if n != observable.len() => {
                return Err(Error::Format {
                    line: line_no,
                    message: format!(
                        "word {word:?} has {} qubits but line {first} has {n}",
                        observable.len()
                    ),
                })
            }
            Some(_) => {}
        }
        raw.push((coefficient, observable));
    }
    let n = match width {
        Some((n, _)) => n,
        None => return Err(Error::EmptyHamiltonian { identity_offset: 0.0 }),
    };
    WeightedHamiltonian::new(n, raw, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_basic_file() {
        let h = parse_hamiltonian("1.0 ZZ\n0.5 XI").unwrap();
        assert_eq!(h.len(), 2);
        assert_eq!(h.n_qubits(), 2);
        assert_eq!(h.identity_offset(), 0.0);
        assert_eq!(h.terms()[0].observable.to_string(), "ZZ");
    }

    #[test]
    fn comments_blank_lines_and_identity() {
        let h = parse_hamiltonian("# header\n\n  -2.5 II  # offset\n0.25 XY\n").unwrap();
        assert_eq!(h.identity_offset(), -2.5);
        assert_eq!(h.len(), 1);
    }

    #[test]
    fn cancellation_leaves_empty_hamiltonian() {
        let err = parse_hamiltonian("1.0 ZZ\n-1.0 ZZ\n2.0 II").unwrap_err();
        assert_eq!(err, Error::EmptyHamiltonian { identity_offset: 2.0 });
    }

    #[test]
    fn length_mismatch_names_both_lines() {
        let err = parse_hamiltonian("0.25 XY\n0.25 XYZ").unwrap_err();
        match err {
            Error::Format { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("line 1"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_coefficient_reports_line() {
        let err = parse_hamiltonian("1.0 ZZ\nabc XX").unwrap_err();
        assert!(matches!(err, Error::Format { line: 2, .. }));
        assert!(matches!(
            parse_hamiltonian("inf ZZ").unwrap_err(),
            Error::Format { line: 1, .. }
        ));
        assert!(matches!(
            parse_hamiltonian("1.0 zz").unwrap_err(),
            Error::Format { line: 1, .. }
        ));
        assert!(matches!(
            parse_hamiltonian("1.0 ZZ extra").unwrap_err(),
            Error::Format { line: 1, .. }
        ));
    }

    #[test]
    fn duplicates_are_merged() {
        let h = parse_hamiltonian("0.5 XI\n0.25 XI\n1 ZZ").unwrap();
        assert_eq!(h.len(), 2);
        assert_eq!(h.terms()[1].coefficient, 0.75);
    }

    #[test]
    fn norms_examples() {
        let h = parse_hamiltonian("1.0 XI\n-0.5 IX\n0.25 ZZ").unwrap();
        let n = h.norms();
        assert_eq!((n.l1, n.h_min, n.h_max), (1.75, 0.25, 1.0));

        let n = parse_hamiltonian("1 Z").unwrap().norms();
        assert_eq!((n.l1, n.l2, n.h_min, n.h_max), (1.0, 1.0, 1.0, 1.0));

        let n = parse_hamiltonian("3 X\n-4 Z").unwrap().norms();
        assert_eq!(n.l2, 5.0);
    }

    #[test]
    fn canonical_order_descending_magnitude_then_lexicographic() {
        let h = parse_hamiltonian("0.5 ZI\n-1 IZ\n0.5 XX\n0.5 IY").unwrap();
        let words: Vec<String> = h.observables().map(|o| o.to_string()).collect();
        assert_eq!(words, ["IZ", "IY", "XX", "ZI"]);
    }

    fn arb_lines() -> impl Strategy<Value = Vec<(f64, String)>> {
        let word = proptest::collection::vec(prop_oneof!["I", "X", "Y", "Z"], 3)
            .prop_map(|v| v.concat());
        proptest::collection::vec((-10.0f64..10.0, word), 1..12)
    }

    fn render(lines: &[(f64, String)]) -> String {
        lines
            .iter()
            .map(|(c, w)| format!("{c:e} {w}\n"))
            .collect()
    }

    proptest! {
        #[test]
        fn round_trip_and_permutation_invariance(lines in arb_lines(), seed in any::<u64>()) {
            let Ok(h) = parse_hamiltonian(&render(&lines)) else {
                return Ok(());
            };
            prop_assert_eq!(parse_hamiltonian(&h.to_text()).unwrap(), h.clone());

            let mut shuffled = lines.clone();
            let mut state = seed;
            for i in (1..shuffled.len()).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                shuffled.swap(i, (state >> 33) as usize % (i + 1));
            }
            prop_assert_eq!(parse_hamiltonian(&render(&shuffled)).unwrap(), h.clone());

            let n = h.norms();
            prop_assert!(n.h_min <= n.h_max);
            prop_assert!(n.l2 <= n.l1 * (1.0 + 1e-12));
            prop_assert!(n.l1 <= (h.len() as f64).sqrt() * n.l2 * (1.0 + 1e-12));
        }
    }
}
