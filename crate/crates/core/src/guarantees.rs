//! Accuracy guarantees for grouped empirical-mean energy estimators.
//!
//! Given the number `N_i` of measurement settings compatible with each
//! observable, the estimator satisfies the state-independent tail bound
//!
//! ```text
//! P[|Ê − E| ≥ ε] ≤ exp(−¼ (ε / (2‖h'‖₁) − 1)²),   h'_i = |h_i| / √N_i,
//! ```
//!
//! valid for `0 ≤ ε ≤ 2‖h'‖₁ (1 + 2‖h'‖₁ / ‖h''‖₁)` with `h''_i = |h_i| / N_i`.
//! Solving for `ε` at confidence `1 − δ` gives `ε = α_δ ‖h'‖₁` with
//! `α_δ = 4 √ln(1/δ) + 2`. Terms measured fewer than `α_δ²` times are better
//! dropped, trading their statistical contribution for a systematic error of
//! at most `|h_i|`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::WeightedHamiltonian;
use crate::pauli::PauliString;

/// Which compatibility relation counts a setting towards an observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Indicator {
    /// Ordinary commutation. Only used for counting and bounds.
    General,
    /// Qubit-wise commutation; the only relation the estimators can sample.
    Qwc,
}

impl Indicator {
    pub fn name(self) -> &'static str {
        match self {
            Indicator::General => "general",
            Indicator::Qwc => "qwc",
        }
    }

    /// Lengths must already agree.
    pub fn compatible(self, setting: &PauliString, observable: &PauliString) -> bool {
        match self {
            Indicator::General => setting.commutes(observable).unwrap_or(false),
            Indicator::Qwc => setting.qwc_unchecked(observable),
        }
    }
}

impl std::str::FromStr for Indicator {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "general" => Ok(Indicator::General),
            "qwc" => Ok(Indicator::Qwc),
            other => Err(format!("unknown indicator {other:?} (expected general or qwc)")),
        }
    }
}

/// Per-term compatible-measurement counts `N_i` for a list of settings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllocationCounts {
    counts: Vec<u64>,
    indicator: Indicator,
}

impl AllocationCounts {
    pub fn zeros(m: usize, indicator: Indicator) -> Self {
        AllocationCounts {
            counts: vec![0; m],
            indicator,
        }
    }

    pub fn from_counts(counts: Vec<u64>, indicator: Indicator) -> Self {
        AllocationCounts { counts, indicator }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn indicator(&self) -> Indicator {
        self.indicator
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Indices of the terms compatible with `setting`.
    pub fn covered(&self, h: &WeightedHamiltonian, setting: &PauliString) -> Result<Vec<usize>> {
        check_setting(h, setting)?;
        Ok(h.observables()
            .enumerate()
            .filter(|(_, o)| self.indicator.compatible(setting, o))
            .map(|(i, _)| i)
            .collect())
    }

    /// Appends one setting in `O(M)`.
    pub fn record(&mut self, h: &WeightedHamiltonian, setting: &PauliString) -> Result<()> {
        if self.counts.len() != h.len() {
            return Err(Error::Contract(format!(
                "counts have {} entries for a Hamiltonian with {} terms",
                self.counts.len(),
                h.len()
            )));
        }
        for i in self.covered(h, setting)? {
            self.counts[i] += 1;
        }
        Ok(())
    }
}

fn check_setting(h: &WeightedHamiltonian, setting: &PauliString) -> Result<()> {
    if setting.len() != h.n_qubits() {
        return Err(Error::LengthMismatch {
            expected: h.n_qubits(),
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

fn check_counts(h: &WeightedHamiltonian, counts: &[u64]) -> Result<()> {
    if counts.len() != h.len() {
        return Err(Error::Contract(format!(
            "{} counts supplied for {} terms",
            counts.len(),
            h.len()
        )));
    }
    Ok(())
}

/// `N_i = Σ_j f(Q_j, O_i)` over all `settings`.
pub fn count_compatible(
    h: &WeightedHamiltonian,
    settings: &[PauliString],
    indicator: Indicator,
) -> Result<AllocationCounts> {
    let mut counts = AllocationCounts::zeros(h.len(), indicator);
    for s in settings {
        counts.record(h, s)?;
    }
    Ok(counts)
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 0.5 {
        Ok(())
    } else {
        Err(Error::Domain {
            parameter: "delta",
            value: delta,
            range: "(0, 1/2)".into(),
        })
    }
}

/// `α_δ = 4 √ln(1/δ) + 2` for `δ ∈ (0, 1/2)`.
pub fn alpha_delta(delta: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok(4.0 * (1.0 / delta).ln().sqrt() + 2.0)
}

/// Smallest integer count at which a term is kept: `⌈α_δ²⌉`.
pub fn truncation_threshold(delta: f64) -> Result<u64> {
    let a = alpha_delta(delta)?;
    Ok((a * a).ceil() as u64)
}

/// `(‖h'‖₁, ‖h''‖₁)` over all terms; every count must be positive.
fn primed_norms(h: &WeightedHamiltonian, counts: &[u64]) -> Result<(f64, f64)> {
    check_counts(h, counts)?;
    let mut hp = 0.0;
    let mut hpp = 0.0;
    for (i, (t, &n)) in h.terms().iter().zip(counts).enumerate() {
        if n == 0 {
            return Err(Error::BoundUndefined { index: i });
        }
        let n = n as f64;
        hp += t.coefficient.abs() / n.sqrt();
        hpp += t.coefficient.abs() / n;
    }
    Ok((hp, hpp))
}

/// Upper end of the range of `ε` on which the tail bound holds.
pub fn bound_validity_cap(h: &WeightedHamiltonian, counts: &[u64]) -> Result<f64> {
    let (hp, hpp) = primed_norms(h, counts)?;
    Ok(2.0 * hp * (1.0 + 2.0 * hp / hpp))
}

/// Evaluates the tail bound on `P[|Ê − E| ≥ ε]`.
///
/// Returns 1 for `ε < 2‖h'‖₁`, where the bound carries no information.
/// Fails if any `N_i = 0` or if `ε` lies outside the validity window.
pub fn failure_probability_bound(
    h: &WeightedHamiltonian,
    counts: &[u64],
    epsilon: f64,
) -> Result<f64> {
    let (hp, hpp) = primed_norms(h, counts)?;
    let cap = 2.0 * hp * (1.0 + 2.0 * hp / hpp);
    if !(0.0..=cap).contains(&epsilon) {
        return Err(Error::Domain {
            parameter: "epsilon",
            value: epsilon,
            range: format!("[0, {cap}]"),
        });
    }
    let shift = 2.0 * hp;
    if epsilon < shift {
        return Ok(1.0);
    }
    let bracket = epsilon / shift - 1.0;
    Ok((-0.25 * bracket * bracket).exp().min(1.0))
}

/// Accuracy `ε_total = ε_stat + ε_sys` achieved with confidence `1 − δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuaranteeReport {
    pub epsilon_stat: f64,
    pub epsilon_sys: f64,
    pub epsilon_total: f64,
    pub delta: f64,
    /// Terms excluded from the estimate: never measured or dropped by truncation.
    pub truncated_indices: Vec<usize>,
    pub counts: Vec<u64>,
    /// The coarser closed form `6 ln(1/δ) ‖h'‖₁` over the measured terms.
    pub epsilon_stat_closed_form: f64,
}

impl GuaranteeReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// `ε_stat = α_δ Σ_{N_i ≥ 1} |h_i|/√N_i` and `ε_sys = Σ_{N_i = 0} |h_i|`.
pub fn epsilon_guarantee(
    h: &WeightedHamiltonian,
    counts: &[u64],
    delta: f64,
) -> Result<GuaranteeReport> {
    guarantee_with_mask(h, counts, delta, None)
}

/// Like [`epsilon_guarantee`], additionally treating every term with
/// `keep[i] == false` as dropped.
pub fn guarantee_with_mask(
    h: &WeightedHamiltonian,
    counts: &[u64],
    delta: f64,
    keep: Option<&[bool]>,
) -> Result<GuaranteeReport> {
    let alpha = alpha_delta(delta)?;
    check_counts(h, counts)?;
    if let Some(k) = keep {
        check_counts(h, &vec![0; k.len()])?;
    }
    let mut hp = 0.0;
    let mut sys = 0.0;
    let mut truncated = Vec::new();
    for (i, (t, &n)) in h.terms().iter().zip(counts).enumerate() {
        let kept = keep.is_none_or(|k| k[i]);
        if n == 0 || !kept {
            sys += t.coefficient.abs();
            truncated.push(i);
        } else {
            hp += t.coefficient.abs() / (n as f64).sqrt();
        }
    }
    let stat = alpha * hp;
    Ok(GuaranteeReport {
        epsilon_stat: stat,
        epsilon_sys: sys,
        epsilon_total: stat + sys,
        delta,
        truncated_indices: truncated,
        counts: counts.to_vec(),
        epsilon_stat_closed_form: 6.0 * (1.0 / delta).ln() * hp,
    })
}

/// `keep[i]` iff `N_i ≥ ⌈α_δ²⌉`.
pub fn truncation_mask(h: &WeightedHamiltonian, counts: &[u64], delta: f64) -> Result<Vec<bool>> {
    check_counts(h, counts)?;
    let threshold = truncation_threshold(delta)?;
    Ok(counts.iter().map(|&n| n >= threshold).collect())
}

/// `max(2, h_max² / h_min²)`; always strictly above `h_max / h_min`.
pub fn default_alpha(h: &WeightedHamiltonian) -> f64 {
    let n = h.norms();
    let ratio = n.h_max / n.h_min;
    (ratio * ratio).max(2.0)
}

/// Priority of each term for the next setting under the Bernstein bound:
/// the decrease of `|h_i|/√N_i` if `N_i` grew by one, or `α |h_i|` for
/// unmeasured terms.
pub fn shadowgrouping_weights(
    h: &WeightedHamiltonian,
    counts: &[u64],
    alpha: f64,
) -> Result<Vec<f64>> {
    check_counts(h, counts)?;
    let norms = h.norms();
    let ratio = norms.h_max / norms.h_min;
    if alpha.is_nan() || alpha <= ratio {
        return Err(Error::Domain {
            parameter: "alpha",
            value: alpha,
            range: format!("(h_max/h_min = {ratio}, inf)"),
        });
    }
    Ok(h.terms()
        .iter()
        .zip(counts)
        .map(|(t, &n)| bernstein_weight(t.coefficient.abs(), n, alpha))
        .collect())
}

pub(crate) fn bernstein_weight(abs_h: f64, n: u64, alpha: f64) -> f64 {
    if n == 0 {
        return alpha * abs_h;
    }
    let a = (n as f64).sqrt();
    let b = (n as f64 + 1.0).sqrt();
    // |h| (1/a − 1/b) without the cancellation
    abs_h / (a * b * (a + b))
}

/// Derandomization-style weights `c_i^{N_i} (1 − c_i)` with
/// `c_i = exp(−ε² / (2 h_i²))`. Unlike the Bernstein weights the ordering
/// between terms of different magnitude depends on `N_i`.
pub fn derandomization_weights(
    h: &WeightedHamiltonian,
    counts: &[u64],
    epsilon: f64,
) -> Result<Vec<f64>> {
    check_counts(h, counts)?;
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::Domain {
            parameter: "epsilon",
            value: epsilon,
            range: "(0, inf)".into(),
        });
    }
    Ok(h.terms()
        .iter()
        .zip(counts)
        .map(|(t, &n)| derandomization_weight(t.coefficient.abs(), n, epsilon))
        .collect())
}

pub(crate) fn derandomization_weight(abs_h: f64, n: u64, epsilon: f64) -> f64 {
    let rate = epsilon * epsilon / (2.0 * abs_h * abs_h);
    (-rate * n as f64).exp() * -(-rate).exp_m1()
}

/// Shot counts bracketing the worst case for reaching accuracy `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BudgetRange {
    /// All observables commute: every setting counts for every term.
    pub low: u64,
    /// No two observables commute, shots split uniformly over the `M` terms.
    pub high: u64,
}

pub fn worst_case_budget(h: &WeightedHamiltonian, epsilon: f64, delta: f64) -> Result<BudgetRange> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::Domain {
            parameter: "epsilon",
            value: epsilon,
            range: "(0, inf)".into(),
        });
    }
    let alpha = alpha_delta(delta)?;
    let base = (alpha * h.norms().l1 / epsilon).powi(2);
    Ok(BudgetRange {
        low: base.ceil() as u64,
        high: (h.len() as f64 * base).ceil() as u64,
    })
}

/// Smallest `N ≥ 2‖h‖₁² ln(2/δ) / ε²` for the single-shot estimator.
pub fn single_shot_budget(h: &WeightedHamiltonian, epsilon: f64, delta: f64) -> Result<u64> {
    single_shot_budget_for_norm(h.norms().l1, epsilon, delta)
}

pub fn single_shot_budget_for_norm(l1: f64, epsilon: f64, delta: f64) -> Result<u64> {
    check_delta(delta)?;
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::Domain {
            parameter: "epsilon",
            value: epsilon,
            range: "(0, inf)".into(),
        });
    }
    Ok((2.0 * l1 * l1 / (epsilon * epsilon) * (2.0 / delta).ln()).ceil() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::parse_hamiltonian;
    use proptest::prelude::*;

    fn ham(text: &str) -> WeightedHamiltonian {
        parse_hamiltonian(text).unwrap()
    }

    fn settings(words: &[&str]) -> Vec<PauliString> {
        words.iter().map(|w| w.parse().unwrap()).collect()
    }

    #[test]
    fn counting_examples() {
        let h = ham("1 ZI\n1 IZ\n1 XX");
        let c = count_compatible(&h, &settings(&["ZZ"]), Indicator::Qwc).unwrap();
        // canonical order is lexicographic here: IZ, XX, ZI
        assert_eq!(c.counts(), &[1, 0, 1]);
        let c = count_compatible(&h, &[], Indicator::Qwc).unwrap();
        assert_eq!(c.counts(), &[0, 0, 0]);
        let c = count_compatible(&h, &settings(&["ZZ", "ZZ"]), Indicator::Qwc).unwrap();
        assert_eq!(c.counts(), &[2, 0, 2]);
        // ZZ commutes with XX but not qubit-wise
        let c = count_compatible(&h, &settings(&["ZZ"]), Indicator::General).unwrap();
        assert_eq!(c.counts(), &[1, 1, 1]);
    }

    #[test]
    fn partial_setting_is_rejected() {
        let h = ham("1 ZI");
        assert!(matches!(
            count_compatible(&h, &settings(&["ZI"]), Indicator::Qwc),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn alpha_delta_values() {
        let a = alpha_delta(0.02).unwrap();
        assert!((a - 9.9115339).abs() < 1e-6, "{a}");
        assert_eq!(truncation_threshold(0.02).unwrap(), 99);
        assert!((alpha_delta((-1.0f64).exp()).unwrap() - 6.0).abs() < 1e-12);
        let edge = alpha_delta(0.5 - 1e-12).unwrap();
        assert!((edge - (4.0 * 2f64.ln().sqrt() + 2.0)).abs() < 1e-9);
        assert!((edge - 5.3302).abs() < 1e-4);
        for bad in [0.0, 0.5, 0.7, -0.1, f64::NAN] {
            assert!(matches!(alpha_delta(bad), Err(Error::Domain { .. })));
        }
    }

    #[test]
    fn tail_bound_examples() {
        let h = ham("1 Z");
        let p = failure_probability_bound(&h, &[4], 2.0).unwrap();
        assert!((p - (-0.25f64).exp()).abs() < 1e-15);
        assert_eq!(bound_validity_cap(&h, &[4]).unwrap(), 5.0);
        assert_eq!(failure_probability_bound(&h, &[4], 1.0).unwrap(), 1.0);
        assert_eq!(failure_probability_bound(&h, &[4], 0.0).unwrap(), 1.0);
        assert!(matches!(
            failure_probability_bound(&h, &[4], 5.5),
            Err(Error::Domain { .. })
        ));
        let h2 = ham("1 Z\n0.5 X");
        assert_eq!(
            failure_probability_bound(&h2, &[3, 0], 1.0),
            Err(Error::BoundUndefined { index: 1 })
        );
    }

    #[test]
    fn guarantee_examples() {
        let a = alpha_delta(0.02).unwrap();
        let r = epsilon_guarantee(&ham("1 Z"), &[100], 0.02).unwrap();
        assert!((r.epsilon_stat - a / 10.0).abs() < 1e-12);
        assert!((r.epsilon_stat - 0.99116).abs() < 1e-5);
        assert_eq!(r.epsilon_sys, 0.0);

        let h = ham("1 Z\n0.5 X");
        let r = epsilon_guarantee(&h, &[0, 0], 0.02).unwrap();
        assert_eq!((r.epsilon_stat, r.epsilon_sys), (0.0, 1.5));
        assert_eq!(r.truncated_indices, vec![0, 1]);

        let h = ham("1 Z\n1 X");
        let r = epsilon_guarantee(&h, &[100, 0], 0.02).unwrap();
        assert!((r.epsilon_total - (a / 10.0 + 1.0)).abs() < 1e-12);
        assert_eq!(r.truncated_indices, vec![1]);
    }

    #[test]
    fn truncation_examples() {
        let h = ham("1 Z\n1 X");
        assert_eq!(truncation_mask(&h, &[50, 200], 0.02).unwrap(), vec![false, true]);
        assert_eq!(truncation_mask(&h, &[120, 200], 0.02).unwrap(), vec![true, true]);
        let h = ham("1 Z");
        assert_eq!(truncation_mask(&h, &[99], 0.02).unwrap(), vec![true]);
        assert_eq!(truncation_mask(&h, &[98], 0.02).unwrap(), vec![false]);
    }

    #[test]
    fn bernstein_weight_examples() {
        let h = ham("1 Z");
        let w = shadowgrouping_weights(&h, &[1], 2.0).unwrap()[0];
        assert!((w - (1.0 - 1.0 / 2f64.sqrt())).abs() < 1e-15);
        let w4 = shadowgrouping_weights(&h, &[4], 2.0).unwrap()[0];
        assert!((w4 - (0.5 - 1.0 / 5f64.sqrt())).abs() < 1e-15);
        assert!((w4 - 0.05279).abs() < 1e-5);
        assert!(w > w4);
        let h = ham("0.5 Z");
        assert_eq!(shadowgrouping_weights(&h, &[0], 4.0).unwrap(), vec![2.0]);
        let h = ham("1 Z\n0.25 X");
        assert!(matches!(
            shadowgrouping_weights(&h, &[0, 0], 4.0),
            Err(Error::Domain { parameter: "alpha", .. })
        ));
        assert!(shadowgrouping_weights(&h, &[0, 0], 4.5).is_ok());
    }

    #[test]
    fn default_alpha_exceeds_ratio() {
        assert_eq!(default_alpha(&ham("1 Z\n1 X")), 2.0);
        assert_eq!(default_alpha(&ham("1 Z\n0.5 X")), 4.0);
        assert_eq!(default_alpha(&ham("1 Z\n0.8 X")), 2.0);
    }

    #[test]
    fn derandomization_weight_examples() {
        let h = ham("1 Z");
        let w = derandomization_weights(&h, &[0], 1.0).unwrap()[0];
        assert!((w - (1.0 - (-0.5f64).exp())).abs() < 1e-15);
        assert!((w - 0.39347).abs() < 1e-5);
        let far = derandomization_weights(&h, &[1000], 1.0).unwrap()[0];
        assert!(far < 1e-200);
        // magnitude ordering flips with N
        let h = ham("2 Z\n1 X");
        let w = derandomization_weights(&h, &[1, 1], 1.0).unwrap();
        assert!((w[0] - 0.1037).abs() < 1e-4 && (w[1] - 0.2387).abs() < 1e-4);
        assert!(w[0] < w[1]);
        let w = derandomization_weights(&h, &[0, 0], 1.0).unwrap();
        assert!(w[0] < w[1]);
        let w = derandomization_weights(&h, &[5, 0], 1.0).unwrap();
        assert!(w[0] < w[1]);
        let w = derandomization_weights(&h, &[0, 5], 1.0).unwrap();
        assert!(w[0] > w[1]);
        assert!(derandomization_weights(&h, &[0, 0], 0.0).is_err());
    }

    #[test]
    fn worst_case_budget_examples() {
        let budget = worst_case_budget(&ham("0.5 Z"), 0.1, 0.02).unwrap();
        assert_eq!(budget.low, budget.high);

        let text: String = (0..10).map(|q| {
            let mut w = ['I'; 10];
            w[q] = 'Z';
            format!("0.1 {}\n", w.iter().collect::<String>())
        }).collect();
        let h = ham(&text);
        let b = worst_case_budget(&h, 0.1, 0.02).unwrap();
        // α² = 98.2385..., so 100 α² = 9823.85...
        assert_eq!(b.low, 9824);
        assert_eq!(b.high, 98239);

        let doubled: String = text.replace("0.1 ", "0.2 ");
        let b2 = worst_case_budget(&ham(&doubled), 0.1, 0.02).unwrap();
        let a2 = alpha_delta(0.02).unwrap().powi(2);
        assert_eq!(b2.low, (400.0 * a2).ceil() as u64);
        assert!((b2.low as f64 / b.low as f64 - 4.0).abs() < 1e-3);
    }

    #[test]
    fn single_shot_budget_examples() {
        assert_eq!(single_shot_budget(&ham("1 Z"), 0.1, 0.05).unwrap(), 738);
        let n1 = single_shot_budget(&ham("1 Z"), 0.2, 0.05).unwrap();
        let n2 = single_shot_budget(&ham("1 Z"), 0.1, 0.05).unwrap();
        assert!(4 * (n1 - 1) < n2 && n2 <= 4 * n1, "{n1} {n2}");
        assert_eq!(single_shot_budget_for_norm(0.0, 0.1, 0.05).unwrap(), 0);
    }

    fn arb_instance() -> impl Strategy<Value = (Vec<f64>, Vec<u64>, f64)> {
        (1usize..8).prop_flat_map(|m| {
            (
                proptest::collection::vec(0.01f64..5.0, m),
                proptest::collection::vec(0u64..400, m),
                0.001f64..0.499,
            )
        })
    }

    fn diag_ham(coefs: &[f64]) -> WeightedHamiltonian {
        let n = coefs.len();
        WeightedHamiltonian::new(
            n,
            coefs.iter().enumerate().map(|(q, &c)| {
                let mut p = PauliString::identity(n);
                p.set(q, crate::pauli::Pauli::Z);
                (c, p)
            }),
            0.0,
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn stat_part_decreases_with_counts((coefs, counts, delta) in arb_instance(), which in any::<prop::sample::Index>()) {
            let h = diag_ham(&coefs);
            let i = which.index(counts.len());
            let mut more = counts.clone();
            more[i] += 1;
            let before = epsilon_guarantee(&h, &counts, delta).unwrap();
            let after = epsilon_guarantee(&h, &more, delta).unwrap();
            if counts[i] > 0 {
                prop_assert!(after.epsilon_stat <= before.epsilon_stat);
            }
        }

        // 6 ln(1/δ) ≥ α_δ needs ln(1/δ) ≥ 1; above δ = 1/e the order flips
        #[test]
        fn closed_form_is_looser_up_to_inverse_e((coefs, counts, delta) in arb_instance()) {
            let h = diag_ham(&coefs);
            let r = epsilon_guarantee(&h, &counts, delta).unwrap();
            if delta <= (-1.0f64).exp() {
                prop_assert!(r.epsilon_stat_closed_form >= r.epsilon_stat);
            } else {
                prop_assert!(r.epsilon_stat_closed_form <= r.epsilon_stat);
            }
        }

        #[test]
        fn truncation_flip_matches_statistical_tradeoff(abs_h in 1e-6f64..1e3, n in 1u64..400, delta in 0.001f64..0.499) {
            let a = alpha_delta(delta).unwrap();
            let threshold = truncation_threshold(delta).unwrap();
            let stat = a * abs_h / (n as f64).sqrt();
            prop_assert_eq!(n < threshold, stat > abs_h);
        }

        #[test]
        fn tail_bound_monotone((coefs, counts, _d) in arb_instance(), t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
            let counts: Vec<u64> = counts.iter().map(|&c| c.max(1)).collect();
            let h = diag_ham(&coefs);
            let (hp, _) = primed_norms(&h, &counts).unwrap();
            let cap = bound_validity_cap(&h, &counts).unwrap();
            let lo = 2.0 * hp;
            let (e1, e2) = (lo + t1.min(t2) * (cap - lo), lo + t1.max(t2) * (cap - lo));
            let p1 = failure_probability_bound(&h, &counts, e1).unwrap();
            let p2 = failure_probability_bound(&h, &counts, e2).unwrap();
            prop_assert!(p2 <= p1);
            let more: Vec<u64> = counts.iter().map(|c| c + 1).collect();
            let cap_more = bound_validity_cap(&h, &more).unwrap();
            if e1 <= cap_more {
                prop_assert!(failure_probability_bound(&h, &more, e1).unwrap() <= p1);
            }
        }
    }
}
