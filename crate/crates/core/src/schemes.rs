//! Measurement schemes: turn `(N, H)` into a list of `N` full-support
//! measurement settings.
//!
//! [`SchemeState`] carries the history every scheme needs (settings so far
//! and the compatible counts `N_i`). Three next-setting rules are provided:
//!
//! * ShadowGrouping: visit the terms by descending weight and greedily merge
//!   every qubit-wise compatible observable into the idle qubits of the
//!   setting under construction,
//! * random Pauli settings, each qubit uniform over `{X, Y, Z}`,
//! * an exhaustive search over all `3^n` settings for the one minimizing
//!   `Σ_i |h_i| φ(N_i)` after the append, with `φ(0) = α`, `φ(k) = 1/√k`.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::guarantees::{
    self, bernstein_weight, derandomization_weight, AllocationCounts, GuaranteeReport, Indicator,
};
use crate::hamiltonian::WeightedHamiltonian;
use crate::pauli::{Pauli, PauliString};
use crate::rng::{self, Rng};

pub const DEFAULT_BRUTE_FORCE_CAP: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum WeightKind {
    /// `|h_i| (1/√N_i − 1/√(N_i+1))`, or `α |h_i|` when `N_i = 0`.
    Bernstein,
    /// `c_i^{N_i} (1 − c_i)` with `c_i = exp(−ε²/(2h_i²))` at a fixed `ε`.
    Derandomization { epsilon: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    ShadowGrouping,
    RandomPaulis,
    BruteForce,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::ShadowGrouping => "shadowgrouping",
            SchemeKind::RandomPaulis => "random",
            SchemeKind::BruteForce => "bruteforce",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub weight: WeightKind,
    pub indicator: Indicator,
    /// Overrides [`guarantees::default_alpha`].
    pub alpha: Option<f64>,
    pub seed: u64,
    pub brute_force_cap: usize,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig {
            weight: WeightKind::Bernstein,
            indicator: Indicator::Qwc,
            alpha: None,
            seed: 0,
            brute_force_cap: DEFAULT_BRUTE_FORCE_CAP,
        }
    }
}

/// History of one scheme run. Counts always match the emitted settings.
pub struct SchemeState<'h> {
    h: &'h WeightedHamiltonian,
    settings: Vec<PauliString>,
    counts: AllocationCounts,
    weight: WeightKind,
    alpha: f64,
    rng: Rng,
    brute_force_cap: usize,
}

impl<'h> SchemeState<'h> {
    pub fn new(h: &'h WeightedHamiltonian, config: &SchemeConfig) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::EmptyHamiltonian {
                identity_offset: h.identity_offset(),
            });
        }
        let alpha = config.alpha.unwrap_or_else(|| guarantees::default_alpha(h));
        let counts = AllocationCounts::zeros(h.len(), config.indicator);
        // validates alpha against h_max / h_min
        guarantees::shadowgrouping_weights(h, counts.counts(), alpha)?;
        if let WeightKind::Derandomization { epsilon } = config.weight {
            guarantees::derandomization_weights(h, counts.counts(), epsilon)?;
        }
        Ok(SchemeState {
            h,
            settings: Vec::new(),
            counts,
            weight: config.weight,
            alpha,
            rng: rng::from_seed(config.seed),
            brute_force_cap: config.brute_force_cap,
        })
    }

    pub fn hamiltonian(&self) -> &'h WeightedHamiltonian {
        self.h
    }

    pub fn settings(&self) -> &[PauliString] {
        &self.settings
    }

    pub fn into_settings(self) -> Vec<PauliString> {
        self.settings
    }

    pub fn counts(&self) -> &AllocationCounts {
        &self.counts
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn indicator(&self) -> Indicator {
        self.counts.indicator()
    }

    /// Current per-term weights under the configured weight kind.
    pub fn weights(&self) -> Vec<f64> {
        let abs = self.h.abs_coefficients();
        let counts = self.counts.counts();
        match self.weight {
            WeightKind::Bernstein => abs
                .iter()
                .zip(counts)
                .map(|(&a, &n)| bernstein_weight(a, n, self.alpha))
                .collect(),
            WeightKind::Derandomization { epsilon } => abs
                .iter()
                .zip(counts)
                .map(|(&a, &n)| derandomization_weight(a, n, epsilon))
                .collect(),
        }
    }

    /// Appends a setting and updates the counts.
    pub fn push(&mut self, setting: PauliString) -> Result<()> {
        self.counts.record(self.h, &setting)?;
        self.settings.push(setting);
        Ok(())
    }

    /// The setting ShadowGrouping would emit next, without appending it.
    ///
    /// Terms are visited once, by descending weight with ties in canonical
    /// term order. Each term qubit-wise compatible with the partial setting
    /// is merged into its idle qubits; the scan stops as soon as every qubit
    /// is assigned. Qubits still idle after the scan are measured in `Z`.
    pub fn propose_shadow_grouping(&self) -> PauliString {
        let weights = self.weights();
        let mut order: Vec<usize> = (0..weights.len()).collect();
        order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
        let terms = self.h.terms();
        let mut setting = PauliString::identity(self.h.n_qubits());
        for i in order {
            if setting.is_full_support() {
                break;
            }
            let obs = &terms[i].observable;
            if setting.qwc_unchecked(obs) {
                setting = setting.merge_idle(obs).expect("compatibility checked");
            }
        }
        setting.fill_idle(Pauli::Z)
    }

    pub fn shadow_grouping_next(&mut self) -> Result<PauliString> {
        let setting = self.propose_shadow_grouping();
        self.push(setting.clone())?;
        Ok(setting)
    }

    pub fn random_pauli_next(&mut self) -> Result<PauliString> {
        let n = self.h.n_qubits();
        let setting = PauliString::from_labels(
            (0..n).map(|_| Pauli::NON_IDENTITY[self.rng.random_range(0..3)]),
        );
        self.push(setting.clone())?;
        Ok(setting)
    }

    /// `Σ_i |h_i| φ(N_i')` where `N'` are the counts after hypothetically
    /// appending `setting`.
    pub fn objective_after(&self, setting: &PauliString) -> f64 {
        let indicator = self.counts.indicator();
        self.h
            .terms()
            .iter()
            .zip(self.counts.counts())
            .map(|(t, &n)| {
                let n = n + indicator.compatible(setting, &t.observable) as u64;
                let phi = if n == 0 { self.alpha } else { 1.0 / (n as f64).sqrt() };
                t.coefficient.abs() * phi
            })
            .sum()
    }

    /// Exhaustive minimizer of [`objective_after`](Self::objective_after)
    /// over all `3^n` settings; ties go to the lexicographically smallest.
    pub fn propose_brute_force(&self) -> Result<(PauliString, f64)> {
        let n = self.h.n_qubits();
        if n > self.brute_force_cap {
            return Err(Error::ResourceCap {
                what: "brute-force setting search",
                n,
                cap: self.brute_force_cap,
            });
        }
        let mut best: Option<(PauliString, f64)> = None;
        for candidate in AllSettings::new(n) {
            let f = self.objective_after(&candidate);
            if best.as_ref().is_none_or(|(_, b)| f < *b) {
                best = Some((candidate, f));
            }
        }
        Ok(best.expect("at least one candidate"))
    }

    pub fn brute_force_next(&mut self) -> Result<PauliString> {
        let (setting, _) = self.propose_brute_force()?;
        self.push(setting.clone())?;
        Ok(setting)
    }

    pub fn next(&mut self, kind: SchemeKind) -> Result<PauliString> {
        match kind {
            SchemeKind::ShadowGrouping => self.shadow_grouping_next(),
            SchemeKind::RandomPaulis => self.random_pauli_next(),
            SchemeKind::BruteForce => self.brute_force_next(),
        }
    }
}

/// All full-support settings on `n` qubits in lexicographic order.
pub struct AllSettings {
    digits: Vec<u8>,
    done: bool,
}

impl AllSettings {
    pub fn new(n: usize) -> Self {
        AllSettings {
            digits: vec![0; n],
            done: n == 0,
        }
    }
}

impl Iterator for AllSettings {
    type Item = PauliString;

    fn next(&mut self) -> Option<PauliString> {
        if self.done {
            return None;
        }
        let current = PauliString::from_labels(
            self.digits.iter().map(|&d| Pauli::NON_IDENTITY[d as usize]),
        );
        // odometer with qubit 0 as the most significant digit
        let mut q = self.digits.len();
        loop {
            if q == 0 {
                self.done = true;
                break;
            }
            q -= 1;
            if self.digits[q] < 2 {
                self.digits[q] += 1;
                break;
            }
            self.digits[q] = 0;
        }
        Some(current)
    }
}

fn check_budget(budget: usize) -> Result<()> {
    if budget == 0 {
        return Err(Error::Domain {
            parameter: "budget",
            value: 0.0,
            range: "[1, inf)".into(),
        });
    }
    Ok(())
}

/// Runs `kind` for `budget` settings. Deterministic in all arguments.
pub fn generate_settings(
    kind: SchemeKind,
    h: &WeightedHamiltonian,
    budget: usize,
    config: &SchemeConfig,
) -> Result<Vec<PauliString>> {
    check_budget(budget)?;
    let mut state = SchemeState::new(h, config)?;
    for _ in 0..budget {
        state.next(kind)?;
    }
    Ok(state.into_settings())
}

#[derive(Debug, Clone)]
pub struct TruncatedRun {
    /// Settings of the second pass (or of the first pass if every term was
    /// truncated).
    pub settings: Vec<PauliString>,
    /// Terms kept after the first pass, in canonical order.
    pub kept: Vec<usize>,
    pub report: GuaranteeReport,
    /// Untruncated guarantee of the first pass.
    pub first_pass: GuaranteeReport,
}

impl TruncatedRun {
    pub fn keep_mask(&self, m: usize) -> Vec<bool> {
        let mut mask = vec![false; m];
        for &i in &self.kept {
            mask[i] = true;
        }
        mask
    }
}

/// Two-pass ShadowGrouping: run the full budget, drop the terms whose count
/// is below `⌈α_δ²⌉`, then rerun on the kept terms with the same budget.
pub fn truncated_pipeline(
    h: &WeightedHamiltonian,
    budget: usize,
    delta: f64,
    config: &SchemeConfig,
) -> Result<TruncatedRun> {
    let first = generate_settings(SchemeKind::ShadowGrouping, h, budget, config)?;
    let counts = guarantees::count_compatible(h, &first, config.indicator)?;
    let first_pass = guarantees::epsilon_guarantee(h, counts.counts(), delta)?;
    let mask = guarantees::truncation_mask(h, counts.counts(), delta)?;
    let kept: Vec<usize> = (0..h.len()).filter(|&i| mask[i]).collect();
    if kept.is_empty() {
        let report = guarantees::guarantee_with_mask(h, counts.counts(), delta, Some(&mask))?;
        return Ok(TruncatedRun {
            settings: first,
            kept,
            report,
            first_pass,
        });
    }
    let reduced = h.restrict(&kept)?;
    let second = generate_settings(SchemeKind::ShadowGrouping, &reduced, budget, config)?;
    let counts = guarantees::count_compatible(h, &second, config.indicator)?;
    let report = guarantees::guarantee_with_mask(h, counts.counts(), delta, Some(&mask))?;
    Ok(TruncatedRun {
        settings: second,
        kept,
        report,
        first_pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub budget: usize,
    pub epsilon_stat: f64,
    pub epsilon_sys: f64,
    pub epsilon_total: f64,
    pub n_truncated: usize,
}

/// Guaranteed accuracy of the truncated pipeline at each budget checkpoint.
pub fn guarantee_curve(
    h: &WeightedHamiltonian,
    checkpoints: &[usize],
    delta: f64,
    config: &SchemeConfig,
) -> Result<Vec<CurvePoint>> {
    checkpoints
        .iter()
        .map(|&budget| {
            let run = truncated_pipeline(h, budget, delta, config)?;
            Ok(CurvePoint {
                budget,
                epsilon_stat: run.report.epsilon_stat,
                epsilon_sys: run.report.epsilon_sys,
                epsilon_total: run.report.epsilon_total,
                n_truncated: run.report.truncated_indices.len(),
            })
        })
        .collect()
}
