//! Energy estimators and the benchmark loop.

use std::time::Instant;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::guarantees::{self, AllocationCounts, GuaranteeReport, Indicator};
use crate::hamiltonian::WeightedHamiltonian;
use crate::pauli::Pauli;
use crate::rng;
use crate::schemes::{self, SchemeConfig, SchemeKind};
use crate::simulator::{self, MeasurementRecord, QuantumState, Sampler};

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    /// `identity_offset + Σ_i h_i ô_i`.
    pub energy_estimate: f64,
    pub per_term_estimates: Vec<f64>,
    pub per_term_counts: AllocationCounts,
    /// Terms contributing zero: no compatible record, or truncated.
    pub zeroed_terms: Vec<usize>,
    pub identity_offset_applied: f64,
}

impl EstimateReport {
    /// Zeroes every term with `keep[i] == false`.
    pub fn truncate(mut self, h: &WeightedHamiltonian, keep: &[bool]) -> Self {
        for (i, &k) in keep.iter().enumerate() {
            if !k && !self.zeroed_terms.contains(&i) {
                self.per_term_estimates[i] = 0.0;
                self.zeroed_terms.push(i);
            }
        }
        self.zeroed_terms.sort_unstable();
        self.energy_estimate = combine(h, &self.per_term_estimates);
        self
    }
}

fn combine(h: &WeightedHamiltonian, estimates: &[f64]) -> f64 {
    h.identity_offset()
        + h.terms()
            .iter()
            .zip(estimates)
            .map(|(t, o)| t.coefficient * o)
            .sum::<f64>()
}

/// Grouped empirical mean: each `ô_i` averages the outcome parity over
/// `support(O_i)` across every record whose setting is qubit-wise
/// compatible with `O_i`. One record feeds all terms it is compatible with.
pub fn grouped_mean_estimate(
    h: &WeightedHamiltonian,
    records: &[MeasurementRecord],
    indicator: Indicator,
) -> Result<EstimateReport> {
    if indicator != Indicator::Qwc {
        return Err(Error::UnsupportedEstimation(indicator.name()));
    }
    let n = h.n_qubits();
    let supports: Vec<Vec<usize>> = h.observables().map(|o| o.support()).collect();
    let mut sums = vec![0i64; h.len()];
    let mut counts = vec![0u64; h.len()];
    for r in records {
        if r.setting.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: r.setting.len(),
            });
        }
        if r.outcome.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: r.outcome.len(),
            });
        }
        if !r.setting.is_full_support() {
            return Err(Error::Contract(format!(
                "record setting {} does not have full support",
                r.setting
            )));
        }
        for (i, t) in h.terms().iter().enumerate() {
            if r.setting.qwc_unchecked(&t.observable) {
                let parity: i64 = supports[i].iter().map(|&q| r.outcome[q] as i64).product();
                sums[i] += parity;
                counts[i] += 1;
            }
        }
    }
    let per_term_estimates: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| if c == 0 { 0.0 } else { s as f64 / c as f64 })
        .collect();
    let zeroed_terms = (0..h.len()).filter(|&i| counts[i] == 0).collect();
    Ok(EstimateReport {
        energy_estimate: combine(h, &per_term_estimates),
        per_term_estimates,
        per_term_counts: AllocationCounts::from_counts(counts, Indicator::Qwc),
        zeroed_terms,
        identity_offset_applied: h.identity_offset(),
    })
}

/// Importance-sampled estimator: each round draws term `k` with probability
/// `|h_k| / ‖h‖₁`, measures it once and contributes `sign(h_k) s ‖h‖₁`.
pub fn single_shot_estimate<R: Rng + ?Sized>(
    h: &WeightedHamiltonian,
    state: &QuantumState,
    budget: usize,
    rng: &mut R,
) -> Result<f64> {
    if budget == 0 {
        return Err(Error::Domain {
            parameter: "budget",
            value: 0.0,
            range: "[1, inf)".into(),
        });
    }
    let l1 = h.norms().l1;
    let picker = WeightedIndex::new(h.abs_coefficients())
        .map_err(|e| Error::Contract(e.to_string()))?;
    let settings: Vec<_> = h.observables().map(|o| o.fill_idle(Pauli::Z)).collect();
    let mut sampler = Sampler::new(state);
    let mut total = 0.0;
    for _ in 0..budget {
        let k = picker.sample(rng);
        let term = &h.terms()[k];
        let s = sampler.sample(&settings[k], rng)?.parity(&term.observable) as f64;
        total += term.coefficient.signum() * s * l1;
    }
    Ok(total / budget as f64 + h.identity_offset())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RmseSummary {
    pub rmse: f64,
    /// Bootstrap standard error of the RMSE.
    pub stderr: f64,
}

pub const BOOTSTRAP_RESAMPLES: usize = 10_000;

/// Root-mean-square deviation from `true_energy`, with a bootstrap standard
/// error over the squared deviations.
pub fn rmse(estimates: &[f64], true_energy: f64, seed: u64) -> Result<RmseSummary> {
    if estimates.is_empty() {
        return Err(Error::Contract("RMSE of an empty estimate list".into()));
    }
    let sq: Vec<f64> = estimates.iter().map(|e| (e - true_energy).powi(2)).collect();
    let n = sq.len();
    let value = (sq.iter().sum::<f64>() / n as f64).sqrt();
    let mut r = rng::from_seed(seed);
    let boots: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| {
            let s: f64 = (0..n).map(|_| sq[r.random_range(0..n)]).sum();
            (s / n as f64).sqrt()
        })
        .collect();
    let mean = boots.iter().sum::<f64>() / boots.len() as f64;
    let var = boots.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (boots.len() - 1) as f64;
    Ok(RmseSummary {
        rmse: value,
        stderr: var.sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchmarkScheme {
    /// ShadowGrouping settings, every measured term estimated.
    ShadowGrouping,
    /// Two-pass ShadowGrouping; terms below the truncation threshold zeroed.
    Truncated,
    Random,
    BruteForce,
    /// Importance-sampled single-term estimator.
    SingleShot,
}

impl BenchmarkScheme {
    pub fn name(self) -> &'static str {
        match self {
            BenchmarkScheme::ShadowGrouping => "shadowgrouping",
            BenchmarkScheme::Truncated => "truncated",
            BenchmarkScheme::Random => "random",
            BenchmarkScheme::BruteForce => "bruteforce",
            BenchmarkScheme::SingleShot => "singleshot",
        }
    }
}

impl std::str::FromStr for BenchmarkScheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "shadowgrouping" => BenchmarkScheme::ShadowGrouping,
            "truncated" => BenchmarkScheme::Truncated,
            "random" => BenchmarkScheme::Random,
            "bruteforce" => BenchmarkScheme::BruteForce,
            "singleshot" => BenchmarkScheme::SingleShot,
            other => {
                return Err(format!(
                    "unknown scheme {other:?} (expected shadowgrouping, truncated, random, bruteforce or singleshot)"
                ))
            }
        })
    }
}

#[derive(Debug, Clone)]
pub struct BenchmarkConfig {
    pub scheme: BenchmarkScheme,
    pub scheme_config: SchemeConfig,
    pub budget: usize,
    pub n_runs: usize,
    pub seed: u64,
    pub delta: f64,
    /// Benchmark against this state instead of the ground state.
    pub state: Option<QuantumState>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub hamiltonian_hash: String,
    pub scheme: String,
    pub budget: usize,
    pub n_runs: usize,
    pub seed: u64,
    pub rng: String,
    pub delta: f64,
    pub alpha: Option<f64>,
    pub indicator: Indicator,
    /// Settings are regenerated in every run from the run's own seed.
    pub settings_per_run: String,
    pub true_energy: f64,
    pub rmse: f64,
    pub rmse_err: f64,
    pub estimates: Vec<f64>,
    /// Guarantee of the first run's settings; absent for the single-shot
    /// estimator.
    pub guarantee: Option<GuaranteeReport>,
    pub runtime_s: f64,
}

struct RunOutcome {
    estimate: f64,
    guarantee: Option<GuaranteeReport>,
}

fn measure_all<R: Rng>(
    state: &QuantumState,
    settings: &[crate::pauli::PauliString],
    rng: &mut R,
) -> Result<Vec<MeasurementRecord>> {
    let mut sampler = Sampler::new(state);
    settings.iter().map(|s| sampler.sample(s, rng)).collect()
}

fn single_run(
    h: &WeightedHamiltonian,
    state: &QuantumState,
    config: &BenchmarkConfig,
    run: u64,
) -> Result<RunOutcome> {
    let mut sample_rng = rng::stream(config.seed, run);
    let scheme_config = SchemeConfig {
        seed: rng::child_seed(config.seed, run),
        ..config.scheme_config
    };
    let indicator = scheme_config.indicator;
    let plain = |kind: SchemeKind, sample_rng: &mut rng::Rng| -> Result<RunOutcome> {
        let settings = schemes::generate_settings(kind, h, config.budget, &scheme_config)?;
        let records = measure_all(state, &settings, sample_rng)?;
        let estimate = grouped_mean_estimate(h, &records, Indicator::Qwc)?;
        let counts = guarantees::count_compatible(h, &settings, indicator)?;
        Ok(RunOutcome {
            estimate: estimate.energy_estimate,
            guarantee: Some(guarantees::epsilon_guarantee(h, counts.counts(), config.delta)?),
        })
    };
    match config.scheme {
        BenchmarkScheme::ShadowGrouping => plain(SchemeKind::ShadowGrouping, &mut sample_rng),
        BenchmarkScheme::Random => plain(SchemeKind::RandomPaulis, &mut sample_rng),
        BenchmarkScheme::BruteForce => plain(SchemeKind::BruteForce, &mut sample_rng),
        BenchmarkScheme::Truncated => {
            let outcome = schemes::truncated_pipeline(h, config.budget, config.delta, &scheme_config)?;
            let records = measure_all(state, &outcome.settings, &mut sample_rng)?;
            let estimate = grouped_mean_estimate(h, &records, Indicator::Qwc)?
                .truncate(h, &outcome.keep_mask(h.len()));
            Ok(RunOutcome {
                estimate: estimate.energy_estimate,
                guarantee: Some(outcome.report),
            })
        }
        BenchmarkScheme::SingleShot => Ok(RunOutcome {
            estimate: single_shot_estimate(h, state, config.budget, &mut sample_rng)?,
            guarantee: None,
        }),
    }
}

/// Solves for the reference state once, then performs `n_runs` independent
/// generate–measure–estimate rounds (in parallel, each on its own random
/// stream) and summarizes them by the RMSE.
pub fn run_benchmark(h: &WeightedHamiltonian, config: &BenchmarkConfig) -> Result<BenchmarkReport> {
    let started = Instant::now();
    if config.n_runs == 0 {
        return Err(Error::Domain {
            parameter: "runs",
            value: 0.0,
            range: "[1, inf)".into(),
        });
    }
    guarantees::alpha_delta(config.delta)?;
    let (state, true_energy) = match &config.state {
        Some(s) => {
            if s.n_qubits() != h.n_qubits() {
                return Err(Error::LengthMismatch {
                    expected: h.n_qubits(),
                    found: s.n_qubits(),
                });
            }
            (s.clone(), simulator::energy(s, h)?)
        }
        None => {
            let g = simulator::ground_state(h)?;
            (g.state, g.energy)
        }
    };
    let outcomes: Vec<RunOutcome> = (0..config.n_runs as u64)
        .into_par_iter()
        .map(|run| single_run(h, &state, config, run))
        .collect::<Result<_>>()?;
    let estimates: Vec<f64> = outcomes.iter().map(|o| o.estimate).collect();
    let summary = rmse(&estimates, true_energy, rng::child_seed(config.seed, u64::MAX))?;
    let guarantee = outcomes.into_iter().next().and_then(|o| o.guarantee);
    Ok(BenchmarkReport {
        hamiltonian_hash: h.content_hash(),
        scheme: config.scheme.name().to_string(),
        budget: config.budget,
        n_runs: config.n_runs,
        seed: config.seed,
        rng: rng::RNG_ALGORITHM.to_string(),
        delta: config.delta,
        alpha: config.scheme_config.alpha,
        indicator: config.scheme_config.indicator,
        settings_per_run: "regenerated".to_string(),
        true_energy,
        rmse: summary.rmse,
        rmse_err: summary.stderr,
        estimates,
        guarantee,
        runtime_s: started.elapsed().as_secs_f64(),
    })
}
