use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::distribution::{substream, DistributionSpec};
use crate::error::{Error, Result};
use crate::interval::{bounded_interval, ConfidenceParams, UnitSummary};
use crate::plan::{execute_plan, validate_plan, MultistagePlan};

/// Multiplier on the standard error below nominal that a Monte Carlo
/// estimate may fall before it counts as a violation.
pub const SE_MARGIN: f64 = 3.0;

fn std_error(rate: f64, trials: u64) -> f64 {
    (rate * (1.0 - rate) / trials as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub trials: u64,
    /// Trials with `L < μ < U`.
    pub hits: u64,
    pub empirical_coverage: f64,
    pub std_error: f64,
    pub nominal: f64,
}

impl CoverageReport {
    pub fn from_counts(trials: u64, hits: u64, delta: f64) -> Self {
        let cov = hits as f64 / trials as f64;
        Self {
            trials,
            hits,
            empirical_coverage: cov,
            std_error: std_error(cov, trials),
            nominal: 1.0 - delta,
        }
    }

    /// `nominal − 3·SE`
    pub fn threshold(&self) -> f64 {
        self.nominal - SE_MARGIN * self.std_error
    }

    pub fn meets_threshold(&self) -> bool {
        self.empirical_coverage >= self.threshold()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanReport {
    pub trials: u64,
    pub successes: u64,
    /// Fraction of trials whose terminal estimate met the goal.
    pub success_rate: f64,
    pub std_error: f64,
    pub nominal: f64,
    pub mean_samples: f64,
    /// Terminal-stage counts; entry `i` is stage `i + 1`. Trailing zeros
    /// are dropped.
    pub stage_histogram: Vec<u64>,
    pub nonterminated: u64,
}

impl PlanReport {
    pub fn threshold(&self) -> f64 {
        self.nominal - SE_MARGIN * self.std_error
    }

    pub fn meets_threshold(&self) -> bool {
        self.success_rate >= self.threshold()
    }
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::domain("at least one trial is required"));
    }
    Ok(())
}

/// Empirical coverage of the raw interval at sample size `n`.
///
/// Trial `i` draws from substream `i` of `seed`, so the report does not
/// depend on how rayon schedules trials.
pub fn coverage_experiment(
    spec: &DistributionSpec,
    n: u64,
    delta: f64,
    trials: u64,
    seed: u64,
) -> Result<CoverageReport> {
    check_trials(trials)?;
    if n == 0 {
        return Err(Error::domain("sample size must be at least 1"));
    }
    let params = ConfidenceParams::new(delta)?;
    let support = spec.support();
    let mu = spec.exact_mean();

    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let sum: f64 = substream(spec, seed, trial)
                .take(n as usize)
                .map(|x| support.scale(x))
                .sum();
            let mean = (sum / n as f64).clamp(0.0, 1.0);
            let summary = UnitSummary::new(n, mean).expect("mean clamped to [0, 1]");
            u64::from(bounded_interval(&summary, &support, &params, false).covers(mu))
        })
        .sum();

    Ok(CoverageReport::from_counts(trials, hits, delta))
}

#[derive(Clone, Default)]
struct Tally {
    successes: u64,
    samples: u64,
    histogram: Vec<u64>,
    nonterminated: u64,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.successes += other.successes;
        self.samples += other.samples;
        self.nonterminated += other.nonterminated;
        if self.histogram.len() < other.histogram.len() {
            self.histogram.resize(other.histogram.len(), 0);
        }
        for (a, b) in self.histogram.iter_mut().zip(other.histogram) {
            *a += b;
        }
        self
    }
}

/// Runs `plan` on `trials` independent substreams and reports how often
/// the terminal estimate met the goal against the exact mean.
pub fn plan_experiment(
    spec: &DistributionSpec,
    plan: &MultistagePlan,
    trials: u64,
    seed: u64,
) -> Result<PlanReport> {
    check_trials(trials)?;
    validate_plan(plan).into_result()?;
    let mu = spec.exact_mean();

    let tally = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let trace = execute_plan(plan, substream(spec, seed, trial))?;
            let mut t = Tally {
                samples: trace.samples_used,
                ..Tally::default()
            };
            match (trace.terminal_stage, trace.estimate) {
                (Some(stage), Some(estimate)) => {
                    t.histogram = vec![0; stage];
                    t.histogram[stage - 1] = 1;
                    t.successes = u64::from(plan.goal.is_met(estimate, mu));
                }
                _ => t.nonterminated = 1,
            }
            Ok(t)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;

    let mut histogram = tally.histogram;
    while histogram.last() == Some(&0) {
        histogram.pop();
    }
    let rate = tally.successes as f64 / trials as f64;
    Ok(PlanReport {
        trials,
        successes: tally.successes,
        success_rate: rate,
        std_error: std_error(rate, trials),
        nominal: 1.0 - plan.delta,
        mean_samples: tally.samples as f64 / trials as f64,
        stage_histogram: histogram,
        nonterminated: tally.nonterminated,
    })
}
