//! Multistage sampling plans.
//!
//! A plan observes a cumulative sample at predeclared sizes
//! `n_1 < n_2 < …`. At each stage it forms the sample mean and the interval
//! at the stage's confidence level, and stops as soon as the goal's
//! stopping predicate holds. With per-stage error `ζδ` and `sζ < 1`
//! (finite) or the halving tail with `(τ + 1)ζ < 1` (tailed), the terminal
//! estimate meets the goal with probability above `1 − δ`.

mod execute;
mod goal;
mod schedule;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{Support, MAX_DELTA, MIN_DELTA};

pub use execute::{execute_plan, ExecutionTrace, Outcome, StageRecord};
pub use goal::{check_stop, PrecisionGoal};
pub use schedule::{
    build_schedule, min_final_sample_size, stage_delta, ConfidenceSchedule, FinalSizing,
    DEFAULT_MAX_STAGES,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultistagePlan {
    pub support: Support,
    pub delta: f64,
    pub goal: PrecisionGoal,
    pub schedule: ConfidenceSchedule,
    /// All `s` sizes for a finite plan; a prefix for a tailed one.
    pub sample_sizes: Vec<u64>,
}

impl MultistagePlan {
    /// Cumulative sample size at `stage` (1-based). Tailed plans extend the
    /// stored prefix geometrically; finite plans end at `s`.
    pub fn sample_size(&self, stage: usize) -> Option<u64> {
        if stage == 0 {
            return None;
        }
        if let Some(&n) = self.sample_sizes.get(stage - 1) {
            return Some(n);
        }
        match self.schedule {
            ConfidenceSchedule::Finite { .. } => None,
            ConfidenceSchedule::Tailed { growth, .. } => {
                let mut n = *self.sample_sizes.last()?;
                for _ in self.sample_sizes.len()..stage {
                    n = schedule::grow(n, growth);
                }
                Some(n)
            }
        }
    }

    pub fn stage_delta(&self, stage: usize) -> Result<f64> {
        stage_delta(&self.schedule, self.delta, stage)
    }

    pub fn stage_cap(&self) -> usize {
        self.schedule.stage_cap()
    }
}

/// Outcome of [`validate_plan`]. Violations make the plan unusable;
/// warnings flag weaker guarantees.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<Vec<String>> {
        if self.is_valid() {
            Ok(self.warnings)
        } else {
            Err(Error::InvalidPlan(self.violations))
        }
    }
}

pub fn validate_plan(plan: &MultistagePlan) -> ValidationReport {
    let mut report = ValidationReport::default();
    let v = &mut report.violations;

    if !(MIN_DELTA..=MAX_DELTA).contains(&plan.delta) {
        v.push(format!("delta = {} must lie in (0, 1)", plan.delta));
    }
    v.extend(plan.goal.violations());
    v.extend(plan.schedule.violations());

    let sizes = &plan.sample_sizes;
    if sizes.first() == Some(&0) {
        v.push("sample sizes must be positive".to_owned());
    }
    if let Some(i) = sizes.windows(2).position(|w| w[0] >= w[1]) {
        v.push(format!(
            "sample sizes must be strictly increasing: n_{} = {} ≥ n_{} = {}",
            i + 1,
            sizes[i],
            i + 2,
            sizes[i + 1]
        ));
    }
    match plan.schedule {
        ConfidenceSchedule::Finite { s, .. } if sizes.len() != s => {
            v.push(format!(
                "finite schedule has s = {s} stages but {} sample sizes",
                sizes.len()
            ));
        }
        ConfidenceSchedule::Tailed { .. } if sizes.is_empty() => {
            v.push("tailed schedule needs at least one sample size".to_owned());
        }
        _ => {}
    }

    let relative = matches!(plan.goal, PrecisionGoal::Relative { .. });
    if relative {
        report
            .warnings
            .push("relative precision: termination is not guaranteed when θ = 0".to_owned());
        if let ConfidenceSchedule::Tailed {
            max_stages: None, ..
        } = plan.schedule
        {
            report
                .violations
                .push("relative goal with a tailed schedule requires max_stages".to_owned());
        }
    }

    // A finite plan must stop at its last stage whatever the mean; with an
    // absolute tolerance this is a sample-size condition on n_s.
    if let (ConfidenceSchedule::Finite { zeta, .. }, Some(eps), Some(&last), true) = (
        plan.schedule,
        plan.goal.absolute_tolerance(),
        sizes.last(),
        report.violations.is_empty(),
    ) {
        match min_final_sample_size(eps, zeta, plan.delta, &plan.support) {
            Ok(sizing) if last < sizing.n => report.violations.push(format!(
                "final stage n_s = {last} cannot guarantee stopping: need n_s ≥ {} (threshold {})",
                sizing.n, sizing.threshold
            )),
            Ok(_) => {}
            Err(e) => report.violations.push(e.to_string()),
        }
    } else if relative && matches!(plan.schedule, ConfidenceSchedule::Finite { .. }) {
        report
            .warnings
            .push("finite relative plan may reach its last stage without stopping".to_owned());
    }

    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn finite_plan(zeta: f64, sizes: Vec<u64>) -> MultistagePlan {
        MultistagePlan {
            support: Support::UNIT,
            delta: 0.05,
            goal: PrecisionGoal::Absolute { eps: 0.05 },
            schedule: ConfidenceSchedule::Finite {
                s: sizes.len(),
                zeta,
            },
            sample_sizes: sizes,
        }
    }

    #[test]
    fn validated_finite_example() {
        let plan = finite_plan(0.1, vec![100, 200, 400, 800, 1199]);
        let report = validate_plan(&plan);
        assert!(report.is_valid(), "{report:?}");
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn zeta_too_large() {
        let plan = finite_plan(0.25, vec![100, 200, 400, 800, 1199]);
        let report = validate_plan(&plan);
        assert!(report.violations.iter().any(|v| v.contains("sζ ≥ 1")));
    }

    #[test]
    fn undersized_final_stage() {
        let plan = finite_plan(0.1, vec![100, 200, 400, 800, 1198]);
        let report = validate_plan(&plan);
        assert_eq!(report.violations.len(), 1, "{report:?}");
        assert!(report.violations[0].contains("1199"));
    }

    #[test]
    fn non_increasing_sizes() {
        let plan = finite_plan(0.1, vec![100, 100, 400, 800, 1199]);
        assert!(!validate_plan(&plan).is_valid());
    }

    #[test]
    fn length_mismatch() {
        let mut plan = finite_plan(0.1, vec![100, 200, 400, 800, 1199]);
        plan.schedule = ConfidenceSchedule::Finite { s: 4, zeta: 0.1 };
        assert!(!validate_plan(&plan).is_valid());
    }

    #[test]
    fn tailed_valid_and_relative_cap() {
        let mut plan = MultistagePlan {
            support: Support::UNIT,
            delta: 0.05,
            goal: PrecisionGoal::Absolute { eps: 0.05 },
            schedule: ConfidenceSchedule::Tailed {
                tau: 3,
                zeta: 0.2,
                max_stages: None,
                growth: 2.0,
            },
            sample_sizes: vec![10, 20, 40],
        };
        assert!(validate_plan(&plan).is_valid());

        plan.goal = PrecisionGoal::Relative { eps: 0.1 };
        let report = validate_plan(&plan);
        assert!(!report.is_valid());
        assert!(report.violations[0].contains("max_stages"));
        assert_eq!(report.warnings.len(), 1);

        plan.schedule = ConfidenceSchedule::Tailed {
            tau: 3,
            zeta: 0.2,
            max_stages: Some(20),
            growth: 2.0,
        };
        let report = validate_plan(&plan);
        assert!(report.is_valid());
        assert!(!report.warnings.is_empty());
    }

    #[test]
    fn tailed_sizes_extend_geometrically() {
        let plan = MultistagePlan {
            support: Support::UNIT,
            delta: 0.05,
            goal: PrecisionGoal::Absolute { eps: 0.05 },
            schedule: ConfidenceSchedule::Tailed {
                tau: 2,
                zeta: 0.1,
                max_stages: None,
                growth: 1.5,
            },
            sample_sizes: vec![10, 15],
        };
        let sizes: Vec<u64> = (1..=5).map(|l| plan.sample_size(l).unwrap()).collect();
        assert_eq!(sizes, vec![10, 15, 23, 35, 53]);
        assert_eq!(plan.sample_size(0), None);
    }

    #[test]
    fn finite_sizes_end() {
        let plan = finite_plan(0.1, vec![100, 200, 400, 800, 1199]);
        assert_eq!(plan.sample_size(5), Some(1199));
        assert_eq!(plan.sample_size(6), None);
    }

    #[test]
    fn plan_json_roundtrip() {
        let plan = finite_plan(0.1, vec![100, 200, 400, 800, 1199]);
        let json = serde_json::to_string(&plan).unwrap();
        assert_eq!(serde_json::from_str::<MultistagePlan>(&json).unwrap(), plan);
    }
}
