//! Confidence intervals for the mean of a bounded random variable and
//! multistage point-estimation plans built on top of them.
//!
//! The crate has three layers:
//!
//! - [`interval`]: the closed-form interval for a mean on `[0, 1]` (and any
//!   `[a, b]` through an affine map), plus the half-width functions it is
//!   built from and a plain Hoeffding band for comparison.
//! - [`plan`]: precision goals, per-stage confidence schedules, stopping
//!   predicates and a sequential executor for multistage sampling plans.
//! - [`sim`]: seeded, reproducible Monte Carlo experiments that measure the
//!   coverage of the interval and the success rate of plans.

pub mod error;
pub mod interval;
pub mod plan;
pub mod sim;

pub use error::{Error, Result};
pub use interval::{
    bounded_interval, epsilon_root, eq1_residual, halfwidth_peak, hoeffding_interval,
    interval_from_samples, massart_c, max_halfwidth, summarize, t_map, unit_interval,
    ConfidenceParams, HalfWidthPeak, IntervalEstimate, Support, UnitSummary,
};
pub use plan::{
    build_schedule, check_stop, execute_plan, min_final_sample_size, stage_delta, validate_plan,
    ConfidenceSchedule, ExecutionTrace, FinalSizing, MultistagePlan, Outcome, PrecisionGoal,
    StageRecord, ValidationReport,
};
pub use sim::{
    coverage_experiment, make_stream, plan_experiment, substream, CoverageReport, DistributionSpec,
    Family, PlanReport, SampleStream,
};
