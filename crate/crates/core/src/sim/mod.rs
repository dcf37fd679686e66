//! Seeded Monte Carlo experiments for interval coverage and plan success.
//!
//! Every trial draws from its own counter-selected substream of the master
//! seed and results are aggregated with integer counts only, so reports
//! are bit-identical whatever the number of worker threads.

mod distribution;
mod experiment;

pub use distribution::{
    make_stream, substream, DistributionSpec, Family, SampleStream, DIST_GRAMMAR,
};
pub use experiment::{coverage_experiment, plan_experiment, CoverageReport, PlanReport, SE_MARGIN};
