use serde::{Deserialize, Serialize};

use super::{check_stop, validate_plan, MultistagePlan};
use crate::error::{Error, Result};
use crate::interval::{bounded_interval, ConfidenceParams, IntervalEstimate, UnitSummary};

/// One stage of an execution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: usize,
    /// Cumulative number of samples behind this stage.
    pub n: u64,
    /// Sample mean of the first `n` observations, on the support's scale.
    pub mean: f64,
    /// Error probability the interval was built at.
    pub delta: f64,
    /// Raw (unclamped) interval at confidence `1 − delta`.
    pub interval: IntervalEstimate,
    pub stopped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Terminated,
    /// The last permitted stage passed without the stopping rule firing.
    StageCapReached,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionTrace {
    pub records: Vec<StageRecord>,
    pub terminal_stage: Option<usize>,
    /// Mean at the terminal stage; `None` when no stage stopped.
    pub estimate: Option<f64>,
    pub outcome: Outcome,
    pub samples_used: u64,
}

/// Runs `plan` against a stream of observations.
///
/// Observations are consumed in order and reused across stages: stage `ℓ`
/// sees exactly the first `n_ℓ` values. Errors if the plan is invalid, an
/// observation lies outside the support, or the stream ends mid-stage.
pub fn execute_plan<I>(plan: &MultistagePlan, source: I) -> Result<ExecutionTrace>
where
    I: IntoIterator<Item = f64>,
{
    validate_plan(plan).into_result()?;

    let support = plan.support;
    let mut source = source.into_iter();
    let mut records = Vec::new();
    let mut count: u64 = 0;
    let mut sum = 0.0;

    for stage in 1..=plan.stage_cap() {
        let Some(target) = plan.sample_size(stage) else {
            break;
        };
        while count < target {
            let x = source.next().ok_or(Error::Exhausted {
                stage,
                needed: target,
                available: count,
            })?;
            if !support.contains(x) {
                return Err(Error::OutOfSupport {
                    index: count as usize,
                    value: x,
                    a: support.a(),
                    b: support.b(),
                });
            }
            sum += x;
            count += 1;
        }

        let mean = sum / count as f64;
        let delta = plan.stage_delta(stage)?;
        let params = ConfidenceParams::new(delta)?;
        let summary = UnitSummary::new(count, support.scale(mean).clamp(0.0, 1.0))?;
        let interval = bounded_interval(&summary, &support, &params, false);
        let stopped = check_stop(&plan.goal, mean, &interval);
        records.push(StageRecord {
            stage,
            n: count,
            mean,
            delta,
            interval,
            stopped,
        });
        if stopped {
            return Ok(ExecutionTrace {
                records,
                terminal_stage: Some(stage),
                estimate: Some(mean),
                outcome: Outcome::Terminated,
                samples_used: count,
            });
        }
    }

    Ok(ExecutionTrace {
        records,
        terminal_stage: None,
        estimate: None,
        outcome: Outcome::StageCapReached,
        samples_used: count,
    })
}
