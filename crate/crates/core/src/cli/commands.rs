use std::fs;
use std::path::Path;

use bounded_mean::sim::{CoverageReport, PlanReport, DIST_GRAMMAR};
use bounded_mean::{
    bounded_interval, build_schedule, coverage_experiment, execute_plan, make_stream,
    min_final_sample_size, plan_experiment, summarize, validate_plan, ConfidenceParams,
    ConfidenceSchedule, DistributionSpec, Error, IntervalEstimate, MultistagePlan, Outcome,
    Support, UnitSummary,
};
use serde::Serialize;
use serde_json::json;

use super::document::{parse_payload, OutputDocument};
use super::input::{read_observations, Observations};
use super::{
    CiArgs, CliError, CliResult, CoverageArgs, PlanBuildArgs, PlanRunArgs, ScheduleKind,
    SimPlanArgs, EXIT_OK, EXIT_THRESHOLD, EXIT_VALIDATION,
};

/// Rewrites sample indices in data errors as line numbers.
fn locate(err: Error, obs: &Observations) -> CliError {
    match err {
        Error::OutOfSupport { index, value, a, b } => CliError::data(format!(
            "line {}: value {value} lies outside the bounds [{a}, {b}]",
            obs.line_of(index)
        )),
        Error::Exhausted {
            stage,
            needed,
            available,
        } => CliError::from(err).with_message(format!(
            "input exhausted at stage {stage}: needed {needed} samples, only {available} available (short by {})",
            needed - available
        )),
        other => other.into(),
    }
}

impl CliError {
    fn with_message(mut self, message: String) -> Self {
        self.message = message;
        self
    }
}

fn resolve_seed(seed: Option<u64>) -> CliResult<u64> {
    if let Some(seed) = seed {
        return Ok(seed);
    }
    match std::env::var("RNG_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| {
            CliError::usage(format!(
                "RNG_SEED = '{v}' is not an unsigned 64-bit integer"
            ))
        }),
        Err(_) => Err(CliError::usage("--seed is required (or set RNG_SEED)")),
    }
}

fn parse_dist(dist: &str, support: Support) -> CliResult<DistributionSpec> {
    DistributionSpec::parse(dist, support)
        .map_err(|e| CliError::usage(format!("{e}\naccepted grammar: {DIST_GRAMMAR}")))
}

fn read_plan(path: &Path) -> CliResult<MultistagePlan> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("cannot read plan {}: {e}", path.display())))?;
    parse_payload(&text)
        .map_err(|e| CliError::data(format!("cannot parse plan {}: {e}", path.display())))
}

fn check_plan(plan: &MultistagePlan) -> CliResult<()> {
    let report = validate_plan(plan);
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if report.is_valid() {
        Ok(())
    } else {
        for v in &report.violations {
            eprintln!("violation: {v}");
        }
        Err(CliError::new(
            EXIT_VALIDATION,
            format!(
                "plan failed validation with {} violation(s)",
                report.violations.len()
            ),
        ))
    }
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::usage(format!("cannot start {n} worker threads: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn bounds_json(s: &Support) -> serde_json::Value {
    json!([s.a(), s.b()])
}

#[derive(Serialize)]
struct CiResult {
    n: u64,
    mean: f64,
    support: Support,
    delta: f64,
    c: f64,
    interval: IntervalEstimate,
    raw: IntervalEstimate,
}

pub fn ci(args: &CiArgs) -> CliResult<i32> {
    let params = ConfidenceParams::new(args.delta)?;
    let support = args.bounds;
    let summary = match (&args.input, args.n, args.mean) {
        (Some(path), _, _) => {
            let obs = read_observations(path)?;
            summarize(&obs.values, &support).map_err(|e| locate(e, &obs))?
        }
        (None, Some(n), Some(mean)) => {
            if !support.contains(mean) {
                return Err(CliError::data(format!(
                    "mean {mean} lies outside the bounds [{}, {}]",
                    support.a(),
                    support.b()
                )));
            }
            UnitSummary::new(n, support.scale(mean).clamp(0.0, 1.0))?
        }
        _ => {
            return Err(CliError::usage(
                "supply data with --input <path> or --n <int> --mean <real>",
            ))
        }
    };

    let raw = bounded_interval(&summary, &support, &params, false);
    let interval = if args.raw {
        raw
    } else {
        bounded_interval(&summary, &support, &params, true)
    };
    let result = CiResult {
        n: summary.n(),
        mean: support.unscale(summary.mean()),
        support,
        delta: params.delta(),
        c: params.c(),
        interval,
        raw,
    };
    eprintln!(
        "n = {}, mean = {}: ({}, {}) at confidence {}",
        result.n,
        result.mean,
        interval.lower,
        interval.upper,
        1.0 - args.delta
    );
    let command = json!({
        "name": "ci",
        "delta": args.delta,
        "input": args.input.as_ref().map(|p| p.display().to_string()),
        "n": args.n,
        "mean": args.mean,
        "bounds": bounds_json(&support),
        "raw": args.raw,
    });
    OutputDocument::new(command, result).emit()?;
    Ok(EXIT_OK)
}

pub fn plan_build(args: &PlanBuildArgs) -> CliResult<i32> {
    let schedule = args
        .schedule
        .with_zeta(args.zeta, args.max_stages, args.growth);
    let stages = match args.schedule {
        ScheduleKind::Finite(s) => s,
        ScheduleKind::Tailed(tau) => tau,
    };
    let mut sample_sizes = build_schedule(args.n1, args.growth, stages)
        .map_err(|e| CliError::new(EXIT_VALIDATION, e.to_string()))?;

    // Raise the last stage so the plan is certain to stop there.
    if let (ConfidenceSchedule::Finite { zeta, .. }, Some(eps), Some(last)) = (
        schedule,
        args.goal.absolute_tolerance(),
        sample_sizes.last_mut(),
    ) {
        if schedule.violations().is_empty() && args.goal.violations().is_empty() {
            if let Ok(sizing) = min_final_sample_size(eps, zeta, args.delta, &args.bounds) {
                if *last < sizing.n {
                    eprintln!(
                        "final stage raised from {last} to {} (threshold {})",
                        sizing.n, sizing.threshold
                    );
                    *last = sizing.n;
                }
            }
        }
    }

    let plan = MultistagePlan {
        support: args.bounds,
        delta: args.delta,
        goal: args.goal,
        schedule,
        sample_sizes,
    };
    check_plan(&plan)?;
    eprintln!(
        "plan: goal {}, schedule {}, sizes {:?}",
        plan.goal, plan.schedule, plan.sample_sizes
    );
    let command = json!({
        "name": "plan build",
        "goal": args.goal.to_string(),
        "delta": args.delta,
        "schedule": match args.schedule {
            ScheduleKind::Finite(s) => format!("finite:{s}"),
            ScheduleKind::Tailed(t) => format!("tailed:{t}"),
        },
        "zeta": args.zeta,
        "n1": args.n1,
        "growth": args.growth,
        "bounds": bounds_json(&args.bounds),
        "max_stages": args.max_stages,
    });
    OutputDocument::new(command, plan).emit()?;
    Ok(EXIT_OK)
}

pub fn plan_run(args: &PlanRunArgs) -> CliResult<i32> {
    let plan = read_plan(&args.plan)?;
    check_plan(&plan)?;

    let (trace, command) = match (&args.input, &args.dist) {
        (Some(path), _) => {
            let obs = read_observations(path)?;
            let trace =
                execute_plan(&plan, obs.values.iter().copied()).map_err(|e| locate(e, &obs))?;
            let command = json!({
                "name": "plan run",
                "plan": args.plan.display().to_string(),
                "input": path.display().to_string(),
            });
            (trace, command)
        }
        (None, Some(dist)) => {
            let seed = resolve_seed(args.seed)?;
            let spec = parse_dist(dist, plan.support)?;
            let trace = execute_plan(&plan, make_stream(&spec, seed))?;
            let command = json!({
                "name": "plan run",
                "plan": args.plan.display().to_string(),
                "dist": spec.to_string(),
                "seed": seed,
            });
            (trace, command)
        }
        (None, None) => {
            return Err(CliError::usage(
                "supply samples with --input <path> or --dist <spec> --seed <int>",
            ))
        }
    };

    match (trace.outcome, trace.terminal_stage, trace.estimate) {
        (Outcome::Terminated, Some(stage), Some(est)) => eprintln!(
            "stopped at stage {stage} after {} samples: estimate {est}",
            trace.samples_used
        ),
        _ => eprintln!(
            "stage cap reached after {} samples without stopping",
            trace.samples_used
        ),
    }
    OutputDocument::new(command, trace).emit()?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct Gated<R> {
    distribution: DistributionSpec,
    #[serde(flatten)]
    report: R,
    threshold: f64,
    passed: bool,
}

pub fn simulate_coverage(args: &CoverageArgs) -> CliResult<i32> {
    let spec = parse_dist(&args.dist, args.bounds)?;
    let seed = resolve_seed(args.seed)?;
    let report: CoverageReport = with_threads(args.threads, || {
        coverage_experiment(&spec, args.n, args.delta, args.trials, seed)
    })??;
    let passed = report.meets_threshold();
    eprintln!(
        "coverage {} over {} trials (nominal {}, threshold {}): {}",
        report.empirical_coverage,
        report.trials,
        report.nominal,
        report.threshold(),
        if passed { "ok" } else { "BELOW THRESHOLD" }
    );
    let command = json!({
        "name": "simulate coverage",
        "dist": spec.to_string(),
        "n": args.n,
        "delta": args.delta,
        "trials": args.trials,
        "seed": seed,
        "bounds": bounds_json(&args.bounds),
    });
    let result = Gated {
        distribution: spec,
        threshold: report.threshold(),
        report,
        passed,
    };
    OutputDocument::new(command, result).emit()?;
    Ok(if passed { EXIT_OK } else { EXIT_THRESHOLD })
}

pub fn simulate_plan(args: &SimPlanArgs) -> CliResult<i32> {
    let plan = read_plan(&args.plan)?;
    check_plan(&plan)?;
    let spec = parse_dist(&args.dist, plan.support)?;
    let seed = resolve_seed(args.seed)?;
    let report: PlanReport = with_threads(args.threads, || {
        plan_experiment(&spec, &plan, args.trials, seed)
    })??;
    let passed = report.meets_threshold();
    eprintln!(
        "success rate {} over {} trials (nominal {}, threshold {}), mean samples {}, nonterminated {}: {}",
        report.success_rate,
        report.trials,
        report.nominal,
        report.threshold(),
        report.mean_samples,
        report.nonterminated,
        if passed { "ok" } else { "BELOW THRESHOLD" }
    );
    let command = json!({
        "name": "simulate plan",
        "dist": spec.to_string(),
        "plan": args.plan.display().to_string(),
        "trials": args.trials,
        "seed": seed,
    });
    let result = Gated {
        distribution: spec,
        threshold: report.threshold(),
        report,
        passed,
    };
    OutputDocument::new(command, result).emit()?;
    Ok(if passed { EXIT_OK } else { EXIT_THRESHOLD })
}
