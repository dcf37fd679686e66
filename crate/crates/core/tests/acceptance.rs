//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs without the libtest harness so the lines are
//! always printed.

mod common;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use bounded_mean::{
    build_schedule, coverage_experiment, epsilon_root, max_halfwidth, min_final_sample_size,
    plan_experiment, stage_delta, t_map, unit_interval, ConfidenceParams, ConfidenceSchedule,
    DistributionSpec, MultistagePlan, PrecisionGoal, Support, UnitSummary,
};
use common::{tail_root_bisection, unit_grid, DELTA_GRID, N_GRID};

struct Verdict {
    passed: bool,
    detail: String,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

fn params(delta: f64) -> ConfidenceParams {
    ConfidenceParams::new(delta).unwrap()
}

fn grid() -> impl Iterator<Item = (u64, f64, f64)> {
    N_GRID.into_iter().flat_map(|n| {
        DELTA_GRID
            .into_iter()
            .flat_map(move |delta| unit_grid().map(move |x| (n, delta, x)))
    })
}

fn within_budget(elapsed: Duration, secs: u64) -> bool {
    elapsed < Duration::from_secs(secs)
}

fn ac1_closed_form_vs_bisection() -> Verdict {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (n, delta, t) in grid() {
        let diff = (epsilon_root(t, n, &params(delta)) - tail_root_bisection(t, n, delta)).abs();
        worst = worst.max(diff);
    }
    let elapsed = start.elapsed();
    Verdict::new(
        worst < 1e-9 && within_budget(elapsed, 5),
        format!("max |closed − bisection| = {worst:.3e} (tol 1e-9), {elapsed:.2?} (budget 5s)"),
    )
}

fn ac2_fixed_point() -> Verdict {
    let (mut fixed_fail, mut order_fail, mut limit_fail, mut points) = (0, 0, 0, 0);
    let mut positive_t_fail = 0;
    let mut first = None;
    for (n, delta, z) in grid() {
        points += 1;
        let p = params(delta);
        let t = t_map(z, n, &p);
        if ((z - t) - epsilon_root(t, n, &p)).abs() >= 1e-10 {
            fixed_fail += 1;
            positive_t_fail += usize::from(t > 0.0);
            first.get_or_insert((n, delta, z));
        }
        if t > z + 1e-15 {
            order_fail += 1;
        }
        let (lower, _) = unit_interval(&UnitSummary::new(n, z).unwrap(), &p);
        if (t - lower).abs() >= 1e-12 {
            limit_fail += 1;
        }
    }
    let mut detail = format!(
        "z − t(z) = ε(t(z)) fails at {fixed_fail}/{points} points (tol 1e-10); t ≤ z fails at {order_fail}; t(Z̄) ≠ L at {limit_fail}"
    );
    if let Some((n, delta, z)) = first {
        detail += &format!(
            "; first failure n={n} δ={delta} z={z}; failures with t(z) > 0: {positive_t_fail}"
        );
    }
    Verdict::new(fixed_fail + order_fail + limit_fail == 0, detail)
}

fn ac3_symmetry() -> Verdict {
    let mut worst = 0.0f64;
    for (n, delta, z) in grid() {
        let p = params(delta);
        let (_, upper) = unit_interval(&UnitSummary::new(n, z).unwrap(), &p);
        let (lower, _) = unit_interval(&UnitSummary::new(n, 1.0 - z).unwrap(), &p);
        worst = worst.max((upper - (1.0 - lower)).abs());
    }
    Verdict::new(
        worst < 1e-12,
        format!("max |U(z) − (1 − L(1−z))| = {worst:.3e} (tol 1e-12)"),
    )
}

fn ac4_concavity() -> Verdict {
    let h = 1e-3;
    let mut worst = f64::NEG_INFINITY;
    for n in N_GRID {
        for delta in DELTA_GRID {
            let p = params(delta);
            let eps = |t: f64| epsilon_root(t, n, &p);
            for k in 11..=989 {
                let t = k as f64 * 1e-3;
                worst = worst.max(eps(t - h) - 2.0 * eps(t) + eps(t + h));
            }
        }
    }
    Verdict::new(
        worst <= 1e-9,
        format!("max second difference = {worst:.3e} (tol 1e-9)"),
    )
}

fn ac5_coverage() -> Verdict {
    let families = [
        "bernoulli:0.01",
        "bernoulli:0.1",
        "bernoulli:0.5",
        "bernoulli:0.9",
        "bernoulli:0.99",
        "beta:0.5,0.5",
        "twopoint:0.05,1,0.01",
    ];
    let start = Instant::now();
    let (mut cells, mut failures) = (0, Vec::new());
    let mut tightest = (f64::INFINITY, String::new());
    for (i, family) in families.iter().enumerate() {
        let spec = DistributionSpec::parse(family, Support::UNIT).unwrap();
        for n in [10, 30, 100, 1000] {
            for delta in [0.1, 0.05] {
                cells += 1;
                let seed = 1000 + i as u64 * 100 + n;
                let r = coverage_experiment(&spec, n, delta, 100_000, seed).unwrap();
                let slack = r.empirical_coverage - r.threshold();
                if slack < tightest.0 {
                    tightest = (
                        slack,
                        format!("{family} n={n} δ={delta}: {}", r.empirical_coverage),
                    );
                }
                if !r.meets_threshold() {
                    failures.push(format!("{family} n={n} δ={delta}"));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    Verdict::new(
        failures.is_empty() && within_budget(elapsed, 90),
        format!(
            "{}/{cells} cells at or above (1−δ) − 3·SE, tightest {} (slack {:.4}){}, {elapsed:.1?} (budget 90s)",
            cells - failures.len(),
            tightest.1,
            tightest.0,
            if failures.is_empty() { String::new() } else { format!(", failing: {}", failures.join("; ")) },
        ),
    )
}

fn ac6_sizing_rule() -> Verdict {
    let sizing = min_final_sample_size(0.05, 0.1, 0.05, &Support::UNIT).unwrap();
    let expected_threshold = 200.0 * 400f64.ln();
    let width = max_halfwidth(sizing.n, &params(0.1 * 0.05));
    Verdict::new(
        sizing.n == 1199 && (sizing.threshold - expected_threshold).abs() < 1e-9 && width < 0.05,
        format!(
            "n = {} (threshold {:.4}), max half-width {width:.6} < 0.05",
            sizing.n, sizing.threshold
        ),
    )
}

fn finite_plan(goal: PrecisionGoal, tolerance: f64, n1: u64, growth: f64) -> MultistagePlan {
    let (delta, zeta) = (0.05, 0.1);
    let mut sizes = build_schedule(n1, growth, 5).unwrap();
    let n_s = min_final_sample_size(tolerance, zeta, delta, &Support::UNIT)
        .unwrap()
        .n;
    let last = sizes.last_mut().unwrap();
    *last = (*last).max(n_s);
    MultistagePlan {
        support: Support::UNIT,
        delta,
        goal,
        schedule: ConfidenceSchedule::Finite { s: 5, zeta },
        sample_sizes: sizes,
    }
}

fn ac7_absolute_plan() -> Verdict {
    let start = Instant::now();
    let plan = finite_plan(PrecisionGoal::Absolute { eps: 0.05 }, 0.05, 500, 1.3);
    let n_s = *plan.sample_sizes.last().unwrap();
    let spec = DistributionSpec::parse("bernoulli:0.3", Support::UNIT).unwrap();
    let r = plan_experiment(&spec, &plan, 20_000, 7).unwrap();
    let elapsed = start.elapsed();
    Verdict::new(
        r.nonterminated == 0
            && r.meets_threshold()
            && r.mean_samples < n_s as f64
            && within_budget(elapsed, 60),
        format!(
            "sizes {:?}: success {} (threshold {:.4}), nonterminated {}, mean samples {} < {n_s}, {elapsed:.1?} (budget 60s)",
            plan.sample_sizes,
            r.success_rate,
            r.threshold(),
            r.nonterminated,
            r.mean_samples
        ),
    )
}

fn ac8_mixed_plan() -> Verdict {
    let goal = PrecisionGoal::Mixed {
        eps_a: 0.03,
        eps_r: 0.1,
    };
    let plan = finite_plan(goal, 0.03, 500, 1.6);
    let mut passed = true;
    let mut parts = vec![format!("sizes {:?}", plan.sample_sizes)];
    for family in ["bernoulli:0.3", "beta:2,5"] {
        let spec = DistributionSpec::parse(family, Support::UNIT).unwrap();
        let r = plan_experiment(&spec, &plan, 20_000, 8).unwrap();
        passed &= r.meets_threshold() && r.nonterminated == 0;
        parts.push(format!(
            "{family}: success {} (threshold {:.4}), nonterminated {}",
            r.success_rate,
            r.threshold(),
            r.nonterminated
        ));
    }
    Verdict::new(passed, parts.join("; "))
}

fn ac9_tailed_budget() -> Verdict {
    // Each stage delta is ζδ times a power of two, so the partial sums are
    // exact in units of ζδ·2⁻⁶⁰; f64 cannot resolve the final gap.
    const STAGES: usize = 60;
    let delta = 0.05;
    let unit = 2f64.powi(STAGES as i32);
    let mut passed = true;
    let mut parts = Vec::new();
    for tau in [1usize, 4, 10] {
        let schedule = ConfidenceSchedule::tailed(tau, None);
        let zeta_delta = schedule.zeta() * delta;
        let bound = (tau as u128 + 1) << STAGES;
        let mut total: u128 = 0;
        let mut exact = true;
        let mut below = true;
        for stage in 1..=STAGES {
            let scaled = stage_delta(&schedule, delta, stage).unwrap() / zeta_delta * unit;
            exact &= scaled.fract() == 0.0 && scaled >= 1.0;
            total += scaled as u128;
            below &= total < bound;
        }
        // Closed form: (τ + 1)ζδ − 2^(τ−60)ζδ.
        let gap = bound - total;
        let ok = exact && below && gap == 1u128 << tau;
        passed &= ok;
        parts.push(format!(
            "τ={tau}: Σ = (τ+1)ζδ − 2^{}·ζδ < {:.4}",
            tau as i64 - STAGES as i64,
            (tau as f64 + 1.0) * zeta_delta
        ));
    }
    Verdict::new(passed, parts.join("; "))
}

fn cli(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_bounded-mean"))
        .args(args)
        .env_remove("RNG_SEED")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn ac10_determinism() -> Verdict {
    let dir = tempfile::TempDir::new().unwrap();
    let plan = dir.path().join("plan.json");
    std::fs::write(
        &plan,
        cli(&[
            "plan",
            "build",
            "--goal",
            "absolute:0.05",
            "--delta",
            "0.05",
            "--schedule",
            "finite:5",
            "--zeta",
            "0.1",
            "--n1",
            "100",
        ]),
    )
    .unwrap();
    let plan = plan.to_str().unwrap();

    let coverage = |threads: &str| {
        cli(&[
            "simulate",
            "coverage",
            "--dist",
            "beta:0.5,0.5",
            "--n",
            "30",
            "--delta",
            "0.05",
            "--trials",
            "20000",
            "--seed",
            "11",
            "--threads",
            threads,
        ])
    };
    let simulate_plan = |threads: &str| {
        cli(&[
            "simulate",
            "plan",
            "--dist",
            "bernoulli:0.3",
            "--plan",
            plan,
            "--trials",
            "2000",
            "--seed",
            "11",
            "--threads",
            threads,
        ])
    };
    let run = || {
        cli(&[
            "plan",
            "run",
            "--plan",
            plan,
            "--dist",
            "bernoulli:0.3",
            "--seed",
            "42",
        ])
    };

    let checks = [
        ("simulate coverage", coverage("1") == coverage("4")),
        ("simulate plan", simulate_plan("1") == simulate_plan("4")),
        ("plan run", run() == run()),
    ];
    let failing: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    Verdict::new(
        failing.is_empty(),
        if failing.is_empty() {
            "byte-identical output for 1 vs 4 threads and repeated runs".to_owned()
        } else {
            format!("output differs for: {}", failing.join(", "))
        },
    )
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            "AC1 closed-form root vs bisection",
            ac1_closed_form_vs_bisection,
        ),
        ("AC2 lower-limit fixed point", ac2_fixed_point),
        ("AC3 reflection symmetry", ac3_symmetry),
        ("AC4 concavity of the half-width root", ac4_concavity),
        ("AC5 coverage suite", ac5_coverage),
        ("AC6 final-stage sizing rule", ac6_sizing_rule),
        ("AC7 absolute multistage guarantee", ac7_absolute_plan),
        ("AC8 mixed multistage guarantee", ac8_mixed_plan),
        ("AC9 tailed schedule budget", ac9_tailed_budget),
        ("AC10 determinism", ac10_determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let v = check();
        failed += usize::from(!v.passed);
        println!(
            "{} {name}: {}",
            if v.passed { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
