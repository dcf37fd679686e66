use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{max_halfwidth, ConfidenceParams, Support};

/// Used for tailed plans that do not set `max_stages`.
pub const DEFAULT_MAX_STAGES: usize = 64;

fn default_growth() -> f64 {
    2.0
}

/// How the error budget δ is split across stages.
///
/// A finite plan gives every one of its `s` stages confidence `1 − ζδ`. A
/// tailed plan does the same for the first `τ` stages and then halves the
/// per-stage error at each further stage, `ζδ·2^(τ−ℓ)`, so the total stays
/// below `(τ + 1)ζδ` however long sampling runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ConfidenceSchedule {
    Finite {
        s: usize,
        zeta: f64,
    },
    Tailed {
        tau: usize,
        zeta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max_stages: Option<usize>,
        /// Ratio used to extend the sample sizes past the stored prefix.
        #[serde(default = "default_growth")]
        growth: f64,
    },
}

impl ConfidenceSchedule {
    /// Finite schedule with the default `ζ = 1/(2s)`.
    pub fn finite(s: usize) -> Self {
        ConfidenceSchedule::Finite {
            s,
            zeta: 1.0 / (2.0 * s as f64),
        }
    }

    /// Tailed schedule with the default `ζ = 1/(2(τ + 1))`.
    pub fn tailed(tau: usize, max_stages: Option<usize>) -> Self {
        ConfidenceSchedule::Tailed {
            tau,
            zeta: 1.0 / (2.0 * (tau as f64 + 1.0)),
            max_stages,
            growth: default_growth(),
        }
    }

    pub fn zeta(&self) -> f64 {
        match *self {
            ConfidenceSchedule::Finite { zeta, .. } | ConfidenceSchedule::Tailed { zeta, .. } => {
                zeta
            }
        }
    }

    /// Highest stage index the executor will visit.
    pub fn stage_cap(&self) -> usize {
        match *self {
            ConfidenceSchedule::Finite { s, .. } => s,
            ConfidenceSchedule::Tailed { max_stages, .. } => {
                max_stages.unwrap_or(DEFAULT_MAX_STAGES)
            }
        }
    }

    /// Side-condition violations (`sζ < 1`, `(τ + 1)ζ < 1`, and friends).
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let zeta = self.zeta();
        if !(zeta > 0.0 && zeta.is_finite()) {
            out.push(format!("ζ = {zeta} must be positive"));
        }
        match *self {
            ConfidenceSchedule::Finite { s, zeta } => {
                if s == 0 {
                    out.push("finite schedule needs s ≥ 1 stages".to_owned());
                }
                let budget = s as f64 * zeta;
                if budget >= 1.0 {
                    out.push(format!("sζ ≥ 1: s = {s}, ζ = {zeta}, sζ = {budget}"));
                }
            }
            ConfidenceSchedule::Tailed {
                tau,
                zeta,
                max_stages,
                growth,
            } => {
                if tau == 0 {
                    out.push("tailed schedule needs τ ≥ 1".to_owned());
                }
                let budget = (tau as f64 + 1.0) * zeta;
                if budget >= 1.0 {
                    out.push(format!(
                        "(τ+1)ζ ≥ 1: τ = {tau}, ζ = {zeta}, (τ+1)ζ = {budget}"
                    ));
                }
                if let Some(cap) = max_stages {
                    if cap < tau + 1 {
                        out.push(format!(
                            "max_stages = {cap} must be at least τ + 1 = {}",
                            tau + 1
                        ));
                    }
                }
                if !(growth > 1.0 && growth.is_finite()) {
                    out.push(format!("growth = {growth} must exceed 1"));
                }
            }
        }
        out
    }
}

impl fmt::Display for ConfidenceSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfidenceSchedule::Finite { s, zeta } => write!(f, "finite:{s} (ζ = {zeta})"),
            ConfidenceSchedule::Tailed { tau, zeta, .. } => write!(f, "tailed:{tau} (ζ = {zeta})"),
        }
    }
}

/// Per-stage error probability `δ_ℓ`; the stage-ℓ interval is built at
/// confidence `1 − δ_ℓ`.
pub fn stage_delta(schedule: &ConfidenceSchedule, delta: f64, stage: usize) -> Result<f64> {
    if stage == 0 {
        return Err(Error::domain("stages are numbered from 1"));
    }
    match *schedule {
        ConfidenceSchedule::Finite { s, zeta } => {
            if stage > s {
                return Err(Error::domain(format!(
                    "stage {stage} exceeds the {s} stages of a finite schedule"
                )));
            }
            Ok(zeta * delta)
        }
        ConfidenceSchedule::Tailed { tau, zeta, .. } => {
            if stage <= tau {
                Ok(zeta * delta)
            } else {
                let excess = i32::try_from(stage - tau).unwrap_or(i32::MAX);
                Ok(zeta * delta * 2f64.powi(-excess))
            }
        }
    }
}

/// Geometric sample sizes `n_ℓ = ⌈n1·growth^(ℓ−1)⌉`, bumped by one wherever
/// rounding would repeat a size.
pub fn build_schedule(n1: u64, growth: f64, stages: usize) -> Result<Vec<u64>> {
    if n1 == 0 {
        return Err(Error::domain("n1 must be at least 1"));
    }
    if !(growth > 1.0 && growth.is_finite()) {
        return Err(Error::domain(format!("growth = {growth} must exceed 1")));
    }
    let mut sizes: Vec<u64> = Vec::with_capacity(stages);
    for l in 0..stages {
        let exp = i32::try_from(l).unwrap_or(i32::MAX);
        let mut n = (n1 as f64 * growth.powi(exp)).ceil() as u64;
        if let Some(&prev) = sizes.last() {
            n = n.max(prev + 1);
        }
        sizes.push(n);
    }
    Ok(sizes)
}

/// Next size after `prev` under the geometric rule.
pub(crate) fn grow(prev: u64, growth: f64) -> u64 {
    ((prev as f64 * growth).ceil() as u64).max(prev.saturating_add(1))
}

/// Final-stage sizing for an absolute tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FinalSizing {
    /// Smallest admissible final-stage sample size.
    pub n: u64,
    /// `(b − a)²/(2ε²) · ln(2/(ζδ))`; `n` strictly exceeds it.
    pub threshold: f64,
    /// How far `n` had to be raised above `⌊threshold⌋ + 1` before the
    /// largest possible half-width dropped below `eps`.
    pub adjustment: u64,
}

/// Least `n` with `n > (b − a)²/(2ε²)·ln(2/(ζδ))`, confirmed against the
/// largest half-width of the interval at confidence `1 − ζδ`.
pub fn min_final_sample_size(
    eps: f64,
    zeta: f64,
    delta: f64,
    support: &Support,
) -> Result<FinalSizing> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::domain(format!("eps = {eps} must be positive")));
    }
    let params = ConfidenceParams::new(zeta * delta)?;
    let w = support.width();
    let threshold = w * w / (2.0 * eps * eps) * (2.0 / (zeta * delta)).ln();
    let base = threshold.floor() as u64 + 1;
    let mut n = base;
    while w * max_halfwidth(n, &params) >= eps {
        n += 1;
    }
    Ok(FinalSizing {
        n,
        threshold,
        adjustment: n - base,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_stage_delta() {
        let s = ConfidenceSchedule::Finite { s: 5, zeta: 0.1 };
        assert!((stage_delta(&s, 0.05, 3).unwrap() - 0.005).abs() < 1e-18);
        assert!(stage_delta(&s, 0.05, 6).is_err());
        assert!(stage_delta(&s, 0.05, 0).is_err());
    }

    #[test]
    fn tailed_stage_delta() {
        let s = ConfidenceSchedule::Tailed {
            tau: 4,
            zeta: 0.1,
            max_stages: None,
            growth: 2.0,
        };
        assert!((stage_delta(&s, 0.05, 4).unwrap() - 0.005).abs() < 1e-18);
        assert!((stage_delta(&s, 0.05, 6).unwrap() - 0.00125).abs() < 1e-18);
        assert!(stage_delta(&s, 0.05, 10_000).unwrap() >= 0.0);
    }

    #[test]
    fn schedules() {
        assert_eq!(build_schedule(10, 2.0, 4).unwrap(), vec![10, 20, 40, 80]);
        assert_eq!(build_schedule(10, 1.0001, 3).unwrap(), vec![10, 11, 12]);
        assert_eq!(
            build_schedule(25, 1.5, 5).unwrap(),
            vec![25, 38, 57, 85, 127]
        );
        assert!(build_schedule(0, 2.0, 3).is_err());
        assert!(build_schedule(5, 1.0, 3).is_err());
        assert!(build_schedule(5, 2.0, 0).unwrap().is_empty());
    }

    #[test]
    fn final_size_unit_support() {
        let sizing = min_final_sample_size(0.05, 0.1, 0.05, &Support::UNIT).unwrap();
        assert!((sizing.threshold - 200.0 * 400f64.ln()).abs() < 1e-9);
        assert_eq!(sizing.n, 1199);
        assert_eq!(sizing.adjustment, 0);
    }

    #[test]
    fn final_size_scales_with_width() {
        let two = Support::new(0.0, 2.0).unwrap();
        let sizing = min_final_sample_size(0.05, 0.1, 0.05, &two).unwrap();
        // 800·ln 400 = 4793.17…
        assert!((sizing.threshold - 800.0 * 400f64.ln()).abs() < 1e-9);
        assert_eq!(sizing.n, 4794);
    }

    #[test]
    fn doubling_eps_quarters_threshold() {
        let a = min_final_sample_size(0.02, 0.1, 0.05, &Support::UNIT).unwrap();
        let b = min_final_sample_size(0.04, 0.1, 0.05, &Support::UNIT).unwrap();
        assert!((a.threshold / b.threshold - 4.0).abs() < 1e-12);
        assert!(a.n > b.n);
    }

    #[test]
    fn final_size_errors() {
        assert!(min_final_sample_size(0.0, 0.1, 0.05, &Support::UNIT).is_err());
        assert!(min_final_sample_size(-1.0, 0.1, 0.05, &Support::UNIT).is_err());
    }

    #[test]
    fn side_conditions() {
        let bad = ConfidenceSchedule::Finite { s: 5, zeta: 0.25 };
        let v = bad.violations();
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("sζ ≥ 1") && v[0].contains("1.25"));
        let ok = ConfidenceSchedule::Tailed {
            tau: 3,
            zeta: 0.2,
            max_stages: None,
            growth: 2.0,
        };
        assert!(ok.violations().is_empty());
        let tight = ConfidenceSchedule::Tailed {
            tau: 3,
            zeta: 0.2,
            max_stages: Some(3),
            growth: 1.0,
        };
        assert_eq!(tight.violations().len(), 2);
    }

    #[test]
    fn default_zetas() {
        assert_eq!(ConfidenceSchedule::finite(5).zeta(), 0.1);
        assert_eq!(ConfidenceSchedule::tailed(4, None).zeta(), 0.1);
        assert!(ConfidenceSchedule::finite(7).violations().is_empty());
    }
}
