use std::fmt;

use serde::{Deserialize, Serialize};

use crate::interval::IntervalEstimate;

/// What "close enough" means for the terminal estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum PrecisionGoal {
    /// `|θ̂ − θ| < eps`
    Absolute { eps: f64 },
    /// `|θ̂ − θ| < eps·|θ|`
    Relative { eps: f64 },
    /// `|θ̂ − θ| < eps_a` or `|θ̂ − θ| < eps_r·|θ|`
    Mixed { eps_a: f64, eps_r: f64 },
}

/// Sign function taking values 1, 0 and −1.
pub(crate) fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl PrecisionGoal {
    /// Problems with the tolerances themselves; empty when the goal is usable.
    pub fn violations(&self) -> Vec<String> {
        let positive = |name: &str, v: f64| {
            (!(v > 0.0 && v.is_finite()))
                .then(|| format!("{name} = {v} must be a positive finite number"))
        };
        match *self {
            PrecisionGoal::Absolute { eps } => positive("eps", eps).into_iter().collect(),
            PrecisionGoal::Relative { eps } => {
                let mut v: Vec<String> = positive("eps", eps).into_iter().collect();
                if v.is_empty() && eps >= 1.0 {
                    v.push(format!("relative eps = {eps} must be below 1"));
                }
                v
            }
            PrecisionGoal::Mixed { eps_a, eps_r } => positive("eps_a", eps_a)
                .into_iter()
                .chain(positive("eps_r", eps_r))
                .collect(),
        }
    }

    /// The tolerance that guarantees stopping regardless of the estimate,
    /// if the goal has one.
    pub fn absolute_tolerance(&self) -> Option<f64> {
        match *self {
            PrecisionGoal::Absolute { eps } => Some(eps),
            PrecisionGoal::Mixed { eps_a, .. } => Some(eps_a),
            PrecisionGoal::Relative { .. } => None,
        }
    }

    /// Whether `estimate` achieves the goal against the true value `truth`.
    pub fn is_met(&self, estimate: f64, truth: f64) -> bool {
        let err = (estimate - truth).abs();
        match *self {
            PrecisionGoal::Absolute { eps } => err < eps,
            PrecisionGoal::Relative { eps } => err < eps * truth.abs(),
            PrecisionGoal::Mixed { eps_a, eps_r } => err < eps_a || err < eps_r * truth.abs(),
        }
    }
}

impl fmt::Display for PrecisionGoal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrecisionGoal::Absolute { eps } => write!(f, "absolute:{eps}"),
            PrecisionGoal::Relative { eps } => write!(f, "relative:{eps}"),
            PrecisionGoal::Mixed { eps_a, eps_r } => write!(f, "mixed:{eps_a},{eps_r}"),
        }
    }
}

/// The stage decision variable: `true` means stop sampling.
///
/// All comparisons are strict; equality keeps sampling. `interval` should
/// carry the raw (unclamped) limits.
pub fn check_stop(goal: &PrecisionGoal, estimate: f64, interval: &IntervalEstimate) -> bool {
    let (lo, hi, est) = (interval.lower, interval.upper, estimate);
    match *goal {
        PrecisionGoal::Absolute { eps } => hi - eps < est && est < lo + eps,
        PrecisionGoal::Relative { eps } => {
            let s = sgn(est);
            (1.0 - s * eps) * hi < est && est < (1.0 + s * eps) * lo
        }
        PrecisionGoal::Mixed { eps_a, eps_r } => {
            let s = sgn(est);
            hi - eps_a.max(s * eps_r * hi) < est && est < lo + eps_a.max(s * eps_r * lo)
        }
    }
}
