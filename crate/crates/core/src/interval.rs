//! Closed-form confidence interval for the mean of a variable bounded in
//! `[0, 1]`, its affine extension to `[a, b]`, and the half-width functions
//! the interval is assembled from.
//!
//! With `c = 9 / (2 ln(2/δ))` and sample mean `z` over `n` observations the
//! limits are
//!
//! ```text
//! L = z + 3/(4 + nc) · (1 − 2z − √(1 + nc·z(1 − z)))
//! U = z + 3/(4 + nc) · (1 − 2z + √(1 + nc·z(1 − z)))
//! ```
//!
//! and `Pr{L < μ < U} ≥ 1 − δ`. The interval depends on the data only
//! through `(n, z)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest accepted confidence parameter. Deep stages of a tailed plan
/// request tiny per-stage δ; `ln(2/δ)` stays finite down to here.
pub const MIN_DELTA: f64 = 1e-300;
pub const MAX_DELTA: f64 = 1.0 - 1e-12;

const GRID_STEPS: usize = 10_000;
const GOLDEN_TOL: f64 = 1e-8;

/// The confidence parameter δ together with the derived constant `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConfidenceParams {
    delta: f64,
    c: f64,
}

impl ConfidenceParams {
    pub fn new(delta: f64) -> Result<Self> {
        let c = massart_c(delta)?;
        Ok(Self { delta, c })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `n·c`, computed once as a single product.
    fn nc(&self, n: u64) -> f64 {
        n as f64 * self.c
    }
}

/// `c = 9 / (2 ln(2/δ))`.
pub fn massart_c(delta: f64) -> Result<f64> {
    if !(MIN_DELTA..=MAX_DELTA).contains(&delta) {
        return Err(Error::domain(format!(
            "delta = {delta} is outside [{MIN_DELTA:e}, 1 - 1e-12]"
        )));
    }
    Ok(9.0 / (2.0 * (2.0 / delta).ln()))
}

/// Sample count and sample mean of observations scaled to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitSummary {
    n: u64,
    mean: f64,
}

impl UnitSummary {
    pub fn new(n: u64, mean: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("sample count must be at least 1"));
        }
        if !(0.0..=1.0).contains(&mean) {
            return Err(Error::domain(format!(
                "unit-scale mean {mean} is outside [0, 1]"
            )));
        }
        Ok(Self { n, mean })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }
}

/// The interval `[a, b]` a random variable is known to lie in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSupport")]
pub struct Support {
    a: f64,
    b: f64,
}

#[derive(Deserialize)]
struct RawSupport {
    a: f64,
    b: f64,
}

impl TryFrom<RawSupport> for Support {
    type Error = Error;

    fn try_from(raw: RawSupport) -> Result<Self> {
        Support::new(raw.a, raw.b)
    }
}

impl Default for Support {
    fn default() -> Self {
        Self::UNIT
    }
}

impl Support {
    pub const UNIT: Support = Support { a: 0.0, b: 1.0 };

    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return Err(Error::domain(format!(
                "support [{a}, {b}] must have finite bounds with a < b"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }

    /// `Z = (X − a)/(b − a)`.
    pub fn scale(&self, x: f64) -> f64 {
        (x - self.a) / self.width()
    }

    /// `X = (b − a)Z + a`.
    pub fn unscale(&self, z: f64) -> f64 {
        self.width() * z + self.a
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.a, self.b)
    }
}

/// Lower and upper confidence limits. `clamped` records whether the limits
/// were clipped to the support; unclamped limits are exactly the closed
/// form and may fall outside it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalEstimate {
    pub lower: f64,
    pub upper: f64,
    pub clamped: bool,
}

impl IntervalEstimate {
    /// Strict containment `lower < x < upper`.
    pub fn covers(&self, x: f64) -> bool {
        self.lower < x && x < self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Raw `(L, U)` for a unit-scale summary.
pub fn unit_interval(summary: &UnitSummary, params: &ConfidenceParams) -> (f64, f64) {
    let z = summary.mean;
    let nc = params.nc(summary.n);
    let k = 3.0 / (4.0 + nc);
    // ≥ 1 analytically; rounding may dip below.
    let root = (1.0 + nc * z * (1.0 - z)).max(1.0).sqrt();
    let centre = 1.0 - 2.0 * z;
    (z + k * (centre - root), z + k * (centre + root))
}

/// Interval for the mean of a variable on `support`, from the unit-scale
/// summary of its observations.
pub fn bounded_interval(
    summary: &UnitSummary,
    support: &Support,
    params: &ConfidenceParams,
    clamp: bool,
) -> IntervalEstimate {
    let (lo, hi) = unit_interval(summary, params);
    let (lower, upper) = (support.unscale(lo), support.unscale(hi));
    if clamp {
        IntervalEstimate {
            lower: support.clamp(lower),
            upper: support.clamp(upper),
            clamped: true,
        }
    } else {
        IntervalEstimate {
            lower,
            upper,
            clamped: false,
        }
    }
}

/// Validates raw observations against `support` and reduces them to a
/// unit-scale summary.
pub fn summarize(samples: &[f64], support: &Support) -> Result<UnitSummary> {
    if samples.is_empty() {
        return Err(Error::NoSamples);
    }
    let mut sum = 0.0;
    for (index, &x) in samples.iter().enumerate() {
        if !support.contains(x) {
            return Err(Error::OutOfSupport {
                index,
                value: x,
                a: support.a,
                b: support.b,
            });
        }
        sum += support.scale(x);
    }
    let n = samples.len() as u64;
    UnitSummary::new(n, (sum / n as f64).clamp(0.0, 1.0))
}

pub fn interval_from_samples(
    samples: &[f64],
    support: &Support,
    delta: f64,
    clamp: bool,
) -> Result<IntervalEstimate> {
    let params = ConfidenceParams::new(delta)?;
    let summary = summarize(samples, support)?;
    Ok(bounded_interval(&summary, support, &params, clamp))
}

/// Nonnegative root `ε(t)` of
/// `exp(−nε² / (2(t + ε/3)(1 − t − ε/3))) = δ/2`, for `0 ≤ t ≤ 1`:
///
/// `ε(t) = [3α(1 − 2t) + 3√(α² + 4αt(1 − t))] / (2(1 + α))`, `α = 1/(nc)`.
///
/// Outside `[0, 1]` the same expression is evaluated (radicand floored at
/// zero) but it is no longer the root of interest.
pub fn epsilon_root(t: f64, n: u64, params: &ConfidenceParams) -> f64 {
    let alpha = 1.0 / params.nc(n);
    let radicand = (alpha * alpha + 4.0 * alpha * t * (1.0 - t)).max(0.0);
    (3.0 * alpha * (1.0 - 2.0 * t) + 3.0 * radicand.sqrt()) / (2.0 * (1.0 + alpha))
}

/// `t(z) = z + [3β(1 − 2z) − 3√(β² + 4βz(1 − z))] / (4(1 + β))`,
/// `β = 4/(nc)`. `t(Z̄)` is the lower confidence limit and `t(z) ≤ z`.
pub fn t_map(z: f64, n: u64, params: &ConfidenceParams) -> f64 {
    let beta = 4.0 / params.nc(n);
    let radicand = (beta * beta + 4.0 * beta * z * (1.0 - z)).max(0.0);
    z + (3.0 * beta * (1.0 - 2.0 * z) - 3.0 * radicand.sqrt()) / (4.0 * (1.0 + beta))
}

/// `exp(−nε² / (2q(1 − q))) − δ/2` with `q = t + ε/3`.
pub fn eq1_residual(t: f64, eps: f64, n: u64, params: &ConfidenceParams) -> Result<f64> {
    let q = t + eps / 3.0;
    if q <= 0.0 || q >= 1.0 {
        return Err(Error::domain(format!(
            "t + eps/3 = {q} must lie strictly inside (0, 1)"
        )));
    }
    let exponent = -(n as f64) * eps * eps / (2.0 * q * (1.0 - q));
    Ok(exponent.exp() - params.delta / 2.0)
}

/// Two-sided Hoeffding band `mean ± √(ln(2/δ)/(2n))` on the unit scale.
pub fn hoeffding_interval(summary: &UnitSummary, params: &ConfidenceParams) -> (f64, f64) {
    let half = ((2.0 / params.delta).ln() / (2.0 * summary.n as f64)).sqrt();
    (summary.mean - half, summary.mean + half)
}

/// Location and value of the largest half-width over all possible means.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfWidthPeak {
    pub at: f64,
    pub value: f64,
}

fn halfwidth_at(z: f64, n: u64, params: &ConfidenceParams) -> f64 {
    // The grid only ever passes valid means, so construction cannot fail.
    let summary = UnitSummary { n, mean: z };
    let (lo, hi) = unit_interval(&summary, params);
    (hi - z).max(z - lo)
}

/// Maximises `max(U(z) − z, z − L(z))` over `z ∈ [0, 1]`: a grid search at
/// resolution 1e−4 followed by golden-section refinement around the best
/// grid point.
pub fn halfwidth_peak(n: u64, params: &ConfidenceParams) -> HalfWidthPeak {
    let f = |z: f64| halfwidth_at(z, n, params);

    let step = 1.0 / GRID_STEPS as f64;
    let (best_i, best) = (0..=GRID_STEPS).map(|i| (i, f(i as f64 * step))).fold(
        (0, f64::NEG_INFINITY),
        |acc, (i, v)| {
            if v > acc.1 {
                (i, v)
            } else {
                acc
            }
        },
    );

    let mut lo = best_i.saturating_sub(1) as f64 * step;
    let mut hi = ((best_i + 1).min(GRID_STEPS)) as f64 * step;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > GOLDEN_TOL {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let mid = 0.5 * (lo + hi);
    let refined = f(mid);

    if refined >= best {
        HalfWidthPeak {
            at: mid,
            value: refined,
        }
    } else {
        HalfWidthPeak {
            at: best_i as f64 * step,
            value: best,
        }
    }
}

/// Largest half-width of the unit-scale interval at sample size `n`.
pub fn max_halfwidth(n: u64, params: &ConfidenceParams) -> f64 {
    halfwidth_peak(n, params).value
}
