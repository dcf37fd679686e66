use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Support;

/// Accepted `--dist` grammar, for error messages.
pub const DIST_GRAMMAR: &str =
    "bernoulli:<p> | beta:<alpha>,<beta> | uniform | pointmass:<v> | twopoint:<v0>,<v1>,<p>";

/// Test distributions with closed-form means.
///
/// `Bernoulli`, `Beta` and `Uniform` are defined on `[0, 1]` and mapped
/// affinely onto the support. `PointMass` and `TwoPoint` values are given
/// directly on the support's scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Bernoulli {
        p: f64,
    },
    Beta {
        alpha: f64,
        beta: f64,
    },
    Uniform,
    PointMass {
        v: f64,
    },
    /// `v1` with probability `p`, otherwise `v0`.
    TwoPoint {
        v0: f64,
        v1: f64,
        p: f64,
    },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Bernoulli { p } => write!(f, "bernoulli:{p}"),
            Family::Beta { alpha, beta } => write!(f, "beta:{alpha},{beta}"),
            Family::Uniform => write!(f, "uniform"),
            Family::PointMass { v } => write!(f, "pointmass:{v}"),
            Family::TwoPoint { v0, v1, p } => write!(f, "twopoint:{v0},{v1},{p}"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::domain(format!(
                "invalid distribution '{s}'; expected {DIST_GRAMMAR}"
            ))
        };
        let (name, args) = match s.trim().split_once(':') {
            Some((name, args)) => (name.trim(), Some(args)),
            None => (s.trim(), None),
        };
        let params: Vec<f64> = match args {
            Some(args) => args
                .split(',')
                .map(|a| a.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad())?,
            None => Vec::new(),
        };
        match (name.to_ascii_lowercase().as_str(), params.as_slice()) {
            ("bernoulli", &[p]) => Ok(Family::Bernoulli { p }),
            ("beta", &[alpha, beta]) => Ok(Family::Beta { alpha, beta }),
            ("uniform", &[]) => Ok(Family::Uniform),
            ("pointmass", &[v]) => Ok(Family::PointMass { v }),
            ("twopoint", &[v0, v1, p]) => Ok(Family::TwoPoint { v0, v1, p }),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistributionSpec {
    family: Family,
    support: Support,
    exact_mean: f64,
}

impl DistributionSpec {
    pub fn new(family: Family, support: Support) -> Result<Self> {
        let prob = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::domain(format!("{name} = {p} must lie in [0, 1]")))
            }
        };
        let inside = |name: &str, v: f64| {
            if support.contains(v) {
                Ok(())
            } else {
                Err(Error::domain(format!(
                    "{name} = {v} lies outside the support [{}, {}]",
                    support.a(),
                    support.b()
                )))
            }
        };
        let unit_mean = |m: f64| support.unscale(m);
        let exact_mean = match family {
            Family::Bernoulli { p } => {
                prob("p", p)?;
                unit_mean(p)
            }
            Family::Beta { alpha, beta } => {
                if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
                    return Err(Error::domain(format!(
                        "beta parameters ({alpha}, {beta}) must be positive"
                    )));
                }
                unit_mean(alpha / (alpha + beta))
            }
            Family::Uniform => unit_mean(0.5),
            Family::PointMass { v } => {
                inside("v", v)?;
                v
            }
            Family::TwoPoint { v0, v1, p } => {
                inside("v0", v0)?;
                inside("v1", v1)?;
                prob("p", p)?;
                (1.0 - p) * v0 + p * v1
            }
        };
        Ok(Self {
            family,
            support,
            exact_mean,
        })
    }

    /// Parses the `family:param[,param…]` grammar onto `support`.
    pub fn parse(s: &str, support: Support) -> Result<Self> {
        Self::new(s.parse()?, support)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn exact_mean(&self) -> f64 {
        self.exact_mean
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.family.fmt(f)
    }
}

enum Sampler {
    Bernoulli { p: f64 },
    Beta(rand_distr::Beta<f64>),
    Uniform,
    Constant(f64),
    TwoPoint { v0: f64, v1: f64, p: f64 },
}

/// Infinite, reproducible stream of draws from a [`DistributionSpec`].
///
/// The generator is ChaCha8 keyed by `seed_from_u64(seed)` with the stream
/// id selecting a substream. Uniform variates take the top 53 bits of one
/// `u64`: `(x >> 11)·2⁻⁵³`. Bernoulli and two-point draws compare one such
/// variate against `p`; beta draws use `rand_distr::Beta`.
pub struct SampleStream {
    rng: ChaCha8Rng,
    sampler: Sampler,
    support: Support,
}

/// Stream 0 of `seed`.
pub fn make_stream(spec: &DistributionSpec, seed: u64) -> SampleStream {
    substream(spec, seed, 0)
}

/// Independent substream `index` of `seed`: the ChaCha stream id is the
/// index, so substreams never overlap and need no coordination.
pub fn substream(spec: &DistributionSpec, seed: u64, index: u64) -> SampleStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let sampler = match spec.family {
        Family::Bernoulli { p } => Sampler::Bernoulli { p },
        Family::Beta { alpha, beta } => {
            Sampler::Beta(rand_distr::Beta::new(alpha, beta).expect("validated beta parameters"))
        }
        Family::Uniform => Sampler::Uniform,
        Family::PointMass { v } => Sampler::Constant(v),
        Family::TwoPoint { v0, v1, p } => Sampler::TwoPoint { v0, v1, p },
    };
    SampleStream {
        rng,
        sampler,
        support: spec.support,
    }
}

fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

impl Iterator for SampleStream {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let s = self.support;
        let x = match &self.sampler {
            Sampler::Bernoulli { p } => {
                if unit_f64(&mut self.rng) < *p {
                    s.b()
                } else {
                    s.a()
                }
            }
            Sampler::Beta(beta) => s.clamp(s.unscale(beta.sample(&mut self.rng))),
            Sampler::Uniform => s.clamp(s.unscale(unit_f64(&mut self.rng))),
            Sampler::Constant(v) => *v,
            Sampler::TwoPoint { v0, v1, p } => {
                if unit_f64(&mut self.rng) < *p {
                    *v1
                } else {
                    *v0
                }
            }
        };
        Some(x)
    }
}
