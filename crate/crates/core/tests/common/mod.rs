//! Oracles computed independently of the closed forms under test.
#![allow(dead_code)]

/// Root of `exp(−nε²/(2(t + ε/3)(1 − t − ε/3))) = δ/2` in `ε`, by bisection
/// on the log form over `(1e−15, 3(1 − t) − 1e−15)` with 200 halvings.
///
/// At `t = 1` the bracket is empty (`t + ε/3 > 1` for any `ε > 0`) and the
/// root degenerates to 0.
pub fn tail_root_bisection(t: f64, n: u64, delta: f64) -> f64 {
    let log_target = (2.0 / delta).ln();
    let excess = |eps: f64| {
        let q = t + eps / 3.0;
        n as f64 * eps * eps / (2.0 * q * (1.0 - q)) - log_target
    };
    let mut lo = 1e-15;
    let mut hi = 3.0 * (1.0 - t) - 1e-15;
    if hi <= lo {
        return 0.0;
    }
    if excess(lo) > 0.0 {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Lower limit at mean `z` by solving `z − t = ε(t)` for `t ∈ (0, z)` with
/// bisection, where `ε` itself comes from [`tail_root_bisection`].
pub fn lower_limit_bisection(z: f64, n: u64, delta: f64) -> f64 {
    let g = |t: f64| z - t - tail_root_bisection(t, n, delta);
    let (mut lo, mut hi) = (0.0, z);
    assert!(g(lo) > 0.0 && g(hi) < 0.0, "root not bracketed");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Largest half-width over all means, from calculus: with K = nc the upper
/// half-width 3/(4+K)·(1 − 2z + √(1 + Kz(1−z))) peaks at z = 1/2 − 1/√K
/// when K ≥ 4, where it equals 3/(2√K); otherwise at z = 0 with 6/(4+K).
pub fn sup_halfwidth(n: u64, delta: f64) -> f64 {
    let k = n as f64 * 9.0 / (2.0 * (2.0 / delta).ln());
    if k >= 4.0 {
        1.5 / k.sqrt()
    } else {
        6.0 / (4.0 + k)
    }
}

/// Half-width of the interval at mean exactly 1/2.
pub fn halfwidth_at_half(n: u64, delta: f64) -> f64 {
    let k = n as f64 * 9.0 / (2.0 * (2.0 / delta).ln());
    3.0 / (4.0 + k) * (1.0 + k / 4.0).sqrt()
}

pub const N_GRID: [u64; 6] = [5, 10, 50, 100, 1000, 100_000];
pub const DELTA_GRID: [f64; 4] = [0.2, 0.1, 0.05, 0.01];

/// {0, 0.05, …, 1}
pub fn unit_grid() -> impl Iterator<Item = f64> {
    (0..=20).map(|i| i as f64 / 20.0)
}
