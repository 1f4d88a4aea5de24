//! The order-parameter kernel
//!
//! ```text
//! V(x) = ∫ cos θ e^{x cos θ} dθ / ∫ e^{x cos θ} dθ = I₁(x) / I₀(x)
//! ```
//!
//! A community whose oscillators feel a mean field of strength `x` (unit
//! noise) settles into a von Mises distribution with mean resultant length
//! `V(x)`. The kernel is odd, strictly increasing, and bounded by 1.
//!
//! Evaluation uses the Gauss continued fraction for the Bessel ratio on
//! moderate arguments, the Hankel asymptotic series for large arguments and a
//! Taylor polynomial near the origin. Derivatives come from the Bessel
//! identities
//!
//! ```text
//! V'  = 1 - V/x - V²
//! V'' = -V'/x + V/x² - 2 V V'
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Below this magnitude the Taylor expansion is used.
const TAYLOR_LIMIT: f64 = 1e-3;
/// Above this magnitude the asymptotic series is used.
const ASYMPTOTIC_LIMIT: f64 = 30.0;
const CF_MAX_TERMS: usize = 400;

/// Kernel value and its first two derivatives at one argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub x: f64,
    pub v: f64,
    pub v1: f64,
    pub v2: f64,
}

impl KernelValue {
    /// Evaluate at `x` without validating the input.
    pub fn at(x: f64) -> Self {
        let v = bessel_ratio(x);
        let v1 = d1_from(x, v);
        let v2 = d2_from(x, v, v1);
        Self { x, v, v1, v2 }
    }
}

fn check(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        domain(format!("kernel argument must be finite, got {x}"))
    }
}

/// `V(x)`.
pub fn v(x: f64) -> Result<f64> {
    check(x)?;
    Ok(bessel_ratio(x))
}

/// `V'(x)`, with `V'(0) = 1/2`.
pub fn v_prime(x: f64) -> Result<f64> {
    check(x)?;
    Ok(bessel_ratio_d1(x))
}

/// `V''(x)`, with `V''(0) = 0`.
pub fn v_double_prime(x: f64) -> Result<f64> {
    check(x)?;
    Ok(bessel_ratio_d2(x))
}

/// All three at once.
pub fn kernel(x: f64) -> Result<KernelValue> {
    check(x)?;
    Ok(KernelValue::at(x))
}

/// Unchecked `V(x)`; NaN in, NaN out.
pub fn bessel_ratio(x: f64) -> f64 {
    let a = x.abs();
    let r = if a < TAYLOR_LIMIT {
        let x2 = a * a;
        a * (0.5 + x2 * (-1.0 / 16.0 + x2 * (1.0 / 96.0 + x2 * (-11.0 / 6144.0 + x2 * 19.0 / 61440.0))))
    } else if a <= ASYMPTOTIC_LIMIT {
        continued_fraction(a)
    } else {
        asymptotic(a)
    };
    r.copysign(x)
}

/// Unchecked `V'(x)`.
pub fn bessel_ratio_d1(x: f64) -> f64 {
    d1_from(x, bessel_ratio(x))
}

/// Unchecked `V''(x)`.
pub fn bessel_ratio_d2(x: f64) -> f64 {
    let v = bessel_ratio(x);
    d2_from(x, v, d1_from(x, v))
}

fn d1_from(x: f64, v: f64) -> f64 {
    if x.abs() < TAYLOR_LIMIT {
        let x2 = x * x;
        0.5 + x2 * (-3.0 / 16.0 + x2 * (5.0 / 96.0 + x2 * (-77.0 / 6144.0 + x2 * 171.0 / 61440.0)))
    } else {
        1.0 - v / x - v * v
    }
}

fn d2_from(x: f64, v: f64, v1: f64) -> f64 {
    if x.abs() < TAYLOR_LIMIT {
        let x2 = x * x;
        x * (-3.0 / 8.0 + x2 * (5.0 / 24.0 + x2 * (-77.0 / 1024.0 + x2 * 57.0 / 2560.0)))
    } else {
        -v1 / x + v / (x * x) - 2.0 * v * v1
    }
}

/// `I₁/I₀ = 1 / (2/x + 1 / (4/x + 1 / (6/x + ...)))`, modified Lentz.
fn continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let inv = 1.0 / x;
    let mut f = 2.0 * inv;
    let mut c = f;
    let mut d = 0.0;
    for j in 2..CF_MAX_TERMS {
        let b = 2.0 * j as f64 * inv;
        d = b + d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + 1.0 / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    1.0 / f
}

/// Ratio of the Hankel expansions of `e^{-x} I₁` and `e^{-x} I₀`.
fn asymptotic(x: f64) -> f64 {
    let mut t0 = 1.0;
    let mut t1 = 1.0;
    let mut s0 = 1.0;
    let mut s1 = 1.0;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        let denom = 8.0 * k as f64 * x;
        let n0 = t0 * odd * odd / denom;
        let n1 = t1 * (odd * odd - 4.0) / denom;
        // stop at the smallest term of the divergent series
        if n0.abs() > t0.abs() {
            break;
        }
        t0 = n0;
        t1 = n1;
        s0 += t0;
        s1 += t1;
        if t0.abs() < 1e-18 && t1.abs() < 1e-18 {
            break;
        }
    }
    s1 / s0
}

/// Inverse of `V` on `(-1, 1)`.
pub fn inverse_v(r: f64) -> Result<f64> {
    if !(r.is_finite() && r.abs() < 1.0) {
        return domain(format!("inverse kernel needs |r| < 1, got {r}"));
    }
    Ok(inverse_v_unchecked(r))
}

/// Unchecked inverse; caller guarantees `|r| < 1`.
pub fn inverse_v_unchecked(r: f64) -> f64 {
    let a = r.abs();
    if a == 0.0 {
        return 0.0;
    }
    // von Mises concentration estimate as a starting guess
    let mut lo = 0.0;
    let mut hi = (2.0 * a + 1.0) / (1.0 - a);
    while bessel_ratio(hi) < a {
        lo = hi;
        hi *= 2.0;
    }
    let mut x = (a * (2.0 - a * a) / (1.0 - a * a)).clamp(lo, hi);
    for _ in 0..100 {
        let kv = KernelValue::at(x);
        let f = kv.v - a;
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let mut next = x - f / kv.v1;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.max(1.0) {
            x = next;
            break;
        }
        x = next;
    }
    x.copysign(r)
}
