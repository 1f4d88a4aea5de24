//! Independent oracles and samplers shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use kuramoto2c::vkernel;
use kuramoto2c::Coupling;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Composite Simpson on `[a, b]` with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

/// `∫cos θ e^{x cos θ} / ∫e^{x cos θ}` by quadrature; the integrand is
/// periodic and smooth, so the rule converges geometrically.
pub fn kernel_by_quadrature(x: f64) -> f64 {
    let scale = x.abs();
    let num = simpson(|t| t.cos() * (x * t.cos() - scale).exp(), 0.0, PI, 4000);
    let den = simpson(|t| (x * t.cos() - scale).exp(), 0.0, PI, 4000);
    num / den
}

fn h(c: &Coupling, r1: f64, r2: f64) -> (f64, f64) {
    (
        vkernel::v(c.k1 * r1 + c.l1 * r2).unwrap() - r1,
        vkernel::v(c.k2 * r2 + c.l2 * r1).unwrap() - r2,
    )
}

/// Plain Newton with a forward-difference Jacobian.
fn newton(c: &Coupling, mut r1: f64, mut r2: f64) -> Option<(f64, f64)> {
    for _ in 0..60 {
        let (f1, f2) = h(c, r1, r2);
        if f1.abs().max(f2.abs()) < 1e-13 {
            return Some((r1, r2));
        }
        let e = 1e-7;
        let (a1, a2) = h(c, r1 + e, r2);
        let (b1, b2) = h(c, r1, r2 + e);
        let (j11, j21, j12, j22) = ((a1 - f1) / e, (a2 - f2) / e, (b1 - f1) / e, (b2 - f2) / e);
        let det = j11 * j22 - j12 * j21;
        if det == 0.0 {
            return None;
        }
        let d1 = (f1 * j22 - f2 * j12) / det;
        let d2 = (j11 * f2 - j21 * f1) / det;
        r1 = (r1 - d1).clamp(0.0, 1.0 - 1e-15);
        r2 = (r2 - d2).clamp(0.0, 1.0 - 1e-15);
    }
    let (f1, f2) = h(c, r1, r2);
    (f1.abs().max(f2.abs()) < 1e-11).then_some((r1, r2))
}

/// Every solution of `h₁ = h₂ = 0` in the unit square found by an `n × n`
/// cell scan: cells where both residuals change sign seed Newton.
pub fn grid_oracle(c: &Coupling, n: usize) -> Vec<(f64, f64)> {
    let step = 1.0 / n as f64;
    let mut vals = vec![(0.0, 0.0); (n + 1) * (n + 1)];
    for i in 0..=n {
        for j in 0..=n {
            vals[i * (n + 1) + j] = h(c, i as f64 * step, j as f64 * step);
        }
    }
    let mut out = vec![(0.0, 0.0)];
    for i in 0..n {
        for j in 0..n {
            let corners = [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)];
            let vs: Vec<(f64, f64)> = corners.iter().map(|&(a, b)| vals[a * (n + 1) + b]).collect();
            let changes = |sel: fn(&(f64, f64)) -> f64| {
                let lo = vs.iter().map(sel).fold(f64::INFINITY, f64::min);
                let hi = vs.iter().map(sel).fold(f64::NEG_INFINITY, f64::max);
                lo <= 0.0 && hi >= 0.0
            };
            if !(changes(|v| v.0) && changes(|v| v.1)) {
                continue;
            }
            let (c1, c2) = ((i as f64 + 0.5) * step, (j as f64 + 0.5) * step);
            if let Some((r1, r2)) = newton(c, c1, c2) {
                if (r1 - c1).abs() <= 3.0 * step && (r2 - c2).abs() <= 3.0 * step
                    && !out.iter().any(|&(a, b)| (a - r1).hypot(b - r2) < 1e-7)
                {
                    out.push((r1, r2));
                }
            }
        }
    }
    out
}

/// Sign groups used for random sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    /// One trivial level curve.
    Trivial,
    /// Both external strengths positive.
    PositiveExternal,
    /// Two parabola/convex pairs with opposite external signs, both K > 2.
    OppositeStrong,
    /// Opposite external signs, one internal strength at most 2.
    OppositeMixed,
    /// Both external strengths negative, both internal above 2.
    NegativeExternal,
}

impl Group {
    pub const ALL: [Group; 5] = [
        Group::Trivial,
        Group::PositiveExternal,
        Group::OppositeStrong,
        Group::OppositeMixed,
        Group::NegativeExternal,
    ];
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random coupling from `group`, mirrored at random.
pub fn sample(group: Group, rng: &mut ChaCha8Rng) -> Coupling {
    let strong = |r: &mut ChaCha8Rng| r.random_range(2.05..10.0);
    let weak = |r: &mut ChaCha8Rng| r.random_range(-4.0..1.95);
    let any_k = |r: &mut ChaCha8Rng| r.random_range(-4.0..10.0);
    let pos = |r: &mut ChaCha8Rng| r.random_range(0.1..6.0);
    let neg = |r: &mut ChaCha8Rng| -r.random_range(0.1..6.0);
    let c = match group {
        Group::Trivial => {
            let l2 = if rng.random_bool(0.5) { pos(rng) } else { neg(rng) };
            Coupling::new(weak(rng), any_k(rng), neg(rng), l2)
        }
        Group::PositiveExternal => Coupling::new(any_k(rng), any_k(rng), pos(rng), pos(rng)),
        Group::OppositeStrong => Coupling::new(strong(rng), strong(rng), neg(rng), pos(rng)),
        Group::OppositeMixed => Coupling::new(strong(rng), weak(rng), neg(rng), pos(rng)),
        Group::NegativeExternal => Coupling::new(strong(rng), strong(rng), neg(rng), neg(rng)),
    };
    if rng.random_bool(0.5) { c.swapped() } else { c }
}
