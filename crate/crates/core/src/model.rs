//! Couplings, self-consistency residuals, level curves and enumeration of all
//! stationary solutions.
//!
//! Stationary states of the two-community model satisfy
//!
//! ```text
//! r₁ = V(K₁ r₁ + σ L₁ r₂),   r₂ = V(K₂ r₂ + σ L₂ r₁),   σ = cos ψ ∈ {+1, -1}
//! ```
//!
//! The `ψ = π` branch is the `ψ = 0` branch with both `L` flipped, so all the
//! geometry below works with `ψ = 0`.
//!
//! For `L₁ ≠ 0` the curve `Γ₁ = {h₁ = 0}` is a graph over its kernel argument
//! `x₁ = K₁ r₁ + L₁ r₂`:
//!
//! ```text
//! r₁ = V(x₁),   r₂ = (x₁ - K₁ V(x₁)) / L₁,   0 ≤ x₁ ≤ |K₁| + |L₁|
//! ```
//!
//! so intersections with `Γ₂` are the roots of a scalar function of `x₁`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::roots::{self, brent, linspace};
use crate::vkernel::{bessel_ratio as vr, bessel_ratio_d1 as vr1};

/// Solutions closer than this in `(r₁, r₂)` are the same solution.
pub const DEDUP_TOL: f64 = 1e-8;
/// Jacobian condition number above which an intersection counts as a touch.
pub const TANGENT_CONDITION: f64 = 1e8;
/// Relative Jacobian determinant below which the curves count as touching.
pub const TANGENT_DETERMINANT: f64 = 1e-6;

/// One of the four interaction strengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    K1,
    K2,
    L1,
    L2,
}

impl Param {
    pub const ALL: [Param; 4] = [Param::K1, Param::K2, Param::L1, Param::L2];

    /// The same role in the other community.
    pub fn mirrored(self) -> Param {
        match self {
            Param::K1 => Param::K2,
            Param::K2 => Param::K1,
            Param::L1 => Param::L2,
            Param::L2 => Param::L1,
        }
    }

    pub fn is_internal(self) -> bool {
        matches!(self, Param::K1 | Param::K2)
    }

    pub fn community(self) -> Community {
        match self {
            Param::K1 | Param::L1 => Community::One,
            Param::K2 | Param::L2 => Community::Two,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Param::K1 => "k1",
            Param::K2 => "k2",
            Param::L1 => "l1",
            Param::L2 => "l2",
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "k1" => Ok(Param::K1),
            "k2" => Ok(Param::K2),
            "l1" => Ok(Param::L1),
            "l2" => Ok(Param::L2),
            other => domain(format!("unknown parameter `{other}` (expected k1, k2, l1 or l2)")),
        }
    }
}

/// Community index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Community {
    One,
    Two,
}

impl Community {
    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(Community::One),
            2 => Ok(Community::Two),
            _ => domain(format!("community index must be 1 or 2, got {i}")),
        }
    }
}

/// The four interaction strengths: internal `k1`, `k2` and external `l1`
/// (felt by community 1 from community 2) and `l2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub k1: f64,
    pub k2: f64,
    pub l1: f64,
    pub l2: f64,
}

impl Coupling {
    pub const fn new(k1: f64, k2: f64, l1: f64, l2: f64) -> Self {
        Self { k1, k2, l1, l2 }
    }

    /// Rejects non-finite strengths.
    pub fn validate(&self) -> Result<()> {
        if [self.k1, self.k2, self.l1, self.l2].iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            domain(format!("coupling strengths must be finite: {self}"))
        }
    }

    pub fn get(&self, p: Param) -> f64 {
        match p {
            Param::K1 => self.k1,
            Param::K2 => self.k2,
            Param::L1 => self.l1,
            Param::L2 => self.l2,
        }
    }

    pub fn set(&mut self, p: Param, value: f64) {
        match p {
            Param::K1 => self.k1 = value,
            Param::K2 => self.k2 = value,
            Param::L1 => self.l1 = value,
            Param::L2 => self.l2 = value,
        }
    }

    pub fn with(mut self, p: Param, value: f64) -> Self {
        self.set(p, value);
        self
    }

    /// Exchange the labels of the two communities.
    pub fn swapped(&self) -> Self {
        Self::new(self.k2, self.k1, self.l2, self.l1)
    }

    /// The `ψ = π` problem expressed as a `ψ = 0` problem.
    pub fn flipped(&self) -> Self {
        Self::new(self.k1, self.k2, -self.l1, -self.l2)
    }

    pub fn for_psi(&self, psi: Psi) -> Self {
        match psi {
            Psi::Zero => *self,
            Psi::Pi => self.flipped(),
        }
    }

    /// `k1 + l1 - k2 - l2`; zero on the symmetric line.
    pub fn symmetry_offset(&self) -> f64 {
        self.k1 + self.l1 - self.k2 - self.l2
    }
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(k1={}, k2={}, l1={}, l2={})", self.k1, self.k2, self.l1, self.l2)
    }
}

/// Phase difference between the two communities in a stationary state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Psi {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "pi")]
    Pi,
}

impl Psi {
    /// `cos ψ`.
    pub fn sigma(self) -> f64 {
        match self {
            Psi::Zero => 1.0,
            Psi::Pi => -1.0,
        }
    }

    pub fn radians(self) -> f64 {
        match self {
            Psi::Zero => 0.0,
            Psi::Pi => PI,
        }
    }
}

impl FromStr for Psi {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "0" | "zero" => Ok(Psi::Zero),
            "pi" | "π" => Ok(Psi::Pi),
            other => domain(format!("psi must be 0 or pi, got `{other}`")),
        }
    }
}

/// A stationary point `(r₁, r₂)` on the `ψ` branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyncSolution {
    pub r1: f64,
    pub r2: f64,
    pub psi: Psi,
    /// The level curves touch here rather than cross.
    #[serde(default)]
    pub tangent: bool,
}

impl SyncSolution {
    pub fn unsynchronized(psi: Psi) -> Self {
        Self { r1: 0.0, r2: 0.0, psi, tangent: false }
    }

    pub fn is_trivial(&self) -> bool {
        self.r1 == 0.0 && self.r2 == 0.0
    }

    pub fn distance(&self, other: &SyncSolution) -> f64 {
        (self.r1 - other.r1).hypot(self.r2 - other.r2)
    }

    /// Largest self-consistency residual for coupling `c` (as given, not flipped).
    pub fn residual(&self, c: &Coupling) -> f64 {
        let s = self.psi.sigma();
        let h1 = vr(c.k1 * self.r1 + s * c.l1 * self.r2) - self.r1;
        let h2 = vr(c.k2 * self.r2 + s * c.l2 * self.r1) - self.r2;
        h1.abs().max(h2.abs())
    }
}

/// Shape class of a level curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CurveShape {
    ConvexConnected,
    ConvexDisconnected,
    Parabola,
    /// The curve reduces to the origin.
    Trivial,
}

impl CurveShape {
    /// Shape of `Γ` with internal strength `k` and external strength `l ≠ 0`.
    pub fn classify(k: f64, l: f64) -> Option<Self> {
        if l > 0.0 {
            Some(if k <= 2.0 { CurveShape::ConvexConnected } else { CurveShape::ConvexDisconnected })
        } else if l < 0.0 {
            Some(if k <= 2.0 { CurveShape::Trivial } else { CurveShape::Parabola })
        } else {
            None
        }
    }
}

/// Sampled self-consistency curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelCurve {
    pub which: Community,
    pub shape: CurveShape,
    pub samples: Vec<(f64, f64)>,
}

impl LevelCurve {
    /// Sample with the largest coordinate in the off-axis direction
    /// (`r₂` for `Γ₁`, `r₁` for `Γ₂`): the apex of a parabola.
    pub fn apex(&self) -> Option<(f64, f64)> {
        let key = |p: &(f64, f64)| match self.which {
            Community::One => p.1,
            Community::Two => p.0,
        };
        self.samples.iter().copied().max_by(|a, b| key(a).total_cmp(&key(b)))
    }

    /// Parabolas split into the two branches on either side of the apex;
    /// other shapes return a single branch.
    pub fn branches(&self) -> Vec<Vec<(f64, f64)>> {
        if self.shape != CurveShape::Parabola {
            return vec![self.samples.clone()];
        }
        let Some(apex) = self.apex() else { return vec![] };
        let idx = self.samples.iter().position(|p| *p == apex).unwrap_or(0);
        vec![self.samples[..=idx].to_vec(), self.samples[idx..].to_vec()]
    }
}

/// Apex of a parabola-shaped level curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPoint {
    pub r1: f64,
    pub r2: f64,
}

/// `h₁ = V(K₁r₁ + L₁r₂) - r₁` or `h₂ = V(K₂r₂ + L₂r₁) - r₂`.
pub fn residual(c: &Coupling, which: Community, r1: f64, r2: f64) -> Result<f64> {
    c.validate()?;
    if !(0.0..=1.0).contains(&r1) || !(0.0..=1.0).contains(&r2) {
        return domain(format!("synchronization levels must lie in [0,1], got ({r1}, {r2})"));
    }
    Ok(match which {
        Community::One => vr(c.k1 * r1 + c.l1 * r2) - r1,
        Community::Two => vr(c.k2 * r2 + c.l2 * r1) - r2,
    })
}

/// Largest `r ∈ [0,1)` with `r = V(s r)`; zero when `s ≤ 2`.
///
/// This is the synchronized level of an isolated community with internal
/// strength `s`, and the level of the symmetric state `r₁ = r₂` on the line
/// `K₁ + L₁ = K₂ + L₂ = s`.
pub fn symmetric_fixed_point(s: f64) -> f64 {
    if !(s > 2.0) {
        return 0.0;
    }
    if s.is_infinite() {
        return 1.0;
    }
    // V(s r)/r - 1 falls monotonically from s/2 - 1 to V(s) - 1
    brent(|r| vr(s * r) / r - 1.0, 1e-12, 1.0, 1e-16).unwrap_or(0.0)
}

/// Kernel argument of the apex of a parabola with internal strength `k`:
/// the unique `x > 0` with `V'(x) = 1/k`.
pub fn turning_argument(k: f64) -> Result<f64> {
    if !(k > 2.0) || !k.is_finite() {
        return domain(format!("a turning point needs internal strength > 2, got {k}"));
    }
    let target = 1.0 / k;
    let mut hi = 2.0;
    while vr1(hi) > target {
        hi *= 2.0;
    }
    brent(|x| vr1(x) - target, 0.0, hi, 1e-15)
        .ok_or_else(|| Error::NotFound(format!("no turning point for k={k}")))
}

/// Apex of `Γ₁` for strengths `(k, l)` with `k > 2`, `l < 0`.
pub fn turning_point(k: f64, l: f64) -> Result<TurningPoint> {
    if !(l < 0.0) {
        return domain(format!("a turning point needs a negative external strength, got {l}"));
    }
    let x = turning_argument(k)?;
    let r1 = vr(x);
    Ok(TurningPoint { r1, r2: (x - k * r1) / l })
}

/// `Γ₁` as a graph over its kernel argument.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Gamma1 {
    pub k: f64,
    pub l: f64,
}

impl Gamma1 {
    pub fn point(&self, x: f64) -> (f64, f64) {
        let r1 = vr(x);
        (r1, (x - self.k * r1) / self.l)
    }

    pub fn max_argument(&self) -> f64 {
        self.k.abs() + self.l.abs()
    }

    /// Whether the curve leaves the origin into the unit square.
    pub fn leaves_origin(&self) -> bool {
        (2.0 - self.k) / self.l > 0.0 || (self.k == 2.0 && self.l > 0.0)
    }

    /// Scan nodes on `[0, max_argument]` with the exact `r₂ ∈ {0, 1}` edge
    /// crossings inserted.
    pub fn nodes(&self, count: usize) -> Vec<f64> {
        let base = linspace(0.0, self.max_argument(), count);
        let r2 = |x: f64| self.point(x).1;
        let mut nodes = Vec::with_capacity(count + 16);
        for w in base.windows(2) {
            nodes.push(w[0]);
            let (a, b) = (r2(w[0]), r2(w[1]));
            let mut cuts: Vec<f64> = Vec::new();
            for edge in [0.0, 1.0] {
                if (a - edge) * (b - edge) < 0.0 {
                    if let Some(x) = brent(|x| r2(x) - edge, w[0], w[1], 1e-15) {
                        cuts.push(x);
                    }
                }
            }
            cuts.sort_by(f64::total_cmp);
            nodes.extend(cuts);
        }
        nodes.push(*base.last().unwrap());
        nodes
    }

    /// `r₂` inside `[0, 1]` up to rounding; edge values are clamped.
    pub fn admissible(&self, x: f64) -> Option<(f64, f64)> {
        let (r1, r2) = self.point(x);
        const SLACK: f64 = 1e-12;
        if (-SLACK..=1.0 + SLACK).contains(&r2) && r1 < 1.0 {
            Some((r1, r2.clamp(0.0, 1.0)))
        } else {
            None
        }
    }
}

fn node_count(extent: f64) -> usize {
    ((64.0 * extent) as usize).clamp(1200, 8000)
}

/// Sample the level curve `Γ_which` with `n` points.
///
/// Parabolas are traced through the apex so both branches appear in order.
/// For a convex curve disconnected from zero the isolated origin is left
/// out: the samples describe the continuous part only.
pub fn trace_curve(c: &Coupling, which: Community, n: usize) -> Result<LevelCurve> {
    c.validate()?;
    if n < 16 {
        return domain(format!("trace_curve needs n >= 16, got {n}"));
    }
    let own = match which {
        Community::One => *c,
        Community::Two => c.swapped(),
    };
    let shape = CurveShape::classify(own.k1, own.l1)
        .ok_or_else(|| Error::Domain("level curve with zero external strength".into()))?;
    if shape == CurveShape::Trivial {
        return Ok(LevelCurve { which, shape, samples: vec![(0.0, 0.0)] });
    }
    let g = Gamma1 { k: own.k1, l: own.l1 };
    let nodes = g.nodes(node_count(g.max_argument()).max(4 * n));
    // admissible x-intervals
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    let mut open: Option<f64> = None;
    let mut last_ok = 0.0;
    for &x in &nodes {
        let ok = if x == 0.0 { g.leaves_origin() } else { g.admissible(x).is_some() };
        match (ok, open) {
            (true, None) => {
                open = Some(x);
                last_ok = x;
            }
            (true, Some(_)) => last_ok = x,
            (false, Some(a)) => {
                intervals.push((a, last_ok));
                open = None;
            }
            (false, None) => {}
        }
    }
    if let Some(a) = open {
        intervals.push((a, last_ok));
    }
    intervals.retain(|(a, b)| b > a);
    let total: f64 = intervals.iter().map(|(a, b)| b - a).sum();
    if intervals.is_empty() || total <= 0.0 {
        return Err(Error::NotFound(format!("level curve {which:?} has no points in the unit square")));
    }
    let mut xs: Vec<f64> = Vec::with_capacity(n);
    let mut remaining = n;
    for (i, (a, b)) in intervals.iter().enumerate() {
        let share = if i + 1 == intervals.len() {
            remaining
        } else {
            (((b - a) / total) * n as f64).round().max(2.0) as usize
        }
        .min(remaining);
        xs.extend(linspace(*a, *b, share));
        remaining -= share;
    }
    if shape == CurveShape::Parabola {
        let xt = turning_argument(own.k1)?;
        if g.admissible(xt).is_some() {
            if let Some(j) = (0..xs.len()).min_by(|&i, &j| (xs[i] - xt).abs().total_cmp(&(xs[j] - xt).abs())) {
                xs[j] = xt;
            }
        }
    }
    let samples = xs
        .into_iter()
        .map(|x| {
            let (r1, r2) = if x == 0.0 { (0.0, 0.0) } else { g.admissible(x).unwrap_or_else(|| g.point(x)) };
            match which {
                Community::One => (r1, r2),
                Community::Two => (r2, r1),
            }
        })
        .collect();
    Ok(LevelCurve { which, shape, samples })
}

/// Every stationary solution on the `ψ` branch, the unsynchronized state first,
/// the rest ordered by `r₁`.
pub fn solve_all(c: &Coupling, psi: Psi) -> Result<Vec<SyncSolution>> {
    c.validate()?;
    let cc = c.for_psi(psi);
    let mut found = if cc.l1 != 0.0 {
        intersections_over_gamma1(&cc)
    } else if cc.l2 != 0.0 {
        intersections_over_gamma1(&cc.swapped())
            .into_iter()
            .map(|(r2, r1, t)| (r1, r2, t))
            .collect()
    } else {
        decoupled_intersections(&cc)
    };
    for s in &mut found {
        polish(&cc, s);
    }
    let mut out = vec![SyncSolution::unsynchronized(psi)];
    let mut rest: Vec<SyncSolution> = found
        .into_iter()
        .filter(|&(r1, r2, _)| r1 > 1e-10 || r2 > 1e-10)
        .map(|(r1, r2, tangent)| {
            let mut s = SyncSolution { r1, r2, psi, tangent };
            s.tangent |= is_near_tangent(&cc, r1, r2);
            s
        })
        .collect();
    rest.sort_by(|a, b| a.r1.total_cmp(&b.r1).then(a.r2.total_cmp(&b.r2)));
    for s in rest {
        match out.iter_mut().find(|o| o.distance(&s) <= DEDUP_TOL) {
            // two crossings polished onto one point: a touching pair
            Some(o) if !o.is_trivial() => {
                let merged = s.residual(c) < o.residual(c);
                if merged {
                    *o = s;
                }
                o.tangent = true;
            }
            Some(_) => {}
            None => out.push(s),
        }
    }
    Ok(out)
}

/// Intersections for `L₁ ≠ 0`, returned as `(r₁, r₂, tangent)`.
fn intersections_over_gamma1(c: &Coupling) -> Vec<(f64, f64, bool)> {
    if c.l2 == 0.0 {
        return intersections_with_flat_gamma2(c);
    }
    let g = Gamma1 { k: c.k1, l: c.l1 };
    // F(x)/x with F = h₂ along Γ₁; the limit at the origin is -β⁰/(4 L₁)
    let beta0 = (c.k1 - 2.0) * (c.k2 - 2.0) - c.l1 * c.l2;
    let reduced = |x: f64| -> f64 {
        if x == 0.0 {
            return if g.leaves_origin() { -beta0 / (4.0 * c.l1) } else { f64::NAN };
        }
        match g.admissible(x) {
            Some((r1, r2)) => (vr(c.k2 * r2 + c.l2 * r1) - r2) / x,
            None => f64::NAN,
        }
    };
    let nodes = g.nodes(node_count(g.max_argument()));
    roots::scan(reduced, &nodes, 1e-11)
        .into_iter()
        .filter(|r| r.x > 0.0)
        .filter_map(|r| g.admissible(r.x).map(|(r1, r2)| (r1, r2, r.tangent)))
        .collect()
}

/// `L₂ = 0`: `Γ₂` is the pair of lines `r₂ = 0` and `r₂ = r*(K₂)`.
fn intersections_with_flat_gamma2(c: &Coupling) -> Vec<(f64, f64, bool)> {
    let mut out = Vec::new();
    let own = symmetric_fixed_point(c.k1);
    if own > 0.0 {
        out.push((own, 0.0, false));
    }
    let level = symmetric_fixed_point(c.k2);
    if level > 0.0 {
        let h1 = |r1: f64| vr(c.k1 * r1 + c.l1 * level) - r1;
        for r in roots::scan(h1, &linspace(0.0, 1.0, 2001), 1e-13) {
            out.push((r.x, level, r.tangent));
        }
    }
    out
}

fn decoupled_intersections(c: &Coupling) -> Vec<(f64, f64, bool)> {
    let a = symmetric_fixed_point(c.k1);
    let b = symmetric_fixed_point(c.k2);
    let mut out = Vec::new();
    for r1 in [0.0, a] {
        for r2 in [0.0, b] {
            if (r1 > 0.0 || r2 > 0.0) && (r1 == 0.0 || a > 0.0) && (r2 == 0.0 || b > 0.0) {
                out.push((r1, r2, false));
            }
        }
    }
    out
}

fn jacobian(c: &Coupling, r1: f64, r2: f64) -> (Vector2<f64>, Matrix2<f64>) {
    let a1 = c.k1 * r1 + c.l1 * r2;
    let a2 = c.k2 * r2 + c.l2 * r1;
    let (c11, c21) = (vr1(a1), vr1(a2));
    let h = Vector2::new(vr(a1) - r1, vr(a2) - r2);
    let j = Matrix2::new(c.k1 * c11 - 1.0, c.l1 * c11, c.l2 * c21, c.k2 * c21 - 1.0);
    (h, j)
}

fn is_near_tangent(c: &Coupling, r1: f64, r2: f64) -> bool {
    let (_, j) = jacobian(c, r1, r2);
    let sv = j.singular_values();
    let (hi, lo) = (sv.max(), sv.min());
    lo == 0.0 || hi / lo > TANGENT_CONDITION || j.determinant().abs() <= TANGENT_DETERMINANT * j.norm_squared()
}

/// Damped Newton on `(h₁, h₂)`; only accepts steps that lower the residual.
fn polish(c: &Coupling, s: &mut (f64, f64, bool)) {
    if s.2 {
        return;
    }
    let (mut r1, mut r2) = (s.0, s.1);
    let (h, _) = jacobian(c, r1, r2);
    let mut res = h.amax();
    for _ in 0..8 {
        if res <= 1e-14 {
            break;
        }
        let (h, j) = jacobian(c, r1, r2);
        let Some(step) = j.lu().solve(&h) else { break };
        let mut t = 1.0;
        let mut improved = false;
        while t > 1e-4 {
            let (n1, n2) = (r1 - t * step[0], r2 - t * step[1]);
            if (0.0..=1.0).contains(&n1) && (0.0..=1.0).contains(&n2) {
                let (hn, _) = jacobian(c, n1, n2);
                if hn.amax() < res {
                    r1 = n1;
                    r2 = n2;
                    res = hn.amax();
                    improved = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    s.0 = r1;
    s.1 = r2;
}
