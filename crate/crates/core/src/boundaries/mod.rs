//! Solution boundaries: where the number of stationary states changes.
//!
//! * `β⁰ = (K₁-2)(K₂-2) - L₁L₂` vanishes where a branch leaves the origin.
//! * `β^sync = -det ∂(h₁,h₂)/∂(r₁,r₂)` vanishes where the level curves touch
//!   away from the origin (pop-up and pop-down points).
//! * `β^psync` is the external strength whose vanishing lets one community
//!   synchronize alone.
//!
//! Boundary sets hold one strength unknown and solve `{h₁ = 0, h₂ = 0,
//! β^sync = 0}`. The fixed curve is parametrized by its kernel argument, the
//! unknown strength is eliminated through the moving curve, and `β^sync` is
//! scanned along the result; a 3×3 Newton step polishes each root.

mod trace;

use nalgebra::{Matrix3, SMatrix, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::model::{symmetric_fixed_point, turning_argument, Coupling, Gamma1, Param};
use crate::roots::{brent, scan};
use crate::vkernel::{
    bessel_ratio as vr, bessel_ratio_d1 as vr1, bessel_ratio_d2 as vr2, inverse_v_unchecked,
};

pub use trace::{trace_boundary_2d, BoundaryCurve, BoundaryKind, Slice};

/// Default search interval for an unknown strength.
pub const DEFAULT_SEARCH_BOX: (f64, f64) = (-50.0, 50.0);
/// Accepted residual of the three-equation boundary system.
pub const SYSTEM_TOL: f64 = 1e-9;

/// Zero-solution boundary value at one coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaZero {
    /// `(K₁-2)(K₂-2) - L₁L₂`, or the governing strength when an internal
    /// strength equals 2: `L₁L₂` if both do, `L₂` if only `K₁ = 2`, `L₁` if only
    /// `K₂ = 2`. A branch leaves the origin where this vanishes.
    pub value: f64,
    /// `(K₁-2)(K₂-2) - L₁L₂` regardless of special cases; its sign decides
    /// whether the origin is the only solution near zero.
    pub closed_form: f64,
    /// False in the four sign quadrants where no branch can leave the origin.
    pub bifurcation_possible: bool,
}

pub fn beta_zero(c: &Coupling) -> BetaZero {
    let closed_form = (c.k1 - 2.0) * (c.k2 - 2.0) - c.l1 * c.l2;
    let value = match (c.k1 == 2.0, c.k2 == 2.0) {
        (true, true) => c.l1 * c.l2,
        (true, false) => c.l2,
        (false, true) => c.l1,
        (false, false) => closed_form,
    };
    let excluded = (c.k1 < 2.0 && c.l1 < 0.0)
        || (c.k2 < 2.0 && c.l2 < 0.0)
        || (c.k1 > 2.0 && c.l1 > 0.0)
        || (c.k2 > 2.0 && c.l2 > 0.0);
    BetaZero { value, closed_form, bifurcation_possible: !excluded }
}

/// `(L₁L₂ - K₁K₂) C₁₁C₂₁ + K₁C₁₁ + K₂C₂₁ - 1` with `C₁₁ = V'(K₁r₁ + L₁r₂)`,
/// `C₂₁ = V'(K₂r₂ + L₂r₁)`, evaluated at `(r₁, r₂)` as given.
pub fn beta_sync_residual(c: &Coupling, r1: f64, r2: f64) -> f64 {
    let c11 = vr1(c.k1 * r1 + c.l1 * r2);
    let c21 = vr1(c.k2 * r2 + c.l2 * r1);
    (c.l1 * c.l2 - c.k1 * c.k2) * c11 * c21 + c.k1 * c11 + c.k2 * c21 - 1.0
}

/// `(h₁, h₂, β^sync)` at one point.
pub fn boundary_system(c: &Coupling, r1: f64, r2: f64) -> [f64; 3] {
    [
        vr(c.k1 * r1 + c.l1 * r2) - r1,
        vr(c.k2 * r2 + c.l2 * r1) - r2,
        beta_sync_residual(c, r1, r2),
    ]
}

/// Column order of [`system_jacobian`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Var {
    R1,
    R2,
    P(Param),
}

impl Var {
    fn column(self) -> usize {
        match self {
            Var::R1 => 0,
            Var::R2 => 1,
            Var::P(Param::K1) => 2,
            Var::P(Param::K2) => 3,
            Var::P(Param::L1) => 4,
            Var::P(Param::L2) => 5,
        }
    }
}

/// Value and full Jacobian of `(h₁, h₂, β^sync)` with respect to
/// `(r₁, r₂, K₁, K₂, L₁, L₂)`.
pub(crate) fn system_jacobian(c: &Coupling, r1: f64, r2: f64) -> (Vector3<f64>, SMatrix<f64, 3, 6>) {
    let a1 = c.k1 * r1 + c.l1 * r2;
    let a2 = c.k2 * r2 + c.l2 * r1;
    let (c11, c21) = (vr1(a1), vr1(a2));
    let (d1, d2) = (vr2(a1), vr2(a2));
    let cross = c.l1 * c.l2 - c.k1 * c.k2;
    let g = Vector3::new(
        vr(a1) - r1,
        vr(a2) - r2,
        cross * c11 * c21 + c.k1 * c11 + c.k2 * c21 - 1.0,
    );
    // ∂β/∂C₁₁ and ∂β/∂C₂₁
    let p = cross * c21 + c.k1;
    let q = cross * c11 + c.k2;
    let cc = c11 * c21;
    #[rustfmt::skip]
    let j = SMatrix::<f64, 3, 6>::from_row_slice(&[
        c.k1 * c11 - 1.0, c.l1 * c11, r1 * c11, 0.0, r2 * c11, 0.0,
        c.l2 * c21, c.k2 * c21 - 1.0, 0.0, r2 * c21, 0.0, r1 * c21,
        p * d1 * c.k1 + q * d2 * c.l2,
        p * d1 * c.l1 + q * d2 * c.k2,
        c11 - c.k2 * cc + p * d1 * r1,
        c21 - c.k1 * cc + q * d2 * r2,
        c.l2 * cc + p * d1 * r2,
        c.l1 * cc + q * d2 * r1,
    ]);
    (g, j)
}

/// Options for [`solve_boundary_set_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryOptions {
    /// Interval searched for the unknown strength.
    pub search_box: (f64, f64),
}

impl Default for BoundaryOptions {
    fn default() -> Self {
        Self { search_box: DEFAULT_SEARCH_BOX }
    }
}

/// Critical values of one strength where the level curves touch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySet {
    pub unknown: Param,
    /// Descending.
    pub values: Vec<f64>,
    /// Touching point `(r₁, r₂)` for each value.
    pub levels: Vec<(f64, f64)>,
}

impl BoundarySet {
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    fn empty(unknown: Param) -> Self {
        Self { unknown, values: vec![], levels: vec![] }
    }
}

/// [`solve_boundary_set_with`] on the default search box.
pub fn solve_boundary_set(fixed: &Coupling, unknown: Param) -> Result<BoundarySet> {
    solve_boundary_set_with(fixed, unknown, &BoundaryOptions::default())
}

/// All values of `unknown` (its entry in `fixed` is ignored) at which
/// `h₁ = h₂ = β^sync = 0` has a solution with both levels in `(0, 1)`.
pub fn solve_boundary_set_with(fixed: &Coupling, unknown: Param, opts: &BoundaryOptions) -> Result<BoundarySet> {
    let probe = fixed.with(unknown, 0.0);
    probe.validate()?;
    let (lo, hi) = opts.search_box;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return domain(format!("invalid search box [{lo}, {hi}]"));
    }
    // both external strengths known and positive: the curves never touch
    if !matches!(unknown, Param::L1 | Param::L2) && fixed.l1 > 0.0 && fixed.l2 > 0.0 {
        return Ok(BoundarySet::empty(unknown));
    }
    let set = match unknown.community() {
        crate::model::Community::One => boundary_set_one(&probe, unknown, lo, hi),
        crate::model::Community::Two => {
            let mut s = boundary_set_one(&probe.swapped(), unknown.mirrored(), lo, hi);
            s.unknown = unknown;
            for l in &mut s.levels {
                *l = (l.1, l.0);
            }
            s
        }
    };
    Ok(set)
}

/// Unknown `K₁` or `L₁`; community 2 is fixed.
fn boundary_set_one(c: &Coupling, unknown: Param, lo: f64, hi: f64) -> BoundarySet {
    // points of Γ₂ as functions of a scalar parameter t
    let point: Box<dyn Fn(f64) -> Option<(f64, f64)>>;
    let (t0, t1);
    if c.l2 != 0.0 {
        let g = Gamma1 { k: c.k2, l: c.l2 };
        point = Box::new(move |x| {
            let (r2, r1) = g.point(x);
            (r1 > 0.0 && r1 < 1.0 && r2 > 0.0 && r2 < 1.0).then_some((r1, r2))
        });
        t0 = 0.0;
        t1 = g.max_argument();
    } else {
        let s = symmetric_fixed_point(c.k2);
        if s <= 0.0 {
            return BoundarySet::empty(unknown);
        }
        point = Box::new(move |r1| (r1 > 0.0 && r1 < 1.0).then_some((r1, s)));
        t0 = 0.0;
        t1 = 1.0;
    }
    let solve_unknown = |r1: f64, r2: f64| -> f64 {
        let x1 = inverse_v_unchecked(r1);
        match unknown {
            Param::K1 => (x1 - c.l1 * r2) / r1,
            _ => (x1 - c.k1 * r1) / r2,
        }
    };
    let beta_at = |t: f64| -> f64 {
        let Some((r1, r2)) = point(t) else { return f64::NAN };
        if r1 < 1e-7 || r2 < 1e-7 {
            return f64::NAN;
        }
        let p = solve_unknown(r1, r2);
        if !(p >= lo && p <= hi) {
            return f64::NAN;
        }
        beta_sync_residual(&c.with(unknown, p), r1, r2)
    };
    let nodes = crate::roots::linspace(t0, t1, 6000);
    let mut values: Vec<(f64, (f64, f64))> = Vec::new();
    for root in scan(beta_at, &nodes[1..], 1e-12) {
        let Some((r1, r2)) = point(root.x) else { continue };
        let p = solve_unknown(r1, r2);
        let Some((p, r1, r2)) = polish_boundary(c, unknown, p, r1, r2) else { continue };
        if !(p >= lo && p <= hi) || !(r1 > 0.0 && r1 < 1.0 && r2 > 0.0 && r2 < 1.0) {
            continue;
        }
        if values.iter().any(|(q, _)| (q - p).abs() <= 1e-7 * p.abs().max(1.0)) {
            continue;
        }
        values.push((p, (r1, r2)));
    }
    values.sort_by(|a, b| b.0.total_cmp(&a.0));
    BoundarySet {
        unknown,
        values: values.iter().map(|v| v.0).collect(),
        levels: values.iter().map(|v| v.1).collect(),
    }
}

/// Newton on `(h₁, h₂, β^sync)` in `(r₁, r₂, p)`. Returns the input when it
/// already satisfies the system and Newton cannot improve it.
fn polish_boundary(c: &Coupling, unknown: Param, p: f64, r1: f64, r2: f64) -> Option<(f64, f64, f64)> {
    let mut x = Vector3::new(r1, r2, p);
    let eval = |x: &Vector3<f64>| {
        let cc = c.with(unknown, x[2]);
        let (g, j) = system_jacobian(&cc, x[0], x[1]);
        let col = Var::P(unknown).column();
        let m = Matrix3::from_columns(&[j.column(0), j.column(1), j.column(col)]);
        (g, m)
    };
    let (mut g, _) = eval(&x);
    let mut res = g.amax();
    for _ in 0..20 {
        if res <= 1e-14 {
            break;
        }
        let (_, m) = eval(&x);
        let Some(step) = m.lu().solve(&g) else { break };
        let mut t = 1.0;
        let mut moved = false;
        while t > 1e-6 {
            let trial = x - step * t;
            let (gt, _) = eval(&trial);
            if gt.amax() < res && trial[0] > 0.0 && trial[0] < 1.0 && trial[1] > 0.0 && trial[1] < 1.0 {
                x = trial;
                g = gt;
                res = g.amax();
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (res <= SYSTEM_TOL).then_some((x[2], x[0], x[1]))
}

/// `L₁` if `K₂ > 2`, else `L₂` if `K₁ > 2`, else nothing. Its zero marks a
/// partially synchronized state `(0, r*(K₂))` or `(r*(K₁), 0)`.
pub fn beta_psync(c: &Coupling) -> Option<f64> {
    if c.k2 > 2.0 {
        Some(c.l1)
    } else if c.k1 > 2.0 {
        Some(c.l2)
    } else {
        None
    }
}

/// Point where the two elements of a boundary set merge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StartingPoint {
    /// `(K₁, K₂)` or `(L₁, L₂)`.
    pub params: (Param, Param),
    pub values: (f64, f64),
    pub level: (f64, f64),
}

impl StartingPoint {
    pub fn coupling(&self, base: &Coupling) -> Coupling {
        base.with(self.params.0, self.values.0).with(self.params.1, self.values.1)
    }
}

/// Internal strengths `(K₁ˢ, K₂ˢ)` for fixed `L₁, L₂ < 0` where
/// `C₁₁ = 1/(K₁ - L₁)` and `C₂₁ = 1/(K₂ - L₂)` on a common solution.
pub fn starting_point(l1: f64, l2: f64) -> Result<StartingPoint> {
    if !(l1 < 0.0 && l2 < 0.0) {
        return domain(format!("starting point needs both external strengths negative, got ({l1}, {l2})"));
    }
    let (lo, hi) = DEFAULT_SEARCH_BOX;
    // along x₁: K₁ from the slope condition, r₂ from h₁, K₂ from h₂
    let state = move |x1: f64| -> Option<(f64, f64, f64, f64, f64)> {
        let r1 = vr(x1);
        let k1 = l1 + 1.0 / vr1(x1);
        let r2 = (x1 - k1 * r1) / l1;
        if !(r2 > 0.0 && r2 < 1.0) || !(k1 <= hi) {
            return None;
        }
        let x2 = inverse_v_unchecked(r2);
        let k2 = (x2 - l2 * r1) / r2;
        if !(k2 >= lo && k2 <= hi) {
            return None;
        }
        Some((k1, k2, r1, r2, vr1(x2) * (k2 - l2) - 1.0))
    };
    let f = |x: f64| state(x).map_or(f64::NAN, |s| s.4);
    let x_max = hi + l1.abs();
    let found = scan(f, &crate::roots::linspace(1e-6, x_max, 8000), 1e-12);
    let root = found
        .first()
        .ok_or_else(|| Error::NotFound(format!("no starting point for (l1, l2) = ({l1}, {l2})")))?;
    let (k1, k2, r1, r2, _) = state(root.x).expect("root lies in admissible range");
    Ok(StartingPoint { params: (Param::K1, Param::K2), values: (k1, k2), level: (r1, r2) })
}

/// External strengths `(L₁ˢ, L₂ˢ)`, both negative, for fixed `K₁, K₂ > 2`.
pub fn starting_point_external(k1: f64, k2: f64) -> Result<StartingPoint> {
    if !(k1 > 2.0 && k2 > 2.0) {
        return domain(format!("external starting point needs both internal strengths above 2, got ({k1}, {k2})"));
    }
    let (lo, _) = DEFAULT_SEARCH_BOX;
    let state = move |x1: f64| -> Option<(f64, f64, f64, f64, f64)> {
        let r1 = vr(x1);
        let l1 = k1 - 1.0 / vr1(x1);
        if !(l1 < 0.0 && l1 >= lo) {
            return None;
        }
        let r2 = (x1 - k1 * r1) / l1;
        if !(r2 > 0.0 && r2 < 1.0) {
            return None;
        }
        let x2 = inverse_v_unchecked(r2);
        let l2 = (x2 - k2 * r2) / r1;
        if !(l2 < 0.0 && l2 >= lo) {
            return None;
        }
        Some((l1, l2, r1, r2, vr1(x2) * (k2 - l2) - 1.0))
    };
    let f = |x: f64| state(x).map_or(f64::NAN, |s| s.4);
    let x_max = k1 + lo.abs();
    let found = scan(f, &crate::roots::linspace(1e-6, x_max, 8000), 1e-12);
    let root = found
        .first()
        .ok_or_else(|| Error::NotFound(format!("no starting point for (k1, k2) = ({k1}, {k2})")))?;
    let (l1, l2, r1, r2, _) = state(root.x).expect("root lies in admissible range");
    Ok(StartingPoint { params: (Param::L1, Param::L2), values: (l1, l2), level: (r1, r2) })
}

/// Type of asymptote: the apex of a parabola reaches the top edge of the
/// square (`A`) or the axis level of the other community (`B`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AsymptoteKind {
    A,
    B,
}

/// Limit value of a boundary function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Asymptote {
    pub kind: AsymptoteKind,
    pub which: Param,
    pub value: f64,
    /// Apex of the parabola at the asymptote, in `(r₁, r₂)` order.
    pub level: (f64, f64),
}

/// `x - V(x)/V'(x)`: apex height times `L` for the parabola whose apex has
/// kernel argument `x`. Strictly decreasing from 0.
fn apex_offset(x: f64) -> f64 {
    x - vr(x) / vr1(x)
}

/// Apex argument `x` with `apex_offset(x) = target < 0`.
fn apex_argument_for(target: f64) -> Result<f64> {
    let mut hi = 1.0;
    while apex_offset(hi) > target {
        hi *= 2.0;
        if hi > 1e8 {
            return Err(Error::NotFound(format!("apex offset {target} out of range")));
        }
    }
    brent(|x| apex_offset(x) - target, 0.0, hi, 1e-15)
        .ok_or_else(|| Error::NotFound(format!("apex offset {target} out of range")))
}

/// Internal strength whose parabola apex has height `height` given `L < 0`,
/// and the apex abscissa.
fn internal_for_apex(l: f64, height: f64) -> Result<(f64, f64)> {
    let x = apex_argument_for(l * height)?;
    Ok((1.0 / vr1(x), vr(x)))
}

/// External strength whose parabola apex has height `height` given `K > 2`,
/// and the apex abscissa.
fn external_for_apex(k: f64, height: f64) -> Result<(f64, f64)> {
    let x = turning_argument(k)?;
    let r = vr(x);
    Ok(((x - k * r) / height, r))
}

fn mirror_level(which: Param, level: (f64, f64)) -> (f64, f64) {
    match which.community() {
        crate::model::Community::One => level,
        crate::model::Community::Two => (level.1, level.0),
    }
}

/// Type-a asymptote of `which`, given the other strength of the same
/// community (`L` for an unknown `K`, `K` for an unknown `L`).
pub fn asymptote_a(which: Param, other: f64) -> Result<Asymptote> {
    if !other.is_finite() {
        return domain("asymptote needs a finite strength");
    }
    let (value, r) = if which.is_internal() {
        if !(other < 0.0) {
            return domain(format!("type-a asymptote of {which} needs a negative external strength, got {other}"));
        }
        internal_for_apex(other, 1.0)?
    } else {
        external_for_apex(other, 1.0)?
    };
    Ok(Asymptote { kind: AsymptoteKind::A, which, value, level: mirror_level(which, (r, 1.0)) })
}

/// Type-b asymptote of `which`. The two fixed strengths are given in
/// `(k1, k2, l1, l2)` order: `(k2, l1)` for `K1`, `(k1, l2)` for `K2` and
/// `(k1, k2)` for `L1` and `L2`.
pub fn asymptote_b(which: Param, first: f64, second: f64) -> Result<Asymptote> {
    if !first.is_finite() || !second.is_finite() {
        return domain("asymptote needs finite strengths");
    }
    // (own K or own L, other community's K) for the unknown's community
    let (own, other_k) = match which {
        Param::K1 => (second, first),
        Param::K2 => (second, first),
        Param::L1 => (first, second),
        Param::L2 => (second, first),
    };
    if !(other_k > 2.0) {
        return domain(format!("type-b asymptote of {which} needs the other internal strength above 2, got {other_k}"));
    }
    let height = symmetric_fixed_point(other_k);
    let (value, r) = if which.is_internal() {
        if !(own < 0.0) {
            return domain(format!("type-b asymptote of {which} needs a negative external strength, got {own}"));
        }
        internal_for_apex(own, height)?
    } else {
        external_for_apex(own, height)?
    };
    Ok(Asymptote { kind: AsymptoteKind::B, which, value, level: mirror_level(which, (r, height)) })
}
