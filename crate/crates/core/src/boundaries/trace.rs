//! Boundary curves in a two-parameter slice.
//!
//! `β⁰ = 0` is affine in each strength, so it is solved directly for the
//! second axis. `β^sync = 0` is followed by pseudo-arclength continuation of
//! `(h₁, h₂, β^sync) = 0` in `(p, q, r₁, r₂)` with both parameters scaled to
//! the unit square, seeded from boundary sets along a family of lines.

use nalgebra::{Matrix4, SMatrix, Vector4};
use serde::{Deserialize, Serialize};

use super::{beta_zero, solve_boundary_set_with, system_jacobian, BoundaryOptions, Var};
use crate::error::{domain, Result};
use crate::model::{Coupling, Param};
use crate::roots::linspace;

/// A two-parameter plane through coupling space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slice {
    /// Values of the two fixed strengths; the varied entries are ignored.
    pub base: Coupling,
    pub x: Param,
    pub x_range: (f64, f64),
    pub y: Param,
    pub y_range: (f64, f64),
}

impl Slice {
    pub fn validate(&self) -> Result<()> {
        self.base.with(self.x, 0.0).with(self.y, 0.0).validate()?;
        if self.x == self.y {
            return domain("slice axes must be two different strengths");
        }
        for (lo, hi) in [self.x_range, self.y_range] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return domain(format!("invalid slice range [{lo}, {hi}]"));
            }
        }
        Ok(())
    }

    pub fn at(&self, x: f64, y: f64) -> Coupling {
        self.base.with(self.x, x).with(self.y, y)
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        let (xa, xb) = self.x_range;
        let (ya, yb) = self.y_range;
        x >= xa && x <= xb && y >= ya && y <= yb
    }

    fn normalize(&self, x: f64, y: f64) -> (f64, f64) {
        let (xa, xb) = self.x_range;
        let (ya, yb) = self.y_range;
        ((x - xa) / (xb - xa), (y - ya) / (yb - ya))
    }

    fn denormalize(&self, u: f64, v: f64) -> (f64, f64) {
        let (xa, xb) = self.x_range;
        let (ya, yb) = self.y_range;
        (xa + u * (xb - xa), ya + v * (yb - ya))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    Zero,
    Sync,
}

/// One connected piece of a boundary inside the slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub kind: BoundaryKind,
    /// Slice coordinates `(x, y)`.
    pub points: Vec<(f64, f64)>,
    /// Touching level `(r₁, r₂)` at each point; `(0, 0)` on the zero boundary.
    pub levels: Vec<(f64, f64)>,
}

/// Trace a boundary across the slice with roughly `n` samples per unit of
/// normalized arclength. Returns no curves where the boundary cannot exist.
pub fn trace_boundary_2d(slice: &Slice, kind: BoundaryKind, n: usize) -> Result<Vec<BoundaryCurve>> {
    slice.validate()?;
    if n < 32 {
        return domain(format!("boundary tracing needs n >= 32, got {n}"));
    }
    Ok(match kind {
        BoundaryKind::Zero => trace_zero(slice, n),
        BoundaryKind::Sync => trace_sync(slice, n),
    })
}

fn trace_zero(slice: &Slice, n: usize) -> Vec<BoundaryCurve> {
    let mut curves = Vec::new();
    let mut current: Vec<(f64, f64)> = Vec::new();
    let flush = |current: &mut Vec<(f64, f64)>, curves: &mut Vec<BoundaryCurve>| {
        if current.len() >= 2 {
            let levels = vec![(0.0, 0.0); current.len()];
            curves.push(BoundaryCurve { kind: BoundaryKind::Zero, points: std::mem::take(current), levels });
        }
        current.clear();
    };
    // β⁰ is affine in y for fixed x; sample x densely so steep pieces resolve
    let count = 8 * n;
    for x in linspace(slice.x_range.0, slice.x_range.1, count) {
        let a = beta_zero(&slice.at(x, 0.0)).closed_form;
        let b = beta_zero(&slice.at(x, 1.0)).closed_form - a;
        let y = if b != 0.0 { -a / b } else { f64::NAN };
        let ok = y.is_finite()
            && slice.contains(x, y)
            && beta_zero(&slice.at(x, y)).bifurcation_possible;
        if ok {
            current.push((x, y));
        } else {
            flush(&mut current, &mut curves);
        }
    }
    flush(&mut current, &mut curves);
    // β⁰ independent of y: the boundary is a vertical line
    let (x0, x1) = slice.x_range;
    if beta_zero(&slice.at(x0, 1.0)).closed_form == beta_zero(&slice.at(x0, 0.0)).closed_form {
        let a = beta_zero(&slice.at(0.0, 0.0)).closed_form;
        let s = beta_zero(&slice.at(1.0, 0.0)).closed_form - a;
        let x = if s != 0.0 { -a / s } else { f64::NAN };
        if x >= x0 && x <= x1 {
            let pts: Vec<(f64, f64)> = linspace(slice.y_range.0, slice.y_range.1, n)
                .into_iter()
                .map(|y| (x, y))
                .filter(|&(x, y)| beta_zero(&slice.at(x, y)).bifurcation_possible)
                .collect();
            if pts.len() >= 2 {
                let levels = vec![(0.0, 0.0); pts.len()];
                curves.push(BoundaryCurve { kind: BoundaryKind::Zero, points: pts, levels });
            }
        }
    }
    curves
}

/// Continuation state in normalized slice units.
type State = Vector4<f64>;

struct Tracer<'a> {
    slice: &'a Slice,
    scale: (f64, f64),
}

impl Tracer<'_> {
    fn coupling(&self, u: &State) -> Coupling {
        let (x, y) = self.slice.denormalize(u[0], u[1]);
        self.slice.at(x, y)
    }

    fn residual(&self, u: &State) -> (nalgebra::Vector3<f64>, SMatrix<f64, 3, 4>) {
        let c = self.coupling(u);
        let (g, j) = system_jacobian(&c, u[2], u[3]);
        let jx = j.column(Var::P(self.slice.x).column()) * self.scale.0;
        let jy = j.column(Var::P(self.slice.y).column()) * self.scale.1;
        let m = SMatrix::<f64, 3, 4>::from_columns(&[jx, jy, j.column(Var::R1.column()).into(), j.column(Var::R2.column()).into()]);
        (g, m)
    }

    /// Unit null vector of the 3×4 Jacobian.
    fn tangent(&self, u: &State) -> Option<State> {
        let (_, j) = self.residual(u);
        let mut t = State::zeros();
        for i in 0..4 {
            let cols: Vec<usize> = (0..4).filter(|&c| c != i).collect();
            let minor = nalgebra::Matrix3::from_columns(&[j.column(cols[0]), j.column(cols[1]), j.column(cols[2])]);
            t[i] = if i % 2 == 0 { minor.determinant() } else { -minor.determinant() };
        }
        let norm = t.norm();
        (norm > 0.0 && norm.is_finite()).then(|| t / norm)
    }

    /// Newton on `G = 0` with the arclength constraint `t·(u - u_p) = 0`.
    fn correct(&self, predicted: &State, t: &State) -> Option<(State, usize)> {
        let mut u = *predicted;
        for it in 1..=10 {
            let (g, j) = self.residual(&u);
            let mut m = Matrix4::zeros();
            m.fixed_view_mut::<3, 4>(0, 0).copy_from(&j);
            m.set_row(3, &t.transpose());
            let rhs = Vector4::new(g[0], g[1], g[2], t.dot(&(u - predicted)));
            let step = m.lu().solve(&rhs)?;
            u -= step;
            if !(u[2] > 0.0 && u[2] < 1.0 && u[3] > 0.0 && u[3] < 1.0) {
                return None;
            }
            let (g, _) = self.residual(&u);
            if g.amax() <= 1e-11 && step.amax() <= 1e-9 {
                return Some((u, it));
            }
        }
        None
    }

    fn inside(&self, u: &State) -> bool {
        const MARGIN: f64 = 1e-9;
        (-MARGIN..=1.0 + MARGIN).contains(&u[0]) && (-MARGIN..=1.0 + MARGIN).contains(&u[1])
    }

    /// Follow the branch from `start` in direction `dir` until it leaves the
    /// slice, the levels leave the open unit square, or it closes on itself.
    fn follow(&self, start: &State, dir: &State, h_max: f64) -> Vec<State> {
        let mut path = vec![*start];
        let mut u = *start;
        let Some(mut t) = self.tangent(&u) else { return path };
        if t.dot(dir) < 0.0 {
            t = -t;
        }
        let mut h = 1e-2f64.min(h_max);
        let h_min = 1e-7;
        for _ in 0..20_000 {
            let predicted = u + t * h;
            match self.correct(&predicted, &t) {
                Some((next, iters)) => {
                    if !self.inside(&next) {
                        path.push(self.clip(&u, &next));
                        break;
                    }
                    let Some(mut tn) = self.tangent(&next) else {
                        path.push(next);
                        break;
                    };
                    if tn.dot(&t) < 0.0 {
                        tn = -tn;
                    }
                    // reject steps that turn too sharply
                    if tn.dot(&t) < 0.9 && h > h_min {
                        h *= 0.5;
                        continue;
                    }
                    u = next;
                    t = tn;
                    path.push(u);
                    if path.len() > 20 && (u - start).norm() < 0.5 * h {
                        break;
                    }
                    if iters <= 3 {
                        h = (h * 1.5).min(h_max);
                    }
                }
                None => {
                    h *= 0.5;
                    if h < h_min {
                        break;
                    }
                }
            }
        }
        path
    }

    /// Point where the branch through `a → b` crosses the slice edge,
    /// corrected back onto the curve with that edge coordinate held fixed.
    fn clip(&self, a: &State, b: &State) -> State {
        let mut s: f64 = 1.0;
        let mut edge_hit = None;
        for k in 0..2 {
            for edge in [0.0, 1.0] {
                let (ea, eb) = (a[k] - edge, b[k] - edge);
                if ea * eb < 0.0 && ea / (ea - eb) < s {
                    s = ea / (ea - eb);
                    edge_hit = Some((k, edge));
                }
            }
        }
        let guess = a + (b - a) * s;
        let Some((k, edge)) = edge_hit else { return guess };
        let mut u = guess;
        u[k] = edge;
        for _ in 0..10 {
            let (g, j) = self.residual(&u);
            if g.amax() <= 1e-12 {
                return u;
            }
            let mut m = Matrix4::zeros();
            m.fixed_view_mut::<3, 4>(0, 0).copy_from(&j);
            m[(3, k)] = 1.0;
            let Some(step) = m.lu().solve(&Vector4::new(g[0], g[1], g[2], 0.0)) else { break };
            u -= step;
        }
        if self.residual(&u).0.amax() <= 1e-10 { u } else { *a }
    }
}

fn trace_sync(slice: &Slice, n: usize) -> Vec<BoundaryCurve> {
    let base = slice.base;
    let fixed_externals = [slice.x, slice.y].iter().all(|p| p.is_internal());
    if fixed_externals && base.l1 > 0.0 && base.l2 > 0.0 {
        return vec![];
    }
    let tracer = Tracer {
        slice,
        scale: (slice.x_range.1 - slice.x_range.0, slice.y_range.1 - slice.y_range.0),
    };
    // seeds: boundary sets along vertical and horizontal lines
    let mut seeds: Vec<State> = Vec::new();
    let lines = 9;
    for v in linspace(0.0, 1.0, lines) {
        let (x, y) = slice.denormalize(v, v);
        let vertical = BoundaryOptions { search_box: slice.y_range };
        if let Ok(set) = solve_boundary_set_with(&slice.at(x, 0.0), slice.y, &vertical) {
            for (val, lvl) in set.values.iter().zip(&set.levels) {
                let (u, w) = slice.normalize(x, *val);
                seeds.push(State::new(u, w, lvl.0, lvl.1));
            }
        }
        let horizontal = BoundaryOptions { search_box: slice.x_range };
        if let Ok(set) = solve_boundary_set_with(&slice.at(0.0, y), slice.x, &horizontal) {
            for (val, lvl) in set.values.iter().zip(&set.levels) {
                let (u, w) = slice.normalize(*val, y);
                seeds.push(State::new(u, w, lvl.0, lvl.1));
            }
        }
    }
    let h_max = 1.0 / n as f64;
    let mut curves: Vec<Vec<State>> = Vec::new();
    for seed in seeds {
        let covered = curves.iter().any(|c| {
            c.windows(2).any(|w| segment_distance(&seed, &w[0], &w[1]) < 2.0 * h_max)
                || c.iter().any(|p| (p - seed).norm() < 2.0 * h_max)
        });
        if covered {
            continue;
        }
        let Some(t) = tracer.tangent(&seed) else { continue };
        let forward = tracer.follow(&seed, &t, h_max);
        let closed = forward.len() > 20 && (forward.last().unwrap() - seed).norm() < h_max;
        let mut path: Vec<State> = if closed {
            forward
        } else {
            let mut back = tracer.follow(&seed, &-t, h_max);
            back.reverse();
            back.pop();
            back.extend(forward);
            back
        };
        path.dedup_by(|a, b| (*a - *b).norm() < 1e-12);
        if path.len() >= 2 {
            curves.push(path);
        }
    }
    curves
        .into_iter()
        .map(|path| {
            let points = path.iter().map(|u| slice.denormalize(u[0], u[1])).collect();
            let levels = path.iter().map(|u| (u[2], u[3])).collect();
            BoundaryCurve { kind: BoundaryKind::Sync, points, levels }
        })
        .collect()
}

/// Distance from `p` to segment `a–b` in the parameter coordinates.
fn segment_distance(p: &State, a: &State, b: &State) -> f64 {
    let (px, py) = (p[0], p[1]);
    let (ax, ay, bx, by) = (a[0], a[1], b[0], b[1]);
    let (dx, dy) = (bx - ax, by - ay);
    let len2 = dx * dx + dy * dy;
    let s = if len2 > 0.0 { (((px - ax) * dx + (py - ay) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let (qx, qy) = (ax + s * dx, ay + s * dy);
    let level = (p[2] - (a[2] + s * (b[2] - a[2]))).abs() + (p[3] - (a[3] + s * (b[3] - a[3]))).abs();
    (px - qx).hypot(py - qy) + level
}
