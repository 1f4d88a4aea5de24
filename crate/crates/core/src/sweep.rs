//! One-parameter bifurcation diagrams and two-parameter phase diagrams.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundaries::{
    beta_psync, beta_zero, solve_boundary_set_with, trace_boundary_2d, BoundaryKind, BoundaryOptions, Slice,
};
use crate::error::{domain, Result};
use crate::model::{solve_all, symmetric_fixed_point, Coupling, Param, Psi, SyncSolution};
use crate::roots::linspace;

/// Closest spacing the branch linker refines down to, as a fraction of the
/// sweep step.
const MIN_REFINE: f64 = 1.0 / 64.0;
/// Parameter resolution of bisected events.
const EVENT_TOL: f64 = 1e-8;

/// A one-parameter sweep through coupling space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Fixed strengths; the varied entry is ignored.
    pub base: Coupling,
    pub varied: Param,
    pub range: (f64, f64),
    pub steps: usize,
    pub psi: Psi,
}

impl SweepSpec {
    pub fn new(base: Coupling, varied: Param, range: (f64, f64), steps: usize) -> Self {
        Self { base, varied, range, steps, psi: Psi::Zero }
    }

    pub fn at(&self, p: f64) -> Coupling {
        self.base.with(self.varied, p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub param: f64,
    pub r1: f64,
    pub r2: f64,
}

/// A solution followed continuously in the varied parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub id: usize,
    pub points: Vec<BranchPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    /// A branch leaves or joins the unsynchronized state.
    Zero,
    /// A pair of solutions, or a partially synchronized one, appears.
    Popup,
    /// A pair of solutions disappears.
    Popdown,
    /// The coupling crosses `K₁ + L₁ = K₂ + L₂`.
    Symmetric,
}

impl EventKind {
    pub fn name(self) -> &'static str {
        match self {
            EventKind::Zero => "zero",
            EventKind::Popup => "popup",
            EventKind::Popdown => "popdown",
            EventKind::Symmetric => "symmetric",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub param_value: f64,
    pub level: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationDiagram {
    pub spec: SweepSpec,
    pub branches: Vec<Branch>,
    pub events: Vec<Event>,
}

fn solutions_at(spec: &SweepSpec, p: f64) -> Result<Vec<SyncSolution>> {
    solve_all(&spec.at(p), spec.psi)
}

fn count_at(spec: &SweepSpec, p: f64) -> Result<usize> {
    Ok(solutions_at(spec, p)?.len())
}

/// Solve at every step, link solutions into branches and locate the events.
pub fn sweep_1d(spec: &SweepSpec) -> Result<BifurcationDiagram> {
    spec.base.with(spec.varied, 0.0).validate()?;
    let (lo, hi) = spec.range;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return domain(format!("invalid sweep range [{lo}, {hi}]"));
    }
    if spec.steps < 64 {
        return domain(format!("sweeps need at least 64 steps, got {}", spec.steps));
    }
    let params = linspace(lo, hi, spec.steps);
    let solved: Vec<Vec<SyncSolution>> = params
        .par_iter()
        .map(|&p| solutions_at(spec, p))
        .collect::<Result<_>>()?;
    let branches = link_branches(spec, params.iter().copied().zip(solved).collect())?;
    let events = locate_events(spec, &params)?;
    Ok(BifurcationDiagram { spec: *spec, branches, events })
}

struct Active {
    branch: usize,
    last: (f64, f64),
    prev: Option<(f64, f64)>,
}

/// Greedy nearest-neighbour linking with a secant predictor. A step where a
/// branch has two candidates within reach (or a candidate is in reach of two
/// branches) is bisected before linking.
fn link_branches(spec: &SweepSpec, mut steps: Vec<(f64, Vec<SyncSolution>)>) -> Result<Vec<Branch>> {
    let base_step = (spec.range.1 - spec.range.0) / (spec.steps - 1) as f64;
    let mut branches: Vec<Branch> = Vec::new();
    let mut active: Vec<Active> = Vec::new();
    let mut i = 0;
    while i < steps.len() {
        let (p, ref sols) = steps[i];
        let pts: Vec<(f64, f64)> = sols.iter().map(|s| (s.r1, s.r2)).collect();
        let spacing = if i > 0 { p - steps[i - 1].0 } else { base_step };
        let reach: Vec<f64> = active
            .iter()
            .map(|a| match a.prev {
                Some(q) => (5.0 * (a.last.0 - q.0).hypot(a.last.1 - q.1)).max(0.02),
                None => 0.05,
            })
            .collect();
        let predicted: Vec<(f64, f64)> = active
            .iter()
            .map(|a| match a.prev {
                Some(q) => (2.0 * a.last.0 - q.0, 2.0 * a.last.1 - q.1),
                None => a.last,
            })
            .collect();
        let dist = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).hypot(a.1 - b.1);
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (ai, pr) in predicted.iter().enumerate() {
            for (si, s) in pts.iter().enumerate() {
                let d = dist(*pr, *s);
                if d <= reach[ai] {
                    pairs.push((d, ai, si));
                }
            }
        }
        let ambiguous = (0..active.len()).any(|ai| pairs.iter().filter(|x| x.1 == ai).count() > 1)
            || (0..pts.len()).any(|si| pairs.iter().filter(|x| x.2 == si).count() > 1);
        if ambiguous && i > 0 && spacing > MIN_REFINE * base_step * 1.0001 {
            let mid = 0.5 * (p + steps[i - 1].0);
            let sols = solutions_at(spec, mid)?;
            steps.insert(i, (mid, sols));
            continue;
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut used_a = vec![false; active.len()];
        let mut used_s = vec![false; pts.len()];
        let mut next_active = Vec::new();
        for (_, ai, si) in pairs {
            if used_a[ai] || used_s[si] {
                continue;
            }
            used_a[ai] = true;
            used_s[si] = true;
            let a = &active[ai];
            branches[a.branch].points.push(BranchPoint { param: p, r1: pts[si].0, r2: pts[si].1 });
            next_active.push(Active { branch: a.branch, last: pts[si], prev: Some(a.last) });
        }
        for (si, s) in pts.iter().enumerate() {
            if !used_s[si] {
                let id = branches.len();
                branches.push(Branch { id, points: vec![BranchPoint { param: p, r1: s.0, r2: s.1 }] });
                next_active.push(Active { branch: id, last: *s, prev: None });
            }
        }
        active = next_active;
        i += 1;
    }
    Ok(branches)
}

fn locate_events(spec: &SweepSpec, params: &[f64]) -> Result<Vec<Event>> {
    let (lo, hi) = spec.range;
    let inside = |p: f64| p >= lo && p <= hi;
    let step = (hi - lo) / (spec.steps - 1) as f64;
    let delta = (1e-7 * step).max(1e-9 * hi.abs().max(lo.abs()));
    let mut events: Vec<Event> = Vec::new();
    let sym_coupling = |p: f64| spec.at(p);

    // unsynchronized branch bifurcation: β⁰ is affine in every strength
    let b_at = |p: f64| beta_zero(&spec.at(p)).closed_form;
    let slope = b_at(1.0) - b_at(0.0);
    if slope != 0.0 {
        let p0 = -b_at(0.0) / slope;
        if inside(p0) && count_at(spec, p0 - delta)? != count_at(spec, p0 + delta)? {
            events.push(Event { kind: EventKind::Zero, param_value: p0, level: (0.0, 0.0) });
        }
    }

    // tangencies of the level curves
    let flip = spec.base.for_psi(spec.psi);
    let set = solve_boundary_set_with(&flip, spec.varied, &BoundaryOptions { search_box: (lo, hi) })?;
    for (v, lvl) in set.values.iter().zip(&set.levels) {
        let (before, after) = (count_at(spec, v - delta)?, count_at(spec, v + delta)?);
        let kind = match after.cmp(&before) {
            std::cmp::Ordering::Greater => EventKind::Popup,
            std::cmp::Ordering::Less => EventKind::Popdown,
            std::cmp::Ordering::Equal => continue,
        };
        events.push(Event { kind, param_value: *v, level: *lvl });
    }

    // partially synchronized states at a vanishing external strength
    if matches!(spec.varied, Param::L1 | Param::L2) && inside(0.0) {
        let at0 = flip.with(spec.varied, 0.0);
        if beta_psync(&at0) == Some(0.0) {
            let level = if spec.varied == Param::L1 {
                (0.0, symmetric_fixed_point(at0.k2))
            } else {
                (symmetric_fixed_point(at0.k1), 0.0)
            };
            let (before, after) = (count_at(spec, -delta)?, count_at(spec, delta)?);
            let kind = if after >= before { EventKind::Popup } else { EventKind::Popdown };
            if before != after {
                events.push(Event { kind, param_value: 0.0, level });
            }
        }
    }

    // symmetric line, solved exactly for the varied strength
    let b = spec.base;
    let p_sym = match spec.varied {
        Param::K1 => b.k2 + b.l2 - b.l1,
        Param::L1 => b.k2 + b.l2 - b.k1,
        Param::K2 => b.k1 + b.l1 - b.l2,
        Param::L2 => b.k1 + b.l1 - b.k2,
    };
    if inside(p_sym) {
        let c = sym_coupling(p_sym);
        let r = symmetric_fixed_point(c.k1 + c.l1);
        events.push(Event { kind: EventKind::Symmetric, param_value: p_sym, level: (r, r) });
    }

    // count changes no predicted event accounts for
    let counts: Vec<usize> = params.par_iter().map(|&p| count_at(spec, p)).collect::<Result<_>>()?;
    for (w, pw) in counts.windows(2).zip(params.windows(2)) {
        if w[0] == w[1] {
            continue;
        }
        let explained = events
            .iter()
            .any(|e| e.kind != EventKind::Symmetric && e.param_value >= pw[0] - delta && e.param_value <= pw[1] + delta);
        if explained {
            continue;
        }
        let (mut a, mut z) = (pw[0], pw[1]);
        let ca = w[0];
        while z - a > EVENT_TOL {
            let m = 0.5 * (a + z);
            if count_at(spec, m)? == ca {
                a = m;
            } else {
                z = m;
            }
        }
        let p = 0.5 * (a + z);
        let diff = w[1] as i64 - w[0] as i64;
        let kind = match diff {
            1 | -1 => EventKind::Zero,
            d if d > 0 => EventKind::Popup,
            _ => EventKind::Popdown,
        };
        let level = if kind == EventKind::Zero {
            (0.0, 0.0)
        } else {
            // midpoint of the pair closest to where it appears or vanishes
            let side = if diff > 0 { z } else { a };
            let sols = solutions_at(spec, side)?;
            let other = solutions_at(spec, if diff > 0 { a } else { z })?;
            let fresh: Vec<&SyncSolution> = sols
                .iter()
                .filter(|s| !other.iter().any(|o| o.distance(s) < 1e-3))
                .collect();
            if fresh.is_empty() {
                (f64::NAN, f64::NAN)
            } else {
                let n = fresh.len() as f64;
                (fresh.iter().map(|s| s.r1).sum::<f64>() / n, fresh.iter().map(|s| s.r2).sum::<f64>() / n)
            }
        };
        events.push(Event { kind, param_value: p, level });
    }
    events.sort_by(|a, b| a.param_value.total_cmp(&b.param_value));
    Ok(events)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OverlayKind {
    Zero,
    Sync,
    Psync,
    Symmetric,
}

/// A labelled boundary polyline drawn over a phase diagram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Overlay {
    pub kind: OverlayKind,
    pub dashed: bool,
    pub points: Vec<(f64, f64)>,
}

/// Solution counts over a two-parameter slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagramGrid {
    pub slice: Slice,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// `counts[j][i]` at `(xs[i], ys[j])`.
    pub counts: Vec<Vec<u8>>,
    /// Cells whose coupling sits on a boundary.
    pub degenerate: Vec<Vec<bool>>,
    pub overlays: Vec<Overlay>,
}

impl PhaseDiagramGrid {
    pub fn count_at(&self, i: usize, j: usize) -> u8 {
        self.counts[j][i]
    }
}

/// Fill colour for a solution count: one to four solutions map to red,
/// green, blue and yellow.
pub fn count_color(count: u8) -> &'static str {
    match count {
        1 => "red",
        2 => "green",
        3 => "blue",
        4 => "yellow",
        _ => "gray",
    }
}

/// Count solutions at every grid node and overlay the boundaries.
pub fn phase_diagram(slice: &Slice, nx: usize, ny: usize) -> Result<PhaseDiagramGrid> {
    slice.validate()?;
    if nx < 64 || ny < 64 {
        return domain(format!("phase diagrams need at least 64x64 cells, got {nx}x{ny}"));
    }
    let xs = linspace(slice.x_range.0, slice.x_range.1, nx);
    let ys = linspace(slice.y_range.0, slice.y_range.1, ny);
    let cells: Vec<(u8, bool)> = (0..nx * ny)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % nx, k / nx);
            let c = slice.at(xs[i], ys[j]);
            let sols = solve_all(&c, Psi::Zero)?;
            let on_zero = beta_zero(&c).closed_form.abs() <= 1e-9;
            let degenerate = on_zero || sols.iter().any(|s| s.tangent);
            Ok((sols.len() as u8, degenerate))
        })
        .collect::<Result<_>>()?;
    let counts = (0..ny).map(|j| (0..nx).map(|i| cells[j * nx + i].0).collect()).collect();
    let degenerate = (0..ny).map(|j| (0..nx).map(|i| cells[j * nx + i].1).collect()).collect();
    let n = nx.max(ny);
    let mut overlays = Vec::new();
    for (kind, boundary) in [(OverlayKind::Zero, BoundaryKind::Zero), (OverlayKind::Sync, BoundaryKind::Sync)] {
        for curve in trace_boundary_2d(slice, boundary, n)? {
            overlays.push(Overlay { kind, dashed: false, points: curve.points });
        }
    }
    overlays.extend(psync_lines(slice, n));
    if let Some(points) = symmetric_line(slice, n) {
        overlays.push(Overlay { kind: OverlayKind::Symmetric, dashed: true, points });
    }
    Ok(PhaseDiagramGrid { slice: *slice, xs, ys, counts, degenerate, overlays })
}

/// `K₁ + L₁ = K₂ + L₂` inside the slice.
fn symmetric_line(slice: &Slice, n: usize) -> Option<Vec<(f64, f64)>> {
    let off = |x: f64, y: f64| slice.at(x, y).symmetry_offset();
    let (x0, x1) = slice.x_range;
    let (y0, y1) = slice.y_range;
    let dy = off(x0, 1.0) - off(x0, 0.0);
    let pts: Vec<(f64, f64)> = if dy != 0.0 {
        linspace(x0, x1, n)
            .into_iter()
            .map(|x| (x, -off(x, 0.0) / dy))
            .filter(|&(_, y)| y >= y0 && y <= y1)
            .collect()
    } else {
        let dx = off(1.0, y0) - off(0.0, y0);
        if dx == 0.0 {
            return None;
        }
        let x = -off(0.0, y0) / dx;
        if !(x >= x0 && x <= x1) {
            return None;
        }
        linspace(y0, y1, n).into_iter().map(|y| (x, y)).collect()
    };
    (pts.len() >= 2).then_some(pts)
}

/// `L₁ = 0` with `K₂ > 2`, and `L₂ = 0` with `K₁ > 2`, inside the slice.
fn psync_lines(slice: &Slice, n: usize) -> Vec<Overlay> {
    let mut out = Vec::new();
    let (x0, x1) = slice.x_range;
    let (y0, y1) = slice.y_range;
    for (l, other_k) in [(Param::L1, Param::K2), (Param::L2, Param::K1)] {
        let pts: Vec<(f64, f64)> = if slice.x == l && x0 <= 0.0 && x1 >= 0.0 {
            linspace(y0, y1, n).into_iter().map(|y| (0.0, y)).collect()
        } else if slice.y == l && y0 <= 0.0 && y1 >= 0.0 {
            linspace(x0, x1, n).into_iter().map(|x| (x, 0.0)).collect()
        } else {
            continue;
        };
        let mut run: Vec<(f64, f64)> = Vec::new();
        for p in pts {
            if slice.at(p.0, p.1).get(other_k) > 2.0 {
                run.push(p);
            } else if run.len() >= 2 {
                out.push(Overlay { kind: OverlayKind::Psync, dashed: false, points: std::mem::take(&mut run) });
            } else {
                run.clear();
            }
        }
        if run.len() >= 2 {
            out.push(Overlay { kind: OverlayKind::Psync, dashed: false, points: run });
        }
    }
    out
}
