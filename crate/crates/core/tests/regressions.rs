//! Stated values and oracle comparisons for individual operations.

mod common;

use common::kernel_by_quadrature;
use kuramoto2c::boundaries::{
    asymptote_a, asymptote_b, beta_psync, beta_sync_residual, beta_zero, solve_boundary_set, starting_point,
    BoundaryKind, Slice,
};
use kuramoto2c::boundaries::trace_boundary_2d;
use kuramoto2c::classify::{bifurcation_types, region, subclassify, BifurcationType, Region};
use kuramoto2c::model::{residual, solve_all, symmetric_fixed_point, trace_curve, turning_point};
use kuramoto2c::roots::brent;
use kuramoto2c::sweep::{phase_diagram, sweep_1d, EventKind, OverlayKind, SweepSpec};
use kuramoto2c::vkernel::{v, v_double_prime, v_prime};
use kuramoto2c::{Community, Coupling, CurveShape, Param, Psi};

fn close(got: f64, want: f64, tol: f64) {
    assert!((got - want).abs() <= tol, "got {got}, expected {want} ± {tol}");
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    assert!(fa * f(b) < 0.0);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (f(m) > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[test]
fn kernel_values() {
    assert_eq!(v(0.0).unwrap(), 0.0);
    close(v(3.0 * 0.724159).unwrap(), 0.724159, 1e-4);
    close(v(10.0).unwrap(), kernel_by_quadrature(10.0), 1e-10);
    assert_eq!(v_prime(0.0).unwrap(), 0.5);
    let h = 1e-6;
    close(v_prime(1.0).unwrap(), (kernel_by_quadrature(1.0 + h) - kernel_by_quadrature(1.0 - h)) / (2.0 * h), 1e-6);
    assert_eq!(v_prime(-2.5).unwrap(), v_prime(2.5).unwrap());
    assert_eq!(v_double_prime(0.0).unwrap(), 0.0);
    let h = 1e-4;
    let fd2 = (v(2.0 + h).unwrap() - 2.0 * v(2.0).unwrap() + v(2.0 - h).unwrap()) / (h * h);
    close(v_double_prime(2.0).unwrap(), fd2, 1e-5);
    for x in [1.0, 3.0, 10.0] {
        assert!(v_double_prime(x).unwrap() < 0.0);
    }
    assert!(v(f64::NAN).is_err());
}

#[test]
fn self_consistency_residuals() {
    let c = Coupling::new(1.3, -0.7, 2.0, -4.0);
    assert_eq!(residual(&c, Community::One, 0.0, 0.0).unwrap(), 0.0);
    close(residual(&Coupling::new(2.0, 3.0, 0.0, 5.0), Community::Two, 0.0, 0.724159).unwrap(), 0.0, 1e-4);
    let r = bisect(|r| v(5.0 * r).unwrap() - r, 0.1, 1.0);
    close(residual(&Coupling::new(4.0, 4.0, 1.0, 1.0), Community::One, r, r).unwrap(), 0.0, 1e-6);
    assert!(residual(&c, Community::One, 1.5, 0.0).is_err());
}

#[test]
fn symmetric_fixed_points() {
    assert_eq!(symmetric_fixed_point(2.0), 0.0);
    close(symmetric_fixed_point(3.0), 0.724159, 1e-4);
    let r = symmetric_fixed_point(5.0);
    close(r, bisect(|r| v(5.0 * r).unwrap() - r, 0.1, 1.0), 1e-12);
    assert!(r > 0.85 && r < 0.92);
}

#[test]
fn level_curve_shapes() {
    let c = trace_curve(&Coupling::new(1.0, 0.0, -1.0, 0.0), Community::One, 200).unwrap();
    assert_eq!(c.shape, CurveShape::Trivial);
    assert_eq!(c.samples, vec![(0.0, 0.0)]);

    let c = trace_curve(&Coupling::new(3.0, 0.0, 2.0, 0.0), Community::One, 400).unwrap();
    assert_eq!(c.shape, CurveShape::ConvexDisconnected);
    let axis = bisect(|r| v(3.0 * r).unwrap() - r, 0.1, 1.0);
    assert!(c.samples.iter().all(|&(r1, _)| r1 >= axis - 1e-9));

    let c = trace_curve(&Coupling::new(6.0, 0.0, -3.0, 0.0), Community::One, 4000).unwrap();
    assert_eq!(c.shape, CurveShape::Parabola);
    let apex = c.apex().unwrap();
    let tp = turning_point(6.0, -3.0).unwrap();
    close(apex.0, tp.r1, 1e-3);
    close(apex.1, tp.r2, 1e-6);
    // grid oracle: highest r₂ row where h₁ changes sign along r₁
    let n = 2000;
    let h = |r1: f64, r2: f64| v(6.0 * r1 - 3.0 * r2).unwrap() - r1;
    let top = (0..=n)
        .rev()
        .map(|j| j as f64 / n as f64)
        .find(|&r2| (0..n).any(|i| h(i as f64 / n as f64, r2) * h((i + 1) as f64 / n as f64, r2) <= 0.0 && r2 > 0.0))
        .unwrap();
    close(tp.r2, top, 1.0 / n as f64);
}

#[test]
fn turning_points() {
    let tp = turning_point(6.0, -3.0).unwrap();
    let oracle = bisect(|r| r - v(6.0 * r / (6.0 * (1.0 - r * r) - 1.0)).unwrap(), 0.5, 0.9);
    close(tp.r1, oracle, 1e-9);
    assert!(turning_point(7.143 + 0.01, -3.0).unwrap().r2 > 1.0);
    assert!(turning_point(7.143 - 0.01, -3.0).unwrap().r2 < 1.0);
    close(turning_point(6.0, -2.187).unwrap().r2, 1.0, 5e-3);
    assert!(turning_point(1.5, -1.0).is_err());
}

#[test]
fn stationary_states() {
    let s = solve_all(&Coupling::new(1.0, 1.0, 0.5, 0.5), Psi::Zero).unwrap();
    assert_eq!(s.len(), 1);
    let s = solve_all(&Coupling::new(3.9175, 2.0, -1.0, 3.0), Psi::Zero).unwrap();
    assert!(s.iter().any(|x| x.is_trivial()));
    assert!(s.iter().any(|x| (x.r1 - 0.5699).abs() < 5e-3 && (x.r2 - 0.8325).abs() < 5e-3), "{s:?}");
    assert_eq!(solve_all(&Coupling::new(5.5, 6.5, -2.0, -3.0), Psi::Zero).unwrap().len(), 4);
}

#[test]
fn zero_and_sync_boundaries() {
    assert_eq!(beta_zero(&Coupling::new(-14.0 / 3.0, -1.0, 4.0, 5.0)).value.abs(), 0.0);
    assert!(beta_zero(&Coupling::new(22.0 / 3.0, -1.0, -2.0, 8.0)).value.abs() < 1e-14);
    assert_eq!(beta_zero(&Coupling::new(2.0, 2.0, -1.5, 3.0)).value, -4.5);

    // (5.316, 3, -2, 2) is a touching configuration to the stated digits
    let set = solve_boundary_set(&Coupling::new(0.0, 3.0, -2.0, 2.0), Param::K1).unwrap();
    assert_eq!(set.len(), 1);
    close(set.values[0], 5.316, 5e-4);
    let c = Coupling::new(set.values[0], 3.0, -2.0, 2.0);
    let touch = solve_all(&c, Psi::Zero).unwrap().into_iter().find(|x| x.tangent).expect("touching state");
    close(beta_sync_residual(&c, touch.r1, touch.r2), 0.0, 1e-6);
    let near = solve_all(&Coupling::new(5.316, 3.0, -2.0, 2.0), Psi::Zero).unwrap();
    assert_eq!(near.len(), 3);
    assert!(near[1].distance(&near[2]) < 1e-2);
    close(beta_sync_residual(&Coupling::new(7.901, 3.0, -4.0, 3.0), 0.565, 0.573), 0.0, 1e-2);
}

#[test]
fn boundary_sets() {
    let s = solve_boundary_set(&Coupling::new(0.0, 2.5, -2.0, 1.0), Param::K1).unwrap();
    assert_eq!(s.len(), 1);
    close(s.values[0], 5.057, 5e-3);
    close(s.levels[0].0, 0.6431, 5e-3);
    close(s.levels[0].1, 0.7719, 5e-3);
    let s = solve_boundary_set(&Coupling::new(0.0, 7.0, -2.0, -3.0), Param::K1).unwrap();
    assert_eq!(s.len(), 2);
    close(s.values[0], 16.804, 5e-3);
    close(s.values[1], 5.329, 5e-3);
    assert!(solve_boundary_set(&Coupling::new(1.0, 1.0, 1.0, 0.0), Param::L2).unwrap().is_empty());
}

#[test]
fn partial_sync_boundary() {
    assert_eq!(beta_psync(&Coupling::new(1.0, 3.0, 0.0, 2.0)), Some(0.0));
    assert_eq!(beta_psync(&Coupling::new(1.0, 1.0, -3.0, 4.0)), None);
    assert_eq!(beta_psync(&Coupling::new(3.0, 1.0, -3.0, 0.0)), Some(0.0));
}

#[test]
fn starting_point_merges_the_boundary_set() {
    let sp = starting_point(-3.0, -4.0).unwrap();
    close(sp.values.0, 6.382, 5e-3);
    close(sp.values.1, 7.381, 5e-3);
    let s = solve_boundary_set(&Coupling::new(0.0, sp.values.1, -3.0, -4.0), Param::K1).unwrap();
    assert!(!s.is_empty());
    assert!(s.values.iter().all(|&k| (k - sp.values.0).abs() < 1e-3), "{s:?}");
    // slightly below the merge point there is nothing, above it two values
    let below = solve_boundary_set(&Coupling::new(0.0, sp.values.1 - 0.05, -3.0, -4.0), Param::K1).unwrap();
    let above = solve_boundary_set(&Coupling::new(0.0, sp.values.1 + 0.05, -3.0, -4.0), Param::K1).unwrap();
    assert_eq!((below.len().min(above.len()), below.len().max(above.len())), (0, 2));
    assert!(starting_point(1.0, -1.0).is_err());
}

#[test]
fn asymptotes() {
    close(asymptote_a(Param::K1, -3.0).unwrap().value, 7.143, 5e-3);
    close(asymptote_a(Param::K2, -4.0).unwrap().value, 8.492, 5e-3);
    close(asymptote_a(Param::L1, 6.0).unwrap().value, -2.187, 5e-3);
    close(asymptote_b(Param::L1, 6.0, 5.0).unwrap().value, -2.494, 5e-3);
    close(asymptote_b(Param::L2, 6.0, 5.0).unwrap().value, -1.675, 5e-3);
    assert!(asymptote_b(Param::K1, 7.0, -3.0).unwrap().value < asymptote_a(Param::K1, -3.0).unwrap().value);
    // the type-a apex sits on the top edge and solves both defining equations
    let a = asymptote_a(Param::K1, -3.0).unwrap();
    let (k, r) = (a.value, a.level.0);
    close(v(k * r - 3.0).unwrap(), r, 1e-9);
    close(v(k * r / (k * (1.0 - r * r) - 1.0)).unwrap(), r, 1e-9);
    assert!(asymptote_a(Param::K1, 1.0).is_err());
}

#[test]
fn traced_sync_boundary_through_stated_pairs() {
    let slice = Slice { base: Coupling::new(0.0, 0.0, -4.0, 3.0), x: Param::K1, x_range: (4.0, 10.0), y: Param::K2, y_range: (-2.0, 4.0) };
    let curves = trace_boundary_2d(&slice, BoundaryKind::Sync, 200).unwrap();
    let pts: Vec<(f64, f64)> = curves.iter().flat_map(|c| c.points.iter().copied()).collect();
    for (k1, k2) in [(7.901, 3.0), (7.234, 0.5), (6.497, -0.5), (5.977, -1.0)] {
        // distance in k1 to the traced curve at the same k2
        let d = pts
            .windows(2)
            .filter(|w| (w[0].1 - k2) * (w[1].1 - k2) <= 0.0 && w[0].1 != w[1].1)
            .map(|w| {
                let t = (k2 - w[0].1) / (w[1].1 - w[0].1);
                (w[0].0 + t * (w[1].0 - w[0].0) - k1).abs()
            })
            .fold(f64::INFINITY, f64::min);
        assert!(d <= 2e-2, "({k1}, {k2}) is {d} away");
    }
    let pos = Slice { base: Coupling::new(0.0, 0.0, 1.0, 2.0), ..slice };
    assert!(trace_boundary_2d(&pos, BoundaryKind::Sync, 64).unwrap().is_empty());
}

#[test]
fn traced_sync_boundary_approaches_asymptotes() {
    let slice = Slice { base: Coupling::new(0.0, 0.0, -3.0, -4.0), x: Param::K1, x_range: (2.0, 30.0), y: Param::K2, y_range: (2.0, 30.0) };
    let curves = trace_boundary_2d(&slice, BoundaryKind::Sync, 200).unwrap();
    let pts: Vec<(f64, f64)> = curves.iter().flat_map(|c| c.points.iter().copied()).collect();
    let k1a = asymptote_a(Param::K1, -3.0).unwrap().value;
    let k2a = asymptote_a(Param::K2, -4.0).unwrap().value;
    // far up the slice the boundary runs close to the vertical asymptote, far right close to the horizontal one
    let high: Vec<f64> = pts.iter().filter(|p| p.1 > 25.0).map(|p| p.0).collect();
    let right: Vec<f64> = pts.iter().filter(|p| p.0 > 25.0).map(|p| p.1).collect();
    assert!(!high.is_empty() && !right.is_empty());
    assert!(high.iter().any(|&k1| (k1 - k1a).abs() < 0.3), "{high:?} vs {k1a}");
    assert!(right.iter().any(|&k2| (k2 - k2a).abs() < 0.3), "{right:?} vs {k2a}");
}

#[test]
fn region_examples() {
    assert_eq!(region(&Coupling::new(1.0, 1.0, -1.0, 3.0)).unwrap(), Region::R1);
    assert_eq!(region(&Coupling::new(3.0, 3.0, -2.0, -3.0)).unwrap().max_solutions(), 4);
    assert_eq!(region(&Coupling::new(2.0, 2.0, 1.0, 1.0)).unwrap(), Region::R2);
    let r = subclassify(&Coupling::new(1.0, 1.0, 3.0, 2.0)).unwrap();
    assert_eq!((r.exact_count, r.label.as_str()), (2, "1 unsync + 1 sync"));
    let r = subclassify(&Coupling::new(5.5, 6.5, -2.0, -3.0)).unwrap();
    assert_eq!((r.exact_count, r.label.as_str()), (4, "1 unsync + 3 sync"));
    let r = subclassify(&Coupling::new(3.0, -1.0, -2.0, 2.0)).unwrap();
    assert_eq!((r.exact_count, r.label.as_str()), (1, "1 unsync"));
    assert_eq!(bifurcation_types(Region::R3), vec![BifurcationType::Psync]);
}

#[test]
fn sweep_events() {
    let d = sweep_1d(&SweepSpec::new(Coupling::new(0.0, 6.5, -2.0, -3.0), Param::K1, (2.0, 8.0), 241)).unwrap();
    let find = |k: EventKind| d.events.iter().filter(move |e| e.kind == k);
    let zero: Vec<_> = find(EventKind::Zero).collect();
    assert_eq!(zero.len(), 1);
    close(zero[0].param_value, 10.0 / 3.0, 1e-9);
    let pu: Vec<_> = find(EventKind::Popup).collect();
    assert_eq!(pu.len(), 1);
    close(pu[0].param_value, 5.244, 5e-3);
    close(find(EventKind::Symmetric).next().unwrap().param_value, 5.5, 1e-12);
    let pd: Vec<_> = find(EventKind::Popdown).collect();
    assert_eq!(pd.len(), 1);
    // the pop-down level matches the stated one; its position is 5.9448
    close(pd[0].level.0, 0.846, 5e-3);
    close(pd[0].level.1, 0.721, 5e-3);
    close(pd[0].param_value, 5.9448, 1e-3);

    let d = sweep_1d(&SweepSpec::new(Coupling::new(0.0, -1.0, 4.0, 5.0), Param::K1, (-8.0, 4.0), 241)).unwrap();
    assert!(d.events.iter().any(|e| e.kind == EventKind::Zero && (e.param_value + 14.0 / 3.0).abs() < 1e-9));
    assert!(d.events.iter().any(|e| e.kind == EventKind::Symmetric && e.param_value == 0.0));
}

#[test]
fn sweep_branches_are_continuous() {
    let d = sweep_1d(&SweepSpec::new(Coupling::new(0.0, 6.5, -2.0, -3.0), Param::K1, (2.0, 8.0), 241)).unwrap();
    for b in &d.branches {
        for w in b.points.windows(3) {
            let pred = (2.0 * w[1].r1 - w[0].r1, 2.0 * w[1].r2 - w[0].r2);
            let secant = (w[1].r1 - w[0].r1).hypot(w[1].r2 - w[0].r2);
            let miss = (w[2].r1 - pred.0).hypot(w[2].r2 - pred.1);
            let jump = (w[2].r1 - w[1].r1).hypot(w[2].r2 - w[1].r2);
            assert!(jump <= 5.0 * secant.max(0.02) || miss <= 0.02, "branch {} jumps at {}", b.id, w[2].param);
        }
    }
}

#[test]
fn transect_of_the_negative_slice() {
    let slice = Slice { base: Coupling::new(0.0, 0.0, -2.0, -3.0), x: Param::K1, x_range: (2.0, 10.0), y: Param::K2, y_range: (2.0, 10.0) };
    let g = phase_diagram(&slice, 161, 65).unwrap();
    let j = g.ys.iter().position(|&y| (y - 6.5).abs() < 1e-9).expect("row at k2 = 6.5");
    let row: Vec<(f64, u8)> = (0..g.xs.len()).map(|i| (g.xs[i], g.count_at(i, j))).collect();
    let first = |pred: &dyn Fn(u8, u8) -> bool| {
        row.windows(2).find(|w| pred(w[0].1, w[1].1)).map(|w| 0.5 * (w[0].0 + w[1].0)).unwrap()
    };
    let step = g.xs[1] - g.xs[0];
    close(first(&|a, b| a == 1 && b == 2), 10.0 / 3.0, step);
    close(first(&|a, b| a == 2 && b == 4), 5.244, step);
    close(first(&|a, b| a == 4 && b == 2), 5.9448, step);
    let sym = g.overlays.iter().find(|o| o.kind == OverlayKind::Symmetric).unwrap();
    assert!(sym.dashed);
    assert!(sym.points.iter().all(|p| (p.0 - 2.0 - (p.1 - 3.0)).abs() < 1e-12));

    // below the starting point (2.97, 3.46) of this slice only the zero boundary remains
    let near = Slice { base: Coupling::new(0.0, 0.0, -0.5, -1.0), x: Param::K1, x_range: (2.1, 3.5), y: Param::K2, y_range: (2.1, 3.4) };
    let g = phase_diagram(&near, 64, 64).unwrap();
    for j in 0..g.ys.len() {
        for i in 0..g.xs.len() {
            let b0 = (g.xs[i] - 2.0) * (g.ys[j] - 2.0) - 0.5;
            if b0.abs() > 0.02 {
                assert_eq!(g.count_at(i, j), if b0 < 0.0 { 1 } else { 2 }, "at ({}, {})", g.xs[i], g.ys[j]);
            }
        }
    }
}

#[test]
fn brent_finds_bracketed_roots() {
    let r = brent(|x| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
    close(r, 2f64.sqrt(), 1e-14);
    assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
}
