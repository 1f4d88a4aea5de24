//! Scalar root finding: Brent's method, golden-section extremum search, and a
//! grid scanner that also resolves root pairs hiding inside one grid cell.

/// Brent's method on a sign-changing bracket. Returns `None` when `f(a)` and
/// `f(b)` have the same strict sign.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> Option<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return None;
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Some(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Some(b)
}

/// Golden-section search for the minimiser of `f` on `[a, b]`.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..100 {
        if (b - a).abs() <= 4.0 * f64::EPSILON * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// A root located by [`scan`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScannedRoot {
    pub x: f64,
    /// Double root: `f` touches zero without changing sign.
    pub tangent: bool,
}

/// Locate every root of `f` over the ordered `nodes`.
///
/// Sign changes between neighbours are bracketed and refined with Brent.
/// Interior local extrema that stay on one side of zero are refined with a
/// golden-section search; if the refined extremum crosses zero the two roots
/// on either side are recovered, and if it sits within `tangent_tol` of zero
/// it is reported as a tangent root. Non-finite samples split the scan.
pub fn scan<F: FnMut(f64) -> f64>(mut f: F, nodes: &[f64], tangent_tol: f64) -> Vec<ScannedRoot> {
    let vals: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
    let xtol = 1e-15;
    let mut out = Vec::new();
    let n = nodes.len();
    for i in 0..n {
        if vals[i] == 0.0 {
            out.push(ScannedRoot { x: nodes[i], tangent: false });
        }
        if i + 1 < n {
            let (fa, fb) = (vals[i], vals[i + 1]);
            if fa.is_finite() && fb.is_finite() && fa != 0.0 && fb != 0.0 && fa.signum() != fb.signum() {
                if let Some(x) = brent(&mut f, nodes[i], nodes[i + 1], xtol) {
                    out.push(ScannedRoot { x, tangent: false });
                }
            }
        }
        if i == 0 || i + 1 >= n {
            continue;
        }
        let (l, m, r) = (vals[i - 1], vals[i], vals[i + 1]);
        if !(l.is_finite() && m.is_finite() && r.is_finite()) || m == 0.0 {
            continue;
        }
        let s = m.signum();
        if l.signum() != s || r.signum() != s {
            continue;
        }
        // |f| dips at node i: a candidate for a hidden pair or a touch
        if !(s * m < s * l && s * m <= s * r) {
            continue;
        }
        let (xm, fm) = golden_min(|x| s * f(x), nodes[i - 1], nodes[i + 1]);
        let fm = s * fm;
        if fm.signum() != s && fm != 0.0 {
            if let Some(x) = brent(&mut f, nodes[i - 1], xm, xtol) {
                out.push(ScannedRoot { x, tangent: false });
            }
            if let Some(x) = brent(&mut f, xm, nodes[i + 1], xtol) {
                out.push(ScannedRoot { x, tangent: false });
            }
        } else if fm.abs() <= tangent_tol {
            out.push(ScannedRoot { x: xm, tangent: true });
        }
    }
    out.sort_by(|a, b| a.x.total_cmp(&b.x));
    out.dedup_by(|b, a| {
        if (a.x - b.x).abs() <= 1e-12 * a.x.abs().max(1.0) {
            a.tangent &= b.tangent;
            true
        } else {
            false
        }
    });
    out
}

/// `count` evenly spaced nodes on `[a, b]`, both ends included.
pub fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![a];
    }
    let step = (b - a) / (count - 1) as f64;
    (0..count)
        .map(|i| if i + 1 == count { b } else { a + step * i as f64 })
        .collect()
}
