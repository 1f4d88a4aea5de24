//! Hand-written SVG 1.1 for phase diagrams, bifurcation diagrams and
//! order-parameter traces.

use std::fmt::Write;

use kuramoto2c::simulate::OrderTrace;
use kuramoto2c::sweep::{count_color, BifurcationDiagram, EventKind, OverlayKind, PhaseDiagramGrid};

const MARGIN: f64 = 56.0;
const PANEL: f64 = 420.0;
const TICKS: usize = 5;

/// Maps a data rectangle onto a square panel whose top-left corner is at `origin`.
struct Frame {
    origin: (f64, f64),
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        self.origin.0 + (x - self.x.0) / (self.x.1 - self.x.0) * PANEL
    }

    fn py(&self, y: f64) -> f64 {
        self.origin.1 + PANEL - (y - self.y.0) / (self.y.1 - self.y.0) * PANEL
    }

    fn points<'a>(&self, pts: impl IntoIterator<Item = &'a (f64, f64)>) -> String {
        let mut s = String::new();
        for &(x, y) in pts {
            let _ = write!(s, "{:.2},{:.2} ", self.px(x), self.py(y));
        }
        s.trim_end().to_string()
    }

    fn axes(&self, s: &mut String, id: &str, xlabel: &str, ylabel: &str) {
        let (ox, oy) = self.origin;
        let _ = writeln!(
            s,
            r#"<clipPath id="{id}"><rect x="{ox}" y="{oy}" width="{PANEL}" height="{PANEL}"/></clipPath>"#
        );
        let _ = writeln!(s, r#"<rect x="{ox}" y="{oy}" width="{PANEL}" height="{PANEL}" fill="none" stroke="black"/>"#);
        for i in 0..=TICKS {
            let t = i as f64 / TICKS as f64;
            let (vx, vy) = (self.x.0 + t * (self.x.1 - self.x.0), self.y.0 + t * (self.y.1 - self.y.0));
            let (x, y) = (self.px(vx), self.py(vy));
            let bottom = oy + PANEL;
            let _ = writeln!(
                s,
                r#"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
                bottom + 5.0,
                bottom + 18.0,
                tick(vx)
            );
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{y:.2}" x2="{ox}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"#,
                ox - 5.0,
                ox - 8.0,
                y + 4.0,
                tick(vy)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">{xlabel}</text>"#,
            ox + PANEL / 2.0,
            oy + PANEL + 38.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{ylabel}</text>"#,
            ox - 40.0,
            oy + PANEL / 2.0,
            ox - 40.0,
            oy + PANEL / 2.0
        );
    }
}

fn tick(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn document(width: f64, height: f64, body: &str) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n"
    )
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) }
}

/// Filled cells coloured by solution count with the boundaries drawn on
/// top; the symmetric line is dashed.
pub fn phase_diagram(g: &PhaseDiagramGrid) -> String {
    let f = Frame { origin: (MARGIN + 10.0, 20.0), x: g.slice.x_range, y: g.slice.y_range };
    let mut s = String::new();
    let half = |v: &[f64]| if v.len() > 1 { 0.5 * (v[1] - v[0]) } else { 0.0 };
    let (hx, hy) = (half(&g.xs), half(&g.ys));
    let _ = writeln!(s, r#"<g clip-path="url(#plot)" shape-rendering="crispEdges">"#);
    for (j, &y) in g.ys.iter().enumerate() {
        for (i, &x) in g.xs.iter().enumerate() {
            let (x0, x1) = (f.px(x - hx), f.px(x + hx));
            let (y0, y1) = (f.py(y + hy), f.py(y - hy));
            let _ = writeln!(
                s,
                r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                x1 - x0,
                y1 - y0,
                count_color(g.count_at(i, j))
            );
        }
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g clip-path="url(#plot)" fill="none">"#);
    for o in &g.overlays {
        if o.points.len() < 2 {
            continue;
        }
        let width = if o.kind == OverlayKind::Symmetric { 1.5 } else { 2.0 };
        let dash = if o.dashed { r#" stroke-dasharray="8,5""# } else { "" };
        let _ = writeln!(
            s,
            r#"<polyline class="{}" points="{}" stroke="black" stroke-width="{width}"{dash}/>"#,
            format!("{:?}", o.kind).to_lowercase(),
            f.points(&o.points)
        );
    }
    let _ = writeln!(s, "</g>");
    f.axes(&mut s, "plot", g.slice.x.name(), g.slice.y.name());
    document(PANEL + MARGIN + 30.0, PANEL + MARGIN + 10.0, &s)
}

/// Two panels, `r1` and `r2` against the varied strength, with events marked.
pub fn bifurcation(d: &BifurcationDiagram) -> String {
    let x = padded(d.spec.range.0, d.spec.range.1);
    let left = Frame { origin: (MARGIN + 10.0, 20.0), x, y: (0.0, 1.0) };
    let right = Frame { origin: (2.0 * (MARGIN + 10.0) + PANEL, 20.0), x, y: (0.0, 1.0) };
    let mut s = String::new();
    for (k, f) in [&left, &right].into_iter().enumerate() {
        let clip = format!("panel{k}");
        let _ = writeln!(s, r#"<g clip-path="url(#{clip})" fill="none" stroke="black" stroke-width="1.5">"#);
        for b in &d.branches {
            let pts: Vec<(f64, f64)> =
                b.points.iter().map(|p| (p.param, if k == 0 { p.r1 } else { p.r2 })).collect();
            if pts.len() > 1 {
                let _ = writeln!(s, r#"<polyline points="{}"/>"#, f.points(&pts));
            }
        }
        let _ = writeln!(s, "</g>");
        for e in &d.events {
            let level = if k == 0 { e.level.0 } else { e.level.1 };
            let color = match e.kind {
                EventKind::Zero => "red",
                EventKind::Popup => "blue",
                EventKind::Popdown => "green",
                EventKind::Symmetric => "gray",
            };
            let _ = writeln!(
                s,
                r#"<circle class="{}" cx="{:.2}" cy="{:.2}" r="4" fill="{color}"/>"#,
                e.kind.name(),
                f.px(e.param_value),
                f.py(level)
            );
        }
        f.axes(&mut s, &clip, d.spec.varied.name(), if k == 0 { "r1" } else { "r2" });
    }
    document(2.0 * (PANEL + MARGIN + 10.0) + 20.0, PANEL + MARGIN + 10.0, &s)
}

/// `r1` (solid) and `r2` (dashed) over time, one pair per replica.
pub fn traces(ts: &[OrderTrace]) -> String {
    let t_end = ts.iter().filter_map(|t| t.times.last().copied()).fold(0.0, f64::max);
    let f = Frame { origin: (MARGIN + 10.0, 20.0), x: padded(0.0, t_end), y: (0.0, 1.0) };
    let mut s = String::new();
    let _ = writeln!(s, r#"<g clip-path="url(#plot)" fill="none" stroke-width="1">"#);
    for t in ts {
        for (r, dash) in [(&t.r1, ""), (&t.r2, r#" stroke-dasharray="5,3""#)] {
            let pts: Vec<(f64, f64)> = t.times.iter().copied().zip(r.iter().copied()).collect();
            let _ = writeln!(s, r#"<polyline points="{}" stroke="black"{dash}/>"#, f.points(&pts));
        }
    }
    let _ = writeln!(s, "</g>");
    f.axes(&mut s, "plot", "t", "r");
    document(PANEL + MARGIN + 30.0, PANEL + MARGIN + 10.0, &s)
}
