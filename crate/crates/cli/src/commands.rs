//! One function per subcommand, each a thin wrapper around a library call.

use serde_json::{json, Value};

use kuramoto2c::boundaries::{
    asymptote_a, asymptote_b, solve_boundary_set_with, starting_point, starting_point_external, BoundaryOptions, Slice,
};
use kuramoto2c::classify::subclassify;
use kuramoto2c::model::solve_all;
use kuramoto2c::simulate::{simulate_replicas, SimConfig};
use kuramoto2c::sweep::{phase_diagram, sweep_1d, SweepSpec};
use kuramoto2c::{Coupling, Param};

use crate::args::*;
use crate::output::{emit, num, Report, Table};
use crate::{svg, CliError};

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let (report, output) = match &cli.command {
        Command::Solve(a) => (solve(a)?, &a.output),
        Command::Classify(a) => (classify(a)?, &a.output),
        Command::Boundary(a) => (boundary(a)?, &a.output),
        Command::Asymptote(a) => (asymptote(a)?, &a.output),
        Command::StartingPoint(a) => (start(a)?, &a.output),
        Command::Sweep1d(a) => (sweep(a)?, &a.output),
        Command::Phase2d(a) => (phase(a)?, &a.output),
        Command::Simulate(a) => (simulation(a)?, &a.output),
    };
    let name = cli.command.name();
    // externally tagged: {"<name>": {..parameters..}}
    let params = match serde_json::to_value(&cli.command)? {
        Value::Object(mut m) => m.remove(name).unwrap_or(Value::Null),
        other => other,
    };
    emit(name, params, output, report)
}

fn level_table(header: &[&'static str], rows: impl IntoIterator<Item = (f64, (f64, f64))>) -> Table {
    let mut t = Table::new(header);
    for (v, (r1, r2)) in rows {
        t.push(vec![num(v), num(r1), num(r2)]);
    }
    t
}

fn solve(a: &SolveArgs) -> Result<Report, CliError> {
    let c = a.strengths.coupling()?;
    let sols = solve_all(&c, a.psi)?;
    let mut t = Table::new(&["r1", "r2", "tangent"]);
    for s in &sols {
        t.push(vec![num(s.r1), num(s.r2), s.tangent.to_string()]);
    }
    Ok(Report {
        json: json!({ "coupling": c, "psi": a.psi, "count": sols.len(), "solutions": sols }),
        table: Some(t),
        ..Report::default()
    })
}

fn classify(a: &CouplingOnly) -> Result<Report, CliError> {
    let rep = subclassify(&a.strengths.coupling()?)?;
    let mut t = Table::new(&["region", "max_solutions", "count", "label", "degenerate"]);
    t.push(vec![
        rep.region.to_string(),
        rep.max_solutions.to_string(),
        rep.exact_count.to_string(),
        rep.label.clone(),
        rep.degenerate.to_string(),
    ]);
    Ok(Report {
        json: json!({
            "region": rep.region,
            "count": rep.exact_count,
            "label": rep.label,
            "max_solutions": rep.max_solutions,
            "bifurcation_types": rep.bifurcation_types,
            "degenerate": rep.degenerate,
        }),
        table: Some(t),
        ..Report::default()
    })
}

fn boundary(a: &BoundaryArgs) -> Result<Report, CliError> {
    let mut fixed = Coupling::new(0.0, 0.0, 0.0, 0.0);
    let mut seen = Vec::new();
    for &(p, v) in &a.fix {
        if p == a.solve || seen.contains(&p) {
            return Err(CliError::Usage(format!("--fix sets {p} twice or together with --solve")));
        }
        seen.push(p);
        fixed.set(p, v);
    }
    if let Some(p) = Param::ALL.into_iter().find(|p| *p != a.solve && !seen.contains(p)) {
        return Err(CliError::Usage(format!("--fix must give {p}")));
    }
    let set = solve_boundary_set_with(&fixed, a.solve, &BoundaryOptions { search_box: a.search_box })?;
    let t = level_table(&["value", "r1", "r2"], set.values.iter().copied().zip(set.levels.iter().copied()));
    Ok(Report { json: serde_json::to_value(&set)?, table: Some(t), ..Report::default() })
}

fn asymptote(a: &AsymptoteArgs) -> Result<Report, CliError> {
    let s = &a.strengths;
    let found = match a.kind {
        AsymptoteType::A => {
            // the other strength of the same community
            let partner = match a.which {
                Param::K1 => Param::L1,
                Param::K2 => Param::L2,
                Param::L1 => Param::K1,
                Param::L2 => Param::K2,
            };
            asymptote_a(a.which, s.require(partner)?)?
        }
        AsymptoteType::B => {
            let (first, second) = match a.which {
                Param::K1 => (Param::K2, Param::L1),
                Param::K2 => (Param::K1, Param::L2),
                Param::L1 | Param::L2 => (Param::K1, Param::K2),
            };
            asymptote_b(a.which, s.require(first)?, s.require(second)?)?
        }
    };
    let t = level_table(&["value", "r1", "r2"], [(found.value, found.level)]);
    Ok(Report { json: serde_json::to_value(found)?, table: Some(t), ..Report::default() })
}

fn start(a: &CouplingOnly) -> Result<Report, CliError> {
    let s = &a.strengths;
    let sp = match (s.k1, s.k2, s.l1, s.l2) {
        (None, None, Some(l1), Some(l2)) => starting_point(l1, l2)?,
        (Some(k1), Some(k2), None, None) => starting_point_external(k1, k2)?,
        _ => return Err(CliError::Usage("give either --l1 and --l2, or --k1 and --k2".into())),
    };
    let mut t = Table::new(&["p1", "p2", "r1", "r2"]);
    t.push(vec![num(sp.values.0), num(sp.values.1), num(sp.level.0), num(sp.level.1)]);
    Ok(Report { json: serde_json::to_value(sp)?, table: Some(t), ..Report::default() })
}

fn sweep(a: &SweepArgs) -> Result<Report, CliError> {
    let base = a.strengths.coupling_except(&[a.vary])?;
    let spec = SweepSpec { psi: a.psi, ..SweepSpec::new(base, a.vary, a.range, a.steps) };
    let d = sweep_1d(&spec)?;
    let mut branches = Table::new(&["param", "branch_id", "r1", "r2"]);
    for b in &d.branches {
        for p in &b.points {
            branches.push(vec![num(p.param), b.id.to_string(), num(p.r1), num(p.r2)]);
        }
    }
    let mut events = Table::new(&["kind", "param_value", "r1", "r2"]);
    for e in &d.events {
        events.push(vec![e.kind.name().into(), num(e.param_value), num(e.level.0), num(e.level.1)]);
    }
    Ok(Report {
        json: serde_json::to_value(&d)?,
        table: Some(branches),
        side_tables: vec![("events", events)],
        svg: Some(svg::bifurcation(&d)),
    })
}

fn phase(a: &PhaseArgs) -> Result<Report, CliError> {
    let (x, y) = a.vary;
    let slice = Slice {
        base: a.strengths.coupling_except(&[x, y])?,
        x,
        x_range: a.range.0,
        y,
        y_range: a.range.1,
    };
    let g = phase_diagram(&slice, a.grid.0, a.grid.1)?;
    let mut t = Table::new(&["p1", "p2", "count"]);
    for (j, &py) in g.ys.iter().enumerate() {
        for (i, &px) in g.xs.iter().enumerate() {
            t.push(vec![num(px), num(py), g.count_at(i, j).to_string()]);
        }
    }
    Ok(Report { json: serde_json::to_value(&g)?, table: Some(t), svg: Some(svg::phase_diagram(&g)), ..Report::default() })
}

fn simulation(a: &SimulateArgs) -> Result<Report, CliError> {
    if a.replicas == 0 {
        return Err(CliError::Usage("--replicas must be at least 1".into()));
    }
    let cfg = SimConfig {
        coupling: a.strengths.coupling()?,
        n: a.n,
        dt: a.dt,
        t_end: a.t_end,
        burn_in: a.burn_in,
        seed: a.seed,
        init: a.init.into(),
        stride: a.stride,
    };
    let traces = simulate_replicas(&cfg, a.replicas)?;
    let mut t = Table::new(&["replica", "t", "r1", "r2", "psi1", "psi2"]);
    let mut runs = Vec::with_capacity(traces.len());
    for (k, tr) in traces.iter().enumerate() {
        for i in 0..tr.len() {
            t.push(vec![
                k.to_string(),
                num(tr.times[i]),
                num(tr.r1[i]),
                num(tr.r2[i]),
                num(tr.psi1[i]),
                num(tr.psi2[i]),
            ]);
        }
        runs.push(json!({ "replica": k, "stationary": tr.stationary(cfg.burn_in)?, "trace": tr }));
    }
    Ok(Report {
        json: json!({ "config": cfg, "replicas": runs }),
        table: Some(t),
        svg: Some(svg::traces(&traces)),
        ..Report::default()
    })
}
