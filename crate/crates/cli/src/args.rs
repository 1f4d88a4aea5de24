use clap::{Args, Parser, Subcommand, ValueEnum};
use kuramoto2c::simulate::Init;
use kuramoto2c::{Coupling, Param, Psi};
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Parser, Serialize)]
#[command(name = "kuramoto2c", version, about = "Stationary states, bifurcation boundaries and simulation of two coupled communities of noisy phase oscillators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Every stationary state of one coupling.
    Solve(SolveArgs),
    /// Region, maximum and exact number of stationary states.
    Classify(CouplingOnly),
    /// Critical values of one strength with the other three fixed.
    Boundary(BoundaryArgs),
    /// Type-a or type-b asymptote of a boundary function.
    Asymptote(AsymptoteArgs),
    /// Merge point of a two-element boundary set.
    StartingPoint(CouplingOnly),
    /// Bifurcation diagram along one strength.
    Sweep1d(SweepArgs),
    /// Solution counts over a two-strength slice.
    Phase2d(PhaseArgs),
    /// Finite-size stochastic simulation.
    Simulate(SimulateArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve(_) => "solve",
            Command::Classify(_) => "classify",
            Command::Boundary(_) => "boundary",
            Command::Asymptote(_) => "asymptote",
            Command::StartingPoint(_) => "starting-point",
            Command::Sweep1d(_) => "sweep1d",
            Command::Phase2d(_) => "phase2d",
            Command::Simulate(_) => "simulate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Strengths {
    #[arg(long, allow_hyphen_values = true)]
    pub k1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub k2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub l1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub l2: Option<f64>,
}

impl Strengths {
    pub fn get(&self, p: Param) -> Option<f64> {
        match p {
            Param::K1 => self.k1,
            Param::K2 => self.k2,
            Param::L1 => self.l1,
            Param::L2 => self.l2,
        }
    }

    /// A value for `p`, which must have been given.
    pub fn require(&self, p: Param) -> Result<f64, CliError> {
        self.get(p).ok_or_else(|| CliError::Usage(format!("missing --{p}")))
    }

    /// All four strengths except those in `free`, which default to 0.
    pub fn coupling_except(&self, free: &[Param]) -> Result<Coupling, CliError> {
        let mut c = Coupling::new(0.0, 0.0, 0.0, 0.0);
        for p in Param::ALL {
            if !free.contains(&p) {
                c.set(p, self.require(p)?);
            }
        }
        Ok(c)
    }

    pub fn coupling(&self) -> Result<Coupling, CliError> {
        self.coupling_except(&[])
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Output file; standard output if omitted.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CouplingOnly {
    #[command(flatten)]
    #[serde(flatten)]
    pub strengths: Strengths,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub strengths: Strengths,
    /// Phase difference branch: 0 or pi.
    #[arg(long, default_value = "0", value_parser = parse_psi)]
    pub psi: Psi,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BoundaryArgs {
    /// Fixed strengths, e.g. `k2=2.5,l1=-2,l2=1`.
    #[arg(long, value_parser = parse_fixed, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub fix: Vec<(Param, f64)>,
    /// The unknown strength.
    #[arg(long, value_parser = parse_param)]
    pub solve: Param,
    /// Search interval for the unknown, `lo:hi`.
    #[arg(long = "box", value_parser = parse_range, allow_hyphen_values = true, default_value = "-50:50")]
    pub search_box: (f64, f64),
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AsymptoteType {
    A,
    B,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AsymptoteArgs {
    #[arg(long, value_enum)]
    pub kind: AsymptoteType,
    /// Strength whose asymptote is sought.
    #[arg(long, value_parser = parse_param)]
    pub which: Param,
    #[command(flatten)]
    #[serde(flatten)]
    pub strengths: Strengths,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub strengths: Strengths,
    #[arg(long, value_parser = parse_param)]
    pub vary: Param,
    /// `lo:hi`
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub range: (f64, f64),
    #[arg(long, default_value_t = 241)]
    pub steps: usize,
    #[arg(long, default_value = "0", value_parser = parse_psi)]
    pub psi: Psi,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PhaseArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub strengths: Strengths,
    /// Two strengths, e.g. `k1,k2`; the first runs along x.
    #[arg(long, value_parser = parse_param_pair)]
    pub vary: (Param, Param),
    /// `lo:hi,lo:hi`
    #[arg(long, value_parser = parse_range_pair, allow_hyphen_values = true)]
    pub range: ((f64, f64), (f64, f64)),
    /// `WxH` cells.
    #[arg(long, value_parser = parse_grid, default_value = "200x200")]
    pub grid: (usize, usize),
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitArg {
    Uniform,
    Delta,
    TwoDelta,
}

impl From<InitArg> for Init {
    fn from(i: InitArg) -> Self {
        match i {
            InitArg::Uniform => Init::Uniform,
            InitArg::Delta => Init::DeltaAtZero,
            InitArg::TwoDelta => Init::TwoDelta,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub strengths: Strengths,
    /// Oscillators per community.
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, default_value_t = 200.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 100.0)]
    pub burn_in: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = InitArg::Uniform)]
    pub init: InitArg,
    /// Record every this many steps.
    #[arg(long, default_value_t = 10)]
    pub stride: usize,
    #[arg(long, default_value_t = 1)]
    pub replicas: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

fn parse_param(s: &str) -> Result<Param, String> {
    s.parse().map_err(|e: kuramoto2c::Error| e.to_string())
}

fn parse_psi(s: &str) -> Result<Psi, String> {
    s.parse().map_err(|e: kuramoto2c::Error| e.to_string())
}

fn parse_number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() { Ok(v) } else { Err(format!("`{s}` is not finite")) }
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got `{s}`"))?;
    Ok((parse_number(a)?, parse_number(b)?))
}

fn parse_range_pair(s: &str) -> Result<((f64, f64), (f64, f64)), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected lo:hi,lo:hi, got `{s}`"))?;
    Ok((parse_range(a)?, parse_range(b)?))
}

fn parse_param_pair(s: &str) -> Result<(Param, Param), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected two strengths like k1,k2, got `{s}`"))?;
    Ok((parse_param(a)?, parse_param(b)?))
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected WxH, got `{s}`"))?;
    let n = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("`{t}` is not a cell count"));
    Ok((n(w)?, n(h)?))
}

fn parse_fixed(s: &str) -> Result<(Param, f64), String> {
    let (p, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    Ok((parse_param(p)?, parse_number(v)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_parsers() {
        assert_eq!(parse_range("-8:4.5").unwrap(), (-8.0, 4.5));
        assert!(parse_range("1,2").is_err());
        assert_eq!(parse_grid("64x32").unwrap(), (64, 32));
        assert_eq!(parse_fixed("l1=-2").unwrap(), (Param::L1, -2.0));
        assert!(parse_fixed("q=1").is_err());
        assert_eq!(parse_param_pair("k1,l2").unwrap(), (Param::K1, Param::L2));
        assert!(parse_number("inf").is_err());
    }

    #[test]
    fn negative_numbers_and_fixed_lists() {
        let cli = Cli::try_parse_from(["kuramoto2c", "boundary", "--fix", "k2=2.5,l1=-2,l2=1", "--solve", "k1"]);
        let Command::Boundary(b) = cli.unwrap().command else { panic!() };
        assert_eq!(b.fix, vec![(Param::K2, 2.5), (Param::L1, -2.0), (Param::L2, 1.0)]);
        let cli = Cli::try_parse_from(["kuramoto2c", "solve", "--k1", "-1", "--k2", "2", "--l1", "-3.5", "--l2", "1"]);
        let Command::Solve(s) = cli.unwrap().command else { panic!() };
        assert_eq!(s.strengths.coupling().unwrap(), Coupling::new(-1.0, 2.0, -3.5, 1.0));
    }
}
