use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use horocycle_core::{GridSpec, Sign, SystemKind, TangencyPoint};

#[derive(Debug, Parser)]
#[command(name = "horocycle", version, about = "Magnetic and geodesic flows on the hyperbolic half-plane")]
pub struct Cli {
    /// Defaults file with `key = value` lines (dt, grid, tolerances, workers).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one trajectory and write it as CSV.
    Simulate(SimulateArgs),
    /// Check a Hamilton-Jacobi candidate and write a JSON report.
    Verify(VerifyArgs),
    /// Measure return times of subcritical magnetic orbits.
    Period(PeriodArgs),
    /// Bound the Mañé critical value from above and below.
    Mane(ManeArgs),
    /// Sample an invariant graph over a grid as CSV.
    Foliation(FoliationArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BundleArg {
    Tangent,
    Cotangent,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_parser = parse_system)]
    pub system: SystemKind,
    #[arg(long, value_enum, default_value = "tangent")]
    pub bundle: BundleArg,
    /// Initial position `x,y`.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub q0: (f64, f64),
    /// Initial velocity `vx,vy` (tangent bundle).
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub v0: Option<(f64, f64)>,
    /// Initial momentum `px,py` (cotangent bundle).
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub p0: Option<(f64, f64)>,
    /// Duration.
    #[arg(long = "T", value_name = "T")]
    pub duration: f64,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CandidateFamily {
    Arctan,
    Constant,
    LogVertical,
    LogEndpoint,
    Arcsinh,
    /// The non-solution `u(x, y) = x`.
    AdhocX,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Defaults to the system the family solves.
    #[arg(long, value_parser = parse_system)]
    pub system: Option<SystemKind>,
    #[arg(long, value_enum)]
    pub family: CandidateFamily,
    /// Tangency point or endpoint, a real number or `inf`.
    #[arg(long, value_parser = parse_tangency, allow_hyphen_values = true)]
    pub a: Option<TangencyPoint>,
    #[arg(long, value_parser = parse_sign, allow_hyphen_values = true, default_value = "+")]
    pub sign: Sign,
    /// Additive constant.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub c: f64,
    /// `x_min,x_max,nx,y_min,y_max,ny`.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    pub grid: Option<GridSpec>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PeriodArgs {
    /// Energy level, strictly between 0 and ½.
    #[arg(long)]
    pub k: f64,
    #[arg(long, default_value_t = 5)]
    pub samples: usize,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ManeCandidate {
    Arctan,
    Constant,
    AdhocX,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurveFamilyArg {
    Hyperbolic,
    HyperbolicRefined,
    Euclidean,
}

#[derive(Debug, Args)]
pub struct ManeArgs {
    #[arg(long, value_enum, default_value = "arctan")]
    pub candidate: ManeCandidate,
    #[arg(long, value_parser = parse_tangency, allow_hyphen_values = true, default_value = "0")]
    pub a: TangencyPoint,
    #[arg(long, value_enum, default_value = "hyperbolic")]
    pub curves: CurveFamilyArg,
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    pub grid: Option<GridSpec>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FoliationKind {
    Horocycle,
    GeodesicEndpoint,
    GeodesicCenter,
}

#[derive(Debug, Args)]
pub struct FoliationArgs {
    #[arg(long, value_enum)]
    pub kind: FoliationKind,
    #[arg(long, value_parser = parse_tangency, allow_hyphen_values = true)]
    pub a: TangencyPoint,
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    pub grid: Option<GridSpec>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

fn parse_system(s: &str) -> Result<SystemKind, String> {
    s.parse()
}

fn parse_sign(s: &str) -> Result<Sign, String> {
    s.parse()
}

fn parse_tangency(s: &str) -> Result<TangencyPoint, String> {
    s.parse::<TangencyPoint>().map_err(|e| e.to_string())
}

fn parse_floats(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got `{s}`"));
    }
    parts
        .iter()
        .map(|p| p.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| format!("`{p}` is not a finite number")))
        .collect()
}

pub fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let v = parse_floats(s, 2)?;
    Ok((v[0], v[1]))
}

pub fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let v = parse_floats(s, 6)?;
    let count = |f: f64| {
        if f >= 1.0 && f.fract() == 0.0 {
            Ok(f as usize)
        } else {
            Err(format!("grid point count `{f}` must be a positive integer"))
        }
    };
    GridSpec::new(v[0], v[1], count(v[2])?, v[3], v[4], count(v[5])?).map_err(|e| e.to_string())
}
