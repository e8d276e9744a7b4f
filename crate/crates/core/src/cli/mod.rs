//! The `qdelta` command line.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid arguments,
//! 3 numerical or verification failure.

mod output;
mod svg;
pub mod verify;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::oracle::{matching_solver, MatchingMode};
use crate::qalg::ComplexNum;
use crate::scatter::{self, beta_of_energy, energy_grid, DeltaPotential, ScatteringResult};
use crate::singular::{scan_region, ss_closed_form};

pub const THREADS_ENV: &str = "QDELTA_THREADS";

#[derive(Debug, Parser)]
#[command(name = "qdelta", version, about = "Spectral singularities of a quaternionic delta potential")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate R and T over an energy grid.
    Sweep(SweepArgs),
    /// Closed-form singular branches for a (v1, v2) pair.
    #[command(name = "ss")]
    SsFind(SsArgs),
    /// Classify a grid of (v1, v2) pairs.
    Scan(ScanArgs),
    /// Run the built-in verification suite.
    Verify(VerifyArgs),
    /// Render R and T curves as SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    /// Closed-form amplitudes.
    Paper,
    /// Matching solver on the literal real-quaternion potential.
    Physical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchChoice {
    Plus,
    Minus,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct PairArgs {
    /// Real part of V1.
    #[arg(long, allow_negative_numbers = true)]
    pub v1: f64,
    /// Imaginary part of V1.
    #[arg(long, allow_negative_numbers = true)]
    pub v2: f64,
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("strength").args(["g2", "cap_v2", "cap_v3"]).multiple(true)))]
pub struct StrengthArgs {
    /// g² = V2² + V3²; implies V2 = √g², V3 = 0.
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["cap_v2", "cap_v3"])]
    pub g2: Option<f64>,
    /// j-component strength.
    #[arg(long = "V2", allow_negative_numbers = true)]
    pub cap_v2: Option<f64>,
    /// k-component strength.
    #[arg(long = "V3", allow_negative_numbers = true)]
    pub cap_v3: Option<f64>,
}

impl StrengthArgs {
    fn potential(&self, pair: &PairArgs) -> Result<DeltaPotential, CliError> {
        let p = match self.g2 {
            Some(g2) => DeltaPotential::with_g_squared(pair.v1, pair.v2, g2)?,
            None => DeltaPotential::new(pair.v1, pair.v2, self.cap_v2.unwrap_or(0.0), self.cap_v3.unwrap_or(0.0))?,
        };
        Ok(p)
    }
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub emin: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub emax: f64,
    /// Number of energies, endpoints included.
    #[arg(long)]
    pub steps: usize,
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("strength_required").args(["g2", "cap_v2", "cap_v3"]).required(true).multiple(true)))]
pub struct SweepArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[command(flatten)]
    pub strength: StrengthArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value_t = Model::Paper)]
    pub model: Model,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SsArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Emit the JSON report instead of text.
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[arg(long = "v1-min", allow_negative_numbers = true)]
    pub v1_min: f64,
    #[arg(long = "v1-max", allow_negative_numbers = true)]
    pub v1_max: f64,
    #[arg(long = "v2-min", allow_negative_numbers = true)]
    pub v2_min: f64,
    #[arg(long = "v2-max", allow_negative_numbers = true)]
    pub v2_max: f64,
    #[arg(long)]
    pub n1: usize,
    #[arg(long)]
    pub n2: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Random draws per randomized suite.
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[command(flatten)]
    pub strength: StrengthArgs,
    /// Plot the singular configuration(s) of the chosen branch instead of
    /// the given strength.
    #[arg(long, value_enum, conflicts_with = "strength")]
    pub branch: Option<BranchChoice>,
    #[arg(long, default_value_t = 0.05, allow_negative_numbers = true)]
    pub emin: f64,
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    pub emax: f64,
    #[arg(long, default_value_t = 4000)]
    pub steps: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(io::Error),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "invalid arguments: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Numerical(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(m) => CliError::Usage(m),
            Error::Numerical(m) => CliError::Numerical(m),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Parses `args` and runs the selected command.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match configure_threads().and_then(|_| run(&cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qdelta: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    // a pool may already exist when embedded; the cap is best effort then
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn run(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Sweep(a) => run_sweep(a),
        Command::SsFind(a) => run_ssfind(a),
        Command::Scan(a) => run_scan(a),
        Command::Verify(a) => run_verify(a),
        Command::Plot(a) => run_plot(a),
    }
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Sweep rows for either model. The physical model reports `D` as
/// `-i · det` of the matching system, which has the same modulus.
pub fn sweep_rows(p: &DeltaPotential, grid: &GridArgs, model: Model) -> Result<Vec<ScatteringResult>, CliError> {
    use rayon::prelude::*;
    let energies = energy_grid(grid.emin, grid.emax, grid.steps)?;
    let rows: Result<Vec<_>, Error> = match model {
        Model::Paper => energies.into_par_iter().map(|e| scatter::amplitudes(p, e)).collect(),
        Model::Physical => energies
            .into_par_iter()
            .map(|e| {
                let m = matching_solver(p, e, MatchingMode::Conjugate)?;
                let (big_r, big_t) = match (m.r, m.t) {
                    (Some(r), Some(t)) => (r.norm_sqr(), t.norm_sqr()),
                    _ => (f64::INFINITY, f64::INFINITY),
                };
                Ok(ScatteringResult {
                    energy: e,
                    beta: beta_of_energy(e)?,
                    r: m.r,
                    t: m.t,
                    big_r,
                    big_t,
                    d_value: -ComplexNum::i() * m.determinant,
                    at_singularity: m.singular_system,
                })
            })
            .collect(),
    };
    Ok(rows?)
}

pub fn run_sweep(a: &SweepArgs) -> Result<(), CliError> {
    let p = a.strength.potential(&a.pair)?;
    let rows = sweep_rows(&p, &a.grid, a.model)?;
    let mut out = open_output(&a.out)?;
    match a.format {
        Format::Csv => output::write_sweep_csv(&mut out, &rows)?,
        Format::Json => output::write_sweep_json(&mut out, &rows)?,
    }
    out.flush()?;
    Ok(())
}

pub fn run_ssfind(a: &SsArgs) -> Result<(), CliError> {
    let report = output::SsReport::build(a.pair.v1, a.pair.v2)?;
    let mut out = open_output(&a.out)?;
    if a.json {
        serde_json::to_writer_pretty(&mut out, &report).map_err(|e| CliError::Io(e.into()))?;
        writeln!(out)?;
    } else {
        report.write_text(&mut out)?;
    }
    out.flush()?;
    Ok(())
}

pub fn run_scan(a: &ScanArgs) -> Result<(), CliError> {
    let rows = scan_region((a.v1_min, a.v1_max), (a.v2_min, a.v2_max), a.n1, a.n2)?;
    let mut out = open_output(&a.out)?;
    output::write_scan_csv(&mut out, &rows)?;
    out.flush()?;
    Ok(())
}

pub fn run_verify(a: &VerifyArgs) -> Result<(), CliError> {
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let report = verify::run_suite(a.seed, a.trials);
    let mut out = open_output(&a.out)?;
    out.write_all(report.render().as_bytes())?;
    out.flush()?;
    if report.all_passed() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!("{} verification check(s) failed", report.failures())))
    }
}

pub fn run_plot(a: &PlotArgs) -> Result<(), CliError> {
    let (v1, v2) = (a.pair.v1, a.pair.v2);
    let (plus, minus) = ss_closed_form(v1, v2);
    let grid = GridArgs { emin: a.emin, emax: a.emax, steps: a.steps };

    let mut series = Vec::new();
    if let Some(choice) = a.branch {
        let picked = match choice {
            BranchChoice::Plus => vec![plus],
            BranchChoice::Minus => vec![minus],
            BranchChoice::Both => vec![plus, minus],
        };
        for sol in picked.into_iter().filter(|s| s.feasible) {
            let p = sol.potential(v1, v2)?;
            series.push(svg::Series {
                label: format!("g{}² = {}", svg::branch_symbol(sol.branch), svg::num(sol.g_squared)),
                rows: sweep_rows(&p, &grid, Model::Paper)?,
                marker: Some(sol.energy),
            });
        }
    }
    if series.is_empty() {
        let p = a.strength.potential(&a.pair)?;
        let g2 = p.g_squared();
        let marker = [plus, minus]
            .into_iter()
            .find(|s| s.feasible && (s.g_squared - g2).abs() <= 1e-9 * g2.max(1.0))
            .map(|s| s.energy);
        series.push(svg::Series {
            label: format!("g² = {}", svg::num(g2)),
            rows: sweep_rows(&p, &grid, Model::Paper)?,
            marker,
        });
    }

    let doc = svg::render(&format!("v1 = {}, v2 = {}", svg::num(v1), svg::num(v2)), &series);
    let mut out = open_output(&a.out)?;
    out.write_all(doc.as_bytes())?;
    out.flush()?;
    Ok(())
}
