//! Command line front end. `run` does all the work so tests can drive it
//! without spawning a process.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::f3;
use crate::f4::{self, PayoffMatrices};
use crate::game::{Framework, Params, Profile, Slopes};
use crate::oracle::{self, ConsistencyResult, Grid};
use crate::rational::Rational;
use crate::report::{join_profiles, ModeRow, ReportDocument, SweepRow};
use crate::GameError;

pub const EXIT_OK: u8 = 0;
pub const EXIT_MISMATCH: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Domain(#[from] GameError),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    File { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Every failure that is not a verification mismatch maps to 2.
    pub fn exit_code(&self) -> u8 {
        EXIT_USAGE
    }

    /// The reader went away, e.g. output piped into `head`.
    pub fn is_broken_pipe(&self) -> bool {
        let kind = match self {
            CliError::Io(e) => Some(e.kind()),
            CliError::Csv(e) => match e.kind() {
                csv::ErrorKind::Io(e) => Some(e.kind()),
                _ => None,
            },
            CliError::Json(e) => e.io_error_kind(),
            _ => None,
        };
        kind == Some(io::ErrorKind::BrokenPipe)
    }
}

#[derive(Debug, Parser)]
#[command(name = "lbgame", version, about = "Equilibria of the three-node load-balancing routing game")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full report for one instance.
    Analyze(AnalyzeArgs),
    /// One CSV row per connection count.
    Sweep(SweepArgs),
    /// Mode timeline for a > 2b.
    Modes(ModesArgs),
    /// Dump the cost matrices with equilibrium cells marked.
    Matrix(MatrixArgs),
    /// Compare closed-form predictions with brute-force enumeration.
    Verify(VerifyArgs),
    /// Limits as the number of connections grows without bound.
    Limits(LimitsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FrameworkArg {
    F3,
    F4,
}

impl From<FrameworkArg> for Framework {
    fn from(f: FrameworkArg) -> Self {
        match f {
            FrameworkArg::F3 => Framework::F3,
            FrameworkArg::F4 => Framework::F4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyFramework {
    F3,
    F4,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Player {
    A,
    B,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct SlopeArgs {
    /// Slope of the A-B and B-C links, as `p` or `p/q`.
    #[arg(long, allow_negative_numbers = true)]
    pub a: Rational,
    /// Slope of the A-C link, as `p` or `p/q`.
    #[arg(long, allow_negative_numbers = true)]
    pub b: Rational,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub slopes: SlopeArgs,
    /// Connections per source.
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_enum, default_value = "f3")]
    pub framework: FrameworkArg,
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub slopes: SlopeArgs,
    #[arg(long, default_value_t = 1)]
    pub n_min: u32,
    #[arg(long)]
    pub n_max: u32,
    #[arg(long, value_enum, default_value = "f3")]
    pub framework: FrameworkArg,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ModesArgs {
    #[command(flatten)]
    pub slopes: SlopeArgs,
    #[arg(long)]
    pub n_max: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct MatrixArgs {
    #[command(flatten)]
    pub slopes: SlopeArgs,
    #[arg(long)]
    pub n: u32,
    /// Multiply every entry by N^2.
    #[arg(long)]
    pub scaled: bool,
    #[arg(long, value_enum, default_value = "a")]
    pub player: Player,
    /// Largest N that will be dumped.
    #[arg(long, default_value_t = 64)]
    pub limit: u32,
    /// Long format: player,nABC,nBAC,cost,equilibrium.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "both")]
    pub framework: VerifyFramework,
    /// Grid override, e.g. `a=1..8;b=1..8;n=1..40;extra=10:3,3:1`.
    /// Keys left out keep the default acceptance grid values.
    #[arg(long)]
    pub grid_spec: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct LimitsArgs {
    #[command(flatten)]
    pub slopes: SlopeArgs,
    #[arg(long)]
    pub json: bool,
}

impl SlopeArgs {
    fn slopes(&self) -> Result<Slopes, CliError> {
        Ok(Slopes::new(self.a, self.b)?)
    }
}

/// Executes a parsed command, writing its primary output to `out`.
/// Returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<u8, CliError> {
    match &cli.command {
        Command::Analyze(args) => analyze(args, out),
        Command::Sweep(args) => sweep(args, out),
        Command::Modes(args) => modes(args, out),
        Command::Matrix(args) => matrix(args, out),
        Command::Verify(args) => {
            let frameworks = match args.framework {
                VerifyFramework::F3 => vec![Framework::F3],
                VerifyFramework::F4 => vec![Framework::F4],
                VerifyFramework::Both => vec![Framework::F3, Framework::F4],
            };
            let spec = args.grid_spec.as_deref().map(GridSpec::parse).transpose()?;
            let ok = verify_with(&frameworks, spec.as_ref(), |fw, p| oracle::default_predictor(fw)(p), out)?;
            Ok(if ok { EXIT_OK } else { EXIT_MISMATCH })
        }
        Command::Limits(args) => limits(args, out),
    }
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

fn write_rows<T: Serialize>(rows: &[T], target: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    match target {
        Some(path) => {
            let file = File::create(path).map_err(|source| CliError::File { path: path.to_path_buf(), source })?;
            let mut w = csv_writer(BufWriter::new(file));
            for r in rows {
                w.serialize(r)?;
            }
            w.flush().map_err(|source| CliError::File { path: path.to_path_buf(), source })?;
        }
        None => {
            let mut w = csv_writer(out);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn approx(r: Rational) -> String {
    format!("{r} (~{:.6})", r.to_f64())
}

fn analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let params = Params::new(args.slopes.a, args.slopes.b, args.n)?;
    match args.framework {
        FrameworkArg::F3 => {
            let report = f3::analyze(&params);
            if args.json {
                serde_json::to_writer_pretty(&mut *out, &ReportDocument::from_f3(&report))?;
                writeln!(out)?;
            } else if args.csv {
                write_rows(&[SweepRow::from_f3(&report)], None, out)?;
            } else {
                let e = report.efficiency;
                writeln!(out, "instance: {params} framework=f3")?;
                writeln!(out, "equilibria ({}): {}", report.equilibria.len(), spaced(&report.equilibria))?;
                writeln!(out, "count stabilises from N = {}", report.count.threshold)?;
                writeln!(out, "social optimum: {} cost {}", report.social_optimum.profile, report.social_optimum.cost)?;
                writeln!(out, "poaExact: {}", approx(e.poa_exact))?;
                writeln!(out, "poaFormula: {}", approx(e.poa_formula))?;
                if e.diverges() {
                    writeln!(out, "note: exact PoA is below the formula value for this N")?;
                }
                writeln!(out, "pos: {}", approx(e.pos))?;
            }
        }
        FrameworkArg::F4 => {
            let report = f4::predict_equilibria(&params);
            if !report.rejected.is_empty() {
                eprintln!("warning: predicted profiles failed verification: {}", spaced(&report.rejected));
            }
            if args.json {
                serde_json::to_writer_pretty(&mut *out, &ReportDocument::from_f4(&report))?;
                writeln!(out)?;
            } else if args.csv {
                write_rows(&[SweepRow::from_f4(&report)], None, out)?;
            } else {
                writeln!(out, "instance: {params} framework=f4")?;
                writeln!(out, "equilibria ({}): {}", report.equilibria.len(), spaced(&report.equilibria))?;
                if let Some(m) = report.mode_info {
                    writeln!(
                        out,
                        "mode: {} (z = {}, alpha = {}, beta = {}, nTilde = {})",
                        m.mode, m.z, m.alpha, m.beta, m.n_tilde
                    )?;
                }
                writeln!(out, "origin is NE: {}", report.corners.origin_is_ne)?;
                writeln!(out, "all-in is NE: {}", report.corners.all_in_is_ne)?;
                writeln!(out, "poaExact: {}", approx(report.poa_exact))?;
                writeln!(out, "pos: {}", approx(report.pos_exact))?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn spaced(set: &BTreeSet<Profile>) -> String {
    set.iter().map(Profile::to_string).collect::<Vec<_>>().join(" ")
}

fn sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let slopes = args.slopes.slopes()?;
    if args.n_min > args.n_max {
        return Err(CliError::Usage(format!("--n-min {} exceeds --n-max {}", args.n_min, args.n_max)));
    }
    let params: Vec<Params> =
        (args.n_min..=args.n_max).map(|n| Params::from_slopes(slopes, n)).collect::<Result<_, _>>()?;
    let rows: Vec<SweepRow> = match args.framework {
        FrameworkArg::F3 => params.par_iter().map(|p| SweepRow::from_f3(&f3::analyze(p))).collect(),
        FrameworkArg::F4 => params.par_iter().map(|p| SweepRow::from_f4(&f4::predict_equilibria(p))).collect(),
    };
    write_rows(&rows, args.out.as_deref(), out)?;
    Ok(EXIT_OK)
}

fn modes(args: &ModesArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let slopes = args.slopes.slopes()?;
    let rows: Vec<ModeRow> = (1..=args.n_max)
        .into_par_iter()
        .map(|n| {
            let p = Params::from_slopes(slopes, n)?;
            Ok(ModeRow::new(&p, &f4::classify_mode(&p)?))
        })
        .collect::<Result<_, GameError>>()?;
    if rows.is_empty() {
        // Still reject a <= 2b when the range is empty.
        f4::classify_mode(&Params::from_slopes(slopes, 1)?)?;
    }
    write_rows(&rows, args.out.as_deref(), out)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct MatrixCell {
    player: &'static str,
    #[serde(rename = "nABC")]
    n_abc: usize,
    #[serde(rename = "nBAC")]
    n_bac: usize,
    cost: Rational,
    equilibrium: bool,
}

fn matrix(args: &MatrixArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let params = Params::new(args.slopes.a, args.slopes.b, args.n)?;
    if args.n > args.limit {
        return Err(CliError::Usage(format!(
            "N = {} exceeds the dump limit {}; pass --limit {} to print {} cells per player",
            args.n,
            args.limit,
            args.n,
            (args.n as u64 + 1).pow(2)
        )));
    }
    let m = if args.scaled { f4::scaled_payoff_matrices(&params) } else { f4::payoff_matrices(&params) };
    let eq = f4::enumerate_equilibria(&params);
    let players: Vec<(&'static str, &Vec<Vec<Rational>>)> = match args.player {
        Player::A => vec![("A", &m.cost_a)],
        Player::B => vec![("B", &m.cost_b)],
        Player::Both => vec![("A", &m.cost_a), ("B", &m.cost_b)],
    };
    if args.csv {
        let mut w = csv_writer(out);
        for (name, grid) in players {
            for (x, row) in grid.iter().enumerate() {
                for (y, &cost) in row.iter().enumerate() {
                    let equilibrium = eq.contains(&Profile::new(x as u32, y as u32));
                    w.serialize(MatrixCell { player: name, n_abc: x, n_bac: y, cost, equilibrium })?;
                }
            }
        }
        w.flush()?;
    } else {
        writeln!(out, "{params}{}", if args.scaled { " (entries x N^2)" } else { "" })?;
        writeln!(out, "rows nABC, columns nBAC, [x] marks a Nash equilibrium")?;
        for (name, grid) in players {
            writeln!(out)?;
            writeln!(out, "player {name}")?;
            write_text_matrix(&m, grid, &eq, out)?;
        }
    }
    Ok(EXIT_OK)
}

fn write_text_matrix(
    m: &PayoffMatrices,
    grid: &[Vec<Rational>],
    eq: &BTreeSet<Profile>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let cells: Vec<Vec<String>> = grid
        .iter()
        .enumerate()
        .map(|(x, row)| {
            row.iter()
                .enumerate()
                .map(|(y, v)| {
                    if eq.contains(&Profile::new(x as u32, y as u32)) {
                        format!("[{v}]")
                    } else {
                        v.to_string()
                    }
                })
                .collect()
        })
        .collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(1).max(m.size().to_string().len());
    let label = m.size().to_string().len();
    write!(out, "{:>label$} |", "")?;
    for y in 0..m.size() {
        write!(out, " {y:>width$}")?;
    }
    writeln!(out)?;
    for (x, row) in cells.iter().enumerate() {
        write!(out, "{x:>label$} |")?;
        for c in row {
            write!(out, " {c:>width$}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn limits(args: &LimitsArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let slopes = args.slopes.slopes()?;
    let doc = ReportDocument::limits(&slopes);
    if args.json {
        serde_json::to_writer_pretty(&mut *out, &doc)?;
        writeln!(out)?;
    } else {
        let l = doc.limits.as_ref().expect("limits document");
        let h = l.f3_hessian;
        writeln!(out, "slopes: a={} b={}", slopes.a(), slopes.b())?;
        writeln!(out, "f3 non-atomic equilibrium: ({}, {})", l.f3_equilibrium[0], l.f3_equilibrium[1])?;
        writeln!(out, "f3 potential Hessian: [[{}, {}], [{}, {}]]", h[0][0], h[0][1], h[1][0], h[1][1])?;
        writeln!(out, "f3 Hessian positive definite: {}", l.f3_hessian_positive_definite)?;
        writeln!(out, "f4 limit fraction: {}", approx(l.f4_fraction))?;
        writeln!(out, "f4 limit PoA: {}", approx(l.f4_poa))?;
    }
    Ok(EXIT_OK)
}

/// Partial grid override parsed from `--grid-spec`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GridSpec {
    pub a: Option<RangeInclusive<i128>>,
    pub b: Option<RangeInclusive<i128>>,
    pub n: Option<RangeInclusive<u32>>,
    pub extra_pairs: Option<Vec<(i128, i128)>>,
}

fn parse_range<T>(key: &str, value: &str) -> Result<RangeInclusive<T>, CliError>
where
    T: std::str::FromStr + Copy + PartialOrd + From<u8>,
{
    let bad = || CliError::Usage(format!("grid spec: '{key}={value}' is not 'k' or 'lo..hi'"));
    let (lo, hi) = match value.split_once("..") {
        Some((lo, hi)) => (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?),
        None => {
            let v = value.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo < T::from(1) {
        return Err(CliError::Usage(format!("grid spec: '{key}' values must be at least 1")));
    }
    Ok(lo..=hi)
}

impl GridSpec {
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let mut g = GridSpec::default();
        for part in spec.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("grid spec: '{part}' is not key=value")))?;
            match key.trim() {
                "a" => g.a = Some(parse_range(key, value)?),
                "b" => g.b = Some(parse_range(key, value)?),
                "n" => g.n = Some(parse_range(key, value)?),
                "extra" => {
                    let mut pairs = Vec::new();
                    for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                        let pair = item.split_once(':').and_then(|(a, b)| {
                            Some((a.trim().parse::<i128>().ok()?, b.trim().parse::<i128>().ok()?))
                        });
                        match pair {
                            Some((a, b)) if a > 0 && b > 0 => pairs.push((a, b)),
                            _ => return Err(CliError::Usage(format!("grid spec: bad extra pair '{item}'"))),
                        }
                    }
                    g.extra_pairs = Some(pairs);
                }
                other => return Err(CliError::Usage(format!("grid spec: unknown key '{other}'"))),
            }
        }
        Ok(g)
    }

    pub fn apply(&self, base: Grid) -> Grid {
        Grid {
            a: self.a.clone().unwrap_or(base.a),
            b: self.b.clone().unwrap_or(base.b),
            n: self.n.clone().unwrap_or(base.n),
            extra_pairs: self.extra_pairs.clone().unwrap_or(base.extra_pairs),
        }
    }
}

pub fn acceptance_grid(framework: Framework) -> Grid {
    match framework {
        Framework::F3 => Grid::f3_acceptance(),
        Framework::F4 => Grid::f4_acceptance(),
    }
}

/// Runs the consistency sweep for each framework and writes a summary plus
/// one line per mismatch. Returns `true` when nothing mismatched.
pub fn verify_with<P>(
    frameworks: &[Framework],
    spec: Option<&GridSpec>,
    predictor: P,
    out: &mut dyn Write,
) -> Result<bool, CliError>
where
    P: Fn(Framework, &Params) -> BTreeSet<Profile> + Sync,
{
    let mut clean = true;
    for &fw in frameworks {
        let base = acceptance_grid(fw);
        let grid = match spec {
            Some(s) => s.apply(base),
            None => base,
        };
        let instances = grid.instances();
        let results = oracle::consistency_sweep_with(&instances, fw, |p| predictor(fw, p));
        let bad: Vec<&ConsistencyResult> = results.iter().filter(|r| !r.matched).collect();
        if instances.is_empty() {
            writeln!(out, "{fw}: 0 instances (empty grid), nothing to check")?;
            continue;
        }
        writeln!(out, "{fw}: {} instances, {} mismatches", instances.len(), bad.len())?;
        for r in bad {
            clean = false;
            writeln!(
                out,
                "MISMATCH framework={} a={} b={} N={} oracle={} predicted={} {}",
                r.framework,
                r.params.a(),
                r.params.b(),
                r.params.n(),
                join_profiles(&r.oracle_set),
                join_profiles(&r.predicted_set),
                r.note
            )?;
        }
    }
    Ok(clean)
}
