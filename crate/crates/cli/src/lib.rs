//! The `beatty` command: sequence dumps, MEX/MES runs, identity verification
//! and regeneration of the reference tables.

pub mod render;
pub mod tables;

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use beatty_core::decomposition::{
    derived_slopes, fixed_point_slope, mex_family_slope, slope_from_defining, verify_entry, Battery, PairPrefix,
    SlopeBundle, VerificationReport,
};
use beatty_core::mesalg::{
    derive_skipping, mes_from_defining, run_mes, run_mex, run_self_generating, GapSequence, MesRun, RunRow,
};
use beatty_core::sequences::{sequence_csv, BeattySeq, ComplementaryPair, SequenceDump};
use beatty_core::{Error, FloorKernel, QuadExpr};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use render::numbered;

/// Failure of a command, carrying its exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// An identity or table check found a mismatch.
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{0}")]
    Input(String),
    /// The library detected a broken internal invariant.
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvariantViolation(msg) => CliError::Internal(msg),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<beatty_core::ExactError> for CliError {
    fn from(e: beatty_core::ExactError) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Plain,
}

#[derive(Debug, Parser)]
#[command(
    name = "beatty",
    version,
    about = "Complementary Beatty sequences, MEX and MES runs, identity checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

fn parse_slope(s: &str) -> Result<QuadExpr, String> {
    s.parse().map_err(|e: beatty_core::ExactError| e.to_string())
}

#[derive(Debug, clap::Args)]
pub struct SlopeArgs {
    /// Slope, e.g. `phi`, `sqrt(2)` or `(187+2*sqrt(13))/113`.
    #[arg(long, value_parser = parse_slope)]
    pub slope: QuadExpr,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Terms [n·slope] for n = 1..N.
    Gen(SlopeArgs),
    /// The complementary pair of a slope, lower slope first.
    Pair(SlopeArgs),
    /// MEX with gaps h_n = t·n.
    Mex {
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        t: u64,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// MES from a defining slope and frequency, from the skipping sequence of
    /// a slope's pair, or (with only --k) from the self-generating rule.
    Mes {
        #[arg(long, value_parser = parse_slope, conflicts_with = "slope", requires = "k")]
        defining: Option<QuadExpr>,
        #[arg(long, value_parser = parse_slope)]
        slope: Option<QuadExpr>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k: Option<u64>,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Rows a, b, c, r with [nγ] and [nρ], checking b − a = c + r + 1.
    Decompose(SlopeArgs),
    /// Runs every identity over a battery of slopes; one report per line.
    Verify {
        /// TOML battery file; the built-in battery when absent.
        #[arg(long, value_name = "PATH")]
        battery: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        workers: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Regenerates a reference table and checks it against its fixture.
    /// Lists the catalog when NAME is omitted.
    Table { name: Option<String> },
    /// Derived slopes β, γ, ρ, k and δ of a slope.
    Slopes {
        #[arg(long, value_parser = parse_slope)]
        slope: QuadExpr,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
    },
}

/// Runs `cli`, writing the command's output to `out`. Diagnostics go to
/// standard error.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Gen(args) => cmd_gen(args, out),
        Command::Pair(args) => cmd_pair(args, out),
        Command::Mex { t, n, format } => cmd_mex(*t, *n, *format, out),
        Command::Mes {
            defining,
            slope,
            k,
            n,
            format,
        } => cmd_mes(defining.as_ref(), slope.as_ref(), *k, *n, *format, out),
        Command::Decompose(args) => cmd_decompose(args, out),
        Command::Verify {
            battery,
            n,
            workers,
            format,
        } => cmd_verify(battery.as_ref(), *n, *workers, *format, out),
        Command::Table { name } => cmd_table(name.as_deref(), out),
        Command::Slopes { slope, format } => cmd_slopes(slope, *format, out),
    }
}

fn json_line<T: Serialize>(value: &T, out: &mut dyn Write) -> Result<(), CliError> {
    let text = serde_json::to_string(value).map_err(|e| CliError::Internal(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn len(n: u64) -> Result<usize, CliError> {
    usize::try_from(n).map_err(|_| CliError::Input(format!("N = {n} is too large")))
}

fn oriented(slope: &QuadExpr) -> Result<ComplementaryPair, CliError> {
    let (pair, swapped) = ComplementaryPair::from_slope(slope)?;
    if swapped {
        eprintln!(
            "warning: slope {slope} exceeds 2; using complementary slope {}",
            pair.alpha()
        );
    }
    Ok(pair)
}

fn cmd_gen(args: &SlopeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let seq = BeattySeq::new(args.slope.clone())?;
    let terms = seq.prefix(len(args.n)?);
    match args.format {
        Format::Csv => out.write_all(sequence_csv(&terms).as_bytes())?,
        Format::Json => json_line(
            &SequenceDump {
                slope: args.slope.clone(),
                terms,
            },
            out,
        )?,
        Format::Plain => {
            let rows: Vec<Vec<String>> = terms.iter().map(|t| vec![t.to_string()]).collect();
            out.write_all(numbered(&["term"], &rows).as_bytes())?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct PairDump {
    alpha: QuadExpr,
    beta: QuadExpr,
    a: Vec<u64>,
    b: Vec<u64>,
}

fn cmd_pair(args: &SlopeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let pair = oriented(&args.slope)?;
    let n = len(args.n)?;
    let (a, b) = (pair.lower()?.prefix(n), pair.upper()?.prefix(n));
    match args.format {
        Format::Csv => {
            let mut text = String::from("n,a,b\n");
            for (i, (x, y)) in a.iter().zip(&b).enumerate() {
                let _ = writeln!(text, "{},{x},{y}", i + 1);
            }
            out.write_all(text.as_bytes())?;
        }
        Format::Json => json_line(
            &PairDump {
                alpha: pair.alpha().clone(),
                beta: pair.beta().clone(),
                a,
                b,
            },
            out,
        )?,
        Format::Plain => {
            let rows: Vec<Vec<String>> = a
                .iter()
                .zip(&b)
                .map(|(x, y)| vec![x.to_string(), y.to_string()])
                .collect();
            out.write_all(numbered(&["A", "B"], &rows).as_bytes())?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct RunDump<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    bundle: Option<&'a SlopeBundle>,
    rows: Vec<RunRow>,
}

fn write_run(run: &MesRun, bundle: Option<&SlopeBundle>, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    match format {
        Format::Csv => out.write_all(run.to_csv().as_bytes())?,
        Format::Json => json_line(
            &RunDump {
                bundle,
                rows: run.rows().collect(),
            },
            out,
        )?,
        Format::Plain => {
            let rows: Vec<Vec<String>> = run
                .rows()
                .map(|r| [r.a, r.b, r.c, r.r].iter().map(u64::to_string).collect())
                .collect();
            out.write_all(numbered(&["A", "B", "C", "R"], &rows).as_bytes())?;
        }
    }
    Ok(())
}

fn cmd_mex(t: u64, n: u64, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    let t_signed = i64::try_from(t).map_err(|_| CliError::Input(format!("t = {t} is too large")))?;
    let run = run_mex(&GapSequence::Linear(t_signed), len(n)?)?;
    let bundle = derived_slopes(&mex_family_slope(t)?)?;
    write_run(&run, Some(&bundle), format, out)
}

fn cmd_mes(
    defining: Option<&QuadExpr>,
    slope: Option<&QuadExpr>,
    k: Option<u64>,
    n: u64,
    format: Format,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let n = len(n)?;
    let (run, bundle) = match (defining, slope, k) {
        (Some(delta), _, Some(k)) => {
            let run = mes_from_defining(&BeattySeq::new(delta.clone())?, k, n)?;
            // a defining slope below 1 still drives MES, but has no closed form
            let bundle = match slope_from_defining(delta, k) {
                Ok(alpha) => Some(derived_slopes(&alpha)?),
                Err(Error::SlopeOutOfRange { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            (run, bundle)
        }
        (None, Some(slope), _) => {
            let pair = oriented(slope)?;
            let (c, _) = derive_skipping(&pair, n)?;
            let skips: Vec<i64> = c.iter().map(|&v| v as i64).collect();
            (run_mes(&skips, n)?, Some(derived_slopes(pair.alpha())?))
        }
        (None, None, Some(k)) => {
            let sg = run_self_generating(k, n)?;
            (sg.run().clone(), Some(derived_slopes(&fixed_point_slope(k)?)?))
        }
        _ => {
            return Err(CliError::Input(
                "mes needs --defining with --k, --slope, or --k alone".into(),
            ))
        }
    };
    write_run(&run, bundle.as_ref(), format, out)
}

#[derive(Serialize)]
struct DecomposeRow {
    n: usize,
    a: u64,
    b: u64,
    c: u64,
    r: u64,
    gamma_n: i128,
    rho_n: i128,
}

#[derive(Serialize)]
struct DecomposeDump<'a> {
    bundle: &'a SlopeBundle,
    rows: &'a [DecomposeRow],
    reports: &'a [VerificationReport],
}

fn cmd_decompose(args: &SlopeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let pair = oriented(&args.slope)?;
    let n = len(args.n)?;
    let bundle = derived_slopes(pair.alpha())?;
    let prefix = PairPrefix::new(&pair, n)?;
    let reports = [prefix.decomposition(), prefix.slope_match()?];
    let (a, b) = (pair.lower()?.prefix(n), pair.upper()?.prefix(n));
    let (kg, kr) = (FloorKernel::new(&bundle.gamma), FloorKernel::new(&bundle.rho));
    let rows: Vec<DecomposeRow> = (0..n)
        .map(|i| DecomposeRow {
            n: i + 1,
            a: a[i],
            b: b[i],
            c: prefix.c()[i],
            r: prefix.r()[i],
            gamma_n: kg.floor_at(i as u64 + 1),
            rho_n: kr.floor_at(i as u64 + 1),
        })
        .collect();
    match args.format {
        Format::Csv => {
            let mut text = String::from("n,a,b,c,r,gamma_n,rho_n\n");
            for r in &rows {
                let _ = writeln!(
                    text,
                    "{},{},{},{},{},{},{}",
                    r.n, r.a, r.b, r.c, r.r, r.gamma_n, r.rho_n
                );
            }
            out.write_all(text.as_bytes())?;
        }
        Format::Json => json_line(
            &DecomposeDump {
                bundle: &bundle,
                rows: &rows,
                reports: &reports,
            },
            out,
        )?,
        Format::Plain => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut v: Vec<String> = [r.a, r.b, r.c, r.r].iter().map(u64::to_string).collect();
                    v.push(r.gamma_n.to_string());
                    v.push(r.rho_n.to_string());
                    v
                })
                .collect();
            out.write_all(numbered(&["A", "B", "C", "R", "[nγ]", "[nρ]"], &cells).as_bytes())?;
        }
    }
    check_reports(&reports)
}

fn check_reports(reports: &[VerificationReport]) -> Result<(), CliError> {
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| format!("{} for {} ({} failures)", r.identity, r.alpha, r.failures.len()))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed.join("; ")))
    }
}

fn cmd_verify(
    battery: Option<&PathBuf>,
    n: u64,
    workers: u64,
    format: Format,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let battery = match battery {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            Battery::parse(&text, n)?
        }
        None => Battery::standard(n),
    };
    let emit = |label: &str, reports: &[VerificationReport], out: &mut dyn Write| -> Result<(), CliError> {
        for r in reports {
            match format {
                Format::Json => json_line(r, out)?,
                Format::Csv | Format::Plain => {
                    let status = if r.passed() { "PASS" } else { "FAIL" };
                    writeln!(
                        out,
                        "{status}  {:<19}  {label}  N={}  failures={}",
                        r.identity.tag(),
                        r.n_max,
                        r.failures.len()
                    )?;
                }
            }
        }
        Ok(())
    };
    let mut all = Vec::new();
    if workers <= 1 {
        for entry in &battery.entries {
            let reports = verify_entry(entry)?;
            emit(&entry.label, &reports, out)?;
            all.extend(reports);
        }
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers as usize)
            .build()
            .map_err(|e| CliError::Internal(e.to_string()))?;
        let results: Vec<_> = pool.install(|| battery.entries.par_iter().map(verify_entry).collect());
        for (entry, reports) in battery.entries.iter().zip(results) {
            let reports = reports?;
            emit(&entry.label, &reports, out)?;
            all.extend(reports);
        }
    }
    check_reports(&all)
}

fn cmd_table(name: Option<&str>, out: &mut dyn Write) -> Result<(), CliError> {
    let Some(name) = name else {
        for t in &tables::CATALOG {
            writeln!(out, "{}", t.name)?;
        }
        return Ok(());
    };
    let spec = tables::lookup(name).ok_or_else(|| {
        let names: Vec<&str> = tables::CATALOG.iter().map(|t| t.name).collect();
        CliError::Input(format!("unknown table {name:?}; expected one of {}", names.join(", ")))
    })?;
    let rendered = spec.render()?;
    out.write_all(rendered.as_bytes())?;
    match tables::first_difference(&rendered, spec.fixture) {
        None => Ok(()),
        Some(line) => Err(CliError::Verification(format!(
            "table {name} differs from its fixture at line {line}"
        ))),
    }
}

fn cmd_slopes(slope: &QuadExpr, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    if !slope.is_irrational() {
        return Err(Error::NotIrrational(slope.clone()).into());
    }
    let pair = oriented(slope)?;
    let bundle = derived_slopes(pair.alpha())?;
    match format {
        Format::Json => json_line(&bundle, out)?,
        Format::Csv => {
            writeln!(out, "alpha,beta,gamma,rho,k,delta")?;
            writeln!(
                out,
                "{},{},{},{},{},{}",
                bundle.alpha, bundle.beta, bundle.gamma, bundle.rho, bundle.k, bundle.delta
            )?;
        }
        Format::Plain => {
            writeln!(out, "alpha=\"{}\"", bundle.alpha)?;
            writeln!(out, "beta=\"{}\"", bundle.beta)?;
            writeln!(out, "gamma=\"{}\"", bundle.gamma)?;
            writeln!(out, "rho=\"{}\"", bundle.rho)?;
            writeln!(out, "k={}", bundle.k)?;
            writeln!(out, "delta=\"{}\"", bundle.delta)?;
        }
    }
    Ok(())
}
