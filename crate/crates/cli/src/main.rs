//! `netcap`: capacity analysis, hard instances, verification suites and rate tables.

mod commands;
mod error;
mod report;
mod spec;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use error::{CliError, CliResult};
use report::{input_digest, Outcome, RunReport, TOOL_VERSION};
use spec::{parse_eps_list, parse_ledger, parse_n_range, ExperimentSpec};

#[derive(Parser)]
#[command(name = "netcap", version, about = "Capacity bounds and lower-bound instances for structured deep networks")]
struct Cli {
    /// Directory for report.json and CSV tables (written atomically).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Do not print the report to stdout.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Covering-number bounds for an architecture file.
    Analyze {
        #[arg(long)]
        arch: PathBuf,
        /// Comma-separated ε values.
        #[arg(long)]
        eps: String,
    },
    /// Build and verify a hard-instance family.
    HardInstance(HardArgs),
    /// Run verification suites.
    Verify {
        /// Comma-separated suite names; all by default.
        #[arg(long, value_delimiter = ',')]
        suite: Vec<String>,
        /// Architecture to use instead of the shipped fixtures.
        #[arg(long)]
        arch: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Lower-bound certificates.
    Bounds(BoundsArgs),
    /// Rate curves and the shallow/deep gap table.
    Gap {
        #[arg(long)]
        r: f64,
        #[arg(long)]
        d: usize,
        #[arg(long = "L")]
        depth: usize,
        /// `A:B` expands to A, 2A, 4A, ... <= B.
        #[arg(long)]
        n_range: String,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 2)]
        dmax: usize,
        /// Activation constants `c,c1`.
        #[arg(long, default_value = "1,1")]
        ledger: String,
    },
    /// Re-run the spec embedded in a report and compare payloads.
    Replay { report: PathBuf },
}

#[derive(Args)]
struct HardArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    r: f64,
    #[arg(long)]
    c0: f64,
    #[arg(long, conflicts_with = "n", required_unless_present = "n")]
    nstar: Option<usize>,
    /// Parameter count; N* is then chosen from the covering hypothesis.
    #[arg(long)]
    n: Option<u64>,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    c_tilde1: f64,
    #[arg(long, default_value_t = 10.0)]
    c_tilde2: f64,
    /// Member pairs checked for separation.
    #[arg(long, default_value_t = 200)]
    pairs: usize,
    /// Members checked for class membership.
    #[arg(long, default_value_t = 4)]
    members: usize,
    /// Point pairs per member in the Hölder check.
    #[arg(long, default_value_t = 2000)]
    holder_pairs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    r: f64,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    n: u64,
    #[arg(long = "L", default_value_t = 1)]
    depth: usize,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, default_value_t = 2)]
    dmax: usize,
    #[arg(long, default_value = "1,1")]
    ledger: String,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    c_tilde1: f64,
    #[arg(long, default_value_t = 10.0)]
    c_tilde2: f64,
    #[arg(long, default_value_t = 1.0)]
    c0: f64,
}

fn to_spec(command: Command) -> CliResult<ExperimentSpec> {
    Ok(match command {
        Command::Analyze { arch, eps } => ExperimentSpec::Analyze {
            arch,
            eps: parse_eps_list(&eps).map_err(|e| CliError::input(format!("validation error: {e}")))?,
        },
        Command::HardInstance(a) => ExperimentSpec::HardInstance {
            d: a.d,
            r: a.r,
            c0: a.c0,
            nstar: a.nstar,
            n: a.n,
            beta: a.beta,
            c_tilde1: a.c_tilde1,
            c_tilde2: a.c_tilde2,
            pairs: a.pairs,
            members: a.members,
            holder_pairs: a.holder_pairs,
            seed: a.seed,
        },
        Command::Verify { suite, arch, seed } => ExperimentSpec::Verify {
            suites: if suite.is_empty() {
                suites::SUITES.iter().map(|s| s.to_string()).collect()
            } else {
                suite
            },
            arch,
            seed,
        },
        Command::Bounds(a) => ExperimentSpec::Bounds {
            r: a.r,
            d: a.d,
            n: a.n,
            depth: a.depth,
            radius: a.radius,
            d_max: a.dmax,
            ledger: parse_ledger(&a.ledger).map_err(CliError::Input)?,
            beta: a.beta,
            c_tilde1: a.c_tilde1,
            c_tilde2: a.c_tilde2,
            c0: a.c0,
        },
        Command::Gap { r, d, depth, n_range, radius, dmax, ledger } => ExperimentSpec::Gap {
            r,
            d,
            depth,
            n_values: parse_n_range(&n_range).map_err(CliError::Input)?,
            radius,
            d_max: dmax,
            ledger: parse_ledger(&ledger).map_err(CliError::Input)?,
        },
        Command::Replay { .. } => unreachable!("replay carries no spec of its own"),
    })
}

fn execute(spec: ExperimentSpec, argv: Vec<String>) -> CliResult<(RunReport, Vec<(String, String)>)> {
    let start = Instant::now();
    let input_digest = input_digest(&spec)?;
    let Outcome { payload, pass, tables } = commands::run(&spec)?;
    let report = RunReport {
        command: argv,
        version: TOOL_VERSION.into(),
        seed: spec.seed(),
        spec,
        input_digest,
        payload,
        pass,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    };
    Ok((report, tables))
}

fn replay(path: &PathBuf, argv: Vec<String>) -> CliResult<(RunReport, Vec<(String, String)>)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    let old: RunReport = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("parse error in {}: {e}", path.display())))?;
    let (new, _) = execute(old.spec.clone(), argv)?;
    let digest_match = new.input_digest == old.input_digest;
    let payload_match = new.payload == old.payload;
    let report = RunReport {
        payload: json!({
            "replayed": old.spec.name(),
            "original_digest": old.input_digest,
            "digest_match": digest_match,
            "payload_match": payload_match,
        }),
        pass: Some(digest_match && payload_match),
        ..new
    };
    Ok((report, Vec::new()))
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Replay { report } => replay(&report, argv),
        command => to_spec(command).and_then(|spec| execute(spec, argv)),
    };
    let (report, tables) = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("netcap: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    if let Some(dir) = &cli.out {
        if let Err(e) = report.write(dir, &tables) {
            eprintln!("netcap: {e}");
            return ExitCode::from(e.exit_code());
        }
    }
    if !cli.quiet {
        println!("{}", report.to_json());
    }
    eprintln!(
        "netcap {}: seed {}, digest {}, {:.2} s, {}",
        report.spec.name(),
        report.seed,
        &report.input_digest[..12],
        report.wall_clock_seconds,
        match report.pass {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "done",
        }
    );
    ExitCode::from(if report.pass == Some(false) { 1 } else { 0 })
}
