//! Command-line front end: bound tables, code generation and checking,
//! adversary search, protocol simulation and convergence studies.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use qubit_cipher::adversary::{best_greedy, brute_force_worst, worst_case_iterate, REPORT_CSV_HEADER};
use qubit_cipher::codes::{covering_angle, load_code, meridian_angle_bound, store_code};
use qubit_cipher::experiments::{
    build_code, convergence_csv, convergence_experiment, figure1_csv, figure1_dataset, ExperimentRecord,
};
use qubit_cipher::protocol::{run_protocol, STATS_CSV_HEADER};
use qubit_cipher::{CodeKind, Error, Result, RngStream, SearchMethod};

#[derive(Parser)]
#[command(name = "qubit-cipher", version, about = "Weak-key encryption with a qubit ciphertext")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classical and quantum guessing bounds over a range of min-entropy loss.
    Bounds {
        #[arg(long)]
        c_min: f64,
        #[arg(long)]
        c_max: f64,
        #[arg(long)]
        step: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate or check key codes.
    #[command(subcommand)]
    Code(CodeCommand),
    /// Worst-case key distribution for a code.
    Adversary {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        c: f64,
        #[arg(long, value_parser = parse_method)]
        method: SearchMethod,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte Carlo run against the worst-case distribution and its optimal measurement.
    Simulate {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Restarts for the worst-case search that picks Eve's strategy.
        #[arg(long, default_value_t = 20)]
        restarts: usize,
    },
    /// Worst-case gap to the continuous optimum as the code grows.
    Converge(ConvergeArgs),
}

#[derive(Subcommand)]
enum CodeCommand {
    Gen {
        #[arg(long, value_parser = parse_kind)]
        kind: CodeKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        probes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct ConvergeArgs {
    #[arg(long)]
    c: f64,
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, value_parser = parse_kind, default_value = "fibonacci")]
    kind: CodeKind,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn parse_kind(s: &str) -> std::result::Result<CodeKind, String> {
    match s.parse::<CodeKind>() {
        Ok(CodeKind::Custom) => Err("only fibonacci and meridian codes can be generated".into()),
        Ok(k) => Ok(k),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_method(s: &str) -> std::result::Result<SearchMethod, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn log(record: ExperimentRecord) {
    eprintln!("{}", record.summary());
}

fn run(cli: Cli) -> Result<()> {
    let started = Instant::now();
    match cli.command {
        Command::Bounds { c_min, c_max, step, out } => {
            let rows = figure1_dataset(c_min, c_max, step)?;
            write_file(&out, &figure1_csv(&rows))?;
            log(ExperimentRecord {
                id: "bounds".into(),
                params: vec![
                    ("c_min".into(), c_min.to_string()),
                    ("c_max".into(), c_max.to_string()),
                    ("step".into(), step.to_string()),
                ],
                results: vec![("rows".into(), rows.len() as f64)],
                wall_time: started.elapsed(),
            });
        }
        Command::Code(CodeCommand::Gen { kind, n, out }) => {
            store_code(&build_code(kind, n)?, &out)?;
        }
        Command::Code(CodeCommand::Check { input, probes, seed }) => {
            let code = load_code(&input)?;
            let angle = covering_angle(&code, probes, &RngStream::new(seed))?;
            println!("covering_angle={angle}");
            println!("reference={}", meridian_angle_bound(code.len()));
        }
        Command::Adversary { code, c, method, restarts, seed } => {
            let code = load_code(&code)?;
            let rng = RngStream::new(seed);
            let report = match method {
                SearchMethod::Greedy => best_greedy(&code, c, restarts, &rng)?,
                SearchMethod::Iterate => worst_case_iterate(&code, c, restarts, &rng)?,
                SearchMethod::Brute => brute_force_worst(&code, c)?,
            };
            if report.vacuous {
                eprintln!("note: 2^c >= n, the min-entropy budget admits a point mass");
            }
            println!("{REPORT_CSV_HEADER}");
            println!("{}", report.csv_row());
        }
        Command::Simulate { code, c, trials, seed, restarts } => {
            let code = load_code(&code)?;
            let master = RngStream::new(seed);
            let worst = worst_case_iterate(&code, c, restarts, &master.split(0))?;
            let stats = run_protocol(&code, &worst.distribution, &worst.axis, trials, &master.split(1))?;
            println!("{STATS_CSV_HEADER}");
            println!("{}", stats.csv_row());
            log(ExperimentRecord {
                id: "simulate".into(),
                params: vec![
                    ("c".into(), c.to_string()),
                    ("n".into(), code.len().to_string()),
                    ("seed".into(), seed.to_string()),
                ],
                results: vec![("analytic_p".into(), worst.p), ("bob_correct".into(), stats.bob_correct as f64)],
                wall_time: started.elapsed(),
            });
        }
        Command::Converge(args) => {
            let table = convergence_experiment(args.c, &args.n, args.kind, args.restarts, args.seed)?;
            write_file(&args.out, &convergence_csv(&table))?;
            log(ExperimentRecord {
                id: "converge".into(),
                params: vec![
                    ("c".into(), args.c.to_string()),
                    ("kind".into(), args.kind.to_string()),
                    ("seed".into(), args.seed.to_string()),
                ],
                results: vec![("slope".into(), table.slope.unwrap_or(f64::NAN))],
                wall_time: started.elapsed(),
            });
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
