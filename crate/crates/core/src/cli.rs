//! Command-line front end.
//!
//! Settings resolve in order: built-in defaults, then the `--config` TOML
//! file, then `--set key=value` pairs, then dedicated flags. Every command
//! writes its CSV files plus `manifest.txt` (provenance header followed by
//! `cell,file,sha256` rows) into `--out`. Outputs depend only on the resolved
//! settings, so reruns are byte identical.
//!
//! Exit codes: 0 success, 1 validation failure, 2 usage, config or I/O error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, Parser, Subcommand};
use log::{debug, info};
use sha2::{Digest, Sha256};

use crate::arrivals::{generate_trace, ArrivalTrace};
use crate::error::{Error, Result};
use crate::experiments::{
    run_alpha_sweep, run_rate_sweep, run_tail_comparison, run_validation_suite, CheckStatus,
    ExperimentConfig, SweepOutput, HOLDING_STREAM_OFFSET,
};
use crate::occupancy::simulate_occupancy;
use crate::samplers::RngStream;
use crate::table::format_number;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const MANIFEST_FILE: &str = "manifest.txt";

#[derive(Debug, Parser)]
#[command(
    name = "arrival-lab",
    version,
    about = "Arrival-process experiments: Poisson counts, exponential and Pareto gaps, loss-system occupancy"
)]
struct Cli {
    /// More log output on stderr (repeat for more).
    #[arg(short, long, action = ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Master seed (default 42).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Flat TOML file of experiment settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Simulated time span of each replication.
    #[arg(long)]
    horizon: Option<f64>,
    /// Replications per cell.
    #[arg(long)]
    replications: Option<u64>,
    /// Any setting as KEY=VALUE; lists separated by `,` or `;`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pareto curves and occupancy across shape values.
    SweepAlpha {
        #[command(flatten)]
        common: Common,
        /// Shape values, comma separated.
        #[arg(long)]
        alpha: Option<String>,
        /// Lomax scale values, comma separated.
        #[arg(long)]
        beta: Option<String>,
    },
    /// Poisson count laws and occupancy across arrival rates.
    SweepRate {
        #[command(flatten)]
        common: Common,
        /// Arrival rates, comma separated.
        #[arg(long)]
        rate: Option<String>,
        /// Node budget: PMF range and default capacity.
        #[arg(long)]
        nodes: Option<u32>,
    },
    /// Density curves of every family and their crossovers with the exponential.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        beta: Option<String>,
        /// Rate of the exponential baseline.
        #[arg(long)]
        exp_rate: Option<f64>,
    },
    /// One occupancy simulation from a generated or supplied trace.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Gap law: exp:<rate>, pareto1:<shape> or lomax:<shape>:<scale>.
        #[arg(long)]
        arrivals: Option<String>,
        /// Positive integer, `nodes` or `unbounded`.
        #[arg(long)]
        capacity: Option<String>,
        /// `infinite` or a gap law.
        #[arg(long)]
        holding: Option<String>,
        /// `index,time` CSV of arrival times, used instead of generating one.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        nodes: Option<u32>,
        /// Replication index selecting the random streams.
        #[arg(long, default_value_t = 0)]
        replication: u64,
    },
    /// Sampler and formula self-checks; exits 1 if any check fails.
    Validate {
        #[command(flatten)]
        common: Common,
    },
}

/// Parses `std::env::args` and runs; returns the process exit code.
pub fn main() -> i32 {
    run(std::env::args_os())
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).try_init();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn resolve(common: &Common, flags: &[(&str, Option<String>)]) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            ExperimentConfig::from_toml(&text)?
        }
        None => ExperimentConfig::default(),
    };
    for pair in &common.set {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("`--set {pair}` is not KEY=VALUE")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    let shared = [
        ("seed", common.seed.map(|v| v.to_string())),
        ("horizon", common.horizon.map(|v| v.to_string())),
        ("replications", common.replications.map(|v| v.to_string())),
    ];
    for (key, value) in shared.iter().chain(flags) {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    cfg.validate()?;
    debug!("resolved settings: {:?}", cfg.provenance());
    Ok(cfg)
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::SweepAlpha {
            common,
            alpha,
            beta,
        } => {
            let cfg = resolve(&common, &[("alphas", alpha), ("betas", beta)])?;
            let out = run_alpha_sweep(&cfg)?;
            for (i, a) in cfg.alphas.iter().enumerate() {
                let col = |name: &str| {
                    format_number(out.summary.column(name).expect("summary column")[i])
                };
                println!(
                    "alpha={a} pdf_crossover={} survival_crossover={} mean_occupancy={}",
                    col("pdf_crossover"),
                    col("survival_crossover"),
                    col("pareto1_mean_occupancy")
                );
            }
            write_sweep(&common.out, "sweep-alpha", &cfg, &out)?;
            Ok(EXIT_OK)
        }
        Command::SweepRate {
            common,
            rate,
            nodes,
        } => {
            let cfg = resolve(
                &common,
                &[("rates", rate), ("nodes", nodes.map(|n| n.to_string()))],
            )?;
            let out = run_rate_sweep(&cfg)?;
            for (i, r) in cfg.rates.iter().enumerate() {
                let col = |name: &str| {
                    format_number(out.summary.column(name).expect("summary column")[i])
                };
                println!(
                    "rate={r} pmf_mode={} mean_occupancy={} mean_blocking={}",
                    col("pmf_mode"),
                    col("mean_occupancy"),
                    col("mean_blocking")
                );
            }
            write_sweep(&common.out, "sweep-rate", &cfg, &out)?;
            Ok(EXIT_OK)
        }
        Command::Compare {
            common,
            alpha,
            beta,
            exp_rate,
        } => {
            let cfg = resolve(
                &common,
                &[
                    ("alphas", alpha),
                    ("betas", beta),
                    ("exp_rate", exp_rate.map(|v| v.to_string())),
                ],
            )?;
            let out = run_tail_comparison(&cfg)?;
            let show = |x: Option<f64>| x.map_or_else(|| "none".to_string(), format_number);
            for c in &out.crossovers {
                println!(
                    "alpha={} pdf_crossover={} survival_crossover={}",
                    c.alpha,
                    show(c.pdf),
                    show(c.survival)
                );
            }
            let files: Vec<(String, String, String)> = out
                .tables()
                .map(|t| ("all".to_string(), format!("{}.csv", t.name()), t.to_csv()))
                .collect();
            write_outputs(&common.out, "compare", &cfg, &files)?;
            Ok(EXIT_OK)
        }
        Command::Simulate {
            common,
            arrivals,
            capacity,
            holding,
            trace,
            nodes,
            replication,
        } => {
            let cfg = resolve(
                &common,
                &[
                    ("arrivals", arrivals),
                    ("capacity", capacity),
                    ("holding", holding),
                    ("nodes", nodes.map(|n| n.to_string())),
                ],
            )?;
            simulate(&common.out, &cfg, trace.as_deref(), replication)
        }
        Command::Validate { common } => {
            let cfg = resolve(&common, &[])?;
            let report = run_validation_suite(&cfg);
            for e in &report.entries {
                println!(
                    "{:<18} {} statistic={} threshold={}",
                    e.status,
                    e.name,
                    format_number(e.statistic),
                    format_number(e.threshold)
                );
            }
            let files = vec![(
                "all".to_string(),
                "validation_report.csv".to_string(),
                report.to_csv(),
            )];
            write_outputs(&common.out, "validate", &cfg, &files)?;
            let failed = report
                .entries
                .iter()
                .filter(|e| e.status == CheckStatus::Fail)
                .count();
            if failed == 0 {
                println!("validation passed ({} checks)", report.entries.len());
                Ok(EXIT_OK)
            } else {
                println!(
                    "validation failed: {failed} of {} checks",
                    report.entries.len()
                );
                Ok(EXIT_VALIDATION_FAILED)
            }
        }
    }
}

fn simulate(
    out: &Path,
    cfg: &ExperimentConfig,
    trace_file: Option<&Path>,
    replication: u64,
) -> Result<i32> {
    let trace = match trace_file {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
            ArrivalTrace::from_csv(&text, None)?
        }
        None => {
            let mut r = RngStream::new(cfg.seed, replication);
            generate_trace(cfg.arrivals.0, cfg.horizon, &mut r)?
        }
    };
    // a supplied trace carries its own horizon
    let mut cfg = cfg.clone();
    cfg.horizon = trace.horizon();
    let mut holding = RngStream::new(cfg.seed, replication + HOLDING_STREAM_OFFSET);
    let series = simulate_occupancy(&trace, &cfg.location(), &mut holding);
    let stats = series.peak_stats()?;
    let blocking = series
        .blocking_fraction()
        .map_or_else(|_| "nan".to_string(), format_number);
    println!(
        "arrivals={} peak={} peak_time={} mean={} blocking_fraction={blocking}",
        series.arrivals(),
        stats.peak,
        format_number(stats.peak_time),
        format_number(stats.mean)
    );

    let mut provenance = vec![
        ("command".to_string(), "simulate".to_string()),
        ("replication".to_string(), replication.to_string()),
        (
            "trace".to_string(),
            if trace_file.is_some() {
                "file"
            } else {
                "generated"
            }
            .to_string(),
        ),
    ];
    provenance.extend(cfg.provenance());
    let header: String = provenance
        .iter()
        .map(|(k, v)| format!("# {k}={v}\n"))
        .collect();
    let cell = format!("replication={replication}");
    let files = vec![
        (
            cell.clone(),
            "simulate_trace.csv".to_string(),
            format!("# table=simulate_trace\n{header}{}", trace.to_csv()),
        ),
        (
            cell,
            "simulate_occupancy.csv".to_string(),
            format!("# table=simulate_occupancy\n{}", series.to_csv(&provenance)),
        ),
    ];
    write_outputs(out, "simulate", &cfg, &files)?;
    Ok(EXIT_OK)
}

fn write_sweep(
    out: &Path,
    command: &str,
    cfg: &ExperimentConfig,
    sweep: &SweepOutput,
) -> Result<()> {
    let mut files = Vec::new();
    for cell in &sweep.cells {
        for t in &cell.tables {
            files.push((cell.label.clone(), format!("{}.csv", t.name()), t.to_csv()));
        }
    }
    files.push((
        "summary".to_string(),
        format!("{}.csv", sweep.summary.name()),
        sweep.summary.to_csv(),
    ));
    write_outputs(out, command, cfg, &files)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes `(cell, file name, contents)` triples and the manifest. Files are
/// written one at a time in the given order.
fn write_outputs(
    out: &Path,
    command: &str,
    cfg: &ExperimentConfig,
    files: &[(String, String, String)],
) -> Result<()> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Io { path, source }
    };
    fs::create_dir_all(out).map_err(io(out))?;
    let mut manifest = format!("# command={command}\n");
    for (k, v) in cfg.provenance() {
        manifest.push_str(&format!("# {k}={v}\n"));
    }
    manifest.push_str("cell,file,sha256\n");
    for (cell, name, contents) in files {
        let path = out.join(name);
        fs::write(&path, contents).map_err(io(&path))?;
        info!("wrote {}", path.display());
        manifest.push_str(&format!(
            "{cell},{name},{}\n",
            sha256_hex(contents.as_bytes())
        ));
    }
    let path = out.join(MANIFEST_FILE);
    fs::write(&path, manifest).map_err(io(&path))?;
    info!("wrote {}", path.display());
    Ok(())
}
