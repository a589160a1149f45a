//! Parameter sweeps, the tail comparison and the validation suite.
//!
//! Each replication `r` draws arrivals from stream `r` and holding times
//! from stream `r + HOLDING_STREAM_OFFSET` under the master seed. Every cell
//! of a sweep reuses the same streams, so cells are compared under common
//! random numbers. Cells and replications run on the rayon pool and are
//! collected in input order, so output never depends on scheduling.

mod config;
mod validation;

pub use config::{
    law_spec, parse_law, CapacitySpec, ExperimentConfig, HoldingSpec, LawSpec, DEFAULT_ALPHAS,
    DEFAULT_HORIZON, DEFAULT_NODES, DEFAULT_RATES, DEFAULT_REPLICATIONS, DEFAULT_SEED, GENERATOR,
};
pub use validation::{
    run_validation_suite, CheckEntry, CheckStatus, ValidationReport, VALIDATION_SUITE_SIZE,
};

use rayon::prelude::*;

use crate::arrivals::{generate_trace, GapLaw};
use crate::distributions::{
    exp_pdf, exp_survival, lomax_pdf, lomax_survival, normal_approx_pmf, pareto1_pdf,
    pareto1_survival, pareto2_cdf_as_written, pareto2_pdf_as_written, poisson_cdf, poisson_pmf,
    ExponentialParams, ParetoOneParams, ParetoTwoParams, PoissonParams,
};
use crate::error::{Error, Result};
use crate::occupancy::{simulate_occupancy, LocationConfig};
use crate::samplers::RngStream;
use crate::stats::{count_crossings, crossover_point, normal_approx_error};
use crate::table::SeriesTable;

pub const HOLDING_STREAM_OFFSET: u64 = 1 << 32;

/// One experiment cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub label: String,
    pub law: GapLaw,
    pub horizon: f64,
    pub node_budget: u32,
    pub replications: u64,
    pub seed: u64,
}

impl Scenario {
    pub fn new(label: impl Into<String>, law: GapLaw, cfg: &ExperimentConfig) -> Self {
        Self {
            label: label.into(),
            law,
            horizon: cfg.horizon,
            node_budget: cfg.nodes,
            replications: cfg.replications,
            seed: cfg.seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::Config(format!(
                "scenario horizon {} must be positive",
                self.horizon
            )));
        }
        if self.replications < 1 || self.node_budget < 1 {
            return Err(Error::Config(
                "scenario needs replications >= 1 and node_budget >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Simulates every replication of this cell.
    pub fn run_occupancy(&self, loc: &LocationConfig) -> Result<Vec<ReplicationResult>> {
        self.validate()?;
        (0..self.replications)
            .into_par_iter()
            .map(|rep| {
                let mut arrivals = RngStream::new(self.seed, rep);
                let mut holding = RngStream::new(self.seed, rep + HOLDING_STREAM_OFFSET);
                let trace = generate_trace(self.law, self.horizon, &mut arrivals)?;
                let series = simulate_occupancy(&trace, loc, &mut holding);
                let stats = series.peak_stats()?;
                Ok(ReplicationResult {
                    arrivals: series.arrivals(),
                    peak: stats.peak,
                    peak_time: stats.peak_time,
                    mean_occupancy: stats.mean,
                    blocking_fraction: series.blocking_fraction().unwrap_or(f64::NAN),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationResult {
    pub arrivals: u64,
    pub peak: u32,
    pub peak_time: f64,
    pub mean_occupancy: f64,
    /// NaN when the replication saw no arrivals.
    pub blocking_fraction: f64,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

/// Mean over the replications that saw at least one arrival.
fn mean_blocking(results: &[ReplicationResult]) -> f64 {
    mean(
        results
            .iter()
            .map(|r| r.blocking_fraction)
            .filter(|b| !b.is_nan()),
    )
}

fn push_occupancy_columns(
    table: &mut SeriesTable,
    prefix: &str,
    results: &[ReplicationResult],
) -> Result<()> {
    let col = |f: fn(&ReplicationResult) -> f64| results.iter().map(f).collect::<Vec<_>>();
    table.push_column(format!("{prefix}arrivals"), col(|r| r.arrivals as f64))?;
    table.push_column(format!("{prefix}peak"), col(|r| r.peak as f64))?;
    table.push_column(format!("{prefix}peak_time"), col(|r| r.peak_time))?;
    table.push_column(format!("{prefix}mean_occupancy"), col(|r| r.mean_occupancy))?;
    table.push_column(
        format!("{prefix}blocking_fraction"),
        col(|r| r.blocking_fraction),
    )?;
    Ok(())
}

fn replication_axis(cfg: &ExperimentConfig) -> Vec<f64> {
    (0..cfg.replications).map(|r| r as f64).collect()
}

fn optional(x: Option<f64>) -> f64 {
    x.unwrap_or(f64::NAN)
}

/// One sweep cell: its label (`alpha=0.3`) and the tables it produced.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub label: String,
    pub parameter: f64,
    pub tables: Vec<SeriesTable>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub cells: Vec<SweepCell>,
    pub summary: SeriesTable,
}

impl SweepOutput {
    pub fn tables(&self) -> impl Iterator<Item = &SeriesTable> {
        self.cells
            .iter()
            .flat_map(|c| c.tables.iter())
            .chain(std::iter::once(&self.summary))
    }
}

fn cell_provenance(cfg: &ExperimentConfig, command: &str, cell: &str) -> Vec<(String, String)> {
    let mut p = vec![
        ("command".to_string(), command.to_string()),
        ("cell".to_string(), cell.to_string()),
    ];
    p.extend(cfg.provenance());
    p
}

/// Pareto curves against the exponential baseline plus occupancy under
/// Pareto gaps, one cell per shape value.
pub fn run_alpha_sweep(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let exp = ExponentialParams::new(cfg.exp_rate)?;
    let grid = cfg.x_grid();
    let loc = cfg.location();

    struct CellResult {
        cell: SweepCell,
        pdf_cross: Option<f64>,
        survival_cross: Option<f64>,
        survival_crossings: usize,
        pareto_mean: f64,
        pareto_peak: f64,
    }

    let cells: Vec<CellResult> = cfg
        .alphas
        .par_iter()
        .map(|&alpha| -> Result<CellResult> {
            let label = format!("alpha={alpha}");
            let provenance = cell_provenance(cfg, "sweep-alpha", &label);
            let one = ParetoOneParams::new(alpha)?;
            let twos: Vec<ParetoTwoParams> = cfg
                .betas
                .iter()
                .map(|&b| ParetoTwoParams::new(alpha, b))
                .collect::<Result<_>>()?;

            let mut curves =
                SeriesTable::new(format!("sweep_alpha_a{alpha}_curves"), "x", grid.clone())?
                    .with_provenance(&provenance);
            let eval = |f: &dyn Fn(f64) -> Result<f64>| {
                grid.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()
            };
            curves.push_column("exp_pdf", eval(&|x| exp_pdf(x, &exp))?)?;
            curves.push_column("exp_survival", eval(&|x| exp_survival(x, &exp))?)?;
            curves.push_column("pareto1_pdf", eval(&|x| pareto1_pdf(x, &one))?)?;
            curves.push_column("pareto1_survival", eval(&|x| pareto1_survival(x, &one))?)?;
            for p in &twos {
                let b = p.scale();
                curves.push_column(format!("lomax_pdf_b{b}"), eval(&|x| lomax_pdf(x, p))?)?;
                curves.push_column(
                    format!("lomax_survival_b{b}"),
                    eval(&|x| lomax_survival(x, p))?,
                )?;
            }

            let mut occupancy = SeriesTable::new(
                format!("sweep_alpha_a{alpha}_occupancy"),
                "replication",
                replication_axis(cfg),
            )?
            .with_provenance(&provenance);
            let pareto_runs =
                Scenario::new(&label, GapLaw::ParetoOne(one), cfg).run_occupancy(&loc)?;
            push_occupancy_columns(&mut occupancy, "pareto1_", &pareto_runs)?;
            for p in &twos {
                let runs = Scenario::new(&label, GapLaw::Lomax(*p), cfg).run_occupancy(&loc)?;
                push_occupancy_columns(&mut occupancy, &format!("lomax_b{}_", p.scale()), &runs)?;
            }

            let pdf = |x: f64| pareto1_pdf(x, &one).expect("x >= 0");
            let surv = |x: f64| pareto1_survival(x, &one).expect("x >= 0");
            let epdf = |x: f64| exp_pdf(x, &exp).expect("x >= 0");
            let esurv = |x: f64| exp_survival(x, &exp).expect("x >= 0");
            let pdf_cross = crossover_point(pdf, epdf, 0.0, cfg.crossover_max).unwrap_or(None);
            let survival_cross =
                crossover_point(surv, esurv, 0.0, cfg.crossover_max).unwrap_or(None);
            let search_grid: Vec<f64> = (0..=10_000)
                .map(|i| i as f64 * cfg.crossover_max / 10_000.0)
                .collect();

            Ok(CellResult {
                pdf_cross,
                survival_cross,
                survival_crossings: count_crossings(surv, esurv, &search_grid),
                pareto_mean: mean(pareto_runs.iter().map(|r| r.mean_occupancy)),
                pareto_peak: mean(pareto_runs.iter().map(|r| r.peak as f64)),
                cell: SweepCell {
                    label,
                    parameter: alpha,
                    tables: vec![curves, occupancy],
                },
            })
        })
        .collect::<Result<_>>()?;

    let mut summary = SeriesTable::new("sweep_alpha_summary", "alpha", cfg.alphas.clone())?
        .with_provenance(&cell_provenance(cfg, "sweep-alpha", "summary"));
    summary.push_column(
        "pdf_crossover",
        cells.iter().map(|c| optional(c.pdf_cross)).collect(),
    )?;
    summary.push_column(
        "survival_crossover",
        cells.iter().map(|c| optional(c.survival_cross)).collect(),
    )?;
    summary.push_column(
        "survival_crossings",
        cells.iter().map(|c| c.survival_crossings as f64).collect(),
    )?;
    summary.push_column(
        "pareto1_mean_occupancy",
        cells.iter().map(|c| c.pareto_mean).collect(),
    )?;
    summary.push_column(
        "pareto1_mean_peak",
        cells.iter().map(|c| c.pareto_peak).collect(),
    )?;

    Ok(SweepOutput {
        cells: cells.into_iter().map(|c| c.cell).collect(),
        summary,
    })
}

/// Smallest `n` maximising the PMF over `0..=nodes`.
pub fn pmf_mode(p: &PoissonParams, nodes: u32) -> u64 {
    let mut best = 0;
    let mut best_mass = f64::NEG_INFINITY;
    for n in 0..=nodes as u64 {
        let m = poisson_pmf(n, p);
        if m > best_mass {
            best = n;
            best_mass = m;
        }
    }
    best
}

/// Poisson count laws and exponential-gap occupancy, one cell per rate.
pub fn run_rate_sweep(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let loc = cfg.location();
    let ns: Vec<f64> = (0..=cfg.nodes).map(f64::from).collect();

    struct CellResult {
        cell: SweepCell,
        mode: u64,
        mass: f64,
        runs: Vec<ReplicationResult>,
        normal_error: f64,
    }

    let cells: Vec<CellResult> = cfg
        .rates
        .par_iter()
        .map(|&rate| -> Result<CellResult> {
            let label = format!("rate={rate}");
            let provenance = cell_provenance(cfg, "sweep-rate", &label);
            let p = PoissonParams::with_rate(rate)?;

            let mut pmf = SeriesTable::new(format!("sweep_rate_l{rate}_pmf"), "n", ns.clone())?
                .with_provenance(&provenance);
            let counts = 0..=cfg.nodes as u64;
            pmf.push_column(
                "poisson_pmf",
                counts.clone().map(|n| poisson_pmf(n, &p)).collect(),
            )?;
            pmf.push_column(
                "poisson_cdf",
                counts.clone().map(|n| poisson_cdf(n, &p)).collect(),
            )?;
            pmf.push_column(
                "normal_approx_pmf",
                counts.map(|n| normal_approx_pmf(n, &p)).collect(),
            )?;

            let runs =
                Scenario::new(&label, GapLaw::exponential(rate)?, cfg).run_occupancy(&loc)?;
            let mut occupancy = SeriesTable::new(
                format!("sweep_rate_l{rate}_occupancy"),
                "replication",
                replication_axis(cfg),
            )?
            .with_provenance(&provenance);
            push_occupancy_columns(&mut occupancy, "", &runs)?;

            Ok(CellResult {
                mode: pmf_mode(&p, cfg.nodes),
                mass: (0..=cfg.nodes as u64).map(|n| poisson_pmf(n, &p)).sum(),
                normal_error: normal_approx_error(&p),
                runs,
                cell: SweepCell {
                    label,
                    parameter: rate,
                    tables: vec![pmf, occupancy],
                },
            })
        })
        .collect::<Result<_>>()?;

    let mut summary = SeriesTable::new("sweep_rate_summary", "rate", cfg.rates.clone())?
        .with_provenance(&cell_provenance(cfg, "sweep-rate", "summary"));
    summary.push_column("pmf_mode", cells.iter().map(|c| c.mode as f64).collect())?;
    summary.push_column("pmf_mass", cells.iter().map(|c| c.mass).collect())?;
    summary.push_column(
        "normal_approx_error",
        cells.iter().map(|c| c.normal_error).collect(),
    )?;
    summary.push_column(
        "mean_occupancy",
        cells
            .iter()
            .map(|c| mean(c.runs.iter().map(|r| r.mean_occupancy)))
            .collect(),
    )?;
    summary.push_column(
        "mean_peak",
        cells
            .iter()
            .map(|c| mean(c.runs.iter().map(|r| r.peak as f64)))
            .collect(),
    )?;
    summary.push_column(
        "mean_blocking",
        cells.iter().map(|c| mean_blocking(&c.runs)).collect(),
    )?;

    Ok(SweepOutput {
        cells: cells.into_iter().map(|c| c.cell).collect(),
        summary,
    })
}

/// Located crossovers of one shape value against the exponential baseline.
/// `None` means no crossing on the search interval, or (for densities) that
/// the Pareto curve already starts above the baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossoverSummary {
    pub alpha: f64,
    pub pdf: Option<f64>,
    pub survival: Option<f64>,
    /// Per scale value: (scale, Lomax pdf crossover, Lomax survival crossover).
    pub lomax: Vec<(f64, Option<f64>, Option<f64>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareOutput {
    pub curves: SeriesTable,
    pub crossover_table: SeriesTable,
    pub crossovers: Vec<CrossoverSummary>,
}

impl CompareOutput {
    pub fn tables(&self) -> impl Iterator<Item = &SeriesTable> {
        [&self.curves, &self.crossover_table].into_iter()
    }
}

/// Density curves of every family on the x grid plus the crossover summary.
pub fn run_tail_comparison(cfg: &ExperimentConfig) -> Result<CompareOutput> {
    cfg.validate()?;
    let exp = ExponentialParams::new(cfg.exp_rate)?;
    let grid = cfg.x_grid();
    let provenance = cell_provenance(cfg, "compare", "all");

    let mut curves =
        SeriesTable::new("compare_pdf", "x", grid.clone())?.with_provenance(&provenance);
    let eval =
        |f: &dyn Fn(f64) -> Result<f64>| grid.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>();
    curves.push_column("exp_pdf", eval(&|x| exp_pdf(x, &exp))?)?;
    for &alpha in &cfg.alphas {
        let one = ParetoOneParams::new(alpha)?;
        curves.push_column(
            format!("pareto1_pdf_a{alpha}"),
            eval(&|x| pareto1_pdf(x, &one))?,
        )?;
    }
    for &alpha in &cfg.alphas {
        for &beta in &cfg.betas {
            let two = ParetoTwoParams::new(alpha, beta)?;
            curves.push_column(
                format!("lomax_pdf_a{alpha}_b{beta}"),
                eval(&|x| lomax_pdf(x, &two))?,
            )?;
        }
    }
    for &alpha in &cfg.alphas {
        for &beta in &cfg.betas {
            let two = ParetoTwoParams::new(alpha, beta)?;
            // undefined at the origin
            let col = grid
                .iter()
                .map(|&x| pareto2_pdf_as_written(x, &two).unwrap_or(f64::NAN))
                .collect();
            curves.push_column(format!("as_written_pdf_a{alpha}_b{beta}"), col)?;
            if alpha >= 1.0 {
                curves.push_column(
                    format!("as_written_cdf_a{alpha}_b{beta}"),
                    eval(&|x| pareto2_cdf_as_written(x, &two))?,
                )?;
            }
        }
    }

    let epdf = |x: f64| exp_pdf(x, &exp).expect("x >= 0");
    let esurv = |x: f64| exp_survival(x, &exp).expect("x >= 0");
    let cross = |f: &dyn Fn(f64) -> f64, g: &dyn Fn(f64) -> f64| {
        crossover_point(f, g, 0.0, cfg.crossover_max).unwrap_or(None)
    };
    let crossovers: Vec<CrossoverSummary> = cfg
        .alphas
        .iter()
        .map(|&alpha| -> Result<CrossoverSummary> {
            let one = ParetoOneParams::new(alpha)?;
            let lomax = cfg
                .betas
                .iter()
                .map(|&beta| -> Result<(f64, Option<f64>, Option<f64>)> {
                    let two = ParetoTwoParams::new(alpha, beta)?;
                    Ok((
                        beta,
                        cross(&|x| lomax_pdf(x, &two).expect("x >= 0"), &epdf),
                        cross(&|x| lomax_survival(x, &two).expect("x >= 0"), &esurv),
                    ))
                })
                .collect::<Result<_>>()?;
            Ok(CrossoverSummary {
                alpha,
                pdf: cross(&|x| pareto1_pdf(x, &one).expect("x >= 0"), &epdf),
                survival: cross(&|x| pareto1_survival(x, &one).expect("x >= 0"), &esurv),
                lomax,
            })
        })
        .collect::<Result<_>>()?;

    let mut crossover_table = SeriesTable::new("compare_crossover", "alpha", cfg.alphas.clone())?
        .with_provenance(&provenance);
    crossover_table.push_column(
        "pareto1_pdf_crossover",
        crossovers.iter().map(|c| optional(c.pdf)).collect(),
    )?;
    crossover_table.push_column(
        "pareto1_survival_crossover",
        crossovers.iter().map(|c| optional(c.survival)).collect(),
    )?;
    for (i, &beta) in cfg.betas.iter().enumerate() {
        crossover_table.push_column(
            format!("lomax_pdf_crossover_b{beta}"),
            crossovers.iter().map(|c| optional(c.lomax[i].1)).collect(),
        )?;
        crossover_table.push_column(
            format!("lomax_survival_crossover_b{beta}"),
            crossovers.iter().map(|c| optional(c.lomax[i].2)).collect(),
        )?;
    }

    Ok(CompareOutput {
        curves,
        crossover_table,
        crossovers,
    })
}
