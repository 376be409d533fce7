//! Command-line front end: argument parsing, run configuration and the three
//! report-producing commands.
//!
//! Every report starts with a header carrying the resolved [`RunConfig`] as
//! JSON. `iauc replay <report>` re-runs from that header; the only line that
//! differs between runs is the `generated-unix` timestamp.

mod report;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::combination::{lars_path, ols_combination, tgdm_maximize, CombinationResult, TgdmConfig};
use crate::data::{load_delimited, standardize, Dataset, GoldColumn, LoadOptions};
use crate::density::{fit_weight, BandwidthRule, WeightSpec};
use crate::error::{Error, Result};
use crate::inference::{bootstrap_variance, wald_p_value, FnStatistic};
use crate::measures::auc_integrated;
use crate::simgen::{bivariate_cells, linear_cells, null_cells, run_table, Measure, TableRow};
use crate::util::splitmix64;

pub use report::{config_from_header, strip_timestamp, Report, ReportBody};

#[derive(Debug, Parser)]
#[command(name = "iauc", version, about = "Integrated AUC indexes against a continuous gold standard")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Index every score variable on its own.
    Evaluate {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        common: CommonArgs,
        /// Extra cut weight reported next to the uniform, normal and kernel indexes.
        #[arg(long)]
        weight: Option<WeightSpec>,
    },
    /// Least-squares and TGDM linear combinations of the score variables.
    Combine {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        common: CommonArgs,
        /// Cut weight of the TGDM objective.
        #[arg(long, default_value = "kernel")]
        weight: WeightSpec,
        /// Sigmoid bandwidth h; defaults to sd(anchor) * n^(-1/3).
        #[arg(long)]
        bandwidth: Option<f64>,
        /// TGDM threshold in [0, 1].
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
    },
    /// Simulation grids.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum)]
        design: SimDesign,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        replicates: usize,
        /// Numbers of variables for the linear design.
        #[arg(long, value_delimiter = ',', default_value = "4,10,20")]
        p: Vec<usize>,
        #[arg(long)]
        bandwidth: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
    },
    /// Re-run the configuration stored in a report header.
    Replay {
        report: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Gold-standard column: a header name, or a zero-based index.
    #[arg(long)]
    pub gold: String,
    /// Field delimiter; sniffed from the first line when omitted.
    #[arg(long)]
    pub delimiter: Option<char>,
    #[arg(long)]
    pub no_header: bool,
    /// Scale every column (gold included) to mean 0, sd 1.
    #[arg(long)]
    pub standardize: bool,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Bootstrap replicates; 0 disables standard errors.
    #[arg(long, default_value_t = 200)]
    pub boot: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Delimited)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// Tab-separated text.
    Delimited,
    /// One JSON object per line.
    Records,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimDesign {
    /// Bivariate normal score and gold standard over a sigma/rho grid.
    Bivariate,
    /// `y = z^2 + e` for normal, t2 and Cauchy gold standards.
    Null,
    /// Linear model with two active variables out of each `p`.
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputConfig {
    pub path: PathBuf,
    pub gold: String,
    pub delimiter: Option<char>,
    pub no_header: bool,
    pub standardize: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub design: SimDesign,
    pub n: usize,
    pub replicates: usize,
    pub p: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Evaluate,
    Combine,
    Simulate,
}

/// Everything that determines a report's content.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub input: Option<InputConfig>,
    pub simulation: Option<SimulationConfig>,
    pub weight: Option<String>,
    pub bandwidth: Option<f64>,
    pub tau: Option<f64>,
    pub boot: usize,
    pub seed: u64,
    pub format: Format,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        match (self.command, self.input.is_some(), self.simulation.is_some()) {
            (CommandKind::Simulate, false, true) => {}
            (CommandKind::Evaluate | CommandKind::Combine, true, false) => {}
            _ => return bad("exactly one input source is required"),
        }
        if self.boot == 1 {
            return bad("--boot must be 0 or at least 2");
        }
        if let Some(h) = self.bandwidth {
            if !(h > 0.0 && h.is_finite()) {
                return bad("--bandwidth must be > 0");
            }
        }
        if let Some(s) = &self.simulation {
            if s.replicates == 0 {
                return bad("--replicates must be at least 1");
            }
            if s.design == SimDesign::Linear && (s.p.is_empty() || s.p.iter().any(|&p| p < 2)) {
                return bad("the linear design needs every p >= 2");
            }
        }
        Ok(())
    }

    fn weight_spec(&self) -> Result<Option<WeightSpec>> {
        self.weight.as_deref().map(str::parse).transpose()
    }

    fn tgdm(&self) -> TgdmConfig {
        TgdmConfig { tau: self.tau.unwrap_or(1.0), h: self.bandwidth, ..TgdmConfig::default() }
    }
}

/// Process exit status for a finished or failed run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Input = 2,
    Numerical = 3,
    NotConverged = 4,
}

/// Exit status matching an error.
pub fn status_of(e: &Error) -> Status {
    match e {
        Error::IllConditioned { .. }
        | Error::BootstrapFailures { .. }
        | Error::DegenerateTest
        | Error::NonFinite(_)
        | Error::SingleClass => Status::Numerical,
        _ => Status::Input,
    }
}

fn input_config(a: InputArgs) -> InputConfig {
    InputConfig {
        path: a.input,
        gold: a.gold,
        delimiter: a.delimiter,
        no_header: a.no_header,
        standardize: a.standardize,
    }
}

/// Resolves parsed arguments into a configuration and an optional output path.
pub fn resolve(command: Command) -> Result<(RunConfig, Option<PathBuf>)> {
    let (cfg, out) = match command {
        Command::Evaluate { input, common, weight } => (
            RunConfig {
                command: CommandKind::Evaluate,
                input: Some(input_config(input)),
                simulation: None,
                weight: weight.map(|w| w.to_string()),
                bandwidth: None,
                tau: None,
                boot: common.boot,
                seed: common.seed,
                format: common.format,
            },
            common.out,
        ),
        Command::Combine { input, common, weight, bandwidth, tau } => (
            RunConfig {
                command: CommandKind::Combine,
                input: Some(input_config(input)),
                simulation: None,
                weight: Some(weight.to_string()),
                bandwidth,
                tau: Some(tau),
                boot: common.boot,
                seed: common.seed,
                format: common.format,
            },
            common.out,
        ),
        Command::Simulate { common, design, n, replicates, p, bandwidth, tau } => (
            RunConfig {
                command: CommandKind::Simulate,
                input: None,
                simulation: Some(SimulationConfig {
                    design,
                    n,
                    replicates,
                    p: if design == SimDesign::Linear { p } else { Vec::new() },
                }),
                weight: None,
                bandwidth,
                tau: Some(tau),
                boot: common.boot,
                seed: common.seed,
                format: common.format,
            },
            common.out,
        ),
        Command::Replay { report, out } => {
            let text = std::fs::read_to_string(&report).map_err(|source| Error::Io { path: report.clone(), source })?;
            (report::config_from_header(&text, &report)?, out)
        }
    };
    cfg.validate()?;
    Ok((cfg, out))
}

/// Runs a resolved configuration.
pub fn execute(cfg: &RunConfig) -> Result<(Report, Status)> {
    cfg.validate()?;
    let (body, status) = match cfg.command {
        CommandKind::Evaluate => evaluate(cfg)?,
        CommandKind::Combine => combine(cfg)?,
        CommandKind::Simulate => simulate(cfg)?,
    };
    Ok((Report { config: cfg.clone(), body }, status))
}

/// Parses, runs and writes; returns the process exit status.
pub fn main_with(cli: Cli) -> Status {
    let (cfg, out) = match resolve(cli.command) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return status_of(&e);
        }
    };
    match execute(&cfg).and_then(|(report, status)| write_report(&report, out.as_deref()).map(|_| status)) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e}");
            status_of(&e)
        }
    }
}

fn write_report(report: &Report, out: Option<&Path>) -> Result<()> {
    let text = report.render(unix_now());
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| Error::Io { path: PathBuf::from("<stdout>"), source })
        }
    }
}

fn unix_now() -> u64 {
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn load(cfg: &RunConfig, notices: &mut Vec<String>) -> Result<Dataset> {
    let input = cfg.input.as_ref().expect("validated");
    let delimiter = match input.delimiter {
        Some(c) if c.is_ascii() => Some(c as u8),
        Some(c) => return Err(Error::InvalidArgument(format!("delimiter {c:?} is not ASCII"))),
        None => None,
    };
    let gold: GoldColumn = input.gold.parse().expect("infallible");
    let opts = LoadOptions { delimiter, no_header: input.no_header, columns: None };
    let loaded = load_delimited(&input.path, &gold, &opts)?;
    if loaded.dropped_rows > 0 {
        notices.push(format!("dropped {} of {} rows with missing values", loaded.dropped_rows, loaded.total_rows));
    }
    if !loaded.skipped_columns.is_empty() {
        notices.push(format!("skipped non-numeric columns: {}", loaded.skipped_columns.join(", ")));
    }
    if input.standardize {
        Ok(standardize(&loaded.dataset)?.0)
    } else {
        Ok(loaded.dataset)
    }
}

/// Point value, bootstrap sd and Wald p-value against `null`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub value: f64,
    pub sd: Option<f64>,
    pub p_value: Option<f64>,
}

fn seed_for(seed: u64, a: usize, b: usize) -> u64 {
    splitmix64(seed ^ splitmix64(((a as u64) << 16) | b as u64))
}

/// Value of `stat` on `d`, with bootstrap sd and Wald p-value when `boot >= 2`.
fn estimate(
    d: &Dataset,
    boot: usize,
    seed: u64,
    null: f64,
    stat: &(dyn Fn(&Dataset) -> Result<f64> + Sync),
) -> Result<Cell> {
    let value = stat(d)?;
    if boot < 2 {
        return Ok(Cell { value, sd: None, p_value: None });
    }
    let report = bootstrap_variance(d, &FnStatistic::new("index", stat), boot, seed)?;
    Ok(Cell { value, sd: Some(report.sd()), p_value: Some(wald_p_value(value, report.variance, null)) })
}

/// One row of the single-variable report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableRow {
    pub variable: String,
    pub a_i1: Cell,
    pub a_i2: Cell,
    pub a_i3: Cell,
    pub theta: Cell,
    pub custom: Option<Cell>,
    /// `A_I3 < 0.5`: larger scores go with smaller gold values.
    pub reversed: bool,
}

fn evaluate(cfg: &RunConfig) -> Result<(ReportBody, Status)> {
    let mut notices = Vec::new();
    let d = load(cfg, &mut notices)?;
    let custom = cfg.weight_spec()?;
    let mut rows = Vec::with_capacity(d.p());
    for j in 0..d.p() {
        let one = d.select_columns(&[j])?;
        let measure = |k: usize, m: Measure| -> Result<Cell> {
            estimate(&one, cfg.boot, seed_for(cfg.seed, j, k), 0.5, &|b: &Dataset| m.evaluate(b.column(0), b.z()))
        };
        let a_i3 = measure(3, Measure::AucKernel)?;
        let custom = match &custom {
            Some(spec) => Some(estimate(&one, cfg.boot, seed_for(cfg.seed, j, 5), 0.5, &|b: &Dataset| {
                Ok(auc_integrated(b.column(0), b.z(), &fit_weight(spec, b.z())?)?.value)
            })?),
            None => None,
        };
        rows.push(VariableRow {
            variable: d.names()[j].clone(),
            a_i1: measure(1, Measure::AucUniform)?,
            a_i2: measure(2, Measure::AucNormal)?,
            reversed: a_i3.value < 0.5,
            a_i3,
            theta: measure(4, Measure::Theta)?,
            custom,
        });
    }
    rows.sort_by(|a, b| b.a_i3.value.total_cmp(&a.a_i3.value));
    for r in rows.iter().filter(|r| r.reversed) {
        notices.push(format!("{} runs against the gold standard (A_I3 < 0.5); consider its negation", r.variable));
    }
    Ok((ReportBody::Evaluate { rows, custom: cfg.weight.clone(), notices }, Status::Ok))
}

/// Summary of one combined score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinedScore {
    pub method: String,
    pub coefficients: Vec<f64>,
    pub a_i3: Cell,
    pub theta: Cell,
    pub iterations: usize,
    pub converged: bool,
    pub anchor: Option<String>,
}

fn combined_score(
    d: &Dataset,
    res: &CombinationResult,
    label: &str,
    cfg: &RunConfig,
    k: usize,
) -> Result<CombinedScore> {
    let l = &res.l;
    let index = |m: Measure, slot: usize| {
        estimate(d, cfg.boot, seed_for(cfg.seed, 1000 + k, slot), 0.5, &|b: &Dataset| m.evaluate(&b.project(l)?, b.z()))
    };
    Ok(CombinedScore {
        method: label.to_string(),
        coefficients: l.clone(),
        a_i3: index(Measure::AucKernel, 0)?,
        theta: index(Measure::Theta, 1)?,
        iterations: res.iterations,
        converged: res.converged,
        anchor: res.anchor.map(|a| d.names()[a].clone()),
    })
}

fn combine(cfg: &RunConfig) -> Result<(ReportBody, Status)> {
    let mut notices = Vec::new();
    let d = load(cfg, &mut notices)?;
    if d.p() < 2 {
        return Err(Error::InvalidArgument("combination requires ≥2 variables".into()));
    }
    let cc = match ols_combination(&d) {
        Ok(r) => r,
        Err(e @ Error::IllConditioned { .. }) => {
            notices.push(format!("{e}; CC column is the LARS endpoint"));
            lars_path(&d, usize::MAX)?
                .pop()
                .ok_or_else(|| Error::InvalidArgument("no variable is correlated with the gold standard".into()))?
        }
        Err(e) => return Err(e),
    };
    let spec = cfg.weight_spec()?.unwrap_or(WeightSpec::Kernel(BandwidthRule::Silverman));
    let w = fit_weight(&spec, d.z())?;
    let tgdm = tgdm_maximize(&d, &w, &cfg.tgdm())?;
    let status = if tgdm.converged { Status::Ok } else { Status::NotConverged };
    if !tgdm.converged {
        notices.push(format!("TGDM stopped after {} iterations without converging", tgdm.iterations));
    }
    let scores = vec![combined_score(&d, &cc, "CC", cfg, 0)?, combined_score(&d, &tgdm, "TGDM", cfg, 1)?];
    Ok((ReportBody::Combine { variables: d.names().to_vec(), scores, notices }, status))
}

fn simulate(cfg: &RunConfig) -> Result<(ReportBody, Status)> {
    let s = cfg.simulation.as_ref().expect("validated");
    let cells = match s.design {
        SimDesign::Bivariate => bivariate_cells(s.n, s.replicates, cfg.boot, cfg.seed),
        SimDesign::Null => null_cells(s.n, s.replicates, cfg.boot, cfg.seed),
        SimDesign::Linear => linear_cells(&s.p, s.n, s.replicates, cfg.seed, &cfg.tgdm()),
    };
    let rows: Vec<TableRow> = run_table(&cells)?;
    let status = if rows.iter().any(|r| r.failures > 0) { Status::Numerical } else { Status::Ok };
    Ok((ReportBody::Simulate { rows }, status))
}
