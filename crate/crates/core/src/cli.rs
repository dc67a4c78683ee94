//! Command-line surface: `overlap`, `dimension` and `sweep`.
//!
//! Every parameter is validated before any work starts or any file is
//! created. Exit codes: 0 success, 2 validation error, 3 node budget
//! exhausted (results and bracketing bounds are still written), 1 I/O error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::config::SystemFile;
use crate::dimension::{
    bernoulli_convolution_dimension, empirical_local_dimension, full_report, EmpiricalParams,
    RadiusGrid, ReportParams,
};
use crate::error::Error;
use crate::ifs::IfsSystem;
use crate::measures::BernoulliSpec;
use crate::output::{self, SweepRow};
use crate::overlap::{folding_entropy, overlap_grid, SeriesParams, DEFAULT_TAU_GRID};

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ifsdim",
    version,
    about = "Overlap numbers and pointwise dimension of self-similar measures"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the overlap growth rate and overlap number.
    Overlap {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        overlap: OverlapArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Formula and empirical pointwise dimension with all intermediate quantities.
    Dimension {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        overlap: OverlapArgs,
        #[command(flatten)]
        empirical: EmpiricalArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Overlap number and dimension of Bernoulli convolutions over a list of λ.
    Sweep {
        /// Comma-separated contraction ratios.
        #[arg(long, value_delimiter = ',', required = true)]
        lambda: Vec<f64>,
        #[command(flatten)]
        overlap: OverlapArgs,
        #[command(flatten)]
        empirical: EmpiricalArgs,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Debug, Args)]
pub struct SystemArgs {
    /// JSON system definition.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Built-in system: cantor3, touching-half or bernoulli-convolution.
    #[arg(long)]
    pub preset: Option<String>,
    /// Contraction ratio of the Bernoulli convolution preset.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Comma-separated probability vector; uniform when omitted.
    #[arg(long, value_delimiter = ',')]
    pub probs: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct OverlapArgs {
    #[arg(long, default_value_t = 2)]
    pub n_min: usize,
    #[arg(long, default_value_t = 18)]
    pub n_max: usize,
    /// Samples per n.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Comma-separated genericity tolerances; `inf` or 0 disables the filter.
    #[arg(long, value_delimiter = ',')]
    pub tau: Option<Vec<f64>>,
    #[arg(long, default_value_t = 10)]
    pub cover_depth: usize,
    /// DFS node expansions allowed per query.
    #[arg(long, default_value_t = crate::overlap::DEFAULT_NODE_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Args)]
pub struct EmpiricalArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub points: usize,
    #[arg(long, default_value_t = 200)]
    pub centers: usize,
    #[arg(long)]
    pub r_lo: Option<f64>,
    #[arg(long)]
    pub r_hi: Option<f64>,
    #[arg(long)]
    pub r_count: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 uses all cores. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

/// A validated system and measure.
#[derive(Debug, Clone)]
pub struct SystemChoice {
    pub system: IfsSystem,
    pub probs: BernoulliSpec,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

impl SystemArgs {
    pub fn resolve(&self) -> Result<SystemChoice, Error> {
        let (system, file_probs) = match (&self.config, self.preset.as_deref(), self.lambda) {
            (Some(path), None, None) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
                let file = SystemFile::parse(&text)?;
                (file.system()?, file.probabilities.clone())
            }
            (Some(_), _, _) => {
                return Err(invalid(
                    "--config cannot be combined with --preset or --lambda",
                ))
            }
            (None, Some("cantor3"), None) => (IfsSystem::cantor_middle_thirds(), None),
            (None, Some("touching-half"), None) => (IfsSystem::bernoulli_convolution(0.5)?, None),
            (None, Some("bernoulli-convolution") | None, Some(l)) => {
                (IfsSystem::bernoulli_convolution(l)?, None)
            }
            (None, Some("bernoulli-convolution"), None) => {
                return Err(invalid("preset bernoulli-convolution needs --lambda"))
            }
            (None, Some(name), _) => {
                return Err(invalid(format!(
                "unknown preset {name:?} (expected cantor3, touching-half, bernoulli-convolution)"
            )))
            }
            (None, None, None) => {
                return Err(invalid("one of --config, --preset or --lambda is required"))
            }
        };
        let probs = match self.probs.clone().or(file_probs) {
            Some(p) => BernoulliSpec::new(p)?,
            None => BernoulliSpec::uniform(system.alphabet_size())?,
        };
        if probs.len() != system.alphabet_size() {
            return Err(Error::AlphabetMismatch {
                system: system.alphabet_size(),
                probs: probs.len(),
            });
        }
        Ok(SystemChoice { system, probs })
    }
}

impl OverlapArgs {
    pub fn series_params(&self) -> Result<SeriesParams, Error> {
        let p = SeriesParams {
            n_min: self.n_min,
            n_max: self.n_max,
            n_samples: self.samples,
            cover_depth: self.cover_depth,
            node_budget: self.budget,
            ..SeriesParams::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn taus(&self, p: &BernoulliSpec) -> Result<Vec<Option<f64>>, Error> {
        match &self.tau {
            Some(list) if list.is_empty() => Err(invalid("--tau list is empty")),
            Some(list) => list
                .iter()
                .map(|&t| {
                    if t.is_nan() || t < 0.0 {
                        Err(invalid(format!("tau must be >= 0, got {t}")))
                    } else {
                        Ok(crate::overlap::effective_tau(Some(t)))
                    }
                })
                .collect(),
            None if p.is_uniform() => Ok(vec![None]),
            None => Ok(DEFAULT_TAU_GRID.to_vec()),
        }
    }
}

impl EmpiricalArgs {
    pub fn params(&self, sys: &IfsSystem) -> Result<EmpiricalParams, Error> {
        let default = RadiusGrid::default_for(sys);
        let params = EmpiricalParams {
            n_points: self.points,
            n_centers: self.centers,
            grid: RadiusGrid {
                r_lo: self.r_lo.unwrap_or(default.r_lo),
                r_hi: self.r_hi.unwrap_or(default.r_hi),
                count: self.r_count.unwrap_or(default.count),
            },
        };
        params.validate(sys)?;
        Ok(params)
    }
}

/// Outcome of a command.
#[derive(Debug)]
pub enum CliError {
    Validation(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Validation(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn validate_run(run: &RunArgs) -> Result<(), CliError> {
    if run.out.exists() && !run.out.is_dir() {
        return Err(invalid(format!(
            "{} exists and is not a directory",
            run.out.display()
        ))
        .into());
    }
    Ok(())
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(dir.join(name), bytes)?;
    Ok(())
}

fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Io(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Runs the parsed command and returns the process exit code.
pub fn run(cli: Cli) -> u8 {
    let result = match cli.command {
        Command::Overlap {
            system,
            overlap,
            run,
        } => cmd_overlap(&system, &overlap, &run),
        Command::Dimension {
            system,
            overlap,
            empirical,
            run,
        } => cmd_dimension(&system, &overlap, &empirical, &run),
        Command::Sweep {
            lambda,
            overlap,
            empirical,
            run,
        } => cmd_sweep(&lambda, &overlap, &empirical, &run),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Validation(e)) => {
            eprintln!("error: {e}");
            EXIT_VALIDATION
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            EXIT_IO
        }
    }
}

pub fn cmd_overlap(
    system: &SystemArgs,
    overlap: &OverlapArgs,
    run: &RunArgs,
) -> Result<u8, CliError> {
    let choice = system.resolve()?;
    let params = overlap.series_params()?;
    let taus = overlap.taus(&choice.probs)?;
    validate_run(run)?;

    let result = with_workers(run.workers, || {
        overlap_grid(&choice.system, &choice.probs, &taus, &params, run.seed)
    })?;
    fs::create_dir_all(&run.out)?;
    let grid = match result {
        Ok(g) => g,
        Err(Error::NodeBudget {
            budget,
            lower,
            upper,
        }) => {
            let v = json!({"error": "node budget exhausted", "budget": budget, "lower": lower, "upper": upper, "seed": run.seed});
            write_file(&run.out, output::SUMMARY_JSON, &output::to_json_bytes(&v))?;
            eprintln!("error: node budget exhausted; counts bracketed in [{lower}, {upper}]");
            return Ok(EXIT_BUDGET);
        }
        Err(e) => return Err(e.into()),
    };

    let mut csv = Vec::new();
    output::write_series_csv(&mut csv, &grid.series)?;
    write_file(&run.out, output::SERIES_CSV, &csv)?;
    let summary = output::overlap_summary(&choice.system, &choice.probs, &grid, run.seed);
    write_file(
        &run.out,
        output::SUMMARY_JSON,
        &output::to_json_bytes(&summary),
    )?;

    let f = folding_entropy(grid.headline());
    println!("rate = {}, o = {}", f.entropy, f.overlap_number);
    let failed: usize = grid.series.iter().map(|s| s.total_failed()).sum();
    if failed > 0 {
        eprintln!("warning: {failed} samples exceeded the node budget");
        return Ok(EXIT_BUDGET);
    }
    Ok(EXIT_OK)
}

pub fn cmd_dimension(
    system: &SystemArgs,
    overlap: &OverlapArgs,
    empirical: &EmpiricalArgs,
    run: &RunArgs,
) -> Result<u8, CliError> {
    let choice = system.resolve()?;
    let params = ReportParams {
        series: overlap.series_params()?,
        taus: overlap.taus(&choice.probs)?,
        empirical: empirical.params(&choice.system)?,
        seed: run.seed,
    };
    validate_run(run)?;

    let result = with_workers(run.workers, || {
        full_report(&choice.system, &choice.probs, &params)
    })?;
    fs::create_dir_all(&run.out)?;
    let report = match result {
        Ok(r) => r,
        Err(Error::NodeBudget {
            budget,
            lower,
            upper,
        }) => {
            let v = json!({"error": "node budget exhausted", "budget": budget, "lower": lower, "upper": upper, "seed": run.seed});
            write_file(&run.out, output::REPORT_JSON, &output::to_json_bytes(&v))?;
            eprintln!("error: node budget exhausted; counts bracketed in [{lower}, {upper}]");
            return Ok(EXIT_BUDGET);
        }
        Err(e) => return Err(e.into()),
    };

    let mut csv = Vec::new();
    output::write_series_csv(&mut csv, &report.overlaps.series)?;
    write_file(&run.out, output::SERIES_CSV, &csv)?;
    let mut balls = Vec::new();
    output::write_ball_counts_csv(&mut balls, &report.empirical)?;
    write_file(&run.out, output::BALLS_CSV, &balls)?;
    let json = output::report_json(&choice.system, &choice.probs, &report);
    write_file(&run.out, output::REPORT_JSON, &output::to_json_bytes(&json))?;

    println!(
        "formula = {}, empirical = {} ± {}, o = {}",
        report.formula_dimension,
        report.empirical.mean_dim,
        report.empirical.ci,
        report.overlap_number
    );
    for flag in &report.flags {
        eprintln!("flag: {flag}");
    }
    if report.overlaps.series.iter().any(|s| s.total_failed() > 0) {
        return Ok(EXIT_BUDGET);
    }
    Ok(EXIT_OK)
}

/// One λ of a sweep; failures land in the row's status.
pub fn sweep_row(
    lambda: f64,
    overlap: &OverlapArgs,
    empirical: &EmpiricalArgs,
    seed: u64,
) -> SweepRow {
    let mut row = SweepRow {
        lambda,
        rate: None,
        o: None,
        delta_formula: None,
        delta_empirical: None,
        ci: None,
        status: "ok".into(),
    };
    if !(lambda > 0.5 && lambda < 1.0) {
        row.status = "domain-error".into();
        return row;
    }
    let mut attempt = || -> Result<(), Error> {
        let sys = IfsSystem::bernoulli_convolution(lambda)?;
        let p = BernoulliSpec::uniform(2)?;
        let params = overlap.series_params()?;
        let grid = overlap_grid(&sys, &p, &[None], &params, seed)?;
        let f = folding_entropy(grid.headline());
        row.rate = Some(f.entropy);
        row.o = Some(f.overlap_number);
        row.delta_formula = Some(bernoulli_convolution_dimension(lambda, f.overlap_number)?.raw);
        if grid.headline().total_failed() > 0 {
            row.status = "budget-exhausted".into();
        }
        let emp = empirical_local_dimension(&sys, &p, &empirical.params(&sys)?, seed)?;
        row.delta_empirical = Some(emp.mean_dim);
        row.ci = Some(emp.ci);
        Ok(())
    };
    if let Err(e) = attempt() {
        row.status = match e {
            Error::NodeBudget { .. } => "budget-exhausted".into(),
            other => format!("error: {other}"),
        };
    }
    row
}

pub fn cmd_sweep(
    lambdas: &[f64],
    overlap: &OverlapArgs,
    empirical: &EmpiricalArgs,
    run: &RunArgs,
) -> Result<u8, CliError> {
    let uniform = BernoulliSpec::uniform(2)?;
    overlap.series_params()?;
    if overlap.taus(&uniform)?.iter().any(Option::is_some) {
        return Err(
            invalid("sweep uses the measure of maximal entropy; --tau does not apply").into(),
        );
    }
    if lambdas.iter().any(|l| !l.is_finite()) {
        return Err(invalid("lambda values must be finite").into());
    }
    if empirical.r_lo.is_some() || empirical.r_hi.is_some() {
        // absolute radii must fit every system of the sweep
        for &l in lambdas.iter().filter(|&&l| l > 0.5 && l < 1.0) {
            empirical.params(&IfsSystem::bernoulli_convolution(l)?)?;
        }
    }
    validate_run(run)?;

    let rows: Vec<SweepRow> = with_workers(run.workers, || {
        lambdas
            .iter()
            .map(|&l| sweep_row(l, overlap, empirical, run.seed))
            .collect()
    })?;
    fs::create_dir_all(&run.out)?;
    let mut csv = Vec::new();
    output::write_sweep_csv(&mut csv, &rows)?;
    write_file(&run.out, output::SWEEP_CSV, &csv)?;

    // reported, not asserted
    let mut ok: Vec<&SweepRow> = rows.iter().filter(|r| r.o.is_some()).collect();
    ok.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    let monotone = ok.windows(2).all(|w| w[0].o <= w[1].o);
    let summary = json!({
        "seed": run.seed,
        "rows": rows.len(),
        "failed_rows": rows.iter().filter(|r| r.status != "ok").count(),
        "o_nondecreasing_in_lambda": monotone,
    });
    write_file(
        &run.out,
        output::SWEEP_JSON,
        &output::to_json_bytes(&summary),
    )?;
    println!(
        "{} rows; o non-decreasing in lambda: {monotone}",
        rows.len()
    );
    if rows.iter().any(|r| r.status == "budget-exhausted") {
        return Ok(EXIT_BUDGET);
    }
    Ok(EXIT_OK)
}
