//! Command-line front end: plant specs in, metric reports and sweep tables out.
//!
//! Exit status: 0 for a conclusive result, 1 for bad input or a failed
//! computation, 2 when the winding or margin verdict is inconclusive.

pub mod check;
pub mod spec;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nugap::hnorm::NormSearchResult;
use nugap::ncf::{para_hermitian_sum, validation_grid};
use nugap::windex::{survey, det_boundary, RadiusReport};
use nugap::{
    cross_gram, hinf_norm, normalized_coprime_factorization, nu_metric, nu_metric_fixed_rho,
    parallel_residual, spectral_factor, validate_normalization, DelayRationalFn, NuOptions, NuResult,
    PlantInput, RadiusSchedule,
};
use serde::{Deserialize, Serialize};

use crate::spec::{load_plant, PlantSpec};

pub const TOOL: &str = "nugap";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Inconclusive(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Inconclusive(_) => 2,
            Self::Input(_) | Self::Io(_) => 1,
        }
    }
}

impl From<nugap::Error> for CliError {
    fn from(e: nugap::Error) -> Self {
        match e {
            nugap::Error::Inconclusive(_) | nugap::Error::NotStabilized(_) => Self::Inconclusive(e.to_string()),
            other => Self::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "nugap", version, about = "Nu-gap distance between delay-rational plants")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct MetricFlags {
    /// Smallest admissible |det(G1* G2)| on the near-boundary circles.
    #[arg(long, default_value_t = nugap::windex::DEFAULT_DELTA)]
    pub delta: f64,
    /// Largest contour radius; the geometric schedule is extended until it reaches this.
    #[arg(long)]
    pub r_max: Option<f64>,
    /// Number of outermost circles whose windings must agree.
    #[arg(long, default_value_t = nugap::windex::DEFAULT_STABILIZATION)]
    pub stabilize: usize,
    #[arg(long, default_value_t = nugap::hnorm::DEFAULT_OMEGA_MAX)]
    pub omega_max: f64,
}

#[derive(Debug, Clone, Args)]
pub struct OutputFlags {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distance between two plants.
    Metric {
        plant1: String,
        plant2: String,
        /// Judge invertibility on every schedule circle outside this radius.
        #[arg(long)]
        rho: Option<f64>,
        #[command(flatten)]
        flags: MetricFlags,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Frequency sweep of the residual and the per-radius margin curve.
    Sweep {
        plant1: String,
        plant2: String,
        #[command(flatten)]
        flags: MetricFlags,
        /// Directory receiving `sweep.*` and `margin.*`.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Normalized coprime factors of one plant.
    Ncf {
        plant: String,
        #[command(flatten)]
        output: OutputFlags,
    },
    /// Normalization residuals of a sampled factor table.
    Check {
        table: PathBuf,
        #[arg(long, default_value_t = nugap::numetric::PAIR_NORMALIZATION_TOLERANCE)]
        tolerance: f64,
        #[command(flatten)]
        output: OutputFlags,
    },
}

/// Every setting that influenced a computation, defaults included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveOptions {
    pub delta: f64,
    pub r_max: f64,
    pub stabilize: usize,
    pub radii: Vec<f64>,
    pub initial_n: usize,
    pub omega_max: f64,
    pub coarse_n: usize,
    pub normalization_tolerance: f64,
    pub rho: Option<f64>,
    pub format: Format,
}

impl EffectiveOptions {
    fn new(opts: &NuOptions, rho: Option<f64>, format: Format) -> Self {
        Self {
            delta: opts.delta,
            r_max: opts.schedule.last(),
            stabilize: opts.schedule.stabilization_count(),
            radii: opts.schedule.radii().to_vec(),
            initial_n: opts.initial_n,
            omega_max: opts.omega_max,
            coarse_n: opts.coarse_n,
            normalization_tolerance: opts.normalization_tolerance,
            rho,
            format,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub tool: String,
    pub version: String,
    pub options: EffectiveOptions,
    pub plants: Vec<PlantSpec>,
    pub result: NuResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorSpec {
    pub delay: f64,
    pub num: Vec<f64>,
    pub den: Vec<f64>,
}

impl From<&DelayRationalFn> for FactorSpec {
    fn from(f: &DelayRationalFn) -> Self {
        Self { delay: f.delay, num: f.num.coeffs().to_vec(), den: f.den.coeffs().to_vec() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NcfReport {
    pub tool: String,
    pub version: String,
    pub plant: PlantSpec,
    pub n: FactorSpec,
    pub d: FactorSpec,
    pub spectral_residual: f64,
    pub normalization_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub tool: String,
    pub version: String,
    pub options: EffectiveOptions,
    pub plants: Vec<PlantSpec>,
    pub sweep_file: PathBuf,
    pub margin_file: PathBuf,
    pub residual_sup: f64,
    pub result: NuResult,
}

fn nu_options(flags: &MetricFlags) -> Result<NuOptions, CliError> {
    if !(flags.delta.is_finite() && flags.delta > 0.0) {
        return Err(CliError::Input(format!("--delta must be positive, got {}", flags.delta)));
    }
    if !(flags.omega_max.is_finite() && flags.omega_max > nugap::hnorm::OMEGA_MIN) {
        return Err(CliError::Input(format!("--omega-max must exceed {}", nugap::hnorm::OMEGA_MIN)));
    }
    let schedule = match flags.r_max {
        Some(r) => RadiusSchedule::reaching(r, flags.stabilize)?,
        None => RadiusSchedule::geometric(nugap::windex::DEFAULT_LEVELS, flags.stabilize)?,
    };
    Ok(NuOptions { schedule, delta: flags.delta, omega_max: flags.omega_max, ..NuOptions::default() })
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}

/// What a command produced: bytes for standard output and, for commands that
/// still report after a negative verdict, the failure to exit with.
#[derive(Debug, Default)]
pub struct Completed {
    pub stdout: Option<Vec<u8>>,
    pub failure: Option<CliError>,
}

fn emit(output: &OutputFlags, bytes: Vec<u8>) -> Result<Completed, CliError> {
    match &output.out {
        Some(path) => write_atomic(path, &bytes).map(|_| Completed::default()),
        None => Ok(Completed { stdout: Some(bytes), failure: None }),
    }
}

fn json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

fn csv_bytes<F>(fill: F) -> Result<Vec<u8>, CliError>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    fill(&mut w).map_err(|e| CliError::Io(e.to_string()))?;
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

fn snake<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|x| x.as_str().map(str::to_string)).unwrap_or_default()
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn metric_csv(r: &NuResult) -> Result<Vec<u8>, CliError> {
    csv_bytes(|w| {
        w.write_record(["value", "branch", "invertible", "winding", "margin", "route", "rho"])?;
        w.write_record([
            r.value.to_string(),
            snake(&r.branch),
            r.invertible.to_string(),
            opt(r.winding),
            r.margin.to_string(),
            snake(&r.route),
            opt(r.rho),
        ])
    })
}

pub fn run(cli: Cli) -> Result<Completed, CliError> {
    match cli.command {
        Command::Metric { plant1, plant2, rho, flags, output } => {
            let opts = nu_options(&flags)?;
            let (a, b) = (load_plant(&plant1)?, load_plant(&plant2)?);
            let plants = vec![PlantSpec::from(&a), PlantSpec::from(&b)];
            let (a, b) = (PlantInput::from(a), PlantInput::from(b));
            let result = match rho {
                Some(rho) => nu_metric_fixed_rho(&a, &b, rho, &opts)?,
                None => nu_metric(&a, &b, &opts)?,
            };
            let bytes = match output.format {
                Format::Json => json(&MetricReport {
                    tool: TOOL.into(),
                    version: VERSION.into(),
                    options: EffectiveOptions::new(&opts, rho, output.format),
                    plants,
                    result,
                })?,
                Format::Csv => metric_csv(&result)?,
            };
            emit(&output, bytes)
        }
        Command::Sweep { plant1, plant2, flags, out, format } => sweep(&plant1, &plant2, &flags, &out, format),
        Command::Ncf { plant, output } => {
            let p = load_plant(&plant)?;
            let spectral = spectral_factor(&para_hermitian_sum(p.denominator(), p.numerator())?)?;
            let pair = normalized_coprime_factorization(&p)?;
            let normalization_residual = validate_normalization(&pair, &validation_grid(1001))?;
            let siso = pair.siso().expect("plant factorizations are scalar");
            let report = NcfReport {
                tool: TOOL.into(),
                version: VERSION.into(),
                plant: PlantSpec::from(&p),
                n: FactorSpec::from(&siso.n),
                d: FactorSpec::from(&siso.d),
                spectral_residual: spectral.residual,
                normalization_residual,
            };
            let bytes = match output.format {
                Format::Json => json(&report)?,
                Format::Csv => csv_bytes(|w| {
                    let join = |c: &[f64]| c.iter().map(f64::to_string).collect::<Vec<_>>().join(";");
                    w.write_record(["factor", "delay", "num", "den", "spectral_residual", "normalization_residual"])?;
                    for (name, f) in [("n", &report.n), ("d", &report.d)] {
                        w.write_record([
                            name.to_string(),
                            f.delay.to_string(),
                            join(&f.num),
                            join(&f.den),
                            report.spectral_residual.to_string(),
                            report.normalization_residual.to_string(),
                        ])?;
                    }
                    Ok(())
                })?,
            };
            emit(&output, bytes)
        }
        Command::Check { table, tolerance, output } => {
            let text = std::fs::read_to_string(&table)
                .map_err(|e| CliError::Input(format!("{}: {e}", table.display())))?;
            let report = check::check_table(&check::parse_table(&text)?, tolerance)?;
            let bytes = match output.format {
                Format::Json => json(&report)?,
                Format::Csv => csv_bytes(|w| {
                    w.write_record(["omega", "right", "left"])?;
                    for s in &report.samples {
                        w.write_record([s.omega.to_string(), s.right.to_string(), s.left.to_string()])?;
                    }
                    Ok(())
                })?,
            };
            let mut done = emit(&output, bytes)?;
            if !report.normalized {
                done.failure = Some(CliError::Input(format!(
                    "factors are not normalized: residual {:e} exceeds {:e}",
                    report.worst, report.tolerance
                )));
            }
            Ok(done)
        }
    }
}

fn sweep_rows(search: &NormSearchResult) -> Vec<(f64, f64)> {
    let mut rows = search.trace.clone();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    rows.dedup_by(|a, b| a.0 == b.0);
    if let Some(t) = search.tail_limit {
        rows.push((f64::INFINITY, t));
    }
    rows
}

fn sweep(p1: &str, p2: &str, flags: &MetricFlags, dir: &Path, format: Format) -> Result<Completed, CliError> {
    let opts = nu_options(flags)?;
    let (a, b) = (load_plant(p1)?, load_plant(p2)?);
    let plants = vec![PlantSpec::from(&a), PlantSpec::from(&b)];
    let (pa, pb) = (normalized_coprime_factorization(&a)?, normalized_coprime_factorization(&b)?);
    let search = hinf_norm(&parallel_residual(&pa, &pb)?, opts.omega_max, opts.coarse_n)?;
    let reports: Vec<RadiusReport> =
        survey(&det_boundary(&cross_gram(&pa, &pb)?)?, opts.schedule.radii(), opts.initial_n)?;
    let rows = sweep_rows(&search);

    std::fs::create_dir_all(dir)?;
    let ext = match format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    let sweep_file = dir.join(format!("sweep.{ext}"));
    let margin_file = dir.join(format!("margin.{ext}"));
    let (sweep_bytes, margin_bytes) = match format {
        Format::Json => (json(&rows)?, json(&reports)?),
        Format::Csv => (
            csv_bytes(|w| {
                w.write_record(["omega", "sigma_max"])?;
                rows.iter().try_for_each(|(o, v)| w.write_record([o.to_string(), v.to_string()]))
            })?,
            csv_bytes(|w| {
                w.write_record(["r", "winding", "min_modulus", "samples_used"])?;
                reports.iter().try_for_each(|r| {
                    w.write_record([
                        r.r.to_string(),
                        opt(r.winding),
                        r.min_modulus.to_string(),
                        r.samples_used.to_string(),
                    ])
                })
            })?,
        ),
    };
    write_atomic(&sweep_file, &sweep_bytes)?;
    write_atomic(&margin_file, &margin_bytes)?;

    let result = nu_metric(&a.into(), &b.into(), &opts)?;
    let stdout = json(&SweepReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        options: EffectiveOptions::new(&opts, None, format),
        plants,
        sweep_file,
        margin_file,
        residual_sup: search.value,
        result,
    })?;
    Ok(Completed { stdout: Some(stdout), failure: None })
}
