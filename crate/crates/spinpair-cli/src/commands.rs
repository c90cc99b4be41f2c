//! Command implementations: load config, compute, render, emit.
//!
//! Every command builds its complete output in memory first and only then
//! writes it (atomically, via a temporary file in the destination
//! directory), so a failure can never leave a partial output file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use spinpair::experiment::{
    self, ExperimentKind, Trajectory,
};
use spinpair::fitting::{
    self, DataSet, FitError, FitResult, ModelFamily,
};
use spinpair::propagator::PropagatorError;
use spinpair::spectral::{CollectiveRates, SpectralError, SpectralSamples};
use spinpair::superop::{
    build_first_order, build_second_order, build_zero_order, closed_form_rates, FirstOrderSuperop,
    RateSet, SecondOrderSuperop, ZeroOrderSuperop,
};
use spinpair::system::{EigenFrequencies, PhysicalConstants, SystemError};

use crate::config::{self, ConfigError, OutputFormat, RunConfig};
use crate::{Command, CommonArgs, FamilyArg, FormatArg, KindArg};

/// Fixed noise seed used when `SPINPAIR_SEED` is not set.
const DEFAULT_SEED: u64 = 20210;

/// Top-level command errors, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, configuration, or data files — exit code 1.
    #[error("{0}")]
    Validation(String),
    /// A numeric computation failed — exit code 2.
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    /// The process exit code for this error.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numeric(_) => 2,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<SystemError> for CliError {
    fn from(e: SystemError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<PropagatorError> for CliError {
    fn from(e: PropagatorError) -> Self {
        match e {
            PropagatorError::DegenerateSpectrum { .. } | PropagatorError::Oracle(_) => {
                CliError::Numeric(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<experiment::ExperimentError> for CliError {
    fn from(e: experiment::ExperimentError) -> Self {
        match e {
            experiment::ExperimentError::Propagator(p) => p.into(),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<FitError> for CliError {
    fn from(e: FitError) -> Self {
        match e {
            FitError::AllStartsFailed => CliError::Numeric(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Validation(format!("csv error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Numeric(format!("serialization failed: {e}"))
    }
}

/// Dispatches one parsed command line.
pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Rates(common) => rates(&common),
        Command::Superop(common) => superop(&common),
        Command::Experiment { common, kind } => run_experiment(&common, kind),
        Command::Tmax(common) => tmax(&common),
        Command::Fit {
            common,
            data,
            family,
        } => fit(&common, &data, family),
        Command::GenerateData {
            common,
            t1,
            d1,
            amplitude,
            sigma,
        } => generate_data(&common, t1, d1, amplitude, sigma),
    }
}

/// Loads and validates the configuration, emitting the accuracy warning for
/// systems outside the linearized thermal regime.
fn load(common: &CommonArgs) -> Result<(RunConfig, PhysicalConstants), CliError> {
    let text = fs::read_to_string(&common.config).map_err(|e| {
        CliError::Validation(format!(
            "cannot read config `{}`: {e}",
            common.config.display()
        ))
    })?;
    let config = config::parse_config(&text)?;
    let consts = PhysicalConstants::codata();
    let ht = experiment::high_temperature_parameter(&config.system, &consts);
    if ht > experiment::HIGH_TEMPERATURE_LIMIT {
        eprintln!(
            "warning: hbar*omega/(k_B T) = {ht:.3e} exceeds {:.0e}; the linearized \
             equilibrium state loses accuracy at this field/temperature",
            experiment::HIGH_TEMPERATURE_LIMIT
        );
    }
    Ok((config, consts))
}

fn destination(common: &CommonArgs, config: &RunConfig) -> Option<PathBuf> {
    common.output.clone().or_else(|| config.output.clone())
}

fn chosen_format(common: &CommonArgs, config: &RunConfig) -> OutputFormat {
    match common.format {
        Some(FormatArg::Csv) => OutputFormat::Csv,
        Some(FormatArg::Json) => OutputFormat::Json,
        None => config.format,
    }
}

/// Writes `content` to `dest` (atomically) or to standard output.
fn emit(content: &str, dest: Option<&Path>) -> Result<(), CliError> {
    match dest {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(content.as_bytes())?;
            tmp.persist(path)
                .map_err(|e| CliError::Validation(format!("cannot write output: {e}")))?;
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut out = serde_json::to_string_pretty(value)?;
    out.push('\n');
    Ok(out)
}

/// 17 significant digits: lossless f64 round-trip in CSV cells.
fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn finish_csv(writer: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::Validation(format!("csv error: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Validation(format!("csv error: {e}")))
}

fn trajectory_csv(trajectory: &Trajectory) -> Result<String, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["t_s", "upsilon_I", "upsilon_S"])?;
    for k in 0..trajectory.times.len() {
        writer.write_record([
            fmt_float(trajectory.times[k]),
            fmt_float(trajectory.upsilon_i[k]),
            fmt_float(trajectory.upsilon_s[k]),
        ])?;
    }
    finish_csv(writer)
}

fn dataset_csv(data: &DataSet) -> Result<String, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["t_s", "upsilon"])?;
    for (t, v) in data.times().iter().zip(data.values().iter()) {
        writer.write_record([fmt_float(*t), fmt_float(*v)])?;
    }
    finish_csv(writer)
}

/// Reads a dataset CSV: header `t_s,upsilon` (a trajectory file with
/// `t_s,upsilon_I,upsilon_S` is accepted too, using the `upsilon_I`
/// column).
fn read_dataset(path: &Path) -> Result<DataSet, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Validation(format!("cannot read data `{}`: {e}", path.display())))?;
    let headers = reader.headers()?.clone();
    let ok = headers.len() >= 2
        && headers.get(0) == Some("t_s")
        && headers.get(1).is_some_and(|h| h.starts_with("upsilon"));
    if !ok {
        return Err(CliError::Validation(format!(
            "expected CSV header `t_s,upsilon`, got `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let field = |idx: usize| -> Result<f64, CliError> {
            record
                .get(idx)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| {
                    CliError::Validation(format!("data row {}: not a number", row + 2))
                })
        };
        times.push(field(0)?);
        values.push(field(1)?);
    }
    Ok(DataSet::new(times, values)?)
}

/// All eight time constants `1/R` (None where the rate vanishes).
#[derive(Serialize)]
struct TimeConstants {
    t0_a_s: Option<f64>,
    t0_b_s: Option<f64>,
    t0_f_s: Option<f64>,
    t0_g_s: Option<f64>,
    t1_a_s: Option<f64>,
    t1_b_s: Option<f64>,
    t1_f_s: Option<f64>,
    t1_g_s: Option<f64>,
    t2_a_s: Option<f64>,
}

fn inverse(rate: f64) -> Option<f64> {
    (rate > 0.0).then(|| 1.0 / rate)
}

impl TimeConstants {
    fn from_rates(rates: &RateSet) -> Self {
        Self {
            t0_a_s: inverse(rates.r0_a),
            t0_b_s: inverse(rates.r0_b),
            t0_f_s: inverse(rates.r0_f),
            t0_g_s: inverse(rates.r0_g),
            t1_a_s: inverse(rates.r1_a),
            t1_b_s: inverse(rates.r1_b),
            t1_f_s: inverse(rates.r1_f),
            t1_g_s: inverse(rates.r1_g),
            t2_a_s: inverse(rates.r2_a),
        }
    }
}

#[derive(Serialize)]
struct RatesReport {
    kappa: f64,
    frequencies: EigenFrequencies,
    samples: SpectralSamples,
    collective: CollectiveRates,
    rates: RateSet,
    time_constants: TimeConstants,
}

fn rates(common: &CommonArgs) -> Result<(), CliError> {
    let (config, consts) = load(common)?;
    let frequencies = config.system.larmor_frequencies();
    let samples = config.model.sample_at_transitions(&frequencies);
    let kappa = config.kappa(&consts);
    let rate_set = closed_form_rates(&samples, kappa);
    let report = RatesReport {
        kappa,
        frequencies,
        samples,
        collective: samples.collective_rates(),
        time_constants: TimeConstants::from_rates(&rate_set),
        rates: rate_set,
    };
    emit(&to_json(&report)?, destination(common, &config).as_deref())
}

#[derive(Serialize)]
struct SuperopReport {
    /// Multiply the (seconds-valued) generator entries by `kappa` for
    /// rates in s^-1.
    kappa: f64,
    samples: SpectralSamples,
    zero_order: ZeroOrderSuperop,
    first_order: FirstOrderSuperop,
    second_order: SecondOrderSuperop,
}

fn superop(common: &CommonArgs) -> Result<(), CliError> {
    let (config, consts) = load(common)?;
    let samples = config
        .model
        .sample_at_transitions(&config.system.larmor_frequencies());
    let report = SuperopReport {
        kappa: config.kappa(&consts),
        samples,
        zero_order: build_zero_order(&samples),
        first_order: build_first_order(&samples),
        second_order: build_second_order(&samples),
    };
    emit(&to_json(&report)?, destination(common, &config).as_deref())
}

#[derive(Serialize)]
struct ExperimentReport {
    kind: ExperimentKind,
    kappa: f64,
    trajectory: Trajectory,
}

fn run_experiment(common: &CommonArgs, kind: Option<KindArg>) -> Result<(), CliError> {
    let (config, consts) = load(common)?;
    let kind = match kind {
        Some(KindArg::SaturationS) => ExperimentKind::SaturationS,
        Some(KindArg::InversionS) => ExperimentKind::InversionS,
        Some(KindArg::InversionBoth) => ExperimentKind::InversionBoth,
        None => config.kind,
    };
    let samples = config
        .model
        .sample_at_transitions(&config.system.larmor_frequencies());
    let kappa = config.kappa(&consts);
    let trajectory = experiment::longitudinal_trajectory(
        kind,
        &config.system,
        &consts,
        &samples,
        kappa,
        &config.time_grid(),
    )?;
    let content = match chosen_format(common, &config) {
        OutputFormat::Csv => trajectory_csv(&trajectory)?,
        OutputFormat::Json => to_json(&ExperimentReport {
            kind,
            kappa,
            trajectory,
        })?,
    };
    emit(&content, destination(common, &config).as_deref())
}

#[derive(Serialize)]
struct PeakReport {
    t_m_s: f64,
    degenerate_limit: bool,
    jn_over_jp: f64,
    /// Fast longitudinal time constant `1/(kappa (Jp + Jn))`, s.
    t1_s: f64,
    /// Slow longitudinal time constant `1/(kappa (Jp - Jn))`, s.
    d1_s: f64,
}

fn tmax(common: &CommonArgs) -> Result<(), CliError> {
    let (config, consts) = load(common)?;
    let samples = config
        .model
        .sample_at_transitions(&config.system.larmor_frequencies());
    let kappa = config.kappa(&consts);
    let collective = samples.collective_rates();
    let peak = experiment::enhancement_peak_time(kappa, &collective);
    let rates = closed_form_rates(&samples, kappa);
    let report = PeakReport {
        t_m_s: peak.t_m,
        degenerate_limit: peak.degenerate_limit,
        jn_over_jp: collective.jn / collective.jp,
        t1_s: 1.0 / rates.r0_f,
        d1_s: 1.0 / rates.r0_g,
    };
    emit(&to_json(&report)?, destination(common, &config).as_deref())
}

#[derive(Serialize)]
struct FitReport {
    family: ModelFamily,
    kappa: f64,
    n_points: usize,
    result: FitResult,
}

fn fit(common: &CommonArgs, data_path: &Path, family: FamilyArg) -> Result<(), CliError> {
    let (config, consts) = load(common)?;
    let data = read_dataset(data_path)?;
    let family = match family {
        FamilyArg::Isotropic => ModelFamily::Isotropic,
        FamilyArg::ModelFree => ModelFamily::ModelFree,
    };
    let kappa = config.kappa(&consts);
    let result = fitting::fit_with_dipolar_constant(&data, &config.system, kappa, family)?;
    let report = FitReport {
        family,
        kappa,
        n_points: data.len(),
        result,
    };
    emit(&to_json(&report)?, destination(common, &config).as_deref())
}

fn seed_from_env() -> Result<u64, CliError> {
    match std::env::var("SPINPAIR_SEED") {
        Ok(value) => value.trim().parse::<u64>().map_err(|_| {
            CliError::Validation(format!(
                "SPINPAIR_SEED must be an unsigned integer, got `{value}`"
            ))
        }),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_SEED),
        Err(e) => Err(CliError::Validation(format!("SPINPAIR_SEED: {e}"))),
    }
}

fn generate_data(
    common: &CommonArgs,
    t1: Option<f64>,
    d1: Option<f64>,
    amplitude: Option<f64>,
    sigma: Option<f64>,
) -> Result<(), CliError> {
    let (config, consts) = load(common)?;
    let times = config.time_grid();
    let data = match (t1, d1, amplitude) {
        (Some(t1), Some(d1), Some(amplitude)) => {
            fitting::generate_solomon_dataset(t1, d1, amplitude, &times)?
        }
        (None, None, None) => {
            let kappa = config.kappa(&consts);
            let values =
                fitting::model_upsilon_batch(&config.model, &config.system, kappa, &times);
            DataSet::new(times, values)?
        }
        // clap's `requires` relations make partial combinations
        // unrepresentable; keep a defensive error anyway.
        _ => {
            return Err(CliError::Validation(
                "--t1, --d1, and --amplitude must be given together".to_string(),
            ))
        }
    };
    let data = match sigma {
        Some(sigma) if sigma != 0.0 => {
            fitting::add_gaussian_noise(&data, sigma, seed_from_env()?)?
        }
        _ => data,
    };
    let content = match chosen_format(common, &config) {
        OutputFormat::Csv => dataset_csv(&data)?,
        OutputFormat::Json => to_json(&data)?,
    };
    emit(&content, destination(common, &config).as_deref())
}
