use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use optoforce::closed_form::validate_against_numeric;
use optoforce::io::csv::{bandwidth_csv, modes_csv, sweep_csv, validation_records_csv};
use optoforce::io::report::{bandwidth_summary, params_summary, validation_summary};
use optoforce::io::{
    parse_config_with_overrides, spectrum_csv, spectrum_plot_script, sweep_plot_script, PlotCurve,
    PlotQuantity, RunConfig,
};
use optoforce::sweep::{
    bandwidth_metric, frequency_sweep_with_signal, parameter_sweep, FrequencyGrid, SweepParameter,
};
use optoforce::{drift_matrix, hybrid_modes, stability_check};
use thiserror::Error;

#[derive(Parser)]
#[command(
    name = "optoforce",
    version,
    about = "Force-sensing spectra of a cavity coupled to two phase-linked oscillators"
)]
struct Cli {
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Noise spectra over the frequency grid, as CSV.
    Spectrum(Common),
    /// Hybrid-mode couplings and dark labels over the phase.
    Modes(Common),
    /// Added noise at the effective frequency while one parameter varies.
    Sweep(Common),
    /// Compare the closed-form output coefficients with the numeric ones.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Also write the per-frequency deviation records as CSV.
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Eigenvalues of the drift matrix.
    Stability(Common),
    /// Resolved configuration and where each value came from.
    Config(Common),
}

#[derive(Args)]
struct Common {
    /// Configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set phi=pi/2`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Frequency grid as `start,stop,points`.
    #[arg(long, value_name = "START,STOP,POINTS")]
    grid: Option<String>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write a matplotlib script that plots the output file.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    let text = match &common.config {
        Some(path) => fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?,
        None => String::new(),
    };
    let mut overrides = Vec::new();
    if let Some(grid) = &common.grid {
        let parts: Vec<&str> = grid.split(',').map(str::trim).collect();
        let [start, stop, points] = parts.as_slice() else {
            return Err(CliError::Config(format!(
                "--grid expects `start,stop,points`, got `{grid}`"
            )));
        };
        overrides.push(format!("grid.start={start}"));
        overrides.push(format!("grid.stop={stop}"));
        overrides.push(format!("grid.points={points}"));
    }
    overrides.extend(common.set.iter().cloned());
    let mut cfg = parse_config_with_overrides(&text, &overrides).map_err(config_err)?;
    if common.out.is_some() {
        cfg.output.path = common.out.clone();
    }
    if common.plot.is_some() {
        cfg.output.plot = common.plot.clone();
    }
    Ok(cfg)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    match &cfg.output.path {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Path of the table a plot script should read; plots need a file.
fn plotted_table(cfg: &RunConfig) -> Result<Option<(PathBuf, String)>, CliError> {
    let Some(plot) = &cfg.output.plot else {
        return Ok(None);
    };
    let table = cfg.output.path.as_ref().ok_or_else(|| {
        CliError::Config("--plot needs --out so the script has a table to read".into())
    })?;
    Ok(Some((plot.clone(), table.display().to_string())))
}

fn image_path(script: &Path) -> String {
    script.with_extension("png").display().to_string()
}

fn spectrum(common: &Common) -> Result<(), CliError> {
    let cfg = load(common)?;
    let plot = plotted_table(&cfg)?;
    let series = frequency_sweep_with_signal(&cfg.params, &cfg.grid, cfg.s_fex);
    if let Some(w) = series.warning() {
        eprintln!("warning: {w}");
    }
    if series.singular.len() == series.samples.len() {
        return Err(CliError::Numerical(
            "linear solve singular at every grid frequency".into(),
        ));
    }
    emit(&cfg, &spectrum_csv(&series.samples))?;
    if let Some(threshold) = cfg.output.bandwidth_threshold {
        let intervals = bandwidth_metric(&series, threshold).map_err(config_err)?;
        eprint!("{}", bandwidth_summary(threshold, &intervals));
        if let Some(path) = &cfg.output.path {
            let mut name = path.as_os_str().to_owned();
            name.push(".bandwidth.csv");
            write_file(Path::new(&name), &bandwidth_csv(threshold, &intervals))?;
        }
    }
    if let Some((script, table)) = plot {
        let curve = PlotCurve {
            label: format!("phi = {:.4}", cfg.params.phi()),
            csv_path: table,
            samples: series.samples.len(),
        };
        let text = spectrum_plot_script(&[curve], PlotQuantity::NAdd, &image_path(&script))
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        write_file(&script, &text)?;
    }
    Ok(())
}

fn modes(common: &Common) -> Result<(), CliError> {
    let cfg = load(common)?;
    let phases: Vec<f64> = if cfg.sweep.parameter == SweepParameter::Phi {
        cfg.sweep.values()
    } else {
        (0..=8).map(|k| k as f64 * PI / 4.0).collect()
    };
    let rows = phases
        .iter()
        .map(|&phi| {
            let p = cfg
                .params
                .to_builder()
                .phi(phi)
                .build()
                .map_err(config_err)?;
            Ok((phi, hybrid_modes(&p)))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    emit(&cfg, &modes_csv(&rows))
}

fn sweep(common: &Common) -> Result<(), CliError> {
    let cfg = load(common)?;
    let plot = plotted_table(&cfg)?;
    let result = parameter_sweep(
        &cfg.params,
        cfg.sweep.parameter,
        &cfg.sweep.values(),
        &cfg.grid,
    )
    .map_err(config_err)?;
    if result.rows.iter().all(|r| !r.n_add.is_finite()) {
        return Err(CliError::Numerical(
            "no effective frequency found for any swept value".into(),
        ));
    }
    emit(&cfg, &sweep_csv(&result))?;
    if let Some((script, table)) = plot {
        let curve = PlotCurve {
            label: format!("phi = {:.4}", cfg.params.phi()),
            csv_path: table,
            samples: result.rows.len(),
        };
        let text = sweep_plot_script(&curve, result.parameter.name(), &image_path(&script))
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        write_file(&script, &text)?;
    }
    Ok(())
}

fn validate(common: &Common, records: Option<&Path>) -> Result<(), CliError> {
    let cfg = load(common)?;
    let grid = FrequencyGrid::new(cfg.grid.start(), cfg.grid.stop(), cfg.validate.points)
        .map_err(config_err)?
        .samples();
    let report =
        validate_against_numeric(&cfg.params, &grid, &cfg.validate.variants).map_err(config_err)?;
    if report.numeric_singular.len() == grid.len() {
        return Err(CliError::Numerical(
            "linear solve singular at every grid frequency".into(),
        ));
    }
    emit(&cfg, &validation_summary(&report))?;
    if let Some(path) = records {
        write_file(path, &validation_records_csv(&report))?;
    }
    Ok(())
}

fn stability(common: &Common) -> Result<(), CliError> {
    let cfg = load(common)?;
    let report = stability_check(&drift_matrix(&cfg.params));
    if !report.stable {
        eprintln!("warning: drift matrix is unstable; spectra are not stationary");
    }
    emit(&cfg, &report.to_string())
}

fn show_config(common: &Common) -> Result<(), CliError> {
    let cfg = load(common)?;
    let text = format!(
        "{}\nprovenance:\n{}",
        params_summary(&cfg.params),
        cfg.provenance_report()
    );
    emit(&cfg, &text)
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(config_err)?;
    }
    match &cli.command {
        Command::Spectrum(c) => spectrum(c),
        Command::Modes(c) => modes(c),
        Command::Sweep(c) => sweep(c),
        Command::Validate { common, records } => validate(common, records.as_deref()),
        Command::Stability(c) => stability(c),
        Command::Config(c) => show_config(c),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
