//! Command-line front end for the `qrouter` model.
//!
//! [`run`] holds the whole program so it can be driven in-process; the binary
//! only forwards `std::env::args` and the standard streams.
//!
//! Exit status is 0 on success, 1 on usage, parse, validation or I/O errors and
//! on a failed `verify`, and 2 when the requested parameters are singular.

pub mod config;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qrouter::pulse::{self, PulseSpec, SimulationOptions, TimeDomainError};
use qrouter::sampling::{random_antisymmetric_point, random_regular_point, random_symmetric_point, SamplingRanges};
use qrouter::steady_state::steady_state_residual;
use qrouter::sweep::{self, AxisName, AxisSpec, FigureDataset, FigureId, LengthUnit, Mapping, Objective, Quantity, SweepError, ThetaMode};
use qrouter::{
    amplitudes_from_steady_state, conservation_defect, scattering_amplitudes, steady_state_solve, svg, EquationForm,
    RouterConfig, ScatteringError, SteadyStateError,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::config::{parse_override, ConfigError, ConfigValues};

#[derive(Debug, Parser)]
#[command(name = "qrouter", version, about = "Single-photon routing by two emitters on two transmission lines")]
pub struct Cli {
    #[command(flatten)]
    pub globals: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Configuration file (`key = value` lines). Missing keys take defaults:
    /// omega = 20, gamma = 1, L = pi/40, vg = 1.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set L=0.3`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_override, global = true)]
    pub overrides: Vec<(String, f64)>,
    /// Read L in units of the emitter-1 wavelength 2*pi*vg/omega1.
    #[arg(long, global = true)]
    pub wavelengths: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Summary,
    Csv,
    Svg,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scattering probabilities at one wavenumber.
    Scatter {
        /// Probe wavenumber; defaults to omega1.
        #[arg(long)]
        k: Option<f64>,
        #[arg(long, value_enum, default_value = "summary")]
        format: Format,
    },
    /// Seeded cross-check of unitarity and the two frequency-domain solutions.
    Verify {
        /// Number of random parameter sets.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// RNG seed; equal seeds give identical reports.
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Time-domain wavepacket simulation.
    Pulse {
        /// Carrier wavenumber; defaults to omega1.
        #[arg(long)]
        k0: Option<f64>,
        /// Temporal width; defaults to 100 / min(Gamma).
        #[arg(long)]
        sigma: Option<f64>,
        /// Integration step; snapped so the delay is a whole number of steps.
        #[arg(long)]
        dt: Option<f64>,
        /// Simulated time; defaults to long enough for the pulse to leave.
        #[arg(long)]
        duration: Option<f64>,
        /// Record every n-th step in the trace.
        #[arg(long, default_value_t = 1)]
        stride: usize,
        /// Integrate the equations with the emitter-1 frequency in the emitter-2 equation.
        #[arg(long)]
        as_printed: bool,
        /// Trace CSV output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Grid sweep over one or two axes.
    Sweep {
        /// Axis as `name:start:stop:count`, name one of theta, L, k, omega2, beta.
        #[arg(long, value_parser = parse_axis)]
        x: AxisSpec,
        /// Optional second axis, same syntax as `--x`.
        #[arg(long, value_parser = parse_axis)]
        y: Option<AxisSpec>,
        /// Quantity for two-axis CSV: T_a, R_a, Tb_fwd or Tb_bwd.
        #[arg(long, default_value = "T_a", value_parser = parse_quantity)]
        quantity: Quantity,
        #[arg(long, value_enum, default_value = "symmetric")]
        theta_mode: ThetaModeArg,
        #[arg(long, value_enum, default_value = "absolute")]
        length_unit: LengthUnitArg,
        /// Probe wavenumber when no k or theta axis is given; defaults to omega1.
        #[arg(long)]
        k: Option<f64>,
        /// Output file; `.svg` selects SVG, anything else CSV.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Dataset behind one of the reference figures.
    Figure {
        /// fig2a, fig2b, fig3a, fig3b, fig4a, fig4b, fig5a or fig5b.
        #[arg(value_parser = parse_figure)]
        id: FigureId,
        /// Output file; `.svg` selects SVG, anything else CSV.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Separation maximising an objective at one wavenumber.
    Optimize {
        /// Probe wavenumber; defaults to omega1.
        #[arg(long)]
        k: Option<f64>,
        #[arg(long, value_enum, default_value = "forward")]
        objective: ObjectiveArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ThetaModeArg {
    Symmetric,
    Antisymmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LengthUnitArg {
    Absolute,
    Probe,
    Emitter1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Forward,
    Transmission,
}

fn parse_axis(s: &str) -> Result<AxisSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [name, start, stop, count] = parts[..] else {
        return Err(format!("expected name:start:stop:count, got `{s}`"));
    };
    let name: AxisName = name.parse().map_err(|e: SweepError| e.to_string())?;
    let num = |t: &str| t.parse::<f64>().map_err(|_| format!("`{t}` is not a number"));
    let count = count.parse::<usize>().map_err(|_| format!("`{count}` is not a count"))?;
    AxisSpec::linear(name, num(start)?, num(stop)?, count).map_err(|e| e.to_string())
}

fn parse_quantity(s: &str) -> Result<Quantity, String> {
    s.parse().map_err(|e: SweepError| e.to_string())
}

fn parse_figure(s: &str) -> Result<FigureId, String> {
    s.parse().map_err(|e: SweepError| e.to_string())
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Scattering(#[from] ScatteringError),
    #[error(transparent)]
    SteadyState(#[from] SteadyStateError),
    #[error(transparent)]
    TimeDomain(#[from] TimeDomainError),
    #[error(transparent)]
    Sweep(#[from] SweepError),
    #[error("verification failed")]
    VerifyFailed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Scattering(ScatteringError::SingularDenominator { .. })
            | CliError::SteadyState(SteadyStateError::SingularSystem { .. })
            | CliError::Sweep(SweepError::NoRegularPoint) => 2,
            _ => 1,
        }
    }
}

/// Runs the program; returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    1
                }
            };
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Resolves defaults, the config file and overrides, in that order.
pub fn resolve_config(globals: &GlobalArgs) -> Result<RouterConfig, CliError> {
    let mut values = ConfigValues::defaults();
    if let Some(path) = &globals.config {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
        values = values.merged(&ConfigValues::parse(&text)?);
    }
    for (k, v) in &globals.overrides {
        values.set(k, *v).expect("override keys are validated by the parser");
    }
    if globals.wavelengths {
        let w1 = values.get("omega1").expect("defaulted");
        let vg = values.get("vg").unwrap_or(1.0);
        let l = values.get("L").expect("defaulted");
        values.set("L", l * 2.0 * std::f64::consts::PI * vg / w1).expect("known key");
    }
    Ok(values.to_router_config()?)
}

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io_err = |source| CliError::Io { path: path.to_path_buf(), source };
    let name = path.file_name().ok_or_else(|| io_err(io::Error::new(io::ErrorKind::InvalidInput, "not a file path")))?;
    let tmp = path.with_file_name(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let result = fs::write(&tmp, bytes).and_then(|()| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io_err)
}

fn emit(out: &mut dyn Write, path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => write_atomic(p, bytes),
        None => out.write_all(bytes).map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source }),
    }
}

fn say(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Scatter { k, format } => {
            let config = resolve_config(&cli.globals)?;
            let k = k.unwrap_or(config.emitter1().transition_frequency());
            say(out, &scatter_report(&config, k, *format)?)
        }
        Command::Verify { samples, seed } => {
            let report = verify(*samples, *seed);
            say(out, &report.to_string())?;
            if report.passed() {
                Ok(())
            } else {
                Err(CliError::VerifyFailed)
            }
        }
        Command::Pulse { k0, sigma, dt, duration, stride, as_printed, output } => {
            let config = resolve_config(&cli.globals)?;
            let k0 = k0.unwrap_or(config.emitter1().transition_frequency());
            let mut spec = PulseSpec::default_for(&config, k0);
            if let Some(s) = sigma {
                spec = PulseSpec::gaussian(k0, *s);
            }
            let dt = dt.unwrap_or_else(|| pulse::default_time_step(&config, &spec));
            let duration = duration.unwrap_or_else(|| pulse::default_duration(&config, &spec));
            let form = if *as_printed { EquationForm::AsPrinted } else { EquationForm::Corrected };
            let options = SimulationOptions { form, record_stride: (*stride).max(1) };
            let trace = pulse::simulate_pulse_with(&config, &spec, dt, duration, options)?;
            if let Some(path) = output {
                let mut buf = Vec::new();
                pulse::write_trace_csv(&trace, &mut buf).expect("writing to a Vec cannot fail");
                write_atomic(path, &buf)?;
            }
            let p = pulse::extract_probabilities(&trace)?;
            let mut s = String::new();
            s += &format!("carrier k0 = {k0}\ntemporal width = {}\n", spec.temporal_width);
            s += &format!("integration step = {}\nnarrow band = {}\n", trace.integration_step, trace.narrow_band);
            s += &probability_lines(&p);
            s += &format!("energy defect = {:e}\n", pulse::energy_defect(&trace));
            say(out, &s)
        }
        Command::Sweep { x, y, quantity, theta_mode, length_unit, k, output, format } => {
            let config = resolve_config(&cli.globals)?;
            let mapping = Mapping {
                theta_mode: match theta_mode {
                    ThetaModeArg::Symmetric => ThetaMode::Symmetric,
                    ThetaModeArg::Antisymmetric => ThetaMode::Antisymmetric,
                },
                length_unit: match length_unit {
                    LengthUnitArg::Absolute => LengthUnit::Absolute,
                    LengthUnitArg::Probe => LengthUnit::ProbeWavelength,
                    LengthUnitArg::Emitter1 => LengthUnit::Emitter1Wavelength,
                },
                probe: *k,
                ..Mapping::default()
            };
            let axes: Vec<AxisSpec> = std::iter::once(*x).chain(*y).collect();
            let data = sweep::grid_sweep(&config, &axes, &mapping, *quantity)?;
            write_dataset(out, &data, "sweep", output.as_deref(), *format)
        }
        Command::Figure { id, output, format } => {
            let data = sweep::reproduce_figure(*id);
            write_dataset(out, &data, id.as_str(), output.as_deref(), *format)
        }
        Command::Optimize { k, objective } => {
            let config = resolve_config(&cli.globals)?;
            let k = k.unwrap_or(config.emitter1().transition_frequency());
            let objective = match objective {
                ObjectiveArg::Forward => Objective::MaxForwardTransfer,
                ObjectiveArg::Transmission => Objective::MaxTransmission,
            };
            let best = sweep::find_optimal_distance(&config, k, objective)?;
            say(out, &format!("k = {k}\nL = {}\nvalue = {}\n", best.separation, best.value))
        }
    }
}

fn probability_lines(p: &qrouter::Probabilities) -> String {
    format!(
        "T_a = {}\nR_a = {}\nTb_fwd = {}\nTb_bwd = {}\n",
        p.transmission, p.reflection, p.forward_transfer, p.backward_transfer
    )
}

/// Text for `scatter`.
pub fn scatter_report(config: &RouterConfig, k: f64, format: Format) -> Result<String, CliError> {
    let amps = scattering_amplitudes(config, k)?;
    let p = amps.probabilities();
    let defect = conservation_defect(&amps);
    Ok(match format {
        Format::Csv => format!(
            "k,T_a,R_a,Tb_fwd,Tb_bwd,defect\n{k},{},{},{},{},{defect}\n",
            p.transmission, p.reflection, p.forward_transfer, p.backward_transfer
        ),
        Format::Summary | Format::Svg => format!("k = {k}\n{}defect = {defect:e}\n", probability_lines(&p)),
    })
}

fn write_dataset(
    out: &mut dyn Write,
    data: &FigureDataset,
    title: &str,
    path: Option<&Path>,
    format: Option<Format>,
) -> Result<(), CliError> {
    let format = format.unwrap_or(match path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some("svg") => Format::Svg,
        _ => Format::Csv,
    });
    let text = match format {
        Format::Csv => data.to_csv_string(),
        Format::Svg if data.axes.len() == 2 && data.axes[1].count >= 50 && data.axes[0].count >= 50 => svg::heatmap(data, title),
        Format::Svg => svg::line_plot(data, title),
        Format::Summary => dataset_summary(data),
    };
    emit(out, path, text.as_bytes())
}

fn dataset_summary(data: &FigureDataset) -> String {
    use qrouter::sweep::CellStatus;
    let axes: Vec<String> = data.axes.iter().map(|a| format!("{} in [{}, {}] x {}", a.name, a.start, a.stop, a.count)).collect();
    let mut s = format!("axes: {}\nquantity: {}\n", axes.join("; "), data.quantity.label());
    if let Some((v, idx)) = data.max_regular(data.quantity) {
        let at: Vec<String> = idx.iter().zip(&data.axes).map(|(i, a)| format!("{} = {}", a.name, a.value(*i))).collect();
        s += &format!("max {} = {v} at {}\n", data.quantity.label(), at.join(", "));
    }
    s += &format!(
        "cells: {} regular, {} singular, {} ill-conditioned, {} unphysical\n",
        data.count(CellStatus::Regular),
        data.count(CellStatus::Singular),
        data.count(CellStatus::IllConditioned),
        data.count(CellStatus::Unphysical)
    );
    if !data.provenance.notes.is_empty() {
        s += &format!("notes: {}\n", data.provenance.notes);
    }
    s
}

/// Outcome of `verify`.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub samples: usize,
    pub seed: u64,
    pub max_conservation_defect: f64,
    pub max_oracle_disagreement: f64,
    pub max_steady_state_residual: f64,
    pub max_symmetric_backward: f64,
    pub max_antisymmetric_loss: f64,
}

pub const DEFECT_LIMIT: f64 = 1e-9;
pub const DISAGREEMENT_LIMIT: f64 = 1e-12;
pub const ZERO_LIMIT: f64 = 1e-10;

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.max_conservation_defect < DEFECT_LIMIT
            && self.max_oracle_disagreement < DISAGREEMENT_LIMIT
            && self.max_steady_state_residual < DISAGREEMENT_LIMIT
            && self.max_symmetric_backward < ZERO_LIMIT
            && self.max_antisymmetric_loss < ZERO_LIMIT
    }
}

impl std::fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "samples = {}\nseed = {}", self.samples, self.seed)?;
        writeln!(f, "max conservation defect = {:e} (limit {DEFECT_LIMIT:e})", self.max_conservation_defect)?;
        writeln!(f, "max oracle disagreement = {:e} (limit {DISAGREEMENT_LIMIT:e})", self.max_oracle_disagreement)?;
        writeln!(f, "max steady-state residual = {:e} (limit {DISAGREEMENT_LIMIT:e})", self.max_steady_state_residual)?;
        writeln!(f, "max symmetric-case backward amplitude = {:e} (limit {ZERO_LIMIT:e})", self.max_symmetric_backward)?;
        writeln!(f, "max antisymmetric-case transmission loss = {:e} (limit {ZERO_LIMIT:e})", self.max_antisymmetric_loss)?;
        writeln!(f, "status = {}", if self.passed() { "ok" } else { "FAILED" })
    }
}

/// Seeded cross-checks on `samples` random configurations per suite.
///
/// Draws come from ChaCha8 seeded with `seed`, so the report is identical on
/// every platform.
pub fn verify(samples: usize, seed: u64) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ranges = SamplingRanges::default();
    let mut r = VerifyReport {
        samples,
        seed,
        max_conservation_defect: 0.0,
        max_oracle_disagreement: 0.0,
        max_steady_state_residual: 0.0,
        max_symmetric_backward: 0.0,
        max_antisymmetric_loss: 0.0,
    };
    for _ in 0..samples {
        let p = random_regular_point(&mut rng, &ranges, 1e-6);
        let closed = scattering_amplitudes(&p.config, p.wavenumber).expect("regular point");
        r.max_conservation_defect = r.max_conservation_defect.max(conservation_defect(&closed));
        let sol = steady_state_solve(&p.config, p.wavenumber).expect("regular point");
        let diff = amplitudes_from_steady_state(&sol, &p.config).max_difference(&closed);
        r.max_oracle_disagreement = r.max_oracle_disagreement.max(diff);
        let residual = steady_state_residual(&sol, &p.config, EquationForm::Corrected);
        r.max_steady_state_residual = r.max_steady_state_residual.max(residual);
    }
    for _ in 0..samples {
        let s = random_symmetric_point(&mut rng);
        let a = scattering_amplitudes(&s.point.config, s.point.wavenumber).expect("symmetric point is regular");
        r.max_symmetric_backward = r.max_symmetric_backward.max(a.reflect_a.norm()).max(a.transfer_backward_b.norm());
    }
    for _ in 0..samples {
        let p = random_antisymmetric_point(&mut rng);
        let a = scattering_amplitudes(&p.config, p.wavenumber).expect("antisymmetric point is regular");
        r.max_antisymmetric_loss = r.max_antisymmetric_loss.max((1.0 - a.transmit_a.norm_sqr()).abs());
    }
    r
}
