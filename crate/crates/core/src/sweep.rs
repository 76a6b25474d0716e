//! Parameter grids over the closed-form model.
//!
//! A grid is one or two [`AxisSpec`]s applied to a template configuration
//! through a [`Mapping`]. Every cell is evaluated independently with
//! [`scattering_amplitudes`]; singular cells are flagged rather than aborting
//! the sweep.

use std::f64::consts::PI;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use thiserror::Error;

use crate::params::{EmitterParams, RouterConfig};
use crate::sampling::ProbePoint;
use crate::scattering::{
    conservation_defect, phase_shift, scattering_amplitudes, standing_wave_length, Probabilities, ScatteringError,
};

/// Cells whose conservation defect reaches this are flagged ill-conditioned.
pub const DEFECT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("invalid axis mapping: {0}")]
    InvalidAxisMapping(String),
    #[error("no regular point in the scanned separation period")]
    NoRegularPoint,
    /// The axis values map to a non-positive probe wavenumber.
    #[error("axis values map to probe wavenumber {0}, which is not positive")]
    OutOfDomain(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxisName {
    Theta,
    L,
    K,
    Omega2,
    Beta,
}

impl AxisName {
    pub fn as_str(&self) -> &'static str {
        match self {
            AxisName::Theta => "theta",
            AxisName::L => "L",
            AxisName::K => "k",
            AxisName::Omega2 => "omega2",
            AxisName::Beta => "beta",
        }
    }
}

impl fmt::Display for AxisName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AxisName {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "theta" => Ok(AxisName::Theta),
            "L" | "l" => Ok(AxisName::L),
            "k" => Ok(AxisName::K),
            "omega2" => Ok(AxisName::Omega2),
            "beta" => Ok(AxisName::Beta),
            other => Err(SweepError::InvalidAxisMapping(format!("unknown axis `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AxisScale {
    #[default]
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub name: AxisName,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub scale: AxisScale,
}

impl AxisSpec {
    pub fn linear(name: AxisName, start: f64, stop: f64, count: usize) -> Result<Self, SweepError> {
        if !(start < stop) || !start.is_finite() || !stop.is_finite() {
            return Err(SweepError::InvalidAxisMapping(format!("axis {name}: need start < stop, got {start}..{stop}")));
        }
        if count < 2 {
            return Err(SweepError::InvalidAxisMapping(format!("axis {name}: need at least 2 points, got {count}")));
        }
        Ok(Self { name, start, stop, count, scale: AxisScale::Linear })
    }

    pub fn value(&self, index: usize) -> f64 {
        match self.scale {
            AxisScale::Linear => self.start + (self.stop - self.start) * index as f64 / (self.count - 1) as f64,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }

    pub fn step(&self) -> f64 {
        (self.stop - self.start) / (self.count - 1) as f64
    }
}

/// How a `theta` axis moves the probe (and, for the antisymmetric case, ω2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThetaMode {
    /// `k = ω1 + Γ1 tan θ`; the template must already give `θ2 = θ1`.
    #[default]
    Symmetric,
    /// `k = ω1 + Γ1 tan θ` and `ω2 = k + Γ2 tan θ`, so `θ2 = -θ1`.
    Antisymmetric,
}

/// Unit of an `L` axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LengthUnit {
    #[default]
    Absolute,
    /// `2π v / k` at the probe.
    ProbeWavelength,
    /// `2π v / ω1`.
    Emitter1Wavelength,
}

/// Separation used when there is no `L` axis.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum LengthRule {
    #[default]
    Template,
    /// `multiple · 2π v / ((ω1 + ω2)/2)`.
    MeanTransitionWavelength(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mapping {
    pub theta_mode: ThetaMode,
    pub length_unit: LengthUnit,
    pub length_rule: LengthRule,
    /// Probe wavenumber when no `k`/`theta` axis sets it; defaults to ω1.
    pub probe: Option<f64>,
}

fn invalid(msg: impl Into<String>) -> SweepError {
    SweepError::InvalidAxisMapping(msg.into())
}

fn check_axes(axes: &[AxisSpec], mapping: &Mapping, template: &RouterConfig) -> Result<(), SweepError> {
    if axes.is_empty() || axes.len() > 2 {
        return Err(invalid(format!("expected 1 or 2 axes, got {}", axes.len())));
    }
    if axes.len() == 2 && axes[0].name == axes[1].name {
        return Err(invalid(format!("axis {} given twice", axes[0].name)));
    }
    let has = |n: AxisName| axes.iter().any(|a| a.name == n);
    if has(AxisName::Theta) && has(AxisName::K) {
        return Err(invalid("theta and k both set the probe"));
    }
    if has(AxisName::Theta) && mapping.theta_mode == ThetaMode::Antisymmetric && has(AxisName::Omega2) {
        return Err(invalid("antisymmetric theta axis already sets omega2"));
    }
    if has(AxisName::Theta) && mapping.theta_mode == ThetaMode::Symmetric {
        let (e1, e2) = (template.emitter1(), template.emitter2());
        if has(AxisName::Omega2) || e1.transition_frequency() != e2.transition_frequency() {
            return Err(invalid("symmetric theta axis needs omega1 = omega2"));
        }
        if !has(AxisName::Beta) && e1.total_width() != e2.total_width() {
            return Err(invalid("symmetric theta axis needs equal emitter widths"));
        }
    }
    if has(AxisName::L) && mapping.length_rule != LengthRule::Template {
        return Err(invalid("L axis conflicts with a length rule"));
    }
    Ok(())
}

/// Configuration and probe for one combination of axis values.
pub fn resolve_point(
    template: &RouterConfig,
    mapping: &Mapping,
    assignments: &[(AxisName, f64)],
) -> Result<ProbePoint, SweepError> {
    let value_of = |n: AxisName| assignments.iter().find(|(a, _)| *a == n).map(|(_, v)| *v);
    let to_err = |e: crate::params::ParamError| invalid(e.to_string());

    let mut e1 = *template.emitter1();
    let mut e2 = *template.emitter2();
    if let Some(beta) = value_of(AxisName::Beta) {
        e1 = EmitterParams::with_ratio(e1.transition_frequency(), beta).map_err(to_err)?;
        e2 = EmitterParams::with_ratio(e2.transition_frequency(), beta).map_err(to_err)?;
    }
    if let Some(w2) = value_of(AxisName::Omega2) {
        e2 = e2.with_transition_frequency(w2).map_err(to_err)?;
    }
    let mut k = mapping.probe.unwrap_or(e1.transition_frequency());
    if let Some(kv) = value_of(AxisName::K) {
        k = kv;
    }
    if let Some(theta) = value_of(AxisName::Theta) {
        let tan = theta.tan();
        k = e1.transition_frequency() + e1.total_width() * tan;
        if mapping.theta_mode == ThetaMode::Antisymmetric {
            e2 = e2.with_transition_frequency(k + e2.total_width() * tan).map_err(to_err)?;
        }
    }
    if !(k > 0.0) || !k.is_finite() {
        return Err(SweepError::OutOfDomain(k));
    }
    let v = template.group_velocity();
    let separation = match value_of(AxisName::L) {
        Some(l) => match mapping.length_unit {
            LengthUnit::Absolute => l,
            LengthUnit::ProbeWavelength => l * 2.0 * PI * v / k,
            LengthUnit::Emitter1Wavelength => l * 2.0 * PI * v / e1.transition_frequency(),
        },
        None => match mapping.length_rule {
            LengthRule::Template => template.separation(),
            LengthRule::MeanTransitionWavelength(m) => {
                m * 2.0 * PI * v / (0.5 * (e1.transition_frequency() + e2.transition_frequency()))
            }
        },
    };
    let config = RouterConfig::new(e1, e2, separation, v).map_err(to_err)?;
    Ok(ProbePoint { config, wavenumber: k })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellStatus {
    Regular,
    /// Denominator below the singular threshold; probabilities are NaN.
    Singular,
    /// Evaluated, but rounding near the singular point broke conservation.
    IllConditioned,
    /// The axis values give no physical probe; probabilities are NaN.
    Unphysical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellRecord {
    pub probabilities: Probabilities,
    pub defect: f64,
    pub status: CellStatus,
}

impl CellRecord {
    fn nan(status: CellStatus) -> Self {
        let nan = f64::NAN;
        CellRecord {
            probabilities: Probabilities {
                transmission: nan,
                reflection: nan,
                forward_transfer: nan,
                backward_transfer: nan,
            },
            defect: nan,
            status,
        }
    }

    fn at(template: &RouterConfig, mapping: &Mapping, assignments: &[(AxisName, f64)]) -> Result<Self, SweepError> {
        match resolve_point(template, mapping, assignments) {
            Ok(p) => Ok(Self::evaluate(&p)),
            Err(SweepError::OutOfDomain(_)) => Ok(Self::nan(CellStatus::Unphysical)),
            Err(e) => Err(e),
        }
    }

    fn evaluate(point: &ProbePoint) -> Self {
        match scattering_amplitudes(&point.config, point.wavenumber) {
            Ok(amps) => {
                let defect = conservation_defect(&amps);
                let status = if defect < DEFECT_TOLERANCE { CellStatus::Regular } else { CellStatus::IllConditioned };
                CellRecord { probabilities: amps.probabilities(), defect, status }
            }
            Err(ScatteringError::SingularDenominator { .. }) => Self::nan(CellStatus::Singular),
            Err(ScatteringError::InvalidWavenumber(_)) => Self::nan(CellStatus::Unphysical),
        }
    }

    pub fn is_regular(&self) -> bool {
        self.status == CellStatus::Regular
    }
}

/// Quantity written as `value` in two-dimensional CSV output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Quantity {
    #[default]
    Transmission,
    Reflection,
    ForwardTransfer,
    BackwardTransfer,
}

impl Quantity {
    pub fn of(&self, p: &Probabilities) -> f64 {
        match self {
            Quantity::Transmission => p.transmission,
            Quantity::Reflection => p.reflection,
            Quantity::ForwardTransfer => p.forward_transfer,
            Quantity::BackwardTransfer => p.backward_transfer,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Quantity::Transmission => "T_a",
            Quantity::Reflection => "R_a",
            Quantity::ForwardTransfer => "Tb_fwd",
            Quantity::BackwardTransfer => "Tb_bwd",
        }
    }
}

impl FromStr for Quantity {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "T_a" | "transmission" => Ok(Quantity::Transmission),
            "R_a" | "reflection" => Ok(Quantity::Reflection),
            "Tb_fwd" | "forward" => Ok(Quantity::ForwardTransfer),
            "Tb_bwd" | "backward" => Ok(Quantity::BackwardTransfer),
            other => Err(invalid(format!("unknown quantity `{other}`"))),
        }
    }
}

/// How the dataset was produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub template: RouterConfig,
    pub mapping: Mapping,
    pub notes: String,
}

/// Gridded sweep results. Two-dimensional grids are stored with the first axis
/// outermost.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureDataset {
    pub axes: Vec<AxisSpec>,
    pub cells: Vec<CellRecord>,
    pub quantity: Quantity,
    pub provenance: Provenance,
}


/// Shortest round-trip formatting, in exponent form outside `[1e-4, 1e16)`.
struct Num(f64);

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.0.abs();
        if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
            write!(f, "{:e}", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FigureDataset {
    pub fn cell(&self, indices: &[usize]) -> &CellRecord {
        match indices {
            [i] => &self.cells[*i],
            [i, j] => &self.cells[i * self.axes[1].count + j],
            _ => panic!("expected one index per axis"),
        }
    }

    /// Plotted quantity along the second axis at `outer` (two-dimensional grids)
    /// or along the only axis.
    pub fn series(&self, outer: usize, quantity: Quantity) -> Vec<f64> {
        if self.axes.len() == 1 {
            self.cells.iter().map(|c| quantity.of(&c.probabilities)).collect()
        } else {
            let n = self.axes[1].count;
            self.cells[outer * n..(outer + 1) * n].iter().map(|c| quantity.of(&c.probabilities)).collect()
        }
    }

    /// Values of `quantity` along the first axis with the second fixed at `inner`.
    pub fn column(&self, inner: usize, quantity: Quantity) -> Vec<f64> {
        let n = self.axes[1].count;
        (0..self.axes[0].count).map(|i| quantity.of(&self.cells[i * n + inner].probabilities)).collect()
    }

    /// Largest `quantity` over regular cells, with its grid indices.
    pub fn max_regular(&self, quantity: Quantity) -> Option<(f64, Vec<usize>)> {
        let inner = if self.axes.len() == 2 { self.axes[1].count } else { 1 };
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_regular())
            .map(|(i, c)| (quantity.of(&c.probabilities), i))
            .fold(None, |best: Option<(f64, usize)>, (v, i)| match best {
                Some((b, _)) if b >= v => best,
                _ => Some((v, i)),
            })
            .map(|(v, i)| {
                let idx = if self.axes.len() == 2 { vec![i / inner, i % inner] } else { vec![i] };
                (v, idx)
            })
    }

    pub fn count(&self, status: CellStatus) -> usize {
        self.cells.iter().filter(|c| c.status == status).count()
    }

    /// CSV: `x,T_a,R_a,Tb_fwd,Tb_bwd,defect` for one axis, `x,y,value,defect`
    /// for two.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        if self.axes.len() == 1 {
            writeln!(out, "x,T_a,R_a,Tb_fwd,Tb_bwd,defect")?;
            for (i, c) in self.cells.iter().enumerate() {
                let p = c.probabilities;
                let row = [
                    self.axes[0].value(i),
                    p.transmission,
                    p.reflection,
                    p.forward_transfer,
                    p.backward_transfer,
                    c.defect,
                ];
                writeln!(out, "{}", row.map(Num).map(|n| n.to_string()).join(","))?;
            }
        } else {
            writeln!(out, "x,y,value,defect")?;
            let (ax, ay) = (&self.axes[0], &self.axes[1]);
            for i in 0..ax.count {
                for j in 0..ay.count {
                    let c = &self.cells[i * ay.count + j];
                    let row = [ax.value(i), ay.value(j), self.quantity.of(&c.probabilities), c.defect];
                    writeln!(out, "{}", row.map(Num).map(|n| n.to_string()).join(","))?;
                }
            }
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

/// Evaluates the model at every grid point.
pub fn grid_sweep(
    template: &RouterConfig,
    axes: &[AxisSpec],
    mapping: &Mapping,
    quantity: Quantity,
) -> Result<FigureDataset, SweepError> {
    check_axes(axes, mapping, template)?;
    let mut cells = Vec::with_capacity(axes.iter().map(|a| a.count).product());
    match axes {
        [a] => {
            for i in 0..a.count {
                cells.push(CellRecord::at(template, mapping, &[(a.name, a.value(i))])?);
            }
        }
        [a, b] => {
            for i in 0..a.count {
                for j in 0..b.count {
                    cells.push(CellRecord::at(template, mapping, &[(a.name, a.value(i)), (b.name, b.value(j))])?);
                }
            }
        }
        _ => unreachable!("checked above"),
    }
    Ok(FigureDataset {
        axes: axes.to_vec(),
        cells,
        quantity,
        provenance: Provenance { template: *template, mapping: *mapping, notes: String::new() },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureId {
    Fig2a,
    Fig2b,
    Fig3a,
    Fig3b,
    Fig4a,
    Fig4b,
    Fig5a,
    Fig5b,
}

impl FigureId {
    pub const ALL: [FigureId; 8] = [
        FigureId::Fig2a,
        FigureId::Fig2b,
        FigureId::Fig3a,
        FigureId::Fig3b,
        FigureId::Fig4a,
        FigureId::Fig4b,
        FigureId::Fig5a,
        FigureId::Fig5b,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FigureId::Fig2a => "fig2a",
            FigureId::Fig2b => "fig2b",
            FigureId::Fig3a => "fig3a",
            FigureId::Fig3b => "fig3b",
            FigureId::Fig4a => "fig4a",
            FigureId::Fig4b => "fig4b",
            FigureId::Fig5a => "fig5a",
            FigureId::Fig5b => "fig5b",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FigureId::ALL
            .iter()
            .copied()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| invalid(format!("unknown figure `{s}`")))
    }
}

/// Colormap resolution.
pub const MAP_POINTS: usize = 201;
/// Line-plot resolution.
pub const LINE_POINTS: usize = 1001;
/// Transition frequency used by every figure.
pub const FIGURE_OMEGA: f64 = 20.0;
/// Fixed phase shift of the distance scans.
pub const FIGURE_THETA: f64 = 0.2;
/// Separations of the transfer-window curves, in units of `2π v / ω1`.
pub const FIG3B_SEPARATIONS: (f64, f64, usize) = (0.05, 0.20, 4);
/// Values of ω2 for the transparency-window curves.
pub const FIG5B_OMEGA2: (f64, f64, usize) = (21.0, 24.0, 4);

fn figure_template(beta: f64) -> RouterConfig {
    let e = EmitterParams::with_ratio(FIGURE_OMEGA, beta).expect("valid figure emitter");
    RouterConfig::new(e, e, PI / FIGURE_OMEGA, 1.0).expect("valid figure config")
}

/// Dataset behind one of the published figures.
///
/// Colormaps span θ ∈ [-π/2, π/2] and L ∈ [λ/2, λ] with λ the probe
/// wavelength, so the standing-wave locus `L/λ = n/2 - θ/2π` passes through
/// grid points.
pub fn reproduce_figure(id: FigureId) -> FigureDataset {
    let axis = |name, start, stop, count| AxisSpec::linear(name, start, stop, count).expect("valid figure axis");
    let colormap = |beta: f64, mode: ThetaMode, quantity: Quantity, notes: &str| {
        let template = figure_template(beta);
        let mapping = Mapping { theta_mode: mode, length_unit: LengthUnit::ProbeWavelength, ..Mapping::default() };
        let axes = [axis(AxisName::Theta, -PI / 2.0, PI / 2.0, MAP_POINTS), axis(AxisName::L, 0.5, 1.0, MAP_POINTS)];
        let mut d = grid_sweep(&template, &axes, &mapping, quantity).expect("figure grid is valid");
        d.provenance.notes = format!("{notes}; beta = {beta}; k = omega1 + Gamma1 tan(theta); L in probe wavelengths");
        d
    };
    let distance_scan = |mode: ThetaMode, notes: &str| {
        let template = figure_template(1.0);
        let mapping = Mapping { theta_mode: mode, length_unit: LengthUnit::ProbeWavelength, ..Mapping::default() };
        // Theta is fixed; resolve it into the template first.
        let fixed = resolve_point(&template, &mapping, &[(AxisName::Theta, FIGURE_THETA)]).expect("valid");
        let mapping = Mapping { probe: Some(fixed.wavenumber), ..mapping };
        let axes = [axis(AxisName::L, 0.01, 2.01, LINE_POINTS)];
        let mut d = grid_sweep(&fixed.config, &axes, &mapping, Quantity::Transmission).expect("figure grid is valid");
        d.provenance.notes = format!("{notes}; theta = {FIGURE_THETA}; L in probe wavelengths");
        d
    };
    match id {
        FigureId::Fig2a => colormap(1.0, ThetaMode::Symmetric, Quantity::ForwardTransfer, "Tb_fwd, theta1 = theta2"),
        FigureId::Fig2b => colormap(3.0, ThetaMode::Symmetric, Quantity::ForwardTransfer, "Tb_fwd, theta1 = theta2"),
        FigureId::Fig4a => colormap(1.0, ThetaMode::Antisymmetric, Quantity::Transmission, "T_a, theta1 = -theta2"),
        FigureId::Fig4b => colormap(3.0, ThetaMode::Antisymmetric, Quantity::Transmission, "T_a, theta1 = -theta2"),
        FigureId::Fig3a => distance_scan(ThetaMode::Symmetric, "probabilities vs L, theta1 = theta2"),
        FigureId::Fig5a => distance_scan(ThetaMode::Antisymmetric, "probabilities vs L, theta1 = -theta2"),
        FigureId::Fig3b => {
            let template = figure_template(1.0);
            let mapping = Mapping { length_unit: LengthUnit::Emitter1Wavelength, ..Mapping::default() };
            let (s, e, n) = FIG3B_SEPARATIONS;
            let axes = [axis(AxisName::L, s, e, n), axis(AxisName::K, 10.0, 30.0, LINE_POINTS)];
            let mut d = grid_sweep(&template, &axes, &mapping, Quantity::ForwardTransfer).expect("valid");
            d.provenance.notes = "Tb_fwd vs k; omega1 = omega2 = 20; L in units of 2 pi v / omega1".into();
            d
        }
        FigureId::Fig5b => {
            let template = figure_template(1.0);
            let mapping = Mapping { length_rule: LengthRule::MeanTransitionWavelength(1.0), ..Mapping::default() };
            let (s, e, n) = FIG5B_OMEGA2;
            let axes = [axis(AxisName::Omega2, s, e, n), axis(AxisName::K, 2.0, 62.0, LINE_POINTS)];
            let mut d = grid_sweep(&template, &axes, &mapping, Quantity::Transmission).expect("valid");
            d.provenance.notes = "T_a vs k; omega1 = 20; L = 4 pi v / (omega1 + omega2)".into();
            d
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    MaxForwardTransfer,
    MaxTransmission,
}

impl Objective {
    fn of(&self, p: &Probabilities) -> f64 {
        match self {
            Objective::MaxForwardTransfer => p.forward_transfer,
            Objective::MaxTransmission => p.transmission,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalDistance {
    pub separation: f64,
    pub value: f64,
}

/// Points in the coarse scan of [`find_optimal_distance`].
pub const SCAN_POINTS: usize = 256;
/// Width of the final golden-section bracket.
pub const SEPARATION_TOLERANCE: f64 = 1e-10;

/// Separation in `[ε, ε + π v / k]` maximising `objective` at wavenumber `k`.
///
/// The probabilities are periodic in L with period `π v / k`, so one period
/// covers every distinct configuration. The result is never worse than the
/// best of the 256 scanned points. Separations where rounding breaks
/// conservation (next to the bound state) are skipped.
pub fn find_optimal_distance(
    config: &RouterConfig,
    wavenumber: f64,
    objective: Objective,
) -> Result<OptimalDistance, SweepError> {
    let period = PI * config.group_velocity() / wavenumber;
    if !(period > 0.0) || !period.is_finite() {
        return Err(invalid(format!("wavenumber {wavenumber} must be positive")));
    }
    let lo = 1e-6 * period;
    let eval = |l: f64| -> Option<f64> {
        let c = config.with_separation(l).ok()?;
        let a = scattering_amplitudes(&c, wavenumber).ok()?;
        // Same conditioning rule as sweep cells.
        (conservation_defect(&a) < DEFECT_TOLERANCE).then(|| objective.of(&a.probabilities()))
    };
    let grid: Vec<f64> = (0..SCAN_POINTS).map(|i| lo + period * i as f64 / (SCAN_POINTS - 1) as f64).collect();
    let (best_i, best_v) = grid
        .iter()
        .enumerate()
        .filter_map(|(i, &l)| eval(l).map(|v| (i, v)))
        .fold(None, |acc: Option<(usize, f64)>, (i, v)| match acc {
            Some((_, b)) if b >= v => acc,
            _ => Some((i, v)),
        })
        .ok_or(SweepError::NoRegularPoint)?;

    let score = |l: f64| eval(l).unwrap_or(f64::NEG_INFINITY);
    let step = period / (SCAN_POINTS - 1) as f64;
    let mut best = OptimalDistance { separation: grid[best_i], value: best_v };
    let mut consider = |l: f64, v: f64| {
        if v > best.value {
            best = OptimalDistance { separation: l, value: v };
        }
    };
    // Near the bound state the transfer peak is far narrower than the scan
    // spacing, so the standing-wave separation is refined as a second seed.
    let mut seeds = vec![grid[best_i]];
    let theta1 = phase_shift(wavenumber, config.emitter1());
    let theta2 = phase_shift(wavenumber, config.emitter2());
    if let Ok(w) = standing_wave_length(wavenumber, theta1, theta2, 0, config.group_velocity()) {
        let folded = lo + (w.separation - lo).rem_euclid(period);
        consider(folded, score(folded));
        seeds.push(folded);
    }
    for seed in seeds {
        let (l, v) = golden_section_max(&score, (seed - step).max(lo), (seed + step).min(lo + period));
        consider(l, v);
    }
    Ok(best)
}

fn golden_section_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > SEPARATION_TOLERANCE {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    let mid = 0.5 * (a + b);
    (mid, f(mid))
}

/// Full width at half maximum of the peak containing the maximum of `ys`.
///
/// Half-maximum crossings are linearly interpolated. Returns `None` when the
/// peak touches either end of the series.
pub fn full_width_half_max(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let (peak, &max) = ys
        .iter()
        .enumerate()
        .filter(|(_, y)| y.is_finite())
        .max_by(|a, b| a.1.total_cmp(b.1))?;
    let half = 0.5 * max;
    let mut l = peak;
    while l > 0 && ys[l - 1] >= half {
        l -= 1;
    }
    let mut r = peak;
    while r + 1 < ys.len() && ys[r + 1] >= half {
        r += 1;
    }
    if l == 0 || r + 1 == ys.len() {
        return None;
    }
    let cross = |i0: usize, i1: usize| xs[i0] + (half - ys[i0]) / (ys[i1] - ys[i0]) * (xs[i1] - xs[i0]);
    Some(cross(r, r + 1) - cross(l - 1, l))
}

/// Lag (in samples, excluding lags below `min_lag`) maximising the
/// autocorrelation of the mean-removed series.
///
/// Uses the biased estimator (normalised by `n`), so the fundamental period
/// wins over its multiples.
pub fn autocorrelation_peak_lag(ys: &[f64], min_lag: usize) -> usize {
    let n = ys.len();
    let mean = ys.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = ys.iter().map(|y| y - mean).collect();
    (min_lag..n / 2)
        .map(|lag| {
            let c: f64 = (0..n - lag).map(|i| centered[i] * centered[i + lag]).sum::<f64>() / n as f64;
            (lag, c)
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(lag, _)| lag)
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::symmetric_closed_form;

    #[test]
    fn axis_validation() {
        assert!(AxisSpec::linear(AxisName::K, 1.0, 1.0, 5).is_err());
        assert!(AxisSpec::linear(AxisName::K, 0.0, 1.0, 1).is_err());
        let a = AxisSpec::linear(AxisName::K, 0.0, 1.0, 5).unwrap();
        assert_eq!(a.values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn conflicting_axes_are_rejected() {
        let t = figure_template(1.0);
        let m = Mapping::default();
        let th = AxisSpec::linear(AxisName::Theta, -1.0, 1.0, 3).unwrap();
        let k = AxisSpec::linear(AxisName::K, 19.0, 21.0, 3).unwrap();
        assert!(matches!(grid_sweep(&t, &[th, k], &m, Quantity::Transmission), Err(SweepError::InvalidAxisMapping(_))));
        assert!(grid_sweep(&t, &[k, k], &m, Quantity::Transmission).is_err());
        assert!(grid_sweep(&t, &[], &m, Quantity::Transmission).is_err());
        let neg = AxisSpec::linear(AxisName::L, -1.0, 1.0, 3).unwrap();
        assert!(grid_sweep(&t, &[neg], &m, Quantity::Transmission).is_err());
    }

    #[test]
    fn single_point_grid_matches_direct_call() {
        let t = figure_template(1.0).with_separation(0.37).unwrap();
        let k = AxisSpec::linear(AxisName::K, 20.5, 21.5, 2).unwrap();
        let d = grid_sweep(&t, &[k], &Mapping::default(), Quantity::Transmission).unwrap();
        let direct = scattering_amplitudes(&t, 20.5).unwrap();
        assert_eq!(d.cells[0].probabilities, direct.probabilities());
        assert_eq!(d.cells[0].defect, conservation_defect(&direct));
    }

    #[test]
    fn theta_axis_on_locus_matches_closed_form() {
        // A theta axis at a fixed standing-wave length in probe wavelengths.
        for &beta in &[1.0, 3.0] {
            let t = figure_template(beta);
            let m = Mapping { length_unit: LengthUnit::ProbeWavelength, ..Mapping::default() };
            for &theta in &[-1.2, -0.4, 0.1, 0.6, 1.3] {
                let x = 1.0 - theta / (2.0 * PI);
                let p = resolve_point(&t, &m, &[(AxisName::Theta, theta), (AxisName::L, x)]).unwrap();
                let got = scattering_amplitudes(&p.config, p.wavenumber).unwrap().probabilities();
                let (ta, tb) = symmetric_closed_form(theta, beta);
                assert!((got.transmission - ta).abs() < 1e-10);
                assert!((got.forward_transfer - tb).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn antisymmetric_mapping_sets_opposite_phases() {
        let t = figure_template(1.0);
        let m = Mapping { theta_mode: ThetaMode::Antisymmetric, ..Mapping::default() };
        let p = resolve_point(&t, &m, &[(AxisName::Theta, 0.3)]).unwrap();
        let t1 = phase_shift(p.wavenumber, p.config.emitter1());
        let t2 = phase_shift(p.wavenumber, p.config.emitter2());
        assert!((t1 - 0.3).abs() < 1e-12 && (t2 + 0.3).abs() < 1e-12);
    }

    #[test]
    fn distance_axis_has_exact_period() {
        let d = reproduce_figure(FigureId::Fig3a);
        // Period λ/2 = 250 grid steps of 0.002 λ.
        for q in [Quantity::Transmission, Quantity::Reflection, Quantity::ForwardTransfer, Quantity::BackwardTransfer] {
            let s = d.series(0, q);
            for i in 0..s.len() - 250 {
                assert!((s[i] - s[i + 250]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn figure_ids_round_trip() {
        for f in FigureId::ALL {
            assert_eq!(f.as_str().parse::<FigureId>().unwrap(), f);
        }
        assert!("fig9".parse::<FigureId>().is_err());
    }

    #[test]
    fn fwhm_of_triangle() {
        let xs: Vec<f64> = (0..=20).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (1.0 - (x - 10.0).abs() / 8.0).max(0.0)).collect();
        assert!((full_width_half_max(&xs, &ys).unwrap() - 8.0).abs() < 1e-12);
        let edge: Vec<f64> = xs.iter().map(|x| 1.0 - x / 20.0).collect();
        assert_eq!(full_width_half_max(&xs, &edge), None);
    }

    #[test]
    fn autocorrelation_finds_period() {
        let ys: Vec<f64> = (0..400).map(|i| (2.0 * PI * i as f64 / 37.0).sin()).collect();
        assert_eq!(autocorrelation_peak_lag(&ys, 5), 37);
    }

    #[test]
    fn optimal_distance_beats_scan() {
        let e = EmitterParams::new(20.0, 1.0, 1.0).unwrap();
        let c = RouterConfig::new(e, e, 0.1, 1.0).unwrap();
        let k = crate::scattering::probe_for_phase(0.3, &e);
        let best = find_optimal_distance(&c, k, Objective::MaxForwardTransfer).unwrap();
        let period = PI / k;
        let dense = (0..20_000)
            .map(|i| {
                let l = 1e-6 * period + period * i as f64 / 19_999.0;
                scattering_amplitudes(&c.with_separation(l).unwrap(), k).unwrap().probabilities().forward_transfer
            })
            .fold(0.0, f64::max);
        assert!(best.value >= dense - 1e-12 && best.value <= 1.0 + 1e-9);
    }
}
