//! Time-domain oracle: a single-photon wavepacket scattered by the emitters.
//!
//! In the single-excitation sector the emitter equations of motion close
//! linearly (σ^z → -1), giving two linear delay differential equations for the
//! emitter amplitudes. Working in a frame rotating at the carrier `k0` with
//! envelopes `s_n(t) = σ_n(t) e^{i k0 t}`:
//!
//! ```text
//! s1' = (i(k0-ω1) - Γ1) s1 - i√γ1a f(t + L/2v) e^{-ik0L/2v} - g12 e^{ik0L/v} s2(t - L/v)
//! s2' = (i(k0-ω2) - Γ2) s2 - i√γ2a f(t - L/2v) e^{+ik0L/2v} - g12 e^{ik0L/v} s1(t - L/v)
//! ```
//!
//! with `g12 = √(γ1a γ2a) + √(γ1b γ2b)` and `f` the input envelope in line a,
//! referenced at z = 0. The outputs follow from the input-output relations.
//!
//! The step is chosen so that `L / 2v` is an integer number of steps. The
//! outputs are then read off grid points exactly, and only the RK4 half-step
//! stages need an interpolated delayed value, taken from a cubic Hermite
//! interpolant over the ring-buffer history.

use std::collections::VecDeque;
use std::io::{self, Write};

use num_complex::Complex64;
use thiserror::Error;

use crate::params::RouterConfig;
use crate::scattering::Probabilities;
use crate::EquationForm;

/// Largest `time_step · max|k0 - ω_n|` accepted by the integrator.
pub const MAX_DETUNING_PHASE_PER_STEP: f64 = 0.5;

/// Residual excitation (relative to input energy) above which a trace is
/// considered truncated.
pub const TRUNCATION_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TimeDomainError {
    #[error("time step {step} exceeds the stability/accuracy limit {limit}")]
    StepTooLarge { step: f64, limit: f64 },
    #[error("time step {step} does not resolve the inter-emitter delay {delay}")]
    UnresolvedDelay { step: f64, delay: f64 },
    #[error("invalid pulse: {0}")]
    InvalidPulse(&'static str),
    #[error("duration must be positive and finite, got {0}")]
    InvalidDuration(f64),
    #[error("trace truncated: residual excitation {residual:e} of input energy {input:e}")]
    TraceTruncated { residual: f64, input: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PulseShape {
    #[default]
    Gaussian,
}

/// Input wavepacket in line a, travelling right.
///
/// The envelope is switched on at `t = 0`; nothing enters before that.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    pub carrier_wavenumber: f64,
    /// Standard deviation of the amplitude envelope.
    pub temporal_width: f64,
    pub peak_time: f64,
    pub amplitude: f64,
    pub shape: PulseShape,
}

impl PulseSpec {
    /// Unit-amplitude Gaussian peaked at five widths.
    pub fn gaussian(carrier_wavenumber: f64, temporal_width: f64) -> Self {
        Self {
            carrier_wavenumber,
            temporal_width,
            peak_time: 5.0 * temporal_width,
            amplitude: 1.0,
            shape: PulseShape::Gaussian,
        }
    }

    /// Gaussian with width `100 / Γ_min`.
    pub fn default_for(config: &RouterConfig, carrier_wavenumber: f64) -> Self {
        Self::gaussian(carrier_wavenumber, 100.0 / config.min_width())
    }

    pub fn with_amplitude(self, amplitude: f64) -> Self {
        Self { amplitude, ..self }
    }

    /// Envelope at time `t` (z = 0).
    pub fn envelope(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        match self.shape {
            PulseShape::Gaussian => {
                let x = (t - self.peak_time) / self.temporal_width;
                self.amplitude * (-0.5 * x * x).exp()
            }
        }
    }

    /// True when the bandwidth `1/σ_t` is at most a tenth of the narrowest linewidth.
    pub fn is_narrow_band(&self, config: &RouterConfig) -> bool {
        1.0 / self.temporal_width <= config.min_width() / 10.0
    }

    fn validate(&self) -> Result<(), TimeDomainError> {
        if !self.carrier_wavenumber.is_finite() {
            return Err(TimeDomainError::InvalidPulse("carrier wavenumber must be finite"));
        }
        if !(self.temporal_width > 0.0) || !self.temporal_width.is_finite() {
            return Err(TimeDomainError::InvalidPulse("temporal width must be positive and finite"));
        }
        if !self.peak_time.is_finite() || !self.amplitude.is_finite() {
            return Err(TimeDomainError::InvalidPulse("peak time and amplitude must be finite"));
        }
        Ok(())
    }
}

fn max_detuning(config: &RouterConfig, pulse: &PulseSpec, form: EquationForm) -> f64 {
    let k0 = pulse.carrier_wavenumber;
    let w1 = config.emitter1().transition_frequency();
    let w2 = match form {
        EquationForm::Corrected => config.emitter2().transition_frequency(),
        EquationForm::AsPrinted => w1,
    };
    (k0 - w1).abs().max((k0 - w2).abs())
}

/// Largest accepted step: `min(0.02/Γ_max, L/(10 v_g), 0.5/max|k0 - ω_n|)`.
pub fn max_time_step(config: &RouterConfig, pulse: &PulseSpec) -> f64 {
    let detuning = max_detuning(config, pulse, EquationForm::Corrected);
    let mut limit = (0.02 / config.max_width()).min(config.transit_time() / 10.0);
    if detuning > 0.0 {
        limit = limit.min(MAX_DETUNING_PHASE_PER_STEP / detuning);
    }
    limit
}

/// Default step: the width and delay limits, with a detuned carrier resolved
/// at a tenth of a radian per step.
pub fn default_time_step(config: &RouterConfig, pulse: &PulseSpec) -> f64 {
    let detuning = max_detuning(config, pulse, EquationForm::Corrected);
    let mut step = (0.02 / config.max_width()).min(config.transit_time() / 10.0);
    if detuning > 0.0 {
        step = step.min(0.1 / detuning);
    }
    step
}

/// Pulse, forty lifetimes of the slower emitter and a few round trips.
pub fn default_duration(config: &RouterConfig, pulse: &PulseSpec) -> f64 {
    pulse.peak_time.max(0.0) + 6.0 * pulse.temporal_width + 40.0 / config.min_width() + 4.0 * config.transit_time()
}

/// One recorded instant. Amplitudes are envelopes in the carrier frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub time: f64,
    pub emitter1_amp: Complex64,
    pub emitter2_amp: Complex64,
    pub out_a_right: Complex64,
    pub out_a_left: Complex64,
    pub out_b_right: Complex64,
    pub out_b_left: Complex64,
}

impl TraceSample {
    pub fn outputs(&self) -> [Complex64; 4] {
        [self.out_a_right, self.out_a_left, self.out_b_right, self.out_b_left]
    }
}

/// Sampled simulation output.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeTrace {
    /// Spacing of the recorded samples.
    pub time_step: f64,
    /// Integrator step; equals `time_step` unless samples were decimated.
    pub integration_step: f64,
    pub samples: Vec<TraceSample>,
    /// Input energy injected inside the trace window.
    pub input_energy: f64,
    /// `[a-right, a-left, b-right, b-left]` integrated at the integrator step.
    pub output_energies: [f64; 4],
    /// Emitter excitation left at the end of the window.
    pub residual_excitation: f64,
    /// Input energy arriving after the window closes.
    pub pending_input: f64,
    pub narrow_band: bool,
    /// Earliest time a right-moving (resp. left-moving) output can be nonzero.
    pub right_arrival: f64,
    pub left_arrival: f64,
}

impl TimeTrace {
    /// Output energies recomputed from the recorded samples alone.
    pub fn sampled_output_energies(&self) -> [f64; 4] {
        let mut acc = [0.0; 4];
        for s in &self.samples {
            for (a, o) in acc.iter_mut().zip(s.outputs()) {
                *a += o.norm_sqr() * self.time_step;
            }
        }
        acc
    }
}

/// Integrator settings beyond step and duration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationOptions {
    pub form: EquationForm,
    /// Record every `record_stride`-th integrator step.
    pub record_stride: usize,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self { form: EquationForm::Corrected, record_stride: 1 }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct HistoryEntry {
    s1: Complex64,
    s2: Complex64,
    d1: Complex64,
    d2: Complex64,
}

/// Fixed-length history of the most recent grid points, oldest first.
struct History {
    buf: VecDeque<HistoryEntry>,
    len: usize,
}

impl History {
    fn new(len: usize) -> Self {
        let mut buf = VecDeque::with_capacity(len);
        buf.extend(std::iter::repeat_n(HistoryEntry::default(), len));
        Self { buf, len }
    }

    fn push(&mut self, e: HistoryEntry) {
        if self.buf.len() == self.len {
            self.buf.pop_front();
        }
        self.buf.push_back(e);
    }

    /// Entry `lag` steps behind the newest.
    fn back(&self, lag: usize) -> &HistoryEntry {
        &self.buf[self.len - 1 - lag]
    }

    fn newest(&self) -> &HistoryEntry {
        self.back(0)
    }
}

/// Cubic Hermite value halfway across a step of length `h`.
fn hermite_mid(y0: Complex64, d0: Complex64, y1: Complex64, d1: Complex64, h: f64) -> Complex64 {
    0.5 * (y0 + y1) + (h / 8.0) * (d0 - d1)
}

struct Dynamics {
    a1: Complex64,
    a2: Complex64,
    drive1: Complex64,
    drive2: Complex64,
    couple: Complex64,
}

impl Dynamics {
    fn new(config: &RouterConfig, k0: f64, form: EquationForm) -> Self {
        let (e1, e2) = (config.emitter1(), config.emitter2());
        let w2 = match form {
            EquationForm::Corrected => e2.transition_frequency(),
            EquationForm::AsPrinted => e1.transition_frequency(),
        };
        let tau = config.transit_time();
        let i = Complex64::i();
        let cross = (e1.decay_to_a() * e2.decay_to_a()).sqrt() + (e1.decay_to_b() * e2.decay_to_b()).sqrt();
        Self {
            a1: Complex64::new(-e1.total_width(), k0 - e1.transition_frequency()),
            a2: Complex64::new(-e2.total_width(), k0 - w2),
            drive1: -i * e1.decay_to_a().sqrt() * Complex64::from_polar(1.0, -0.5 * k0 * tau),
            drive2: -i * e2.decay_to_a().sqrt() * Complex64::from_polar(1.0, 0.5 * k0 * tau),
            couple: -cross * Complex64::from_polar(1.0, k0 * tau),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn rhs(
        &self,
        s1: Complex64,
        s2: Complex64,
        f1: f64,
        f2: f64,
        s1_delayed: Complex64,
        s2_delayed: Complex64,
    ) -> (Complex64, Complex64) {
        (
            self.a1 * s1 + self.drive1 * f1 + self.couple * s2_delayed,
            self.a2 * s2 + self.drive2 * f2 + self.couple * s1_delayed,
        )
    }
}

/// Simulates `pulse` with the corrected equations, recording every step.
pub fn simulate_pulse(
    config: &RouterConfig,
    pulse: &PulseSpec,
    time_step: f64,
    duration: f64,
) -> Result<TimeTrace, TimeDomainError> {
    simulate_pulse_with(config, pulse, time_step, duration, SimulationOptions::default())
}

pub fn simulate_pulse_with(
    config: &RouterConfig,
    pulse: &PulseSpec,
    time_step: f64,
    duration: f64,
    options: SimulationOptions,
) -> Result<TimeTrace, TimeDomainError> {
    pulse.validate()?;
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(TimeDomainError::InvalidDuration(duration));
    }
    let delay = config.transit_time();
    if !(time_step > 0.0) || time_step > delay {
        return Err(TimeDomainError::UnresolvedDelay { step: time_step, delay });
    }
    let mut limit = (0.02 / config.max_width()).min(delay / 10.0);
    let detuning = max_detuning(config, pulse, options.form);
    if detuning > 0.0 {
        limit = limit.min(MAX_DETUNING_PHASE_PER_STEP / detuning);
    }
    if time_step > limit {
        return Err(TimeDomainError::StepTooLarge { step: time_step, limit });
    }

    // Snap the step so that L/2v = hop · dt.
    let half = 0.5 * delay;
    let hop = ((half / time_step) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let dt = half / hop as f64;
    let lag = 2 * hop;
    // Grid index i sits at time (i - origin)·dt, so the window opens at -2L/v.
    let origin = 4 * hop;
    let last_sample = (duration / dt).ceil() as usize;
    let last_step = last_sample + hop;
    let stride = options.record_stride.max(1);

    let k0 = pulse.carrier_wavenumber;
    let dynamics = Dynamics::new(config, k0, options.form);
    let [g1a, g1b, g2a, g2b] = config.decay_rates().map(f64::sqrt);
    let i = Complex64::i();
    let late = Complex64::from_polar(1.0, 0.5 * k0 * delay);
    let early = late.conj();

    let time_of = |idx: f64| (idx - origin as f64) * dt;
    // Drive seen by emitter 1 at (grid) index `idx`: f(t + L/2v); emitter 2: f(t - L/2v).
    let drive1 = |idx: f64| pulse.envelope(time_of(idx + hop as f64));
    let drive2 = |idx: f64| pulse.envelope(time_of(idx - hop as f64));

    let mut history = History::new(lag + 1);
    // Index 0 starts from rest with no drive: derivative zero.
    let mut samples = Vec::with_capacity(last_sample / stride + 1);
    let mut energies = [0.0f64; 4];
    let mut input_energy = 0.0f64;
    let mut residual = 0.0f64;

    let mut emit_sample = |history: &History, j: usize, samples: &mut Vec<TraceSample>| {
        // j = newest - hop: s at j - hop, j, j + hop.
        let ahead = history.newest();
        let here = history.back(hop);
        let behind = history.back(lag);
        let t = time_of(j as f64);
        let input = pulse.envelope(t);
        let out_a_right = input - i * (g1a * behind.s1 * late + g2a * ahead.s2 * early);
        let out_b_right = -i * (g1b * behind.s1 * late + g2b * ahead.s2 * early);
        let out_a_left = -i * (g1a * ahead.s1 * early + g2a * behind.s2 * late);
        let out_b_left = -i * (g1b * ahead.s1 * early + g2b * behind.s2 * late);
        let outs = [out_a_right, out_a_left, out_b_right, out_b_left];
        for (e, o) in energies.iter_mut().zip(outs) {
            *e += o.norm_sqr() * dt;
        }
        input_energy += input * input * dt;
        if j == last_sample {
            residual = here.s1.norm_sqr() + here.s2.norm_sqr();
        }
        if j.is_multiple_of(stride) {
            samples.push(TraceSample {
                time: t,
                emitter1_amp: here.s1,
                emitter2_amp: here.s2,
                out_a_right,
                out_a_left,
                out_b_right,
                out_b_left,
            });
        }
    };

    for step in 0..last_step {
        let cur = *history.newest();
        let old = *history.back(lag);
        let next_old = *history.back(lag - 1);
        let base = step as f64;
        let mid_old = HistoryEntry {
            s1: hermite_mid(old.s1, old.d1, next_old.s1, next_old.d1, dt),
            s2: hermite_mid(old.s2, old.d2, next_old.s2, next_old.d2, dt),
            ..Default::default()
        };

        let k1 = (cur.d1, cur.d2);
        let (f1m, f2m) = (drive1(base + 0.5), drive2(base + 0.5));
        let k2 = dynamics.rhs(
            cur.s1 + 0.5 * dt * k1.0,
            cur.s2 + 0.5 * dt * k1.1,
            f1m,
            f2m,
            mid_old.s1,
            mid_old.s2,
        );
        let k3 = dynamics.rhs(
            cur.s1 + 0.5 * dt * k2.0,
            cur.s2 + 0.5 * dt * k2.1,
            f1m,
            f2m,
            mid_old.s1,
            mid_old.s2,
        );
        let (f1e, f2e) = (drive1(base + 1.0), drive2(base + 1.0));
        let k4 = dynamics.rhs(cur.s1 + dt * k3.0, cur.s2 + dt * k3.1, f1e, f2e, next_old.s1, next_old.s2);

        let s1 = cur.s1 + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        let s2 = cur.s2 + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        // Derivative at the new grid point; its delayed partner is next_old.
        let (d1, d2) = dynamics.rhs(s1, s2, f1e, f2e, next_old.s1, next_old.s2);
        history.push(HistoryEntry { s1, s2, d1, d2 });

        let newest = step + 1;
        if newest >= hop {
            emit_sample(&history, newest - hop, &mut samples);
        }
    }

    let mut pending = 0.0;
    let mut idx = last_sample + 1;
    loop {
        let t = time_of(idx as f64);
        let f = pulse.envelope(t);
        pending += f * f * dt;
        if t > pulse.peak_time + 40.0 * pulse.temporal_width || (t > pulse.peak_time && f * f < 1e-300) {
            break;
        }
        idx += 1;
    }

    Ok(TimeTrace {
        time_step: dt * stride as f64,
        integration_step: dt,
        samples,
        input_energy,
        output_energies: energies,
        residual_excitation: residual,
        pending_input: pending,
        narrow_band: pulse.is_narrow_band(config),
        right_arrival: 0.0,
        left_arrival: -delay,
    })
}

/// Routing probabilities as output energy over input energy.
pub fn extract_probabilities(trace: &TimeTrace) -> Result<Probabilities, TimeDomainError> {
    let input = trace.input_energy;
    let leftover = trace.residual_excitation + trace.pending_input;
    if !(input > 0.0) || leftover > TRUNCATION_THRESHOLD * input {
        return Err(TimeDomainError::TraceTruncated { residual: leftover, input });
    }
    let [t, r, f, b] = trace.output_energies.map(|e| e / input);
    Ok(Probabilities { transmission: t, reflection: r, forward_transfer: f, backward_transfer: b })
}

/// `|Σ output energies + residual - input| / input`, zero for an empty pulse.
pub fn energy_defect(trace: &TimeTrace) -> f64 {
    if trace.input_energy == 0.0 {
        return 0.0;
    }
    let out: f64 = trace.output_energies.iter().sum();
    (out + trace.residual_excitation - trace.input_energy).abs() / trace.input_energy
}

pub const TRACE_CSV_HEADER: &str =
    "time,re_s1,im_s1,re_s2,im_s2,re_oar,im_oar,re_oal,im_oal,re_obr,im_obr,re_obl,im_obl";

/// Writes the trace as CSV with 17 significant digits per value.
pub fn write_trace_csv<W: Write>(trace: &TimeTrace, mut out: W) -> io::Result<()> {
    writeln!(out, "{TRACE_CSV_HEADER}")?;
    for s in &trace.samples {
        write!(out, "{:.16e}", s.time + 0.0)?;
        for c in [s.emitter1_amp, s.emitter2_amp, s.out_a_right, s.out_a_left, s.out_b_right, s.out_b_left] {
            // `+ 0.0` turns -0 into 0.
            write!(out, ",{:.16e},{:.16e}", c.re + 0.0, c.im + 0.0)?;
        }
        writeln!(out)?;
    }
    Ok(())
}
