//! Closed-form single-photon scattering amplitudes.
//!
//! A photon of wavenumber `k` enters line a from the left. Each emitter imprints
//! a reflection phase `θ_n = atan((k - ω_n) / Γ_n)` and the two emitters talk to
//! each other through the round-trip factor `exp(2ikL / v_g)`. Summing the
//! multiple-scattering series gives four amplitudes: transmission and reflection
//! in line a, forward and backward transfer into line b.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::params::{EmitterParams, RouterConfig};

/// Denominators at or below this modulus are treated as singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScatteringError {
    #[error(
        "singular denominator |1 - T1 T2 exp(2ikL/vg)| = {modulus:e} at k = {wavenumber}, L = {separation}, \
         theta1 = {theta1}, theta2 = {theta2}"
    )]
    SingularDenominator {
        modulus: f64,
        wavenumber: f64,
        separation: f64,
        theta1: f64,
        theta2: f64,
    },
    #[error("wavenumber must be positive and finite, got {0}")]
    InvalidWavenumber(f64),
}

/// Reflection phase shift of one emitter at a probe frequency.
pub fn phase_shift(probe_frequency: f64, emitter: &EmitterParams) -> f64 {
    ((probe_frequency - emitter.transition_frequency()) / emitter.total_width()).atan()
}

/// Probe frequency at which `emitter` imprints the phase `theta`.
pub fn probe_for_phase(theta: f64, emitter: &EmitterParams) -> f64 {
    emitter.transition_frequency() + emitter.total_width() * theta.tan()
}

/// Per-emitter building blocks of the multiple-scattering series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceFactors {
    pub theta1: f64,
    pub theta2: f64,
    /// Drive factor of emitter 1 by the incoming photon.
    pub s1: Complex64,
    pub s2: Complex64,
    /// Emitter-to-emitter transfer factor.
    pub t1: Complex64,
    pub t2: Complex64,
    /// `exp(i 2 k L / v_g)`.
    pub round_trip_phase: Complex64,
}

impl InterferenceFactors {
    /// `1 - T1 T2 exp(2ikL/vg)`, shared by all four amplitudes.
    pub fn denominator(&self) -> Complex64 {
        Complex64::new(1.0, 0.0) - self.t1 * self.t2 * self.round_trip_phase
    }
}

/// `cos θ · exp(iθ)`.
fn lorentzian_phase(theta: f64) -> Complex64 {
    Complex64::from_polar(theta.cos(), theta)
}

/// Evaluates θ_n, S_n, T_n and the round-trip phase at `probe_frequency`.
pub fn interference_factors(probe_frequency: f64, config: &RouterConfig) -> InterferenceFactors {
    let (e1, e2) = (config.emitter1(), config.emitter2());
    let theta1 = phase_shift(probe_frequency, e1);
    let theta2 = phase_shift(probe_frequency, e2);
    let cross = (e1.decay_to_a() * e2.decay_to_a()).sqrt() + (e1.decay_to_b() * e2.decay_to_b()).sqrt();
    let l1 = lorentzian_phase(theta1);
    let l2 = lorentzian_phase(theta2);
    let s1 = l1 * (-e1.decay_to_a().sqrt() / e1.total_width());
    let s2 = l2 * (-e2.decay_to_a().sqrt() / e2.total_width());
    let t1 = l1 * (-cross / e1.total_width());
    let t2 = l2 * (-cross / e2.total_width());
    let round_trip_phase = Complex64::from_polar(1.0, 2.0 * probe_frequency * config.transit_time());
    InterferenceFactors { theta1, theta2, s1, s2, t1, t2, round_trip_phase }
}

/// Routing probabilities of a single photon entering line a from the left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probabilities {
    /// `|t^a_r|²`
    pub transmission: f64,
    /// `|t^a_l|²`
    pub reflection: f64,
    /// `|t^b_r|²`
    pub forward_transfer: f64,
    /// `|t^b_l|²`
    pub backward_transfer: f64,
}

impl Probabilities {
    /// `[T_a, R_a, Tb_fwd, Tb_bwd]`
    pub fn to_array(self) -> [f64; 4] {
        [self.transmission, self.reflection, self.forward_transfer, self.backward_transfer]
    }

    pub fn total(&self) -> f64 {
        self.transmission + self.reflection + self.forward_transfer + self.backward_transfer
    }
}

/// The four single-photon amplitudes.
///
/// Reflected amplitudes are referenced to the position of emitter 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringAmplitudes {
    pub transmit_a: Complex64,
    pub reflect_a: Complex64,
    pub transfer_forward_b: Complex64,
    pub transfer_backward_b: Complex64,
}

impl ScatteringAmplitudes {
    pub fn new(
        transmit_a: Complex64,
        reflect_a: Complex64,
        transfer_forward_b: Complex64,
        transfer_backward_b: Complex64,
    ) -> Self {
        Self { transmit_a, reflect_a, transfer_forward_b, transfer_backward_b }
    }

    /// `[t^a_r, t^a_l, t^b_r, t^b_l]`
    pub fn to_array(self) -> [Complex64; 4] {
        [self.transmit_a, self.reflect_a, self.transfer_forward_b, self.transfer_backward_b]
    }

    pub fn probabilities(&self) -> Probabilities {
        Probabilities {
            transmission: self.transmit_a.norm_sqr(),
            reflection: self.reflect_a.norm_sqr(),
            forward_transfer: self.transfer_forward_b.norm_sqr(),
            backward_transfer: self.transfer_backward_b.norm_sqr(),
        }
    }

    /// Largest elementwise complex difference to `other`.
    pub fn max_difference(&self, other: &ScatteringAmplitudes) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Scattering amplitudes at wavenumber `k`.
///
/// The `T2 S1` term of the rightward amplitudes carries no round-trip phase while
/// the `T1 S2` term does: the two paths differ by one round trip between the
/// emitters.
pub fn scattering_amplitudes(config: &RouterConfig, wavenumber: f64) -> Result<ScatteringAmplitudes, ScatteringError> {
    let f = interference_factors(wavenumber, config);
    let denom = f.denominator();
    if !(denom.norm() > SINGULAR_THRESHOLD) {
        return Err(ScatteringError::SingularDenominator {
            modulus: denom.norm(),
            wavenumber,
            separation: config.separation(),
            theta1: f.theta1,
            theta2: f.theta2,
        });
    }
    let [g1a, g1b, g2a, g2b] = config.decay_rates().map(f64::sqrt);
    let p = f.round_trip_phase;

    // Rightward: emitter 1 directly, emitter 1 after a round trip via 2,
    // emitter 2 directly, emitter 2 after being fed by 1.
    let right = |c1: f64, c2: f64| (c1 * f.s1 + c1 * f.t1 * f.s2 * p + c2 * f.s2 + c2 * f.t2 * f.s1) / denom;
    let left = |c1: f64, c2: f64| (c1 * f.s1 + (c1 * f.t1 * f.s2 + c2 * f.s2 + c2 * f.t2 * f.s1) * p) / denom;

    Ok(ScatteringAmplitudes {
        transmit_a: Complex64::new(1.0, 0.0) + right(g1a, g2a),
        reflect_a: left(g1a, g2a),
        transfer_forward_b: right(g1b, g2b),
        transfer_backward_b: left(g1b, g2b),
    })
}

/// `|Σ|t|² - 1|`
pub fn conservation_defect(amps: &ScatteringAmplitudes) -> f64 {
    (amps.probabilities().total() - 1.0).abs()
}

/// Closed-form `(transmission, forward_transfer)` for identical phase shifts,
/// equal decay ratios and a standing-wave separation.
///
/// `beta` is the ratio `γ_{n,a} / γ_{n,b}`.
pub fn symmetric_closed_form(theta: f64, beta: f64) -> (f64, f64) {
    let cos = theta.cos();
    let forward = 4.0 * beta / ((1.0 + beta) * (1.0 + beta)) * cos * cos;
    (1.0 - forward, forward)
}

/// A separation satisfying `2kL/v_g + θ1 + θ2 = 2nπ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandingWave {
    pub separation: f64,
    /// Branch actually used; larger than the requested one when that gave `L <= 0`.
    pub branch: u32,
}

/// Separation meeting the standing-wave condition on the requested branch, or on
/// the smallest branch with a positive separation.
pub fn standing_wave_length(
    wavenumber: f64,
    theta1: f64,
    theta2: f64,
    branch: u32,
    group_velocity: f64,
) -> Result<StandingWave, ScatteringError> {
    if !(wavenumber > 0.0) || !wavenumber.is_finite() {
        return Err(ScatteringError::InvalidWavenumber(wavenumber));
    }
    let length = |n: u32| (2.0 * n as f64 * PI - theta1 - theta2) * group_velocity / (2.0 * wavenumber);
    let mut n = branch;
    if length(n) <= 0.0 {
        n = ((theta1 + theta2) / (2.0 * PI)).floor().max(0.0) as u32;
        while length(n) <= 0.0 {
            n += 1;
        }
    }
    Ok(StandingWave { separation: length(n), branch: n })
}
