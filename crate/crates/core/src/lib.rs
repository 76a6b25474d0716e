//! Single-photon routing by two distant two-level emitters.
//!
//! Two emitters sit a distance `L` apart and each couples to two
//! one-dimensional transmission lines, a and b. A photon injected into line a
//! from the left leaves in one of four ports: transmitted or reflected in line
//! a, or transferred forward or backward into line b. This crate provides
//!
//! - [`scattering`]: the closed-form amplitudes, standing-wave utilities and
//!   the symmetric-case closed forms,
//! - [`steady_state`]: an independent frequency-domain solve of the coupled
//!   emitter equations,
//! - [`pulse`]: a time-domain wavepacket simulation of the same equations as
//!   linear delay differential equations,
//! - [`sweep`]: parameter grids, figure datasets and separation optimisation.
//!
//! ```
//! use qrouter::{scattering_amplitudes, EmitterParams, RouterConfig};
//!
//! let e1 = EmitterParams::new(20.0, 1.0, 1.0).unwrap();
//! let e2 = EmitterParams::new(24.0, 1.0, 1.0).unwrap();
//! let config = RouterConfig::new(e1, e2, 4.0 * std::f64::consts::PI / 44.0, 1.0).unwrap();
//! let p = scattering_amplitudes(&config, 22.0).unwrap().probabilities();
//! assert!((p.transmission - 1.0).abs() < 1e-10);
//! ```

// `!(x > 0.0)` deliberately rejects NaN alongside non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod params;
pub mod pulse;
pub mod sampling;
pub mod scattering;
pub mod steady_state;
pub mod svg;
pub mod sweep;

pub use params::{EmitterParams, ParamError, RouterConfig};
pub use scattering::{
    conservation_defect, interference_factors, phase_shift, probe_for_phase, scattering_amplitudes,
    standing_wave_length, symmetric_closed_form, InterferenceFactors, Probabilities, ScatteringAmplitudes,
    ScatteringError, StandingWave,
};
pub use steady_state::{amplitudes_from_steady_state, steady_state_solve, SteadyStateError, SteadyStateSolution};

/// Which form of the emitter equations of motion the oracles integrate.
///
/// `AsPrinted` uses the transition frequency of emitter 1 in the equation of
/// emitter 2 as well. It is physically wrong for `ω₁ ≠ ω₂` and exists for
/// comparison only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EquationForm {
    #[default]
    Corrected,
    AsPrinted,
}
