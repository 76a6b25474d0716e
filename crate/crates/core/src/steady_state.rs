//! Frequency-domain oracle.
//!
//! Instead of summing the multiple-scattering series, this solves the two
//! coupled steady-state relations for the emitter amplitudes directly,
//!
//! ```text
//! A1 = i S1 exp(-ikL/2v) + T1 exp(ikL/v) A2
//! A2 = i S2 exp(+ikL/2v) + T2 exp(ikL/v) A1
//! ```
//!
//! where a delay `τ` in the time domain becomes the factor `exp(ikτ)`. The
//! outgoing fields are then assembled from the input-output relations.

use num_complex::Complex64;
use thiserror::Error;

use crate::params::RouterConfig;
use crate::scattering::{phase_shift, ScatteringAmplitudes, SINGULAR_THRESHOLD};
use crate::EquationForm;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SteadyStateError {
    #[error("singular steady-state system: |det| = {determinant:e} at k = {wavenumber}, L = {separation}")]
    SingularSystem { determinant: f64, wavenumber: f64, separation: f64 },
}

/// Emitter amplitudes per unit input amplitude at one wavenumber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateSolution {
    pub emitter_amplitude1: Complex64,
    pub emitter_amplitude2: Complex64,
    pub input_wavenumber: f64,
}

/// Coefficients of the 2×2 system `M A = b`.
#[derive(Debug, Clone, Copy)]
struct SteadyStateSystem {
    // M = [[1, -c12], [-c21, 1]]
    c12: Complex64,
    c21: Complex64,
    rhs1: Complex64,
    rhs2: Complex64,
}

impl SteadyStateSystem {
    fn build(config: &RouterConfig, k: f64, form: EquationForm) -> Self {
        let (e1, e2) = (config.emitter1(), config.emitter2());
        let theta1 = phase_shift(k, e1);
        let theta2 = match form {
            EquationForm::Corrected => phase_shift(k, e2),
            EquationForm::AsPrinted => {
                ((k - e1.transition_frequency()) / e2.total_width()).atan()
            }
        };
        let cross = (e1.decay_to_a() * e2.decay_to_a()).sqrt() + (e1.decay_to_b() * e2.decay_to_b()).sqrt();
        let l1 = Complex64::from_polar(theta1.cos(), theta1);
        let l2 = Complex64::from_polar(theta2.cos(), theta2);
        let s1 = -e1.decay_to_a().sqrt() / e1.total_width() * l1;
        let s2 = -e2.decay_to_a().sqrt() / e2.total_width() * l2;
        let t1 = -cross / e1.total_width() * l1;
        let t2 = -cross / e2.total_width() * l2;

        let tau = config.transit_time();
        let hop = Complex64::from_polar(1.0, k * tau);
        let i = Complex64::i();
        Self {
            c12: t1 * hop,
            c21: t2 * hop,
            rhs1: i * s1 * Complex64::from_polar(1.0, -0.5 * k * tau),
            rhs2: i * s2 * Complex64::from_polar(1.0, 0.5 * k * tau),
        }
    }

    fn determinant(&self) -> Complex64 {
        Complex64::new(1.0, 0.0) - self.c12 * self.c21
    }

    fn residual(&self, a1: Complex64, a2: Complex64) -> f64 {
        let r1 = a1 - self.c12 * a2 - self.rhs1;
        let r2 = a2 - self.c21 * a1 - self.rhs2;
        r1.norm().max(r2.norm())
    }
}

/// Solves the steady-state emitter equations at wavenumber `k`.
pub fn steady_state_solve(config: &RouterConfig, wavenumber: f64) -> Result<SteadyStateSolution, SteadyStateError> {
    steady_state_solve_with(config, wavenumber, EquationForm::Corrected)
}

pub fn steady_state_solve_with(
    config: &RouterConfig,
    wavenumber: f64,
    form: EquationForm,
) -> Result<SteadyStateSolution, SteadyStateError> {
    let sys = SteadyStateSystem::build(config, wavenumber, form);
    let det = sys.determinant();
    if !(det.norm() > SINGULAR_THRESHOLD) {
        return Err(SteadyStateError::SingularSystem {
            determinant: det.norm(),
            wavenumber,
            separation: config.separation(),
        });
    }
    // Cramer's rule on [[1, -c12], [-c21, 1]].
    let a1 = (sys.rhs1 + sys.c12 * sys.rhs2) / det;
    let a2 = (sys.rhs2 + sys.c21 * sys.rhs1) / det;
    Ok(SteadyStateSolution { emitter_amplitude1: a1, emitter_amplitude2: a2, input_wavenumber: wavenumber })
}

/// Largest residual of the two steady-state relations for `solution`.
pub fn steady_state_residual(solution: &SteadyStateSolution, config: &RouterConfig, form: EquationForm) -> f64 {
    let sys = SteadyStateSystem::build(config, solution.input_wavenumber, form);
    sys.residual(solution.emitter_amplitude1, solution.emitter_amplitude2)
}

/// Assembles the four outgoing amplitudes from the emitter amplitudes.
///
/// Rightward outputs are read at z = 0,
/// `r_out,j = δ_ja - i√γ1j A1 e^{ikL/2v} - i√γ2j A2 e^{-ikL/2v}`. Leftward
/// outputs `-i√γ1j A1 e^{-ikL/2v} - i√γ2j A2 e^{ikL/2v}` are multiplied by
/// `e^{ikL/v}`, which moves their reference to emitter 1.
pub fn amplitudes_from_steady_state(solution: &SteadyStateSolution, config: &RouterConfig) -> ScatteringAmplitudes {
    let k = solution.input_wavenumber;
    let tau = config.transit_time();
    let [g1a, g1b, g2a, g2b] = config.decay_rates().map(f64::sqrt);
    let i = Complex64::i();
    let a1 = solution.emitter_amplitude1;
    let a2 = solution.emitter_amplitude2;
    let late = Complex64::from_polar(1.0, 0.5 * k * tau);
    let early = late.conj();
    let reference = Complex64::from_polar(1.0, k * tau);

    let right = |c1: f64, c2: f64| -i * (c1 * a1 * late + c2 * a2 * early);
    let left = |c1: f64, c2: f64| -i * (c1 * a1 * early + c2 * a2 * late) * reference;

    ScatteringAmplitudes {
        transmit_a: Complex64::new(1.0, 0.0) + right(g1a, g2a),
        reflect_a: left(g1a, g2a),
        transfer_forward_b: right(g1b, g2b),
        transfer_backward_b: left(g1b, g2b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::EmitterParams;
    use crate::scattering::{interference_factors, probe_for_phase, scattering_amplitudes, standing_wave_length};
    use std::f64::consts::PI;

    fn config(e1: EmitterParams, e2: EmitterParams, l: f64) -> RouterConfig {
        RouterConfig::new(e1, e2, l, 1.0).unwrap()
    }

    #[test]
    fn decoupled_second_emitter() {
        let eps = 1e-12;
        let e1 = EmitterParams::new(20.0, 1.0, 0.6).unwrap();
        let e2 = EmitterParams::new(21.0, eps, eps).unwrap();
        let c = config(e1, e2, 0.41);
        let k = 20.3;
        let sol = steady_state_solve(&c, k).unwrap();
        let f = interference_factors(k, &c);
        let expect = Complex64::i() * f.s1 * Complex64::from_polar(1.0, -0.5 * k * 0.41);
        assert!((sol.emitter_amplitude1 - expect).norm() < 1e-5);
        assert!(sol.emitter_amplitude2.norm() < 10.0 * eps.sqrt());
    }

    #[test]
    fn quarter_round_trip_probabilities() {
        let e = EmitterParams::new(20.0, 1.0, 1.0).unwrap();
        let c = config(e, e, PI / 80.0);
        let amps = amplitudes_from_steady_state(&steady_state_solve(&c, 20.0).unwrap(), &c);
        for p in amps.probabilities().to_array() {
            assert!((p - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn on_locus_forward_transfer_matches_closed_form() {
        let e = EmitterParams::new(20.0, 1.0, 1.0).unwrap();
        let theta = 1e-3;
        let k = probe_for_phase(theta, &e);
        let c = config(e, e, standing_wave_length(k, theta, theta, 1, 1.0).unwrap().separation);
        let amps = amplitudes_from_steady_state(&steady_state_solve(&c, k).unwrap(), &c);
        let err = (amps.transfer_forward_b.norm() - theta.cos()).abs();
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn zero_emitter_amplitudes_pass_input_through() {
        let e = EmitterParams::new(20.0, 1.0, 1.0).unwrap();
        let c = config(e, e, 0.2);
        let zero = Complex64::new(0.0, 0.0);
        let sol = SteadyStateSolution { emitter_amplitude1: zero, emitter_amplitude2: zero, input_wavenumber: 20.0 };
        let amps = amplitudes_from_steady_state(&sol, &c);
        assert_eq!(amps.to_array(), [Complex64::new(1.0, 0.0), zero, zero, zero]);
    }

    #[test]
    fn antisymmetric_point_is_fully_transmitted() {
        let c = config(
            EmitterParams::new(20.0, 1.0, 1.0).unwrap(),
            EmitterParams::new(24.0, 1.0, 1.0).unwrap(),
            PI / 22.0,
        );
        let amps = amplitudes_from_steady_state(&steady_state_solve(&c, 22.0).unwrap(), &c);
        assert!((amps.transmit_a.norm() - 1.0).abs() < 1e-12);
        assert!(amps.reflect_a.norm() < 1e-12);
        assert!(amps.transfer_forward_b.norm() < 1e-12);
        assert!(amps.transfer_backward_b.norm() < 1e-12);
    }

    #[test]
    fn agrees_with_closed_form_and_satisfies_relations() {
        let c = config(
            EmitterParams::new(18.0, 0.4, 1.7).unwrap(),
            EmitterParams::new(23.5, 2.2, 0.3).unwrap(),
            0.73,
        );
        for &k in &[15.0, 18.2, 20.0, 22.9, 27.0] {
            let sol = steady_state_solve(&c, k).unwrap();
            assert!(steady_state_residual(&sol, &c, EquationForm::Corrected) < 1e-14);
            let direct = scattering_amplitudes(&c, k).unwrap();
            assert!(amplitudes_from_steady_state(&sol, &c).max_difference(&direct) < 1e-13);
        }
    }

    #[test]
    fn singular_system_is_reported() {
        let e = EmitterParams::new(20.0, 1.0, 1.0).unwrap();
        let c = config(e, e, standing_wave_length(20.0, 0.0, 0.0, 1, 1.0).unwrap().separation);
        assert!(matches!(steady_state_solve(&c, 20.0), Err(SteadyStateError::SingularSystem { .. })));
    }

    #[test]
    fn printed_form_only_differs_when_frequencies_differ() {
        let e1 = EmitterParams::new(20.0, 1.0, 0.5).unwrap();
        let same = config(e1, EmitterParams::new(20.0, 0.8, 0.9).unwrap(), 0.3);
        let a = steady_state_solve_with(&same, 20.7, EquationForm::AsPrinted).unwrap();
        let b = steady_state_solve(&same, 20.7).unwrap();
        assert_eq!(a, b);
        let split = config(e1, EmitterParams::new(22.0, 0.8, 0.9).unwrap(), 0.3);
        let a = steady_state_solve_with(&split, 20.7, EquationForm::AsPrinted).unwrap();
        let b = steady_state_solve(&split, 20.7).unwrap();
        assert!((a.emitter_amplitude2 - b.emitter_amplitude2).norm() > 1e-3);
    }
}
