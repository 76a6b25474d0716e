//! Physical parameter set of the two-emitter router.
//!
//! All quantities are dimensionless. Frequencies and decay rates are measured
//! in units of a reference decay rate and lengths are absolute, with the group
//! velocity defaulting to 1.

use thiserror::Error;

/// Rejected parameter values.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("{name} must be finite, got {value}")]
    NotFinite { name: &'static str, value: f64 },
    #[error("{name} must be nonnegative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("emitter total width must be positive (decay_to_a + decay_to_b = {0})")]
    ZeroWidth(f64),
    #[error("separation must be positive, got {0}")]
    NonPositiveSeparation(f64),
    #[error("group velocity must be positive, got {0}")]
    NonPositiveGroupVelocity(f64),
}

fn finite(name: &'static str, value: f64) -> Result<f64, ParamError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(ParamError::NotFinite { name, value })
    }
}

/// A two-level emitter coupled to both lines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmitterParams {
    transition_frequency: f64,
    decay_to_a: f64,
    decay_to_b: f64,
}

impl EmitterParams {
    pub fn new(transition_frequency: f64, decay_to_a: f64, decay_to_b: f64) -> Result<Self, ParamError> {
        let transition_frequency = finite("transition_frequency", transition_frequency)?;
        let decay_to_a = finite("decay_to_a", decay_to_a)?;
        let decay_to_b = finite("decay_to_b", decay_to_b)?;
        if decay_to_a < 0.0 {
            return Err(ParamError::Negative { name: "decay_to_a", value: decay_to_a });
        }
        if decay_to_b < 0.0 {
            return Err(ParamError::Negative { name: "decay_to_b", value: decay_to_b });
        }
        let width = decay_to_a + decay_to_b;
        if width <= 0.0 {
            return Err(ParamError::ZeroWidth(width));
        }
        Ok(Self { transition_frequency, decay_to_a, decay_to_b })
    }

    /// Emitter with `decay_to_a = 1` and `decay_to_b = 1 / beta`.
    pub fn with_ratio(transition_frequency: f64, beta: f64) -> Result<Self, ParamError> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(ParamError::Negative { name: "beta", value: beta });
        }
        Self::new(transition_frequency, 1.0, 1.0 / beta)
    }

    pub fn transition_frequency(&self) -> f64 {
        self.transition_frequency
    }

    pub fn decay_to_a(&self) -> f64 {
        self.decay_to_a
    }

    pub fn decay_to_b(&self) -> f64 {
        self.decay_to_b
    }

    /// Total width into both lines.
    pub fn total_width(&self) -> f64 {
        self.decay_to_a + self.decay_to_b
    }

    pub fn with_transition_frequency(self, transition_frequency: f64) -> Result<Self, ParamError> {
        Self::new(transition_frequency, self.decay_to_a, self.decay_to_b)
    }
}

/// Two emitters at z = -L/2 and z = +L/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouterConfig {
    emitter1: EmitterParams,
    emitter2: EmitterParams,
    separation: f64,
    group_velocity: f64,
}

impl RouterConfig {
    pub fn new(
        emitter1: EmitterParams,
        emitter2: EmitterParams,
        separation: f64,
        group_velocity: f64,
    ) -> Result<Self, ParamError> {
        let separation = finite("separation", separation)?;
        let group_velocity = finite("group_velocity", group_velocity)?;
        if separation <= 0.0 {
            return Err(ParamError::NonPositiveSeparation(separation));
        }
        if group_velocity <= 0.0 {
            return Err(ParamError::NonPositiveGroupVelocity(group_velocity));
        }
        Ok(Self { emitter1, emitter2, separation, group_velocity })
    }

    /// Config with unit group velocity.
    pub fn with_unit_velocity(emitter1: EmitterParams, emitter2: EmitterParams, separation: f64) -> Result<Self, ParamError> {
        Self::new(emitter1, emitter2, separation, 1.0)
    }

    pub fn emitter1(&self) -> &EmitterParams {
        &self.emitter1
    }

    pub fn emitter2(&self) -> &EmitterParams {
        &self.emitter2
    }

    pub fn separation(&self) -> f64 {
        self.separation
    }

    pub fn group_velocity(&self) -> f64 {
        self.group_velocity
    }

    /// Positions of the two emitters, `(-L/2, L/2)`.
    pub fn positions(&self) -> (f64, f64) {
        (-0.5 * self.separation, 0.5 * self.separation)
    }

    /// Free-flight time between the emitters, `L / v_g`.
    pub fn transit_time(&self) -> f64 {
        self.separation / self.group_velocity
    }

    pub fn with_separation(self, separation: f64) -> Result<Self, ParamError> {
        Self::new(self.emitter1, self.emitter2, separation, self.group_velocity)
    }

    pub fn with_emitters(self, emitter1: EmitterParams, emitter2: EmitterParams) -> Result<Self, ParamError> {
        Self::new(emitter1, emitter2, self.separation, self.group_velocity)
    }

    /// Decay rates `[γ1a, γ1b, γ2a, γ2b]`.
    pub fn decay_rates(&self) -> [f64; 4] {
        [
            self.emitter1.decay_to_a,
            self.emitter1.decay_to_b,
            self.emitter2.decay_to_a,
            self.emitter2.decay_to_b,
        ]
    }

    /// Largest total width of the two emitters.
    pub fn max_width(&self) -> f64 {
        self.emitter1.total_width().max(self.emitter2.total_width())
    }

    pub fn min_width(&self) -> f64 {
        self.emitter1.total_width().min(self.emitter2.total_width())
    }

    /// Wavelength `2π v_g / k` at wavenumber `k`.
    pub fn wavelength(&self, wavenumber: f64) -> f64 {
        2.0 * std::f64::consts::PI * self.group_velocity / wavenumber
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_width_emitter() {
        assert_eq!(EmitterParams::new(20.0, 0.0, 0.0), Err(ParamError::ZeroWidth(0.0)));
        assert!(EmitterParams::new(20.0, 0.0, 1e-12).is_ok());
    }

    #[test]
    fn rejects_negative_rates() {
        assert!(matches!(
            EmitterParams::new(20.0, -1.0, 2.0),
            Err(ParamError::Negative { name: "decay_to_a", .. })
        ));
        assert!(matches!(
            EmitterParams::new(20.0, 1.0, -0.5),
            Err(ParamError::Negative { name: "decay_to_b", .. })
        ));
        assert!(EmitterParams::new(f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn rejects_bad_geometry() {
        let e = EmitterParams::new(20.0, 1.0, 1.0).unwrap();
        assert_eq!(RouterConfig::new(e, e, 0.0, 1.0), Err(ParamError::NonPositiveSeparation(0.0)));
        assert_eq!(RouterConfig::new(e, e, -1.0, 1.0), Err(ParamError::NonPositiveSeparation(-1.0)));
        assert_eq!(RouterConfig::new(e, e, 1.0, 0.0), Err(ParamError::NonPositiveGroupVelocity(0.0)));
    }

    #[test]
    fn positions_are_symmetric() {
        let e = EmitterParams::new(20.0, 1.0, 1.0).unwrap();
        let c = RouterConfig::new(e, e, 0.5, 2.0).unwrap();
        assert_eq!(c.positions(), (-0.25, 0.25));
        assert_eq!(c.transit_time(), 0.25);
    }

    #[test]
    fn ratio_constructor() {
        let e = EmitterParams::with_ratio(20.0, 4.0).unwrap();
        assert_eq!(e.decay_to_a(), 1.0);
        assert_eq!(e.decay_to_b(), 0.25);
        assert!(EmitterParams::with_ratio(20.0, 0.0).is_err());
    }
}
