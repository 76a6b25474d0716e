//! Line-oriented `key = value` configuration files.
//!
//! ```text
//! # two identical emitters a quarter wavelength apart
//! omega1 = 20
//! omega2 = 20
//! gamma1a = 1
//! gamma1b = 1
//! gamma2a = 1
//! gamma2b = 1
//! L = 0.0785398163397448
//! vg = 1          # optional, defaults to 1
//! ```

use std::f64::consts::PI;

use qrouter::{EmitterParams, ParamError, RouterConfig};
use thiserror::Error;

/// Recognised keys, in file order.
pub const KEYS: [&str; 8] = ["omega1", "omega2", "gamma1a", "gamma1b", "gamma2a", "gamma2b", "L", "vg"];

const REQUIRED: [&str; 7] = ["omega1", "omega2", "gamma1a", "gamma1b", "gamma2a", "gamma2b", "L"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{token}`")]
    Syntax { line: usize, token: String },
    #[error("line {line}: unknown key `{token}`")]
    UnknownKey { line: usize, token: String },
    #[error("line {line}: `{token}` is not a number")]
    BadNumber { line: usize, token: String },
    #[error("line {line}: duplicate key `{token}`")]
    Duplicate { line: usize, token: String },
    #[error("missing keys: {}", .0.join(", "))]
    Missing(Vec<&'static str>),
    #[error("invalid configuration: {0}")]
    Validation(#[from] ParamError),
}

impl ConfigError {
    /// Line of the offending token, if the error has one.
    pub fn line(&self) -> Option<usize> {
        match self {
            ConfigError::Syntax { line, .. }
            | ConfigError::UnknownKey { line, .. }
            | ConfigError::BadNumber { line, .. }
            | ConfigError::Duplicate { line, .. } => Some(*line),
            ConfigError::Missing(_) | ConfigError::Validation(_) => None,
        }
    }
}

/// Unvalidated key values, indexed like [`KEYS`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfigValues([Option<f64>; 8]);

fn key_index(key: &str) -> Option<usize> {
    KEYS.iter().position(|k| *k == key)
}

impl ConfigValues {
    pub fn empty() -> Self {
        Self([None; 8])
    }

    /// ω = 20, all γ = 1, L a quarter of the emitter wavelength, v_g = 1.
    pub fn defaults() -> Self {
        let mut v = Self::empty();
        for (k, x) in [
            ("omega1", 20.0),
            ("omega2", 20.0),
            ("gamma1a", 1.0),
            ("gamma1b", 1.0),
            ("gamma2a", 1.0),
            ("gamma2b", 1.0),
            ("L", PI / 40.0),
            ("vg", 1.0),
        ] {
            v.set(k, x).expect("known key");
        }
        v
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        key_index(key).and_then(|i| self.0[i])
    }

    /// Sets a known key; returns `None` for unknown keys.
    pub fn set(&mut self, key: &str, value: f64) -> Option<()> {
        let i = key_index(key)?;
        self.0[i] = Some(value);
        Some(())
    }

    /// Parses the file without validating physics.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut values = Self::empty();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Syntax { line, token: content.to_string() });
            };
            let (key, value) = (key.trim(), value.trim());
            let Some(i) = key_index(key) else {
                let token = if key.is_empty() { content } else { key };
                return Err(ConfigError::UnknownKey { line, token: token.to_string() });
            };
            let x: f64 = value.parse().map_err(|_| ConfigError::BadNumber { line, token: value.to_string() })?;
            if values.0[i].replace(x).is_some() {
                return Err(ConfigError::Duplicate { line, token: key.to_string() });
            }
        }
        Ok(values)
    }

    /// `other` overrides `self` key by key.
    pub fn merged(mut self, other: &ConfigValues) -> Self {
        for (mine, theirs) in self.0.iter_mut().zip(other.0) {
            if theirs.is_some() {
                *mine = theirs;
            }
        }
        self
    }

    pub fn to_router_config(&self) -> Result<RouterConfig, ConfigError> {
        let missing: Vec<&'static str> = REQUIRED.into_iter().filter(|k| self.get(k).is_none()).collect();
        if !missing.is_empty() {
            return Err(ConfigError::Missing(missing));
        }
        let g = |k: &str| self.get(k).expect("checked above");
        let e1 = EmitterParams::new(g("omega1"), g("gamma1a"), g("gamma1b"))?;
        let e2 = EmitterParams::new(g("omega2"), g("gamma2a"), g("gamma2b"))?;
        Ok(RouterConfig::new(e1, e2, g("L"), self.get("vg").unwrap_or(1.0))?)
    }
}

/// Parses and validates a configuration file. `vg` defaults to 1.
pub fn parse_config(text: &str) -> Result<RouterConfig, ConfigError> {
    ConfigValues::parse(text)?.to_router_config()
}

/// Serialises `config` so that [`parse_config`] returns it unchanged.
pub fn to_config_text(config: &RouterConfig) -> String {
    let (e1, e2) = (config.emitter1(), config.emitter2());
    let values = [
        e1.transition_frequency(),
        e2.transition_frequency(),
        e1.decay_to_a(),
        e1.decay_to_b(),
        e2.decay_to_a(),
        e2.decay_to_b(),
        config.separation(),
        config.group_velocity(),
    ];
    KEYS.iter().zip(values).map(|(k, v)| format!("{k} = {v}\n")).collect()
}

/// Parses a `key=value` override.
pub fn parse_override(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let (k, v) = (k.trim(), v.trim());
    if key_index(k).is_none() {
        return Err(format!("unknown key `{k}` (known: {})", KEYS.join(", ")));
    }
    let x = v.parse().map_err(|_| format!("`{v}` is not a number"))?;
    Ok((k.to_string(), x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blank_lines() {
        let c = parse_config(
            "# header\n\nomega1=20 # trailing\nomega2 = 21\ngamma1a=1\ngamma1b=0.5\ngamma2a=1\ngamma2b=1\nL=0.3\n",
        )
        .unwrap();
        assert_eq!(c.emitter2().transition_frequency(), 21.0);
        assert_eq!(c.emitter1().decay_to_b(), 0.5);
        assert_eq!(c.group_velocity(), 1.0);
    }

    #[test]
    fn errors_carry_line_and_token() {
        let e = parse_config("omega1 = 20\nomega3 = 1\n").unwrap_err();
        assert_eq!(e, ConfigError::UnknownKey { line: 2, token: "omega3".into() });
        let e = parse_config("omega1 20\n").unwrap_err();
        assert_eq!(e, ConfigError::Syntax { line: 1, token: "omega1 20".into() });
        let e = parse_config("\n\nL = abc\n").unwrap_err();
        assert_eq!(e, ConfigError::BadNumber { line: 3, token: "abc".into() });
        assert_eq!(e.line(), Some(3));
        let e = parse_config("L = 1\nL = 2\n").unwrap_err();
        assert_eq!(e, ConfigError::Duplicate { line: 2, token: "L".into() });
    }

    #[test]
    fn empty_file_lists_all_missing_keys() {
        let e = parse_config("").unwrap_err();
        assert_eq!(e, ConfigError::Missing(REQUIRED.to_vec()));
        assert_eq!(e.to_string(), "missing keys: omega1, omega2, gamma1a, gamma1b, gamma2a, gamma2b, L");
    }

    #[test]
    fn overrides() {
        assert_eq!(parse_override("L=0.5"), Ok(("L".into(), 0.5)));
        assert!(parse_override("x=1").is_err());
        assert!(parse_override("L").is_err());
        assert!(parse_override("L=q").is_err());
    }

    #[test]
    fn defaults_are_regular() {
        let c = ConfigValues::defaults().to_router_config().unwrap();
        assert!(qrouter::scattering_amplitudes(&c, 20.0).is_ok());
    }
}
