//! Run configuration: a JSON document merged with command-line overrides.
//!
//! Angles are radians, given either as JSON numbers or as strings. Strings
//! may be decimals, rationals (`"1/10"`), or rational multiples of π
//! (`"pi/4"`, `"3pi/16"`, `"-2*pi/3"`, `"π"`); rationals are reduced
//! exactly before conversion to floating point.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Environment variable that overrides the configured output directory.
pub const OUTPUT_DIR_ENV: &str = "QWALK_OUTPUT_DIR";

const DEFAULT_OUTPUT_DIR: &str = "qwalk-out";

/// An angle as written: a number or a string expression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AngleValue {
    Number(f64),
    Text(String),
}

impl AngleValue {
    pub fn resolve(&self, field: &str) -> Result<f64, CliError> {
        let v = match self {
            Self::Number(v) => *v,
            Self::Text(s) => parse_angle(s).map_err(|msg| CliError::config(field, msg))?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(CliError::config(field, format!("{v} is not finite")))
        }
    }
}

fn parse_ratio(s: &str) -> Result<Ratio<i64>, String> {
    if s.is_empty() {
        return Ok(Ratio::from_integer(1));
    }
    let r = Ratio::<i64>::from_str(s).map_err(|_| format!("invalid rational {s:?}"))?;
    Ok(r)
}

/// Parses an angle string into radians.
pub fn parse_angle(raw: &str) -> Result<f64, String> {
    let s: String = raw.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase().replace('π', "pi");
    if s.is_empty() {
        return Err("empty angle".into());
    }
    if let Some(at) = s.find("pi") {
        let (head, tail) = (&s[..at], &s[at + 2..]);
        let head = head.strip_suffix('*').unwrap_or(head);
        let (sign, head) = match head.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, head.strip_prefix('+').unwrap_or(head)),
        };
        let numer = parse_ratio(head).map_err(|e| format!("{e} in {raw:?}"))?;
        let denom = match tail {
            "" => Ratio::from_integer(1),
            _ => {
                let q = tail.strip_prefix('/').ok_or_else(|| format!("unexpected {tail:?} after pi in {raw:?}"))?;
                parse_ratio(q).map_err(|e| format!("{e} in {raw:?}"))?
            }
        };
        if *denom.numer() == 0 {
            return Err(format!("division by zero in {raw:?}"));
        }
        let r = numer * Ratio::from_integer(sign) / denom;
        return Ok(PI * *r.numer() as f64 / *r.denom() as f64);
    }
    if s.contains('/') {
        let r = Ratio::<i64>::from_str(&s).map_err(|_| format!("invalid rational {raw:?}"))?;
        return Ok(*r.numer() as f64 / *r.denom() as f64);
    }
    s.parse::<f64>().map_err(|_| format!("cannot parse angle {raw:?}"))
}

/// Named phase-field families, or a CSV file with `n,t,xi,zeta`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSpec {
    /// `quasi`, `linear` or `file`.
    pub family: Option<String>,
    pub beta0: Option<AngleValue>,
    pub beta1: Option<AngleValue>,
    /// Slope of `ξ = ζ = a·n·t` for the `linear` family.
    pub a: Option<AngleValue>,
    pub path: Option<PathBuf>,
}

/// Continuum residual settings for the `gauge` command.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeSpec {
    /// `equal`, `null` or `wave`.
    pub pair: Option<String>,
    pub resolution: Option<usize>,
}

/// The JSON configuration document. Every field is optional; each command
/// checks the ones it needs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub theta: Option<AngleValue>,
    pub eta: Option<AngleValue>,
    pub gamma: Option<AngleValue>,
    pub alpha: Option<AngleValue>,
    pub beta: Option<AngleValue>,
    pub chi: Option<AngleValue>,
    /// CSV with `n,t,theta,alpha,beta,chi` covering every visited coin site.
    pub coin_file: Option<PathBuf>,
    pub t_final: Option<usize>,
    pub out: Option<PathBuf>,
    pub tolerance: Option<f64>,
    pub every_step: Option<bool>,
    #[serde(default)]
    pub phases: PhaseSpec,
    #[serde(default)]
    pub gauge: GaugeSpec,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config("config", format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::config("config", e.to_string()))
    }

    /// Copies every field that `other` sets over this configuration.
    pub fn overlay(&mut self, other: RunConfig) {
        macro_rules! take {
            ($($f:ident).+) => {
                if other.$($f).+.is_some() {
                    self.$($f).+ = other.$($f).+;
                }
            };
        }
        take!(theta);
        take!(eta);
        take!(gamma);
        take!(alpha);
        take!(beta);
        take!(chi);
        take!(coin_file);
        take!(t_final);
        take!(out);
        take!(tolerance);
        take!(every_step);
        take!(phases.family);
        take!(phases.beta0);
        take!(phases.beta1);
        take!(phases.a);
        take!(phases.path);
        take!(gauge.pair);
        take!(gauge.resolution);
    }

    pub fn angle(&self, field: &'static str) -> Result<Option<f64>, CliError> {
        let value = match field {
            "theta" => &self.theta,
            "eta" => &self.eta,
            "gamma" => &self.gamma,
            "alpha" => &self.alpha,
            "beta" => &self.beta,
            "chi" => &self.chi,
            "phases.beta0" => &self.phases.beta0,
            "phases.beta1" => &self.phases.beta1,
            "phases.a" => &self.phases.a,
            _ => unreachable!("unknown angle field {field}"),
        };
        value.as_ref().map(|v| v.resolve(field)).transpose()
    }

    pub fn angle_or(&self, field: &'static str, default: f64) -> Result<f64, CliError> {
        Ok(self.angle(field)?.unwrap_or(default))
    }

    pub fn require_angle(&self, field: &'static str) -> Result<f64, CliError> {
        self.angle(field)?.ok_or_else(|| CliError::config(field, "required"))
    }

    pub fn require_t_final(&self) -> Result<usize, CliError> {
        self.t_final.ok_or_else(|| CliError::config("t_final", "required"))
    }

    pub fn tolerance_or(&self, default: f64) -> Result<f64, CliError> {
        match self.tolerance {
            Some(t) if !(t.is_finite() && t >= 0.0) => Err(CliError::config("tolerance", format!("{t} must be finite and non-negative"))),
            Some(t) => Ok(t),
            None => Ok(default),
        }
    }

    /// `--out`, else `QWALK_OUTPUT_DIR`, else the file's `out`, else `qwalk-out`.
    pub fn output_dir(&self, flag: Option<&Path>) -> PathBuf {
        if let Some(dir) = flag {
            return dir.to_path_buf();
        }
        if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV).filter(|v| !v.is_empty()) {
            return PathBuf::from(dir);
        }
        self.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn pi_multiples() {
        assert_eq!(parse_angle("pi/4").unwrap(), FRAC_PI_4);
        assert_eq!(parse_angle("π/2").unwrap(), FRAC_PI_2);
        assert_eq!(parse_angle("3pi/16").unwrap(), 3.0 * PI / 16.0);
        assert_eq!(parse_angle("6*pi/32").unwrap(), 3.0 * PI / 16.0);
        assert_eq!(parse_angle("-pi").unwrap(), -PI);
        assert_eq!(parse_angle(" 2 pi / 3 ").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(parse_angle("1/2pi").unwrap(), PI / 2.0);
    }

    #[test]
    fn plain_numbers_and_rationals() {
        assert_eq!(parse_angle("0.1").unwrap(), 0.1);
        assert_eq!(parse_angle("1/10").unwrap(), 0.1);
        assert_eq!(parse_angle("-2").unwrap(), -2.0);
    }

    #[test]
    fn malformed_angles() {
        for bad in ["", "pi/0", "pix", "pi/four", "abc", "1/0"] {
            assert!(parse_angle(bad).is_err(), "{bad:?}");
        }
        let err = AngleValue::Text("pi/0".into()).resolve("theta").unwrap_err();
        assert!(err.to_string().contains("theta"));
    }

    #[test]
    fn overlay_keeps_unset_fields() {
        let mut base: RunConfig = serde_json::from_str(r#"{"theta": "pi/4", "t_final": 10, "phases": {"family": "quasi"}}"#).unwrap();
        let flags = RunConfig { t_final: Some(20), ..Default::default() };
        base.overlay(flags);
        assert_eq!(base.t_final, Some(20));
        assert_eq!(base.require_angle("theta").unwrap(), FRAC_PI_4);
        assert_eq!(base.phases.family.as_deref(), Some("quasi"));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = serde_json::from_str::<RunConfig>(r#"{"thета": 1}"#).unwrap_err();
        assert!(err.to_string().contains("unknown field"));
    }
}
