//! Assessment parameters from layered sources.
//!
//! Each source (CLI flags, request body, config file) yields an
//! [`Overrides`]; layers are merged highest first and applied on top of the
//! built-in defaults.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use reprolint_core::quality::{AssessConfig, AssessError};
use reprolint_core::resolve::MatchConfig;

#[derive(Debug, Error)]
pub enum SettingsError {
    #[error("malformed config: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] AssessError),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Overrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub similarity_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Overrides {
    pub fn from_json(text: &str) -> Result<Overrides, SettingsError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Values from `self`, falling back to `lower` field by field.
    pub fn or(&self, lower: &Overrides) -> Overrides {
        Overrides {
            depth: self.depth.or(lower.depth),
            random_iterations: self.random_iterations.or(lower.random_iterations),
            random_steps: self.random_steps.or(lower.random_steps),
            similarity_threshold: self.similarity_threshold.or(lower.similarity_threshold),
            seed: self.seed.or(lower.seed),
        }
    }

    pub fn apply(&self, mut cfg: AssessConfig) -> AssessConfig {
        if let Some(v) = self.depth {
            cfg.depth = v;
        }
        if let Some(v) = self.random_iterations {
            cfg.random_iterations = v;
        }
        if let Some(v) = self.random_steps {
            cfg.random_steps = v;
        }
        if let Some(v) = self.similarity_threshold {
            cfg.matching.similarity_threshold = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        cfg
    }

    /// Every field filled in, as used for a run.
    pub fn resolved(cfg: &AssessConfig) -> Overrides {
        Overrides {
            depth: Some(cfg.depth),
            random_iterations: Some(cfg.random_iterations),
            random_steps: Some(cfg.random_steps),
            similarity_threshold: Some(cfg.matching.similarity_threshold),
            seed: Some(cfg.seed),
        }
    }
}

/// Merges `layers` (highest precedence first) over the defaults and
/// validates the result.
pub fn build_config(
    layers: &[&Overrides],
    matching: MatchConfig,
) -> Result<AssessConfig, SettingsError> {
    let merged = layers.iter().fold(Overrides::default(), |acc, l| acc.or(l));
    let cfg = merged.apply(AssessConfig {
        matching,
        ..AssessConfig::default()
    });
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn higher_layers_win_per_field() {
        let flags = Overrides {
            depth: Some(2),
            ..Overrides::default()
        };
        let body = Overrides {
            depth: Some(4),
            seed: Some(9),
            ..Overrides::default()
        };
        let file = Overrides::from_json(r#"{"depth": 5, "seed": 1, "randomSteps": 7}"#).unwrap();
        let cfg = build_config(&[&flags, &body, &file], MatchConfig::default()).unwrap();
        assert_eq!(
            (cfg.depth, cfg.seed, cfg.random_steps, cfg.random_iterations),
            (2, 9, 7, 3)
        );
    }

    #[test]
    fn defaults_without_layers() {
        let cfg = build_config(&[], MatchConfig::default()).unwrap();
        assert_eq!(cfg, AssessConfig::default());
        assert_eq!(
            Overrides::resolved(&cfg).apply(AssessConfig::default()),
            cfg
        );
    }

    #[test]
    fn rejects_unknown_fields_and_bad_values() {
        assert!(matches!(
            Overrides::from_json(r#"{"dpth": 3}"#),
            Err(SettingsError::Malformed(_))
        ));
        let zero = Overrides {
            random_steps: Some(0),
            ..Overrides::default()
        };
        assert!(matches!(
            build_config(&[&zero], MatchConfig::default()),
            Err(SettingsError::Invalid(_))
        ));
        let t = Overrides {
            similarity_threshold: Some(1.5),
            ..Overrides::default()
        };
        assert!(build_config(&[&t], MatchConfig::default()).is_err());
    }
}
