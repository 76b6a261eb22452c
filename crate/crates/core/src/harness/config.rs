//! Experiment configuration, read from TOML.
//!
//! ```toml
//! m = 10
//! n_users = 50
//! n_polls = 10
//! truth_seed = 7
//! seed = 2024
//! noise_std = 10.0
//! strategy = "adaptive-borda"
//!
//! [user_weight]
//! kind = "linear"
//!
//! [target]
//! kind = "mallows-around-truth"
//! phi = 0.5
//! ```

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::io::ModelSpec;
use crate::recommend::DEFAULT_BRUTE_FORCE_CAP;
use crate::sorting::WeightFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Ground truth perturbed by independent Gaussian noise, redrawn every poll.
    Random,
    /// Borda ranking of the user's earlier targets; random on the first poll.
    AdaptiveBorda,
    /// Polynomial exact solver for the target distribution.
    Exact,
    /// Enumeration over all orders for the target distribution.
    BruteForce,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::AdaptiveBorda => "adaptive-borda",
            Strategy::Exact => "exact",
            Strategy::BruteForce => "brute-force",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "random" => Ok(Strategy::Random),
            "adaptive-borda" => Ok(Strategy::AdaptiveBorda),
            "exact" => Ok(Strategy::Exact),
            "brute-force" | "brute" => Ok(Strategy::BruteForce),
            _ => Err(Error::invalid(format!("unknown strategy `{s}`"))),
        }
    }
}

/// Where each poll's target order comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TargetSpec {
    /// Every user always wants the ground truth.
    FixedTruth,
    /// Fresh Mallows draw around the ground truth each poll.
    MallowsAroundTruth { phi: f64 },
    /// Fresh draw from an explicit model each poll.
    Model { model: ModelSpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub m: usize,
    pub n_users: usize,
    pub n_polls: usize,
    /// Seed of the random ground-truth order.
    pub truth_seed: u64,
    pub seed: u64,
    pub noise_std: f64,
    pub strategy: Strategy,
    /// Draw the noisy recommendation once per user instead of once per poll.
    #[serde(default)]
    pub fixed_noise_per_user: bool,
    #[serde(default = "linear")]
    pub user_weight: WeightFunction,
    pub target: TargetSpec,
    #[serde(default = "default_cap")]
    pub brute_force_cap: usize,
}

fn linear() -> WeightFunction {
    WeightFunction::Linear
}

fn default_cap() -> usize {
    DEFAULT_BRUTE_FORCE_CAP
}

fn field_err(field: &str, msg: impl Into<String>) -> Error {
    Error::Config { field: field.to_string(), msg: msg.into() }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let field = e
                .span()
                .map(|s| {
                    let before = &text[..s.start.min(text.len())];
                    let line = before.matches('\n').count() + 1;
                    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
                    format!("line {line}, column {col}")
                })
                .unwrap_or_else(|| "<document>".into());
            Error::Config { field, msg: e.message().to_string() }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Validation(format!("cannot encode config: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(field_err("m", "must be at least 1"));
        }
        if self.n_users == 0 {
            return Err(field_err("n_users", "must be at least 1"));
        }
        if self.n_polls == 0 {
            return Err(field_err("n_polls", "must be at least 1"));
        }
        let needs_noise = matches!(self.strategy, Strategy::Random | Strategy::AdaptiveBorda);
        if needs_noise && !(self.noise_std.is_finite() && self.noise_std > 0.0) {
            return Err(field_err("noise_std", format!("must be positive and finite, got {}", self.noise_std)));
        }
        self.user_weight.validate().map_err(|e| field_err("user_weight", e.to_string()))?;
        self.user_weight.check_dim(self.m).map_err(|e| field_err("user_weight.w", e.to_string()))?;
        match &self.target {
            TargetSpec::FixedTruth => {}
            TargetSpec::MallowsAroundTruth { phi } => {
                if !(0.0..=1.0).contains(phi) {
                    return Err(field_err("target.phi", format!("must lie in [0, 1], got {phi}")));
                }
            }
            TargetSpec::Model { model } => {
                let built = model.build().map_err(|e| field_err("target.model", e.to_string()))?;
                if built.m() != self.m {
                    return Err(field_err(
                        "target.model",
                        format!("model has {} alternatives, config has m = {}", built.m(), self.m),
                    ));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
m = 6
n_users = 3
n_polls = 4
truth_seed = 1
seed = 2
noise_std = 2.0
strategy = "random"
[target]
kind = "fixed-truth"
"#;

    #[test]
    fn parses_with_defaults() {
        let cfg = ExperimentConfig::from_toml(BASE).unwrap();
        assert_eq!(cfg.user_weight, WeightFunction::Linear);
        assert_eq!(cfg.brute_force_cap, DEFAULT_BRUTE_FORCE_CAP);
        assert!(!cfg.fixed_noise_per_user);
        let again = ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn validation_names_fields() {
        let bad = BASE.replace("n_polls = 4", "n_polls = 0");
        assert!(matches!(ExperimentConfig::from_toml(&bad), Err(Error::Config { field, .. }) if field == "n_polls"));
        let bad = BASE.replace("noise_std = 2.0", "noise_std = 0.0");
        assert!(matches!(ExperimentConfig::from_toml(&bad), Err(Error::Config { field, .. }) if field == "noise_std"));
        let bad = format!("{BASE}[user_weight]\nkind = \"table\"\nw = [1.0, 2.0]\n");
        assert!(
            matches!(ExperimentConfig::from_toml(&bad), Err(Error::Config { field, .. }) if field == "user_weight.w")
        );
        let bad = BASE.replace("kind = \"fixed-truth\"", "kind = \"mallows-around-truth\"\nphi = 2.0");
        assert!(matches!(ExperimentConfig::from_toml(&bad), Err(Error::Config { field, .. }) if field == "target.phi"));
        let bad = BASE.replace("strategy = \"random\"", "strategy = \"oracle\"");
        assert!(matches!(ExperimentConfig::from_toml(&bad), Err(Error::Config { .. })));
        let bad = format!("extra = 1\n{BASE}");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
    }

    #[test]
    fn model_target_must_match_m() {
        let text = BASE.replace(
            "kind = \"fixed-truth\"",
            "kind = \"model\"\nmodel = { kind = \"uniform\", profile = [[0, 1, 2]] }",
        );
        assert!(
            matches!(ExperimentConfig::from_toml(&text), Err(Error::Config { field, .. }) if field == "target.model")
        );
    }
}
