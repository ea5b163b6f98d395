use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use watson_core::dialogue::EngineConfig;

use crate::error::ConfigError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserEntry {
    pub id: String,
    pub token: String,
    /// Operators may ingest domains.
    #[serde(default)]
    pub operator: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub bind: String,
    /// Precedent store root; `None` keeps everything in memory.
    pub data_dir: Option<PathBuf>,
    /// Base seed for sessions that do not bring their own.
    pub seed: u64,
    /// Domain files loaded at startup.
    pub domains: Vec<PathBuf>,
    pub engine: EngineConfig<f64>,
    pub users: Vec<UserEntry>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            bind: "127.0.0.1:8080".into(),
            data_dir: None,
            seed: 0,
            domains: Vec::new(),
            engine: EngineConfig::default(),
            users: Vec::new(),
        }
    }
}

fn parse_env<V: std::str::FromStr>(name: &str, value: &str) -> Result<V, ConfigError> {
    value.parse().map_err(|_| ConfigError::Env {
        name: name.to_owned(),
        value: value.to_owned(),
    })
}

impl ServiceConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads the file, then applies `WATSON_*` environment overrides.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_owned(),
            source,
        })?;
        let mut cfg: Self = toml::from_str(&text)?;
        cfg.apply_env(|k| std::env::var(k).ok())?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Overrides: `WATSON_BIND`, `WATSON_DATA_DIR`, `WATSON_SEED`,
    /// `WATSON_EXPLAINER_SAMPLES`, `WATSON_KERNEL_WIDTH`,
    /// `WATSON_DISTORTION_SAMPLES`, `WATSON_MIN_WEIGHT`.
    pub fn apply_env(&mut self, var: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        if let Some(v) = var("WATSON_BIND") {
            self.bind = v;
        }
        if let Some(v) = var("WATSON_DATA_DIR") {
            self.data_dir = (!v.is_empty()).then(|| PathBuf::from(v));
        }
        if let Some(v) = var("WATSON_SEED") {
            self.seed = parse_env("WATSON_SEED", &v)?;
        }
        if let Some(v) = var("WATSON_EXPLAINER_SAMPLES") {
            self.engine.explainer.samples = parse_env("WATSON_EXPLAINER_SAMPLES", &v)?;
        }
        if let Some(v) = var("WATSON_KERNEL_WIDTH") {
            self.engine.explainer.kernel_width = parse_env("WATSON_KERNEL_WIDTH", &v)?;
        }
        if let Some(v) = var("WATSON_DISTORTION_SAMPLES") {
            self.engine.distortion_samples = parse_env("WATSON_DISTORTION_SAMPLES", &v)?;
        }
        if let Some(v) = var("WATSON_MIN_WEIGHT") {
            self.engine.min_weight = parse_env("WATSON_MIN_WEIGHT", &v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.engine.explainer.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.engine.distortion_samples == 0 {
            return Err(ConfigError::Invalid("engine.distortion_samples must be >= 1".into()));
        }
        let mut ids = HashSet::new();
        let mut tokens = HashSet::new();
        for u in &self.users {
            if u.token.len() < 8 {
                return Err(ConfigError::Invalid(format!("token of `{}` is shorter than 8 characters", u.id)));
            }
            if !ids.insert(u.id.as_str()) {
                return Err(ConfigError::Invalid(format!("user `{}` is listed twice", u.id)));
            }
            if !tokens.insert(u.token.as_str()) {
                return Err(ConfigError::Invalid("two users share a token".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
bind = "0.0.0.0:9000"
seed = 7
domains = ["fixtures/respiratory.json"]

[engine]
distortion_samples = 200

[engine.explainer]
samples = 500

[[users]]
id = "dr_watson"
token = "watson-token"
operator = true
"#;

    #[test]
    fn parses_with_defaults() {
        let cfg = ServiceConfig::from_toml(SAMPLE).unwrap();
        assert_eq!(cfg.bind, "0.0.0.0:9000");
        assert_eq!(cfg.engine.distortion_samples, 200);
        assert_eq!(cfg.engine.explainer.samples, 500);
        assert_eq!(cfg.engine.review_limit, 5);
        assert!(cfg.data_dir.is_none());
        assert!(cfg.users[0].operator);
    }

    #[test]
    fn env_overrides_file() {
        let mut cfg = ServiceConfig::from_toml(SAMPLE).unwrap();
        cfg.apply_env(|k| match k {
            "WATSON_SEED" => Some("99".into()),
            "WATSON_DATA_DIR" => Some("/tmp/x".into()),
            _ => None,
        })
        .unwrap();
        assert_eq!(cfg.seed, 99);
        assert_eq!(cfg.data_dir.as_deref(), Some(Path::new("/tmp/x")));
        let err = cfg.apply_env(|k| (k == "WATSON_SEED").then(|| "many".into()));
        assert!(matches!(err, Err(ConfigError::Env { .. })));
    }

    #[test]
    fn rejects_shared_tokens() {
        let text = format!("{SAMPLE}\n[[users]]\nid = \"other\"\ntoken = \"watson-token\"\n");
        assert!(matches!(ServiceConfig::from_toml(&text), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn example_config_is_valid() {
        let cfg = ServiceConfig::from_toml(include_str!("../../../watson.example.toml")).unwrap();
        assert_eq!(cfg.users.len(), 2);
        assert_eq!(cfg.engine.explainer.samples, 1000);
    }
}
