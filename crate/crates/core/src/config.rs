//! Flat `key = value` configuration shared by all commands.
//!
//! Values are layered: built-in defaults, then a config file, then
//! `L2GEC_*` environment variables, then command-line overrides. Every
//! layer rejects keys it does not know.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Duration;

use thiserror::Error;

use crate::beam::Stage;
use crate::pipeline::{PipelineConfig, SpellConfig};

pub const ENV_PREFIX: &str = "L2GEC_";
/// Environment variable naming a config file; not a config key itself.
pub const ENV_CONFIG_FILE: &str = "L2GEC_CONFIG";

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{source_name}:{line}: {msg}")]
    Syntax { source_name: String, line: usize, msg: String },
    #[error("unknown config key {key:?} ({origin})")]
    UnknownKey { key: String, origin: String },
    #[error("bad value {value:?} for {key}: {msg}")]
    BadValue { key: String, value: String, msg: String },
}

/// Every key with its default and a one-line description.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("beam_width", "5", "candidates kept per sentence"),
    ("max_iterations", "1", "full passes over the stage list"),
    ("stages", "spell,comma,o_ob,masked_prep,agreement", "stages to run, in order"),
    ("spell.short_len", "4", "words up to this length use spell.short_d"),
    ("spell.short_d", "1", "edit distance limit for short words"),
    ("spell.max_d", "2", "edit distance limit for other words"),
    ("phonetic.code_d", "1", "edit distance between phonetic codes"),
    ("masked.threshold", "1.0", "minimum log10 gain for a preposition change"),
    ("masked.endpoint", "", "URL of a remote masked predictor; empty uses the LM"),
    ("masked.timeout_ms", "2000", "remote predictor timeout"),
    ("chains.min_gain", "0.1", "minimum log10 gain for an agreement change"),
    ("eval.merge_window", "2", "alignment operations one edit may span"),
    ("eval.beta", "0.5", "beta of the F-measure"),
    ("rules.comma", "true", "enable the comma rule"),
    ("rules.o_ob", "true", "enable the о/об rule"),
    ("text.fold_yo", "false", "treat ё as е when comparing words"),
    ("lm.unk_logprob", "-7", "log10 probability of unknown words"),
    ("lexicon.min_count", "1", "drop dictionary words seen fewer times"),
    ("paths.lexicon", "", "word frequency TSV"),
    ("paths.bigrams", "", "bigram frequency TSV"),
    ("paths.lm", "", "ARPA language model"),
    ("paths.morph", "", "morphological lexicon TSV"),
    ("paths.tag_freq", "", "tag frequency TSV for disambiguation"),
    ("paths.chains", "", "chain store TSV"),
    ("paths.prepositions", "", "preposition list, one per line"),
];

fn is_key(k: &str) -> bool {
    KEYS.iter().any(|(key, _, _)| *key == k)
}

pub fn env_name(key: &str) -> String {
    format!("{ENV_PREFIX}{}", key.to_uppercase().replace('.', "_"))
}

/// Raw layered values; typed access goes through the getters.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalConfig {
    values: BTreeMap<String, String>,
}

impl Default for GlobalConfig {
    fn default() -> Self {
        GlobalConfig {
            values: KEYS.iter().map(|(k, v, _)| (k.to_string(), v.to_string())).collect(),
        }
    }
}

impl GlobalConfig {
    pub fn set(&mut self, key: &str, value: &str, origin: &str) -> Result<(), ConfigError> {
        if !is_key(key) {
            return Err(ConfigError::UnknownKey { key: key.to_string(), origin: origin.to_string() });
        }
        self.values.insert(key.to_string(), value.trim().to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or("")
    }

    /// Apply a config file. `#` starts a comment line.
    pub fn apply_file(&mut self, text: &str, source_name: &str) -> Result<(), ConfigError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    source_name: source_name.to_string(),
                    line: i + 1,
                    msg: "expected key = value".into(),
                });
            };
            self.set(k.trim(), v, &format!("{source_name}:{}", i + 1))?;
        }
        Ok(())
    }

    /// Apply `L2GEC_*` variables from an iterator of (name, value).
    pub fn apply_env<I>(&mut self, vars: I) -> Result<(), ConfigError>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let names: BTreeMap<String, &str> = KEYS.iter().map(|(k, _, _)| (env_name(k), *k)).collect();
        for (name, value) in vars {
            if !name.starts_with(ENV_PREFIX) || name == ENV_CONFIG_FILE {
                continue;
            }
            match names.get(&name) {
                Some(key) => self.set(key, &value, "environment")?,
                None => return Err(ConfigError::UnknownKey { key: name, origin: "environment".into() }),
            }
        }
        Ok(())
    }

    /// Apply `key=value` overrides from the command line.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<(), ConfigError> {
        for o in overrides {
            let o = o.as_ref();
            let Some((k, v)) = o.split_once('=') else {
                return Err(ConfigError::Syntax {
                    source_name: "--set".into(),
                    line: 0,
                    msg: format!("expected key=value, got {o:?}"),
                });
            };
            self.set(k.trim(), v, "command line")?;
        }
        Ok(())
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        let value = self.get(key);
        value.parse().map_err(|e: T::Err| ConfigError::BadValue {
            key: key.to_string(),
            value: value.to_string(),
            msg: e.to_string(),
        })
    }

    pub fn usize(&self, key: &str) -> Result<usize, ConfigError> {
        self.parse(key)
    }

    pub fn f64(&self, key: &str) -> Result<f64, ConfigError> {
        let v: f64 = self.parse(key)?;
        if v.is_nan() {
            return Err(ConfigError::BadValue { key: key.into(), value: self.get(key).into(), msg: "NaN".into() });
        }
        Ok(v)
    }

    pub fn bool(&self, key: &str) -> Result<bool, ConfigError> {
        self.parse(key)
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        let v = self.get(key);
        (!v.is_empty()).then(|| PathBuf::from(v))
    }

    pub fn stages(&self) -> Result<Vec<Stage>, ConfigError> {
        let raw = self.get("stages");
        raw.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse().map_err(|msg| ConfigError::BadValue {
                    key: "stages".into(),
                    value: raw.to_string(),
                    msg,
                })
            })
            .collect()
    }

    pub fn masked_timeout(&self) -> Result<Duration, ConfigError> {
        Ok(Duration::from_millis(self.usize("masked.timeout_ms")? as u64))
    }

    /// Pipeline settings. The preposition list is left at its default; the
    /// caller loads `paths.prepositions` if set.
    pub fn pipeline_config(&self) -> Result<PipelineConfig, ConfigError> {
        let bad = |key: &str, msg: &str| ConfigError::BadValue {
            key: key.into(),
            value: self.get(key).into(),
            msg: msg.into(),
        };
        let beam_width = self.usize("beam_width")?;
        if beam_width == 0 {
            return Err(bad("beam_width", "must be at least 1"));
        }
        let max_iterations = self.usize("max_iterations")?;
        if max_iterations == 0 {
            return Err(bad("max_iterations", "must be at least 1"));
        }
        let spell = SpellConfig {
            short_len: self.usize("spell.short_len")?,
            short_d: self.usize("spell.short_d")?,
            max_d: self.usize("spell.max_d")?,
            code_d: self.usize("phonetic.code_d")?,
        };
        for (key, v) in [("spell.short_d", spell.short_d), ("spell.max_d", spell.max_d), ("phonetic.code_d", spell.code_d)] {
            if v > 3 {
                return Err(bad(key, "at most 3 is supported"));
            }
        }
        let mut config = PipelineConfig {
            beam_width,
            stages: self.stages()?,
            max_iterations,
            spell,
            masked_threshold: self.f64("masked.threshold")?,
            min_gain: self.f64("chains.min_gain")?,
            fold_yo: self.bool("text.fold_yo")?,
            ..Default::default()
        };
        config.rules.comma_rule_enabled = self.bool("rules.comma")?;
        config.rules.prep_rule_enabled = self.bool("rules.o_ob")?;
        Ok(config)
    }

    /// The effective configuration as a config file.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, _, help) in KEYS {
            s.push_str(&format!("# {help}\n{k} = {}\n", self.get(k)));
        }
        s
    }
}
