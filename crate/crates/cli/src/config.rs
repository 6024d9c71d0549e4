//! Run configuration file. Every key is optional; command-line flags win.
//!
//! ```toml
//! [paths]
//! train_corpus = "train.txt"
//! test_corpus = "test.txt"      # clean text to corrupt / score against
//! observed = "corrupted.txt"
//! corrected = "corrected.txt"
//! records = "records.tsv"
//! vocab = "model/vocab.tsv"
//! model = "model/model.arpa"
//! index = "model/confusion.tsv"
//! out = "runs"
//!
//! [params]
//! rate_denominator = 200
//! seed = 1
//! beta = 0.995
//! beam = 3                      # or "inf"
//! beta_list = [0.95, 0.995, 0.9995]
//! t_list = [3, 9, 27]
//! ```
//!
//! Relative paths are resolved against the directory holding the file.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Deserializer};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub paths: Paths,
    #[serde(default)]
    pub params: Params,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    pub train_corpus: Option<PathBuf>,
    pub test_corpus: Option<PathBuf>,
    pub observed: Option<PathBuf>,
    pub corrected: Option<PathBuf>,
    pub records: Option<PathBuf>,
    pub vocab: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub index: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub rate_denominator: Option<u64>,
    pub seed: Option<u64>,
    pub beta: Option<f64>,
    pub beam: Option<Beam>,
    pub beta_list: Option<Vec<f64>>,
    pub t_list: Option<Vec<Beam>>,
}

/// Beam width; `inf` turns pruning off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Beam(pub usize);

impl Beam {
    pub fn label(&self) -> Option<usize> {
        (self.0 != usize::MAX).then_some(self.0)
    }
}

impl FromStr for Beam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("inf") {
            return Ok(Beam(usize::MAX));
        }
        match s.parse::<usize>() {
            Ok(0) | Err(_) => Err(format!("beam must be a positive integer or \"inf\", got {s:?}")),
            Ok(t) => Ok(Beam(t)),
        }
    }
}

impl fmt::Display for Beam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.label() {
            Some(t) => write!(f, "{t}"),
            None => f.write_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Beam {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(t) => Beam::from_str(&t.to_string()),
            Raw::Text(s) => Beam::from_str(&s),
        }
        .map_err(serde::de::Error::custom)
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: RunConfig = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let p = &mut cfg.paths;
        for slot in [
            &mut p.train_corpus,
            &mut p.test_corpus,
            &mut p.observed,
            &mut p.corrected,
            &mut p.records,
            &mut p.vocab,
            &mut p.model,
            &mut p.index,
            &mut p.out,
        ] {
            if let Some(rel) = slot.as_ref().filter(|q| q.is_relative()) {
                *slot = Some(base.join(rel));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let p = &self.params;
        for &b in p.beta.iter().chain(p.beta_list.iter().flatten()) {
            if !(b > 0.0 && b <= 1.0) {
                bail!("beta values must lie in (0, 1], got {b}");
            }
        }
        if p.rate_denominator == Some(0) {
            bail!("rate_denominator must be at least 1");
        }
        Ok(())
    }
}

/// Flag value if given, else the config value, else an error naming both.
pub fn require<T: Clone>(flag: Option<T>, config: &Option<T>, flag_name: &str, key: &str) -> Result<T> {
    match flag.or_else(|| config.clone()) {
        Some(v) => Ok(v),
        None => bail!("missing --{flag_name} (or {key} in the config file)"),
    }
}
