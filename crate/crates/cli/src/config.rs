//! The run configuration file.
//!
//! ```toml
//! [tolerances]            # every field of maxrep::Tolerances, defaults as in the library
//! winding = 1e-3
//!
//! [sampling]
//! seed = 0                # overridden by MAXREP_SEED, which is overridden by --seed
//! max_word_len = 8        # words for trlen and qi
//! trlen_words = 50
//! qi_words = 50
//! length_starts = 20      # minimizer starts for translation lengths
//! polish_rounds = 4
//!
//! [sampling.suite]        # the lemma suite run by `verify`
//! cone_samples = 200
//! attainment_words = 20
//! causal_curves = 1000
//!
//! [curves]
//! file = "curves.txt"     # 9g - 9 labelled curves; built-in system when absent
//!
//! [twists]
//! file = "twists.txt"     # [name] / [name.inverse] tables; built-in twists when absent
//! label = "a1"
//! kmax = 10
//! max_conjugator = 8
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::path::{Path, PathBuf};

use maxrep::surface_group::DEFAULT_CONJUGATOR_DEPTH;
use maxrep::Tolerances;
use maxrep_lab::LemmaConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub tolerances: Tolerances,
    pub sampling: Sampling,
    pub curves: Curves,
    pub twists: Twists,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sampling {
    pub seed: u64,
    pub max_word_len: usize,
    pub trlen_words: usize,
    pub qi_words: usize,
    pub length_starts: usize,
    pub polish_rounds: usize,
    pub suite: LemmaConfig,
}

impl Default for Sampling {
    fn default() -> Self {
        Self {
            seed: 0,
            max_word_len: 8,
            trlen_words: 50,
            qi_words: 50,
            length_starts: 20,
            polish_rounds: 4,
            suite: LemmaConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Curves {
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Twists {
    pub file: Option<PathBuf>,
    pub label: String,
    pub kmax: u32,
    pub max_conjugator: usize,
}

impl Default for Twists {
    fn default() -> Self {
        Self {
            file: None,
            label: "a1".into(),
            kmax: 10,
            max_conjugator: DEFAULT_CONJUGATOR_DEPTH,
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        let dir = path.parent().unwrap_or(Path::new("."));
        for file in [&mut cfg.curves.file, &mut cfg.twists.file].into_iter().flatten() {
            if file.is_relative() {
                *file = dir.join(&*file);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let s = &self.sampling;
        let bad = |what: &str| Err(CliError::Config(format!("{what} must be positive")));
        if s.max_word_len == 0 {
            return bad("sampling.max_word_len");
        }
        if s.length_starts == 0 {
            return bad("sampling.length_starts");
        }
        if s.suite.causal_n == 0 {
            return bad("sampling.suite.causal_n");
        }
        if s.suite.causal_max_samples < 2 {
            return Err(CliError::Config("sampling.suite.causal_max_samples must be at least 2".into()));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(Config::parse("").unwrap(), Config::default());
    }

    #[test]
    fn sections_override_fields() {
        let cfg = Config::parse("[sampling]\nseed = 9\n[sampling.suite]\ncone_samples = 5\n[tolerances]\nwinding = 0.01\n").unwrap();
        assert_eq!(cfg.sampling.seed, 9);
        assert_eq!(cfg.sampling.suite.cone_samples, 5);
        assert_eq!(cfg.sampling.suite.causal_curves, 1000);
        assert_eq!(cfg.tolerances.winding, 0.01);
        assert_eq!(cfg.tolerances.proximal, Tolerances::default().proximal);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Config::parse("[sampling]\nsede = 1\n").is_err());
        assert!(Config::parse("[plotting]\n").is_err());
    }

    #[test]
    fn snapshot_round_trips() {
        let mut cfg = Config::default();
        cfg.twists.file = Some("t.txt".into());
        assert_eq!(Config::parse(&cfg.to_toml()).unwrap(), cfg);
    }
}
