use std::env;

use crate::error::{Error, Result};

/// Size of the radius-12 ball of F_2, the default enumeration ceiling.
pub const DEFAULT_MAX_BALL_WORDS: u128 = 1_062_881;

/// Resource limits shared by every growth loop in the library.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Budget {
    /// Largest ball (in number of elements) that may be enumerated.
    pub max_ball_words: u128,
    /// Largest graph (Stallings, Schreier or product graph) that may be built.
    pub max_vertices: usize,
    /// Longest word considered by conjugator and candidate searches.
    pub max_word_length: usize,
    /// Largest exponent swept for a fixed conjugator base.
    pub max_exponent: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_ball_words: DEFAULT_MAX_BALL_WORDS, max_vertices: 100_000, max_word_length: 12, max_exponent: 6 }
    }
}

impl Budget {
    pub const ENV_VAR: &'static str = "CHABAUTY_LAB_BUDGET";

    /// Applies overrides of the form `vertices=5000,length=10,words=100000,exponent=4`.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::malformed(format!("budget override `{item}` is not key=value")))?;
            let bad = || Error::malformed(format!("budget override `{item}` has a non-numeric value"));
            match key.trim() {
                "vertices" => self.max_vertices = value.trim().parse().map_err(|_| bad())?,
                "length" => self.max_word_length = value.trim().parse().map_err(|_| bad())?,
                "words" => self.max_ball_words = value.trim().parse().map_err(|_| bad())?,
                "exponent" => self.max_exponent = value.trim().parse().map_err(|_| bad())?,
                other => return Err(Error::malformed(format!("unknown budget key `{other}`"))),
            }
        }
        Ok(self)
    }

    /// Defaults, overridden by `CHABAUTY_LAB_BUDGET` when set.
    pub fn from_env() -> Result<Self> {
        match env::var(Self::ENV_VAR) {
            Ok(spec) => Budget::default().with_overrides(&spec),
            Err(_) => Ok(Budget::default()),
        }
    }

    pub(crate) fn check_vertices(&self, count: usize) -> Result<()> {
        if count > self.max_vertices {
            return Err(Error::Budget { what: "graph vertices", limit: self.max_vertices as u128 });
        }
        Ok(())
    }

    pub(crate) fn check_ball(&self, size: Option<u128>) -> Result<()> {
        match size {
            Some(n) if n <= self.max_ball_words => Ok(()),
            _ => Err(Error::Budget { what: "ball enumeration", limit: self.max_ball_words }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse() {
        let b = Budget::default().with_overrides("vertices=10, length=3").unwrap();
        assert_eq!(b.max_vertices, 10);
        assert_eq!(b.max_word_length, 3);
        assert_eq!(b.max_ball_words, DEFAULT_MAX_BALL_WORDS);
        assert!(Budget::default().with_overrides("depth=3").is_err());
        assert!(Budget::default().with_overrides("vertices").is_err());
    }

    #[test]
    fn default_ball_cap_is_radius_twelve_in_f2() {
        // 1 + 4 * (3^12 - 1) / 2
        assert_eq!(DEFAULT_MAX_BALL_WORDS, 1 + 2 * (3u128.pow(12) - 1));
    }
}
