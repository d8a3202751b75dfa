use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A selection of feature sets FS0..FS4, written as a digit string such as
/// `"01234"` or `"34"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureSets(u8);

impl FeatureSets {
    /// The combinations reported for the all-data scenario.
    pub const TABLE: [&'static str; 9] = ["0", "01", "012", "0123", "01234", "1234", "234", "34", "4"];

    pub fn contains(&self, set: u8) -> bool {
        set < 5 && self.0 & (1 << set) != 0
    }

    pub fn sets(&self) -> impl Iterator<Item = u8> + '_ {
        (0..5).filter(|s| self.contains(*s))
    }

    pub fn union(self, other: FeatureSets) -> FeatureSets {
        FeatureSets(self.0 | other.0)
    }

    /// Any set beyond the current-sentence n-grams, which use the window.
    pub fn windowed(&self) -> bool {
        self.0 & 0b11110 != 0
    }
}

impl FromStr for FeatureSets {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = 0u8;
        for c in s.trim().chars() {
            let d = c
                .to_digit(10)
                .filter(|d| *d < 5)
                .ok_or_else(|| Error::InvalidInput(format!("feature sets `{s}`: `{c}` is not one of 0-4")))?;
            bits |= 1 << d;
        }
        if bits == 0 {
            return Err(Error::InvalidInput("empty feature-set selection".into()));
        }
        Ok(FeatureSets(bits))
    }
}

impl fmt::Display for FeatureSets {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.sets() {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl Serialize for FeatureSets {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FeatureSets {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureConfig {
    pub sets: FeatureSets,
    /// Context window C: sentences i-C..i+C contribute FS1-FS4 features.
    pub window: usize,
    /// Minimum training frequency of an FS0 n-gram.
    pub min_count: usize,
    pub lda_topics: usize,
    pub lda_iterations: usize,
    /// Lowercase tokens before embedding lookup, falling back to the
    /// original casing.
    pub lowercase_lookup: bool,
}

impl FeatureConfig {
    pub fn new(sets: FeatureSets) -> Self {
        FeatureConfig {
            sets,
            window: 4,
            min_count: 2,
            lda_topics: 30,
            lda_iterations: 1000,
            lowercase_lookup: true,
        }
    }

    /// A short human-readable form, used in mismatch errors.
    pub fn describe(&self) -> String {
        format!("FS{} window {}", self.sets, self.window)
    }
}
