//! Object classes and relation names the engine understands.
//!
//! A [`Vocabulary`] is a closed world: normalization rejects any class or
//! relation it does not list. Two profiles ship with the crate, `dota` for the
//! aerial object-detection classes and `flood` for post-flood region boxes.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Object classes of the aerial detection profile, in prompt order.
pub const DOTA_CLASSES: [&str; 15] = [
    "vehicle",
    "truck",
    "car",
    "bridge",
    "ship",
    "roundabout",
    "plane",
    "storage_tank",
    "baseball_diamond",
    "basketball_court",
    "ground_track_field",
    "harbor",
    "soccer_ball_field",
    "swimming_pool",
    "tennis_court",
];

/// Extra classes of the flood profile.
pub const FLOOD_EXTRA_CLASSES: [&str; 2] = ["building", "road_flooded"];

/// Canonical atomic relation names, binary and metric.
pub const ATOMIC_RELATIONS: [&str; 18] = [
    "is_close",
    "left_of",
    "right_of",
    "is_above",
    "is_below",
    "is_different",
    "facing_same",
    "facing_opposite",
    "DC",
    "EC",
    "PO",
    "TPP",
    "NTPP",
    "EQ",
    "TPPI",
    "NTPPI",
    "is_close_meters",
    "is_square_meters",
];

pub const MACRO_RELATIONS: [&str; 4] = ["aligned", "in_column", "clustered", "isolated_from"];

/// Relations whose truth value does not depend on argument order.
pub const SYMMETRIC_RELATIONS: [&str; 8] = [
    "is_close",
    "is_different",
    "is_close_meters",
    "facing_same",
    "facing_opposite",
    "EC",
    "PO",
    "EQ",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VocabProfile {
    #[default]
    Dota,
    Flood,
}

impl FromStr for VocabProfile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dota" => Ok(VocabProfile::Dota),
            "flood" => Ok(VocabProfile::Flood),
            other => Err(format!("unknown vocabulary profile `{other}` (expected dota or flood)")),
        }
    }
}

impl fmt::Display for VocabProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VocabProfile::Dota => f.write_str("dota"),
            VocabProfile::Flood => f.write_str("flood"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    object_classes: Vec<String>,
    atomic_relations: Vec<String>,
    macro_relations: Vec<String>,
    symmetric: BTreeSet<String>,
}

impl Vocabulary {
    pub fn dota() -> Self {
        Self::with_classes(DOTA_CLASSES.iter().copied())
    }

    /// The aerial classes plus `building` and `road_flooded`.
    pub fn flood() -> Self {
        Self::with_classes(DOTA_CLASSES.iter().chain(FLOOD_EXTRA_CLASSES.iter()).copied())
    }

    pub fn profile(profile: VocabProfile) -> Self {
        match profile {
            VocabProfile::Dota => Self::dota(),
            VocabProfile::Flood => Self::flood(),
        }
    }

    fn with_classes<'a>(classes: impl Iterator<Item = &'a str>) -> Self {
        let mut object_classes: Vec<String> = Vec::new();
        for c in classes {
            if !object_classes.iter().any(|x| x == c) {
                object_classes.push(c.to_string());
            }
        }
        Vocabulary {
            object_classes,
            atomic_relations: ATOMIC_RELATIONS.iter().map(|s| s.to_string()).collect(),
            macro_relations: MACRO_RELATIONS.iter().map(|s| s.to_string()).collect(),
            symmetric: SYMMETRIC_RELATIONS.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Restricts the relation lists, e.g. to build a smaller prompt. Names not
    /// in the default tables are kept as given.
    pub fn with_relations(mut self, atomic: &[&str], macros: &[&str]) -> Self {
        self.atomic_relations = atomic.iter().map(|s| s.to_string()).collect();
        self.macro_relations = macros.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn object_classes(&self) -> &[String] {
        &self.object_classes
    }

    pub fn atomic_relations(&self) -> &[String] {
        &self.atomic_relations
    }

    pub fn macro_relations(&self) -> &[String] {
        &self.macro_relations
    }

    pub fn is_class(&self, name: &str) -> bool {
        self.object_classes.iter().any(|c| c == name)
    }

    pub fn is_atomic_relation(&self, name: &str) -> bool {
        self.atomic_relations.iter().any(|c| c == name)
    }

    pub fn is_macro_relation(&self, name: &str) -> bool {
        self.macro_relations.iter().any(|c| c == name)
    }

    pub fn is_symmetric(&self, relation: &str) -> bool {
        self.symmetric.contains(relation)
    }
}

impl Default for Vocabulary {
    fn default() -> Self {
        Self::dota()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn macro_and_atomic_sets_are_disjoint() {
        let v = Vocabulary::dota();
        for m in v.macro_relations() {
            assert!(!v.is_atomic_relation(m), "{m}");
        }
    }

    #[test]
    fn dota_has_fifteen_classes() {
        assert_eq!(Vocabulary::dota().object_classes().len(), 15);
        assert_eq!(Vocabulary::flood().object_classes().len(), 17);
        assert!(Vocabulary::flood().is_class("road_flooded"));
        assert!(!Vocabulary::dota().is_class("building"));
    }

    #[test]
    fn profile_parsing() {
        assert_eq!("FLOOD".parse::<VocabProfile>().unwrap(), VocabProfile::Flood);
        assert!("coast".parse::<VocabProfile>().is_err());
    }
}
