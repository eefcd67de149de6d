use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::optimizer::{ArrayRotationMode, BlockMask};

/// Design schemes compared by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SchemeTag {
    /// Fixed array and elements; beamformer only.
    Fpa,
    /// Array-level rotation only.
    Gra,
    /// Element-level rotation only.
    Era,
    /// Both rotation levels over the sensed uncertainty region.
    Tra,
    /// Both levels, designed against the point estimate alone.
    TraPe,
    /// Both levels, array rotation by grid enumeration.
    TraEs,
}

impl SchemeTag {
    pub const IMPLEMENTED: [SchemeTag; 6] = [
        SchemeTag::Fpa,
        SchemeTag::Gra,
        SchemeTag::Era,
        SchemeTag::Tra,
        SchemeTag::TraPe,
        SchemeTag::TraEs,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeTag::Fpa => "FPA-ABF",
            SchemeTag::Gra => "GRA-ABF",
            SchemeTag::Era => "ERA-ABF",
            SchemeTag::Tra => "TRA-ABF",
            SchemeTag::TraPe => "TRA-ABF-PE",
            SchemeTag::TraEs => "TRA-ABF-ES",
        }
    }

    /// Blocks the optimizer may move; `es_points` sets the enumeration grid.
    pub fn mask(self, es_points: usize) -> BlockMask {
        let (array_rotation, element_rotation) = match self {
            SchemeTag::Fpa => (ArrayRotationMode::Frozen, false),
            SchemeTag::Gra => (ArrayRotationMode::Gradient, false),
            SchemeTag::Era => (ArrayRotationMode::Frozen, true),
            SchemeTag::Tra | SchemeTag::TraPe => (ArrayRotationMode::Gradient, true),
            SchemeTag::TraEs => (ArrayRotationMode::Exhaustive(es_points), true),
        };
        BlockMask {
            array_rotation,
            element_rotation,
        }
    }

    /// Whether the design ignores the uncertainty region.
    pub fn uses_point_estimate(self) -> bool {
        self == SchemeTag::TraPe
    }

    /// Parses a comma-separated list.
    pub fn parse_list(text: &str) -> Result<Vec<SchemeTag>, Error> {
        text.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect()
    }
}

impl fmt::Display for SchemeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let upper = s.trim().to_ascii_uppercase();
        if upper == "TRA-ABF-SCA" {
            return Err(Error::UnknownScheme(
                "TRA-ABF-SCA (the SCA benchmark needs a convex solver and is not provided)".into(),
            ));
        }
        Self::IMPLEMENTED
            .into_iter()
            .find(|t| t.as_str() == upper)
            .ok_or_else(|| Error::UnknownScheme(s.to_string()))
    }
}

impl TryFrom<String> for SchemeTag {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Error> {
        s.parse()
    }
}

impl From<SchemeTag> for String {
    fn from(t: SchemeTag) -> String {
        t.as_str().to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_round_trip() {
        for t in SchemeTag::IMPLEMENTED {
            assert_eq!(t.to_string().parse::<SchemeTag>().unwrap(), t);
        }
        assert_eq!("tra-abf-pe".parse::<SchemeTag>().unwrap(), SchemeTag::TraPe);
    }

    #[test]
    fn unknown_and_excluded_tags_fail() {
        assert!("XYZ".parse::<SchemeTag>().is_err());
        let err = "TRA-ABF-SCA".parse::<SchemeTag>().unwrap_err();
        assert!(err.to_string().contains("SCA"));
    }

    #[test]
    fn masks_follow_the_scheme() {
        assert_eq!(
            SchemeTag::Fpa.mask(61),
            BlockMask {
                array_rotation: ArrayRotationMode::Frozen,
                element_rotation: false
            }
        );
        assert_eq!(SchemeTag::TraEs.mask(61).array_rotation, ArrayRotationMode::Exhaustive(61));
        assert_eq!(SchemeTag::TraPe.mask(61), BlockMask::ALL);
    }

    #[test]
    fn list_parsing() {
        assert_eq!(
            SchemeTag::parse_list("FPA-ABF, TRA-ABF").unwrap(),
            vec![SchemeTag::Fpa, SchemeTag::Tra]
        );
    }
}
