use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error};

/// Propagation condition of a TX/RX pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Scenario {
    Los,
    /// Strongest NLOS pointing pair, emulating a beamformed link.
    NlosBest,
    Nlos,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::Los, Scenario::NlosBest, Scenario::Nlos];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Los => "LOS",
            Scenario::NlosBest => "NLOS_BEST",
            Scenario::Nlos => "NLOS",
        }
    }

    pub fn is_los(self) -> bool {
        self == Scenario::Los
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let norm: String = s
            .trim()
            .chars()
            .filter(|c| !matches!(c, '_' | '-' | ' '))
            .collect::<String>()
            .to_ascii_uppercase();
        match norm.as_str() {
            "LOS" => Ok(Scenario::Los),
            "NLOSBEST" => Ok(Scenario::NlosBest),
            "NLOS" => Ok(Scenario::Nlos),
            _ => Err(domain(format!(
                "unknown scenario '{s}' (expected LOS, NLOS_BEST or NLOS)"
            ))),
        }
    }
}

/// Whether path loss was measured with directional horns or synthesized omni.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Directionality {
    Directional,
    Omni,
}

impl Directionality {
    pub fn as_str(self) -> &'static str {
        match self {
            Directionality::Directional => "DIRECTIONAL",
            Directionality::Omni => "OMNI",
        }
    }
}

impl fmt::Display for Directionality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Directionality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_uppercase().as_str() {
            "DIRECTIONAL" | "DIR" => Ok(Directionality::Directional),
            "OMNI" | "OMNIDIRECTIONAL" => Ok(Directionality::Omni),
            _ => Err(domain(format!(
                "unknown directionality '{s}' (expected DIRECTIONAL or OMNI)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_parsing_normalizes() {
        assert_eq!("nlos_best".parse::<Scenario>().unwrap(), Scenario::NlosBest);
        assert_eq!("NLOS-Best".parse::<Scenario>().unwrap(), Scenario::NlosBest);
        assert_eq!(" los ".parse::<Scenario>().unwrap(), Scenario::Los);
        assert!("LOSS".parse::<Scenario>().is_err());
        for s in Scenario::ALL {
            assert_eq!(s.as_str().parse::<Scenario>().unwrap(), s);
        }
    }

    #[test]
    fn directionality_parsing() {
        assert_eq!("omni".parse::<Directionality>().unwrap(), Directionality::Omni);
        assert_eq!(
            "Directional".parse::<Directionality>().unwrap(),
            Directionality::Directional
        );
        assert!("iso".parse::<Directionality>().is_err());
    }
}
