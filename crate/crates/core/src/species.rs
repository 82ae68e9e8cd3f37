use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Particle species injected into the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Species {
    Boson,
    Fermion,
    Distinguishable,
    /// Mean-field sampler: one equal-amplitude single-particle state with
    /// random input phases, averaged over the phases.
    SimulatedBoson,
}

impl Species {
    pub const ALL: [Species; 4] = [
        Species::Boson,
        Species::Fermion,
        Species::Distinguishable,
        Species::SimulatedBoson,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Species::Boson => "boson",
            Species::Fermion => "fermion",
            Species::Distinguishable => "distinguishable",
            Species::SimulatedBoson => "simulated-boson",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Species {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "boson" | "b" => Ok(Species::Boson),
            "fermion" | "f" => Ok(Species::Fermion),
            "dist" | "distinguishable" | "d" => Ok(Species::Distinguishable),
            "simboson" | "simulated-boson" | "simulated_boson" | "s" => Ok(Species::SimulatedBoson),
            other => Err(Error::Parse(format!("unknown species `{other}`"))),
        }
    }
}

/// Parses `all` or a comma-separated species list; duplicates are dropped
/// and the result is in canonical order.
pub fn parse_species_list(s: &str) -> Result<Vec<Species>, Error> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(Species::ALL.to_vec());
    }
    let mut out = s
        .split(',')
        .map(|t| t.trim().parse())
        .collect::<Result<Vec<Species>, _>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_cli_aliases() {
        assert_eq!("dist".parse::<Species>().unwrap(), Species::Distinguishable);
        assert_eq!(
            "simboson".parse::<Species>().unwrap(),
            Species::SimulatedBoson
        );
        assert_eq!(parse_species_list("all").unwrap().len(), 4);
        assert_eq!(
            parse_species_list("fermion,boson,boson").unwrap(),
            vec![Species::Boson, Species::Fermion]
        );
        assert!("photon".parse::<Species>().is_err());
    }

    #[test]
    fn serde_names_match_display() {
        for s in Species::ALL {
            assert_eq!(serde_json::to_string(&s).unwrap(), format!("\"{s}\""));
        }
    }
}
