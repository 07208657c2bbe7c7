//! JSON state files:
//!
//! ```json
//! {"sectors": [{"N": 2, "weight": 1.0, "basis": "j3", "amps": [[0.7071, 0], [0, 0], [0.7071, 0]]}]}
//! ```
//!
//! `basis` is `j3` (internal, arm photon numbers) or `j1` (counting). Amplitude
//! index `k` is `m = N/2 - k`. Amplitudes and weights written with limited
//! precision are renormalized if they are within [`NORM_SLACK`] of unit norm.

use std::path::Path;

use num_complex::Complex64;
use pathsym_core::{Basis, MultiSectorState, PureSector, SpinSector, WeightedSector};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Largest accepted `|Σ|a|² - 1|` per sector and `|Σ w - 1|` overall.
pub const NORM_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisTag {
    #[serde(rename = "j3")]
    J3,
    #[serde(rename = "j1")]
    J1,
}

impl From<BasisTag> for Basis {
    fn from(tag: BasisTag) -> Self {
        match tag {
            BasisTag::J3 => Basis::InternalJ3,
            BasisTag::J1 => Basis::CountingJ1,
        }
    }
}

impl From<Basis> for BasisTag {
    fn from(basis: Basis) -> Self {
        match basis {
            Basis::InternalJ3 => BasisTag::J3,
            Basis::CountingJ1 => BasisTag::J1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorRecord {
    #[serde(rename = "N")]
    pub n: u32,
    pub weight: f64,
    pub basis: BasisTag,
    pub amps: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub sectors: Vec<SectorRecord>,
}

impl StateFile {
    pub fn from_state(state: &MultiSectorState) -> Self {
        Self {
            sectors: state
                .sectors()
                .iter()
                .map(|ws| SectorRecord {
                    n: ws.n_photons(),
                    weight: ws.weight,
                    basis: ws.state.basis().into(),
                    amps: ws.state.amps().iter().map(|a| [a.re, a.im]).collect(),
                })
                .collect(),
        }
    }

    pub fn into_state(self) -> Result<MultiSectorState, String> {
        if self.sectors.is_empty() {
            return Err("state file has no sectors".into());
        }
        let total: f64 = self.sectors.iter().map(|s| s.weight).sum();
        if !((total - 1.0).abs() <= NORM_SLACK) {
            return Err(format!("sector weights sum to {total}, not 1"));
        }
        let mut sectors = Vec::with_capacity(self.sectors.len());
        for (i, rec) in self.sectors.into_iter().enumerate() {
            let sector = SpinSector::new(rec.n);
            if rec.amps.len() != sector.dim() {
                return Err(format!(
                    "sector {i} (N = {}) needs {} amplitudes, found {}",
                    rec.n,
                    sector.dim(),
                    rec.amps.len()
                ));
            }
            let amps: Vec<Complex64> = rec.amps.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
            let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
            if !((norm_sqr - 1.0).abs() <= NORM_SLACK) {
                return Err(format!("sector {i} (N = {}) has squared norm {norm_sqr}, not 1", rec.n));
            }
            let state = PureSector::normalized(sector, rec.basis.into(), amps).map_err(|e| e.to_string())?;
            sectors.push(WeightedSector {
                weight: rec.weight / total,
                state,
            });
        }
        MultiSectorState::new(sectors, 0.0).map_err(|e| e.to_string())
    }
}

pub fn load(path: &Path) -> Result<MultiSectorState, CliError> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: name.clone(),
        source: e,
    })?;
    let file: StateFile = serde_json::from_str(&text).map_err(|e| CliError::StateFile {
        path: name.clone(),
        message: e.to_string(),
    })?;
    file.into_state().map_err(|message| CliError::StateFile { path: name, message })
}

pub fn save(path: &Path, state: &MultiSectorState) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(&StateFile::from_state(state)).expect("state file serializes");
    std::fs::write(path, text + "\n").map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_documented_example() {
        let text = r#"{"sectors":[{"N":2,"weight":1.0,"basis":"j3","amps":[[0.70710678118,0],[0,0],[0.70710678118,0]]}]}"#;
        let state = serde_json::from_str::<StateFile>(text).unwrap().into_state().unwrap();
        assert_eq!(state.sectors().len(), 1);
        assert_eq!(state.sectors()[0].state.basis(), Basis::InternalJ3);
    }

    #[test]
    fn rejects_bad_content() {
        let bad = [
            r#"{"sectors":[]}"#,
            r#"{"sectors":[{"N":1,"weight":1.0,"basis":"j3","amps":[[1,0]]}]}"#,
            r#"{"sectors":[{"N":1,"weight":0.5,"basis":"j1","amps":[[1,0],[0,0]]}]}"#,
            r#"{"sectors":[{"N":1,"weight":1.0,"basis":"j1","amps":[[1,0],[1,0]]}]}"#,
        ];
        for text in bad {
            assert!(serde_json::from_str::<StateFile>(text).unwrap().into_state().is_err(), "{text}");
        }
        assert!(serde_json::from_str::<StateFile>(r#"{"sectors":[{"N":1,"weight":1,"basis":"xy","amps":[]}]}"#).is_err());
    }
}
