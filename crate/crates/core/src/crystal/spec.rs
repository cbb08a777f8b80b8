//! JSON crystal files.
//!
//! ```json
//! { "p": 3,
//!   "variables": [{"name": "x", "laurent": true}],
//!   "phi": {"x": "x^3"},
//!   "rank": 1,
//!   "connection": [["x^-1*dx"]],
//!   "frobenius": [["x^2"]],
//!   "weights": [[1]] }
//! ```
//!
//! `phi` may omit variables (they get `x ↦ x^p`); `weights` is optional.
//! Entries use the form grammar of [`parse_form`]; Φ acts on column vectors
//! (`φ_E(e_j) = Σ_i Φ[i][j] e_i`) and so does Θ (`∇e_j = Σ_i e_i ⊗ Θ[i][j]`).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::UnitRootCrystalData;
use crate::derham::{parse_form, parse_polynomial};
use crate::error::{Error, Result};
use crate::exactalg::{FrobeniusLiftSpec, Ring, Variable};

const MAX_RANK: usize = 8;
const MAX_VARIABLES: usize = 4;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableSpec {
    pub name: String,
    #[serde(default)]
    pub laurent: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalFile {
    pub p: u32,
    pub variables: Vec<VariableSpec>,
    #[serde(default)]
    pub phi: BTreeMap<String, String>,
    pub rank: usize,
    pub connection: Vec<Vec<String>>,
    pub frobenius: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Vec<i64>>>,
}

fn located(what: String) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Parse { pos, msg } => Error::Parse { pos, msg: format!("{what}: {msg}") },
        other => other,
    }
}

impl CrystalFile {
    pub fn from_json(src: &str) -> Result<Self> {
        serde_json::from_str(src).map_err(|e| Error::Parse { pos: e.column(), msg: format!("line {}: {e}", e.line()) })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    /// Parses every entry; does not check the crystal invariants.
    pub fn to_data(&self) -> Result<UnitRootCrystalData> {
        if !crate::exactalg::is_prime(self.p) || self.p >= 1 << 16 {
            return Err(Error::InvalidCrystal(format!("p = {} is not a supported prime", self.p)));
        }
        if self.variables.len() > MAX_VARIABLES {
            return Err(Error::InvalidCrystal(format!("at most {MAX_VARIABLES} variables")));
        }
        if self.rank == 0 || self.rank > MAX_RANK {
            return Err(Error::InvalidCrystal(format!("rank must be between 1 and {MAX_RANK}")));
        }
        let m = self.rank;
        if self.connection.len() != m || self.connection.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidCrystal(format!("connection must be {m}×{m}")));
        }
        if self.frobenius.len() != m || self.frobenius.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidCrystal(format!("frobenius must be {m}×{m}")));
        }
        let mut vars = Vec::new();
        for v in &self.variables {
            let ok = v.name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() && c != 'd')
                && v.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok || vars.iter().any(|u: &Variable| u.name == v.name) {
                return Err(Error::InvalidCrystal(format!("bad or repeated variable name {:?}", v.name)));
            }
            vars.push(if v.laurent { Variable::laurent(&v.name) } else { Variable::polynomial(&v.name) });
        }
        let ring = Ring::integers(vars);
        let phi = if self.phi.is_empty() {
            FrobeniusLiftSpec::standard(self.p, &ring)
        } else {
            if let Some(k) = self.phi.keys().find(|k| ring.var_index(k).is_none()) {
                return Err(Error::InvalidCrystal(format!("phi names unknown variable {k}")));
            }
            let standard = FrobeniusLiftSpec::standard(self.p, &ring);
            let images = (0..ring.nvars())
                .map(|i| match self.phi.get(&ring.vars()[i].name) {
                    Some(s) => parse_polynomial(&ring, s).map_err(located(format!("phi[{}]", ring.vars()[i].name))),
                    None => Ok(standard.image(i).clone()),
                })
                .collect::<Result<Vec<_>>>()?;
            FrobeniusLiftSpec::new(self.p, &ring, images)?
        };
        let connection = self
            .connection
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter().enumerate().map(|(j, s)| parse_form(&ring, s).map_err(located(format!("connection[{i}][{j}]")))).collect()
            })
            .collect::<Result<Vec<Vec<_>>>>()?;
        let frobenius = self
            .frobenius
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter().enumerate().map(|(j, s)| parse_polynomial(&ring, s).map_err(located(format!("frobenius[{i}][{j}]")))).collect()
            })
            .collect::<Result<Vec<Vec<_>>>>()?;
        Ok(UnitRootCrystalData { phi, connection, frobenius, weights: self.weights.clone() })
    }

    pub fn from_data(data: &UnitRootCrystalData) -> Self {
        let ring = data.ring();
        let standard = FrobeniusLiftSpec::standard(data.p(), ring);
        let phi = (0..ring.nvars())
            .filter(|&i| data.phi.image(i) != standard.image(i))
            .map(|i| (ring.vars()[i].name.clone(), data.phi.image(i).to_string()))
            .collect();
        CrystalFile {
            p: data.p(),
            variables: ring.vars().iter().map(|v| VariableSpec { name: v.name.clone(), laurent: v.laurent }).collect(),
            phi,
            rank: data.rank(),
            connection: data.connection.iter().map(|r| r.iter().map(|f| f.to_string()).collect()).collect(),
            frobenius: data.frobenius.iter().map(|r| r.iter().map(|f| f.to_string()).collect()).collect(),
            weights: data.weights.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_kummer() {
        let k = UnitRootCrystalData::kummer(3, -2);
        let file = CrystalFile::from_data(&k);
        let back = CrystalFile::from_json(&file.to_json()).unwrap().to_data().unwrap();
        assert_eq!(back.connection[0][0], k.connection[0][0]);
        assert_eq!(back.frobenius[0][0], k.frobenius[0][0]);
        back.validate().unwrap();
    }

    #[test]
    fn rejects_bad_files() {
        let bad = r#"{"p": 3, "variables": [{"name": "x"}], "rank": 1, "connection": [["dx"]], "frobenius": [["1"]]}"#;
        let data = CrystalFile::from_json(bad).unwrap().to_data().unwrap();
        assert!(matches!(data.validate(), Err(Error::NotHorizontal { .. })));
        let ragged = r#"{"p": 3, "variables": [], "rank": 2, "connection": [["0"]], "frobenius": [["1"]]}"#;
        assert!(matches!(CrystalFile::from_json(ragged).unwrap().to_data(), Err(Error::InvalidCrystal(_))));
        assert!(matches!(CrystalFile::from_json("{"), Err(Error::Parse { .. })));
        let typo = r#"{"p": 3, "variables": [{"name": "x"}], "rank": 1, "connection": [["d"]], "frobenius": [["1"]]}"#;
        assert!(matches!(CrystalFile::from_json(typo).unwrap().to_data(), Err(Error::Parse { .. })));
    }
}
