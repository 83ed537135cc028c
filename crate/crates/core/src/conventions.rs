//! Interpretive choices for ∪ᵢ on distinct monomials, loadable from JSON.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::milnor::{KPoly, Monomial};
use crate::parse::ParseError;

/// What `x ∪ᵢ y` is for distinct generators `x ≠ y`, `i ≥ 1`, absent an
/// explicit override.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixedCup {
    Zero,
    Undefined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CupOverride {
    pub i: u32,
    pub x: String,
    pub y: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConventionTable {
    pub name: String,
    pub mixed_cup: MixedCup,
    #[serde(default)]
    pub overrides: Vec<CupOverride>,
    #[serde(skip)]
    resolved: BTreeMap<(u32, Monomial, Monomial), KPoly>,
}

#[derive(Debug, Error)]
pub enum ConventionError {
    #[error("unknown convention preset `{0}`")]
    UnknownPreset(String),
    #[error("convention file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("convention file: {0}")]
    Parse(#[from] ParseError),
    #[error("override for ∪_0 is not allowed: ∪_0 is the product")]
    CupZeroOverride,
}

impl ConventionTable {
    /// Shipped preset: mixed higher cups vanish.
    pub fn standard() -> Self {
        ConventionTable {
            name: "standard".into(),
            mixed_cup: MixedCup::Zero,
            overrides: Vec::new(),
            resolved: BTreeMap::new(),
        }
    }

    /// Every mixed higher cup must be supplied explicitly.
    pub fn strict() -> Self {
        ConventionTable {
            name: "strict".into(),
            mixed_cup: MixedCup::Undefined,
            ..Self::standard()
        }
    }

    pub fn preset(name: &str) -> Result<Self, ConventionError> {
        match name {
            "standard" => Ok(Self::standard()),
            "strict" => Ok(Self::strict()),
            other => Err(ConventionError::UnknownPreset(other.to_string())),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ConventionError> {
        let mut t: ConventionTable = serde_json::from_str(text)?;
        t.resolve()?;
        Ok(t)
    }

    pub fn with_override(mut self, i: u32, x: &str, y: &str, value: &str) -> Result<Self, ConventionError> {
        self.overrides.push(CupOverride {
            i,
            x: x.into(),
            y: y.into(),
            value: value.into(),
        });
        self.resolve()?;
        Ok(self)
    }

    fn resolve(&mut self) -> Result<(), ConventionError> {
        self.resolved.clear();
        for o in &self.overrides {
            if o.i == 0 {
                return Err(ConventionError::CupZeroOverride);
            }
            let x = Monomial::parse(&o.x)?;
            let y = Monomial::parse(&o.y)?;
            let (a, b) = if x <= y { (x, y) } else { (y, x) };
            self.resolved.insert((o.i, a, b), KPoly::parse(&o.value)?);
        }
        Ok(())
    }

    /// Override for the unordered pair `{x, y}`.
    pub fn lookup(&self, i: u32, x: &Monomial, y: &Monomial) -> Option<&KPoly> {
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        self.resolved.get(&(i, a.clone(), b.clone()))
    }

    pub fn canonical_json(&self) -> String {
        let mut overrides = self.overrides.clone();
        overrides.sort_by(|a, b| (a.i, &a.x, &a.y).cmp(&(b.i, &b.x, &b.y)));
        serde_json::to_string(&ConventionTable {
            overrides,
            ..self.clone()
        })
        .expect("convention table serializes")
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }

    pub fn short_hash(&self) -> String {
        self.hash()[..12].to_string()
    }
}

impl Default for ConventionTable {
    fn default() -> Self {
        Self::standard()
    }
}
