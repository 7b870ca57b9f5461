//! Flat key-value form of a [`LevyTriple`], tagged by `family`.
//!
//! ```toml
//! family = "gamma"      # drift | gamma | stable | atomic | density
//! kill_rate = 0.0       # optional, default 0
//! drift = 0.0           # optional, default 0
//! shape_rate = 1.0      # gamma: a
//! scale_rate = 1.0      # gamma: b
//! # stable:  index, scale
//! # atomic:  locations = [..], masses = [..]
//! # density: coef, power, rate, support_cut  (λ(x) = coef·x^power·e^{-rate·x})
//! ```

use serde::{Deserialize, Serialize};

use super::measure::{DensityForm, GenericDensity, LevyMeasure};
use super::LevyTriple;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleDocument {
    pub family: String,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub kill_rate: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub drift: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub locations: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub masses: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coef: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_cut: Option<f64>,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

fn required(v: Option<f64>, key: &str, family: &str) -> Result<f64> {
    v.ok_or_else(|| Error::Config(format!("family `{family}` requires key `{key}`")))
}

impl TryFrom<&TripleDocument> for LevyTriple {
    type Error = Error;

    fn try_from(doc: &TripleDocument) -> Result<Self> {
        let fam = doc.family.as_str();
        let measure = match fam {
            "drift" => None,
            "gamma" => Some(LevyMeasure::gamma(
                required(doc.shape_rate, "shape_rate", fam)?,
                required(doc.scale_rate, "scale_rate", fam)?,
            )?),
            "stable" => Some(LevyMeasure::stable(
                required(doc.index, "index", fam)?,
                required(doc.scale, "scale", fam)?,
            )?),
            "atomic" => {
                let locs = doc
                    .locations
                    .as_ref()
                    .ok_or_else(|| Error::Config("family `atomic` requires `locations`".into()))?;
                let masses = doc
                    .masses
                    .as_ref()
                    .ok_or_else(|| Error::Config("family `atomic` requires `masses`".into()))?;
                if locs.len() != masses.len() {
                    return Err(Error::Config(format!(
                        "atomic family: {} locations but {} masses",
                        locs.len(),
                        masses.len()
                    )));
                }
                Some(LevyMeasure::atomic(locs.iter().copied().zip(masses.iter().copied()))?)
            }
            "density" => {
                let form = DensityForm {
                    coef: required(doc.coef, "coef", fam)?,
                    power: required(doc.power, "power", fam)?,
                    rate: doc.rate.unwrap_or(0.0),
                };
                Some(LevyMeasure::Density(GenericDensity::from_form(
                    form,
                    doc.support_cut.unwrap_or(1.0),
                )?))
            }
            other => return Err(Error::Config(format!("unknown family `{other}`"))),
        };
        LevyTriple::new(doc.kill_rate, doc.drift, measure)
    }
}

impl TryFrom<&LevyTriple> for TripleDocument {
    type Error = Error;

    fn try_from(t: &LevyTriple) -> Result<Self> {
        let mut doc = TripleDocument {
            family: t.family_name().to_string(),
            kill_rate: t.kill_rate(),
            drift: t.drift(),
            ..Default::default()
        };
        match t.measure() {
            None => {}
            Some(LevyMeasure::Gamma { shape_rate, scale_rate }) => {
                doc.shape_rate = Some(*shape_rate);
                doc.scale_rate = Some(*scale_rate);
            }
            Some(LevyMeasure::Stable { index, scale }) => {
                doc.index = Some(*index);
                doc.scale = Some(*scale);
            }
            Some(LevyMeasure::FiniteAtomic { atoms }) => {
                doc.locations = Some(atoms.iter().map(|a| a.location).collect());
                doc.masses = Some(atoms.iter().map(|a| a.mass).collect());
            }
            Some(LevyMeasure::Density(d)) => {
                let form = d.form().ok_or_else(|| {
                    Error::Unsupported("a density given only as a closure cannot be serialized".into())
                })?;
                doc.coef = Some(form.coef);
                doc.power = Some(form.power);
                doc.rate = Some(form.rate);
                doc.support_cut = Some(d.support_cut());
            }
        }
        Ok(doc)
    }
}

impl LevyTriple {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let doc: TripleDocument = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        LevyTriple::try_from(&doc)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        let doc = TripleDocument::try_from(self)?;
        toml::to_string(&doc).map_err(|e| Error::Config(e.to_string()))
    }
}
