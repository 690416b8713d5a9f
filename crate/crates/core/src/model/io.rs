//! JSON model files.
//!
//! Numbers may be given as JSON numbers or as strings holding a decimal or a
//! ratio `p/q`. Strings are kept verbatim, so a file reads back exactly as
//! it was written.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::piecewise::PiecewisePoly;
use super::poly::Poly;
use super::ScalarModel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Coef {
    text: String,
    value: f64,
}

impl Coef {
    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn parse(text: &str) -> Result<Coef> {
        let s = text.trim();
        let value = match s.split_once('/') {
            Some((p, q)) => parse_decimal(p)? / parse_decimal(q)?,
            None => parse_decimal(s)?,
        };
        if !value.is_finite() {
            return Err(Error::Config(format!("coefficient {text:?} is not finite")));
        }
        Ok(Coef { text: s.to_string(), value })
    }

    pub fn from_f64(value: f64) -> Coef {
        // Display for f64 prints the shortest string that reads back exactly
        Coef { text: format!("{value}"), value }
    }
}

fn parse_decimal(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("cannot parse number {s:?}")))
}

impl Serialize for Coef {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

impl<'de> Deserialize<'de> for Coef {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Coef::from_f64(v)),
            Raw::Text(t) => Coef::parse(&t).map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiecewisePolyDef {
    pub breakpoints: Vec<Coef>,
    pub pieces: Vec<Vec<Coef>>,
}

impl PiecewisePolyDef {
    pub fn build(&self) -> Result<PiecewisePoly> {
        PiecewisePoly::new(
            self.breakpoints.iter().map(Coef::value).collect(),
            self.pieces
                .iter()
                .map(|p| Poly::new(p.iter().map(Coef::value).collect()))
                .collect(),
        )
    }

    pub fn from_piecewise(p: &PiecewisePoly) -> Self {
        PiecewisePolyDef {
            breakpoints: p.breakpoints().iter().map(|&b| Coef::from_f64(b)).collect(),
            pieces: p
                .pieces()
                .iter()
                .map(|q| q.coeffs().iter().map(|&c| Coef::from_f64(c)).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dim: usize,
    pub urange: [Coef; 2],
    pub flux: Vec<PiecewisePolyDef>,
    /// Row-major, `dim * dim` entries.
    pub diffusion: Vec<PiecewisePolyDef>,
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<ModelFile> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &std::path::Path) -> Result<ModelFile> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model file serializes")
    }

    pub fn build(&self) -> Result<ScalarModel> {
        let dim = self.dim;
        if !(1..=2).contains(&dim) {
            return Err(Error::Config(format!("dim must be 1 or 2, got {dim}")));
        }
        if self.flux.len() != dim {
            return Err(Error::Shape(format!("flux has {} components, expected {dim}", self.flux.len())));
        }
        if self.diffusion.len() != dim * dim {
            return Err(Error::Shape(format!(
                "diffusion has {} entries, expected {}",
                self.diffusion.len(),
                dim * dim
            )));
        }
        let flux = self.flux.iter().map(PiecewisePolyDef::build).collect::<Result<Vec<_>>>()?;
        let entries = self.diffusion.iter().map(PiecewisePolyDef::build).collect::<Result<Vec<_>>>()?;
        let diffusion = entries.chunks(dim).map(<[_]>::to_vec).collect();
        let model = ScalarModel::new(flux, diffusion, (self.urange[0].value(), self.urange[1].value()))?;
        Ok(match &self.name {
            Some(n) => model.with_name(n.clone()),
            None => model,
        })
    }

    pub fn from_model(model: &ScalarModel) -> ModelFile {
        let (lo, hi) = model.urange();
        ModelFile {
            name: model.name().map(str::to_string),
            dim: model.dim(),
            urange: [Coef::from_f64(lo), Coef::from_f64(hi)],
            flux: model.flux().iter().map(PiecewisePolyDef::from_piecewise).collect(),
            diffusion: model
                .diffusion()
                .iter()
                .flatten()
                .map(PiecewisePolyDef::from_piecewise)
                .collect(),
        }
    }

    /// Hex sha256 of the compact canonical serialization.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("model file serializes");
        crate::fsutil::sha256_hex(&bytes)
    }
}
