//! Parameter files for the generative commands.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::Value;

use dst::scalar::{parse_scalar, Scalar};
use dst::types::{DstParams, LinearOrder, LuceWeights, Universe};

use crate::error::{input, CliError};

/// A number given either as a JSON number or as text such as `"1/3"`.
pub fn scalar<T: Scalar>(v: &Value) -> Result<T, CliError> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => return Err(CliError::Input(format!("expected a number, got {other}"))),
    };
    parse_scalar(&text).ok_or_else(|| CliError::Input(format!("not a number: {text}")))
}

pub fn scalar_text<T: Scalar>(text: &str) -> Result<T, CliError> {
    parse_scalar(text.trim()).ok_or_else(|| CliError::Input(format!("not a number: {text}")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeFile {
    pub share: Value,
    pub alpha: Value,
    /// Best first.
    pub order: Vec<String>,
    /// Weight of every universe member, keyed by id.
    pub weights: BTreeMap<String, Value>,
}

/// A single model: `{"universe": [...], "alpha": .., "order": [...], "weights": [...]}`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub universe: Vec<String>,
    pub alpha: Value,
    pub order: Vec<String>,
    pub weights: BTreeMap<String, Value>,
}

impl ModelFile {
    pub fn params<T: Scalar>(&self) -> Result<DstParams<T>, CliError> {
        let u = Universe::new(self.universe.clone()).map_err(input)?;
        build_params(&u, &self.alpha, &self.order, &self.weights)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureFile {
    pub universe: Vec<String>,
    pub types: Vec<TypeFile>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RumType {
    pub share: f64,
    pub order: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RumFile {
    pub universe: Vec<String>,
    pub types: Vec<RumType>,
}

pub fn parse_json<'a, D: Deserialize<'a>>(text: &'a str) -> Result<D, CliError> {
    serde_json::from_str(text).map_err(input)
}

/// Values keyed by id, laid out in universe order.
pub fn keyed<T: Scalar>(u: &Universe, values: &BTreeMap<String, Value>) -> Result<Vec<T>, CliError> {
    let mut out: Vec<Option<T>> = vec![None; u.len()];
    for (id, v) in values {
        out[u.index_of(id).map_err(input)?] = Some(scalar(v)?);
    }
    out.into_iter().enumerate().map(|(i, v)| v.ok_or_else(|| CliError::Input(format!("no value for {}", u.id(i))))).collect()
}

pub fn build_params<T: Scalar>(u: &Universe, alpha: &Value, order: &[String], weights: &BTreeMap<String, Value>) -> Result<DstParams<T>, CliError> {
    let order = LinearOrder::from_ids(u, order).map_err(input)?;
    let weights = LuceWeights::new(keyed(u, weights)?).map_err(input)?;
    DstParams::new(u.clone(), scalar(alpha)?, order, weights).map_err(input)
}
