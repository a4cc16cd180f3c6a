//! Built-in models and loading by id or path.

use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::homogeneous::HomogeneousModel;

const BUILTINS: &[(&str, &str)] = &[
    ("su3-flag", include_str!("../../models/su3-flag.json")),
    ("gxg-su2", include_str!("../../models/gxg-su2.json")),
    ("gxg-sl2r", include_str!("../../models/gxg-sl2r.json")),
    ("cp3-twistor", include_str!("../../models/cp3-twistor.json")),
    ("para-twistor", include_str!("../../models/para-twistor.json")),
    ("product-cp1xcp1", include_str!("../../models/product-cp1xcp1.json")),
];

pub const BUILTIN_PREFIX: &str = "builtin:";

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub id: String,
    pub model: HomogeneousModel,
}

impl CatalogEntry {
    pub fn expected(&self) -> &Value {
        &self.model.expected
    }
    pub fn provenance(&self) -> &Value {
        &self.model.provenance
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogSummary {
    pub id: String,
    pub description: String,
    pub dim: usize,
    pub expected: Value,
    pub provenance: Value,
}

pub fn builtin_ids() -> Vec<&'static str> {
    BUILTINS.iter().map(|(id, _)| *id).collect()
}

fn parse_builtin(id: &str) -> Result<HomogeneousModel> {
    let (_, text) = BUILTINS
        .iter()
        .find(|(k, _)| *k == id)
        .ok_or_else(|| Error::NotFound(format!("{BUILTIN_PREFIX}{id}")))?;
    HomogeneousModel::from_json(&serde_json::from_str(text)?)
}

/// Loads `builtin:<id>`, a bare builtin id, or a model file path, and
/// validates it.
pub fn load(target: &str) -> Result<CatalogEntry> {
    let id = target.strip_prefix(BUILTIN_PREFIX).unwrap_or(target);
    let model = if BUILTINS.iter().any(|(k, _)| *k == id) {
        let m = parse_builtin(id)?;
        m.validate()?;
        m
    } else if target.starts_with(BUILTIN_PREFIX) {
        return Err(Error::NotFound(target.to_string()));
    } else {
        let p = Path::new(target);
        if !p.exists() {
            return Err(Error::NotFound(target.to_string()));
        }
        HomogeneousModel::load(p)?
    };
    Ok(CatalogEntry { id: id.to_string(), model })
}

pub fn list() -> Result<Vec<CatalogSummary>> {
    BUILTINS
        .iter()
        .map(|(id, _)| {
            let m = parse_builtin(id)?;
            Ok(CatalogSummary {
                id: format!("{BUILTIN_PREFIX}{id}"),
                description: m.description.clone(),
                dim: m.dim_m(),
                expected: m.expected.clone(),
                provenance: m.provenance.clone(),
            })
        })
        .collect()
}
