//! Resolving `--target` to a model, a curvature point or a three-form.

use std::path::Path;

use npk_core::catalog::{self, CatalogEntry, BUILTIN_PREFIX};
use npk_core::curvature::{parse_point, CurvaturePoint};
use npk_core::scalar::Rational;
use npk_core::threeform::ThreeFormFile;
use npk_core::{Error, Result};
use serde_json::Value;

pub enum Target {
    Model(CatalogEntry),
    Point(CurvaturePoint<Rational>),
    Form(ThreeFormFile),
}

impl Target {
    pub fn kind(&self) -> &'static str {
        match self {
            Target::Model(_) => "model",
            Target::Point(_) => "curvature point",
            Target::Form(_) => "three-form",
        }
    }
}

/// Builtin ids (with or without the `builtin:` prefix) resolve to the
/// catalog. Files are told apart by their keys: `brackets` for models,
/// `curvature` for points, `assignments` or `eps` for three-forms.
pub fn load(target: &str) -> Result<Target> {
    let id = target.strip_prefix(BUILTIN_PREFIX).unwrap_or(target);
    if target.starts_with(BUILTIN_PREFIX) || catalog::builtin_ids().contains(&id) {
        return catalog::load(target).map(Target::Model);
    }
    let path = Path::new(target);
    if !path.exists() {
        return Err(Error::NotFound(target.to_string()));
    }
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)?;
    if v.get("brackets").is_some() {
        catalog::load(target).map(Target::Model)
    } else if v.get("curvature").is_some() {
        parse_point(&v).map(Target::Point)
    } else if v.get("assignments").is_some() || v.get("eps").is_some() {
        let f = ThreeFormFile::parse(&text)?;
        f.to_form::<Rational>()?;
        Ok(Target::Form(f))
    } else {
        Err(Error::Parse(format!("{target}: not a model, curvature point or three-form file")))
    }
}
