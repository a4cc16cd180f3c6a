//! Three-form files: `dim`, `eps`, `j` (`"block"` or a matrix) and sparse
//! `assignments` `[i, j, k, "p/q"]` that are closed under the type relations
//! on load.

use std::path::Path;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::frame::standard_j;
use crate::linalg::Mat;
use crate::scalar::{format_rational, Field, Rational};
use crate::serial;

use super::ThreeForm;

#[derive(Clone, Debug, PartialEq)]
pub enum JSpec {
    Block,
    Matrix(Mat<Rational>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThreeFormFile {
    pub eps: Vec<i8>,
    pub j: JSpec,
    pub assignments: Vec<([usize; 3], Rational)>,
}

impl ThreeFormFile {
    pub fn dim(&self) -> usize {
        self.eps.len()
    }

    pub fn j_matrix(&self) -> Mat<Rational> {
        match &self.j {
            JSpec::Block => standard_j(self.dim() / 2),
            JSpec::Matrix(m) => m.clone(),
        }
    }

    pub fn parse(text: &str) -> Result<ThreeFormFile> {
        let v: Value = serde_json::from_str(text)?;
        let dim = serial::index(serial::field(&v, "dim")?)?;
        let eps = serial::eps_list(serial::field(&v, "eps")?)?;
        if eps.len() != dim || dim % 2 != 0 {
            return Err(Error::ShapeMismatch(format!("dim {dim} with {} signs", eps.len())));
        }
        let j = match serial::field(&v, "j")? {
            Value::String(s) if s == "block" => JSpec::Block,
            Value::String(s) => return Err(Error::Parse(format!("unknown J shorthand {s:?}"))),
            m => JSpec::Matrix(serial::matrix(m, dim, "j")?),
        };
        let assignments = match v.get("assignments") {
            None | Some(Value::Null) => Vec::new(),
            Some(a) => serial::sparse(a, 3, dim, "assignments")?
                .into_iter()
                .map(|(idx, val)| ([idx[0], idx[1], idx[2]], val))
                .collect(),
        };
        Ok(ThreeFormFile { eps, j, assignments })
    }

    pub fn load(path: &Path) -> Result<ThreeFormFile> {
        ThreeFormFile::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("dim".into(), json!(self.dim()));
        m.insert("eps".into(), json!(self.eps));
        m.insert(
            "j".into(),
            match &self.j {
                JSpec::Block => json!("block"),
                JSpec::Matrix(j) => serial::matrix_json(j),
            },
        );
        m.insert(
            "assignments".into(),
            Value::Array(
                self.assignments
                    .iter()
                    .map(|(t, v)| json!([t[0], t[1], t[2], format_rational(v)]))
                    .collect(),
            ),
        );
        Value::Object(m)
    }

    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("json values serialize");
        s.push('\n');
        s
    }

    pub fn to_form<S: Field>(&self) -> Result<ThreeForm<S>> {
        let j = self.j_matrix().map(|x| S::from_rational(&x));
        let a: Vec<([usize; 3], S)> = self.assignments.iter().map(|(t, v)| (*t, S::from_rational(v))).collect();
        ThreeForm::from_assignments(&self.eps, j, &a)
    }

    /// Lists every nonzero component of a rational form with increasing indices.
    pub fn from_form(eps: Vec<i8>, j: JSpec, form: &ThreeForm<Rational>) -> ThreeFormFile {
        ThreeFormFile { eps, j, assignments: super::components(&form.eta) }
    }
}
