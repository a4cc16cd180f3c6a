//! Identity reports shared by all verifiers.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::scalar::Backend;

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    /// The identity in formula form.
    pub anchor: String,
    /// Max-norm residual divided by the largest input magnitude.
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
    /// True when the residual was computed in exact arithmetic and the pass
    /// verdict required it to vanish identically.
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub skipped: bool,
}

impl Check {
    /// `raw` is the max-norm residual and `scale` the largest input
    /// magnitude. Exact checks pass only when `raw` is identically zero.
    pub fn residual(
        name: impl Into<String>,
        anchor: impl Into<String>,
        raw: f64,
        scale: f64,
        tol: f64,
        exact: bool,
        witness: Option<String>,
    ) -> Check {
        let residual = if scale > 0.0 { raw / scale } else { raw };
        let pass = if exact { raw == 0.0 } else { residual <= tol };
        Check {
            name: name.into(),
            anchor: anchor.into(),
            residual,
            tol,
            pass,
            exact,
            witness: if pass { None } else { witness },
            skipped: false,
        }
    }

    /// A boolean predicate recorded as a check.
    pub fn predicate(name: impl Into<String>, anchor: impl Into<String>, ok: bool, witness: Option<String>) -> Check {
        Check {
            name: name.into(),
            anchor: anchor.into(),
            residual: if ok { 0.0 } else { 1.0 },
            tol: 0.0,
            pass: ok,
            exact: true,
            witness: if ok { None } else { witness },
            skipped: false,
        }
    }

    pub fn skipped(name: impl Into<String>, anchor: impl Into<String>, why: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            anchor: anchor.into(),
            residual: 0.0,
            tol: 0.0,
            pass: true,
            exact: false,
            witness: Some(why.into()),
            skipped: true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub version: u32,
    pub target: String,
    pub backend: Backend,
    pub conventions: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    pub values: BTreeMap<String, Value>,
}

impl Report {
    pub fn new(target: impl Into<String>, backend: Backend) -> Report {
        let mut conventions = BTreeMap::new();
        conventions.insert(
            "curvature".to_string(),
            "R(X,Y,Z,W) = g(R(X,Y)W,Z), R(X,Y) = [D_X,D_Y] - D_[X,Y]".to_string(),
        );
        conventions.insert("cyclic_sum".to_string(), "over the named slots, left to right".to_string());
        conventions.insert(
            "residual".to_string(),
            "max-norm over frame tuples divided by the largest input component".to_string(),
        );
        Report {
            version: REPORT_VERSION,
            target: target.into(),
            backend,
            conventions,
            checks: Vec::new(),
            values: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, cs: impl IntoIterator<Item = Check>) {
        self.checks.extend(cs);
    }

    pub fn value(&mut self, key: impl Into<String>, v: impl Into<Value>) {
        self.values.insert(key.into(), v.into());
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("target: {} ({})\n", self.target, self.backend);
        for c in &self.checks {
            let verdict = if c.skipped {
                "SKIP"
            } else if c.pass {
                "PASS"
            } else {
                "FAIL"
            };
            s.push_str(&format!(
                "{verdict} {:<40} residual {:.3e} tol {:.1e}{}",
                c.name,
                c.residual,
                c.tol,
                if c.exact { " exact" } else { "" }
            ));
            if let Some(w) = &c.witness {
                s.push_str(&format!("  [{w}]"));
            }
            s.push('\n');
        }
        for (k, v) in &self.values {
            s.push_str(&format!("  {k} = {v}\n"));
        }
        s
    }
}
