use std::path::Path;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::frame::{self, Signature};
use crate::linalg::{self, Mat};
use crate::scalar::{Field, Rational};
use crate::serial;

/// Reductive Lie-algebra data `g = h + m` with an invariant metric and
/// almost complex structure on `m`. All entries are exact rationals.
#[derive(Clone, Debug)]
pub struct HomogeneousModel {
    pub name: String,
    pub description: String,
    pub labels: Vec<String>,
    /// `brackets[i][j][k]`: coefficient of `e_k` in `[e_i, e_j]`.
    pub brackets: Vec<Vec<Vec<Rational>>>,
    pub h: Vec<usize>,
    pub m: Vec<usize>,
    /// Metric on `m`, in the order of `m`.
    pub metric: Mat<Rational>,
    pub j: Mat<Rational>,
    /// Optional horizontal/vertical split, as positions in `m`.
    pub hv: Option<(Vec<usize>, Vec<usize>)>,
    pub expected: Value,
    pub provenance: Value,
}

fn zero() -> Rational {
    Rational::from_i64(0)
}

impl HomogeneousModel {
    pub fn dim_g(&self) -> usize {
        self.labels.len()
    }

    pub fn dim_m(&self) -> usize {
        self.m.len()
    }

    pub fn signature(&self) -> Result<Signature> {
        frame::gram_check(&self.metric, 0.0)
    }

    /// Parses without validating; see [`HomogeneousModel::validate`].
    pub fn from_json(v: &Value) -> Result<HomogeneousModel> {
        let name = serial::field(v, "name")?
            .as_str()
            .ok_or_else(|| Error::Parse("name must be a string".into()))?
            .to_string();
        let description = v.get("description").and_then(Value::as_str).unwrap_or("").to_string();
        let labels: Vec<String> = serial::array(serial::field(v, "basis")?, "basis")?
            .iter()
            .map(|x| x.as_str().map(str::to_string).ok_or_else(|| Error::Parse("basis labels must be strings".into())))
            .collect::<Result<_>>()?;
        if let Some(d) = v.get("dim") {
            if serial::index(d)? != labels.len() {
                return Err(Error::ShapeMismatch(format!("dim {d} but {} basis labels", labels.len())));
            }
        }
        let n = labels.len();
        let mut brackets = vec![vec![vec![zero(); n]; n]; n];
        let mut seen = vec![vec![vec![false; n]; n]; n];
        for (idx, val) in serial::sparse(serial::field(v, "brackets")?, 3, n, "brackets")? {
            let (i, j, k) = (idx[0], idx[1], idx[2]);
            for (a, b, x) in [(i, j, val.clone()), (j, i, -val.clone())] {
                if seen[a][b][k] && brackets[a][b][k] != x {
                    return Err(Error::InconsistentAssignment {
                        indices: (a, b, k),
                        first: brackets[a][b][k].to_string(),
                        second: x.to_string(),
                    });
                }
                seen[a][b][k] = true;
                brackets[a][b][k] = x;
            }
        }
        let split = serial::field(v, "split")?;
        let idx_list = |x: &Value, what: &str| -> Result<Vec<usize>> {
            serial::array(x, what)?.iter().map(serial::index).collect()
        };
        let h = idx_list(serial::field(split, "h")?, "split.h")?;
        let m = idx_list(serial::field(split, "m")?, "split.m")?;
        let mut all: Vec<usize> = h.iter().chain(&m).copied().collect();
        all.sort_unstable();
        if all != (0..n).collect::<Vec<_>>() {
            return Err(Error::ShapeMismatch("split.h and split.m must partition the basis".into()));
        }
        let dm = m.len();
        let metric = serial::matrix(serial::field(v, "metric")?, dm, "metric")?;
        let j = serial::matrix(serial::field(v, "j")?, dm, "j")?;
        let hv = match v.get("hv") {
            None | Some(Value::Null) => None,
            Some(x) => {
                let hh = idx_list(serial::field(x, "h")?, "hv.h")?;
                let vv = idx_list(serial::field(x, "v")?, "hv.v")?;
                let mut all: Vec<usize> = hh.iter().chain(&vv).copied().collect();
                all.sort_unstable();
                if all != (0..dm).collect::<Vec<_>>() {
                    return Err(Error::ShapeMismatch("hv.h and hv.v must partition m".into()));
                }
                Some((hh, vv))
            }
        };
        Ok(HomogeneousModel {
            name,
            description,
            labels,
            brackets,
            h,
            m,
            metric,
            j,
            hv,
            expected: v.get("expected").cloned().unwrap_or(Value::Null),
            provenance: v.get("provenance").cloned().unwrap_or(Value::Null),
        })
    }

    pub fn load(path: &Path) -> Result<HomogeneousModel> {
        let text = std::fs::read_to_string(path)?;
        let m = HomogeneousModel::from_json(&serde_json::from_str(&text)?)?;
        m.validate()?;
        Ok(m)
    }

    /// Exact checks: Jacobi identity, reductivity, ad(h)-invariance of the
    /// metric and of J, `J^2 = -1`, `g(J,J) = g`, nondegeneracy.
    pub fn validate(&self) -> Result<()> {
        let n = self.dim_g();
        let c = &self.brackets;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for mm in 0..n {
                        let mut s = zero();
                        for l in 0..n {
                            s += c[j][k][l].clone() * c[i][l][mm].clone()
                                + c[k][i][l].clone() * c[j][l][mm].clone()
                                + c[i][j][l].clone() * c[k][l][mm].clone();
                        }
                        if !num_traits::Zero::is_zero(&s) {
                            return Err(Error::JacobiViolation(format!(
                                "({}, {}, {}) component {}",
                                self.labels[i], self.labels[j], self.labels[k], self.labels[mm]
                            )));
                        }
                    }
                }
            }
        }
        let in_h = |k: usize| self.h.contains(&k);
        for &a in &self.h {
            for &b in &self.h {
                if let Some(k) = (0..n).find(|&k| !in_h(k) && !num_traits::Zero::is_zero(&c[a][b][k])) {
                    return Err(Error::InvarianceViolation(format!(
                        "[h,h] not in h: [{}, {}] has a {} component",
                        self.labels[a], self.labels[b], self.labels[k]
                    )));
                }
            }
            for &x in &self.m {
                if let Some(k) = self.h.iter().find(|&&k| !num_traits::Zero::is_zero(&c[a][x][k])) {
                    return Err(Error::InvarianceViolation(format!(
                        "[h,m] not in m: [{}, {}] has a {} component",
                        self.labels[a], self.labels[x], self.labels[*k]
                    )));
                }
            }
        }
        let res = frame::check_complex_structure(&self.j, &self.metric)?;
        if res.max() != 0.0 {
            return Err(Error::InvarianceViolation(format!(
                "J is not a metric complex structure (J^2+1: {:e}, g(J,J)-g: {:e})",
                res.square, res.compat
            )));
        }
        if linalg::max_abs_diff(&self.metric, &self.metric.transpose()) != 0.0 {
            return Err(Error::InvarianceViolation("metric is not symmetric".into()));
        }
        self.signature()?;
        for (a, ad) in self.ad_h::<Rational>().iter().enumerate() {
            let gm = linalg::mat_mul(&ad.transpose(), &self.metric) + linalg::mat_mul(&self.metric, ad);
            if !linalg::is_zero_mat(&gm) {
                return Err(Error::InvarianceViolation(format!("metric not ad({})-invariant", self.labels[self.h[a]])));
            }
            if !linalg::is_zero_mat(&linalg::commutator(ad, &self.j)) {
                return Err(Error::InvarianceViolation(format!("J not ad({})-invariant", self.labels[self.h[a]])));
            }
        }
        Ok(())
    }

    /// `ad(h_a)` restricted to `m`, one matrix per element of `h`.
    pub fn ad_h<S: Field>(&self) -> Vec<Mat<S>> {
        let dm = self.dim_m();
        self.h
            .iter()
            .map(|&a| Mat::from_fn(dm, dm, |k, j| S::from_rational(&self.brackets[a][self.m[j]][self.m[k]])))
            .collect()
    }

    pub fn with_metric(&self, metric: Mat<Rational>) -> HomogeneousModel {
        HomogeneousModel { metric, ..self.clone() }
    }

    pub fn with_j(&self, j: Mat<Rational>) -> HomogeneousModel {
        HomogeneousModel { j, ..self.clone() }
    }
}
