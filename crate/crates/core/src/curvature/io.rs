use std::path::Path;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::frame::{eps_metric, standard_j};
use crate::linalg::Mat;
use crate::scalar::{Field, Rational};
use crate::serial;
use crate::tensor::Tensor;

use super::{Convention, CurvaturePoint};

fn metric_and_j(v: &Value) -> Result<(Mat<Rational>, Mat<Rational>)> {
    let (g, n) = if let Some(eps) = v.get("eps") {
        let eps = serial::eps_list(eps)?;
        let n = eps.len();
        (eps_metric(&eps), n)
    } else {
        let rows = serial::array(serial::field(v, "g")?, "g")?;
        let n = rows.len();
        (serial::matrix(serial::field(v, "g")?, n, "g")?, n)
    };
    if n % 2 != 0 {
        return Err(Error::ShapeMismatch(format!("odd dimension {n}")));
    }
    let j = match serial::field(v, "j")? {
        Value::String(s) if s == "block" => standard_j(n / 2),
        Value::String(s) => return Err(Error::Parse(format!("unknown J shorthand {s:?}"))),
        m => serial::matrix(m, n, "j")?,
    };
    Ok((g, j))
}

/// Reads a curvature point. Curvature components may be listed completely or,
/// with `"complete_symmetries": true`, one per orbit of the pair symmetries.
pub fn parse_point(v: &Value) -> Result<CurvaturePoint<Rational>> {
    let (g, j) = metric_and_j(v)?;
    let n = g.nrows();
    let zero = Mat::from_element(n, n, Rational::from_i64(0));
    let mut nabla_j = vec![zero.clone(); n];
    if let Some(d) = v.get("nabla_j") {
        for (idx, val) in serial::sparse(d, 3, n, "nabla_j")? {
            nabla_j[idx[0]][(idx[1], idx[2])] = val;
        }
    }
    let nabla2_j = match v.get("nabla2_j") {
        None | Some(Value::Null) => None,
        Some(d) => {
            let mut d2 = vec![vec![zero.clone(); n]; n];
            for (idx, val) in serial::sparse(d, 4, n, "nabla2_j")? {
                d2[idx[0]][idx[1]][(idx[2], idx[3])] = val;
            }
            Some(d2)
        }
    };
    let complete = v.get("complete_symmetries").and_then(Value::as_bool).unwrap_or(false);
    let mut r = Tensor::<Rational>::zeros(n, 4);
    for (idx, val) in serial::sparse(serial::field(v, "curvature")?, 4, n, "curvature")? {
        if complete {
            let (a, b, c, d) = (idx[0], idx[1], idx[2], idx[3]);
            let images = [
                ([a, b, c, d], false),
                ([b, a, c, d], true),
                ([a, b, d, c], true),
                ([b, a, d, c], false),
                ([c, d, a, b], false),
                ([d, c, a, b], true),
                ([c, d, b, a], true),
                ([d, c, b, a], false),
            ];
            for (t, neg) in images {
                let x = if neg { -val.clone() } else { val.clone() };
                let cur = r.get(&t).clone();
                if !num_traits::Zero::is_zero(&cur) && cur != x {
                    return Err(Error::InconsistentAssignment {
                        indices: (t[0], t[1], t[2]),
                        first: cur.to_string(),
                        second: x.to_string(),
                    });
                }
                r.set(&t, x);
            }
        } else {
            r.set(&idx, val);
        }
    }
    let convention = match v.get("convention") {
        None => Convention::Gray,
        Some(c) => serde_json::from_value(c.clone())?,
    };
    CurvaturePoint::new(g, j, nabla_j, nabla2_j, r, convention)
}

pub fn load_point(path: &Path) -> Result<CurvaturePoint<Rational>> {
    let text = std::fs::read_to_string(path)?;
    parse_point(&serde_json::from_str(&text)?)
}

fn tensor_entries(t: &Tensor<Rational>) -> Value {
    let mut idx = vec![0; t.order];
    serial::sparse_json((0..t.data.len()).map(|k| {
        t.unflatten(k, &mut idx);
        (idx.clone(), &t.data[k])
    }))
}

/// Writes a point in the `Gray` convention.
pub fn point_to_json(cp: &CurvaturePoint<Rational>) -> Value {
    let n = cp.dim();
    let mut dj = Vec::new();
    for x in 0..n {
        for a in 0..n {
            for b in 0..n {
                dj.push((vec![x, a, b], &cp.nabla_j[x][(a, b)]));
            }
        }
    }
    let mut out = json!({
        "g": serial::matrix_json(&cp.g),
        "j": serial::matrix_json(&cp.j),
        "nabla_j": serial::sparse_json(dj),
        "curvature": tensor_entries(&cp.r),
        "convention": "gray",
    });
    if let Some(d2) = &cp.nabla2_j {
        let mut e = Vec::new();
        for w in 0..n {
            for x in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        e.push((vec![w, x, a, b], &d2[w][x][(a, b)]));
                    }
                }
            }
        }
        out["nabla2_j"] = serial::sparse_json(e);
    }
    out
}

/// Converts an exact point to another backend.
pub fn to_backend<S: Field>(cp: &CurvaturePoint<Rational>) -> Result<CurvaturePoint<S>> {
    let conv = |m: &Mat<Rational>| serial::to_backend::<S>(m);
    CurvaturePoint::new(
        conv(&cp.g),
        conv(&cp.j),
        cp.nabla_j.iter().map(conv).collect(),
        cp.nabla2_j
            .as_ref()
            .map(|d2| d2.iter().map(|row| row.iter().map(conv).collect()).collect()),
        cp.r.map_into(|x| S::from_rational(x)),
        Convention::Gray,
    )
}
