//! JSON helpers for exact rational data.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::{format_rational, parse_rational, Field, Rational};

/// Accepts `"p/q"` strings and JSON integers.
pub fn rational(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => n
            .as_i64()
            .map(Rational::from_i64)
            .ok_or_else(|| Error::Parse(format!("non-integer number {n}; write fractions as \"p/q\""))),
        other => Err(Error::Parse(format!("expected a rational, got {other}"))),
    }
}

pub fn index(v: &Value) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::Parse(format!("expected an index, got {v}")))
}

pub fn field<'a>(obj: &'a Value, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::MissingField(key.to_string()))
}

pub fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Parse(format!("{what} must be an array")))
}

/// Square matrix given as a list of rows.
pub fn matrix(v: &Value, n: usize, what: &str) -> Result<Mat<Rational>> {
    let rows = array(v, what)?;
    if rows.len() != n {
        return Err(Error::ShapeMismatch(format!("{what} has {} rows, expected {n}", rows.len())));
    }
    let mut m = Mat::from_element(n, n, Rational::from_i64(0));
    for (i, row) in rows.iter().enumerate() {
        let row = array(row, what)?;
        if row.len() != n {
            return Err(Error::ShapeMismatch(format!("{what} row {i} has {} entries", row.len())));
        }
        for (j, x) in row.iter().enumerate() {
            m[(i, j)] = rational(x)?;
        }
    }
    Ok(m)
}

pub fn matrix_json(m: &Mat<Rational>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| json!(format_rational(&m[(i, j)]))).collect()))
            .collect(),
    )
}

pub fn eps_list(v: &Value) -> Result<Vec<i8>> {
    array(v, "eps")?
        .iter()
        .map(|x| match x.as_i64() {
            Some(1) => Ok(1),
            Some(-1) => Ok(-1),
            _ => Err(Error::Parse(format!("eps entries must be +1 or -1, got {x}"))),
        })
        .collect()
}

/// Sparse entries `[i_1, .., i_k, "p/q"]`.
pub fn sparse(v: &Value, k: usize, n: usize, what: &str) -> Result<Vec<(Vec<usize>, Rational)>> {
    let mut out = Vec::new();
    for e in array(v, what)? {
        let e = array(e, what)?;
        if e.len() != k + 1 {
            return Err(Error::Parse(format!("{what} entries need {k} indices and a value")));
        }
        let idx = e[..k].iter().map(index).collect::<Result<Vec<_>>>()?;
        if idx.iter().any(|&i| i >= n) {
            return Err(Error::ShapeMismatch(format!("{what} index {idx:?} out of range {n}")));
        }
        out.push((idx, rational(&e[k])?));
    }
    Ok(out)
}

pub fn sparse_json<'a>(entries: impl IntoIterator<Item = (Vec<usize>, &'a Rational)>) -> Value {
    Value::Array(
        entries
            .into_iter()
            .filter(|(_, v)| !num_traits::Zero::is_zero(*v))
            .map(|(idx, v)| {
                let mut row: Vec<Value> = idx.into_iter().map(|i| json!(i)).collect();
                row.push(json!(format_rational(v)));
                Value::Array(row)
            })
            .collect(),
    )
}

pub fn to_backend<S: Field>(m: &Mat<Rational>) -> Mat<S> {
    m.map(|x| S::from_rational(&x))
}
