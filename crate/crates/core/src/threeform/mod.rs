//! Real three-forms of type (3,0)+(0,3): closure of partial data under the
//! type relations, support and kernel, normal forms in dimensions 8 and 10,
//! and the r-tensor with its eigenstructure.

mod complex;
mod io;
mod normal;
mod spectrum;
mod support;

use std::collections::HashMap;

pub use io::{JSpec, ThreeFormFile};
pub use normal::{normal_form_dim10, normal_form_dim10_auto, normal_form_dim8, Case10, Dim10NormalForm, NormalForm10, NormalForm8};
pub use spectrum::{classify_dim10, r_from_threeform, stated_r_matrix, Dim10Class, Eigen, RSpectrum};
pub use support::{support_kernel, SupportResult};

use crate::error::{Error, Result};
use crate::frame::eps_metric;
use crate::linalg::{self, Mat};
use crate::scalar::Field;
use crate::tensor::{Symmetry, Tensor};

#[derive(Clone, Debug, PartialEq)]
pub struct ThreeForm<S: Field> {
    pub eta: Tensor<S>,
    pub g: Mat<S>,
    /// Columns are the images `J e_i`.
    pub j: Mat<S>,
}

impl<S: Field> ThreeForm<S> {
    pub fn new(eta: Tensor<S>, g: Mat<S>, j: Mat<S>) -> Result<ThreeForm<S>> {
        let n = eta.dim;
        if eta.order != 3 || g.shape() != (n, n) || j.shape() != (n, n) {
            return Err(Error::ShapeMismatch(format!(
                "three-form of order {} on dim {n} with g {:?} and J {:?}",
                eta.order,
                g.shape(),
                j.shape()
            )));
        }
        if n % 2 != 0 {
            return Err(Error::ShapeMismatch(format!("odd dimension {n}")));
        }
        Ok(ThreeForm { eta: eta.with_symmetry(Symmetry::Antisymmetric), g, j })
    }

    /// Type closure of `assignments` on the frame with signs `eps`.
    pub fn from_assignments(eps: &[i8], j: Mat<S>, assignments: &[([usize; 3], S)]) -> Result<ThreeForm<S>> {
        let eta = extend_by_type(eps.len(), &j, assignments)?;
        ThreeForm::new(eta, eps_metric(eps), j)
    }

    pub fn dim(&self) -> usize {
        self.eta.dim
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> &S {
        self.eta.get(&[a, b, c])
    }

    pub fn convert<T: Field>(&self, f: impl Fn(&S) -> T) -> ThreeForm<T> {
        ThreeForm {
            eta: self.eta.map_into(&f),
            g: self.g.map(|x| f(&x)),
            j: self.j.map(|x| f(&x)),
        }
    }

    pub fn to_f64(&self) -> ThreeForm<f64> {
        self.convert(|x| x.to_f64())
    }

    /// The same form expressed in the frame given by the columns of `b`.
    pub fn in_frame(&self, b: &Mat<S>, tol: f64) -> Result<ThreeForm<S>> {
        let binv = linalg::inverse(b, tol).ok_or_else(|| Error::ShapeMismatch("frame change is singular".into()))?;
        let eta = self.eta.transform_slot(0, b).transform_slot(1, b).transform_slot(2, b);
        let g = linalg::mat_mul(&b.transpose(), &linalg::mat_mul(&self.g, b));
        let j = linalg::mat_mul(&binv, &linalg::mat_mul(&self.j, b));
        ThreeForm::new(eta, g, j)
    }

    pub fn scale(&self) -> f64 {
        self.eta.max_abs()
    }

    /// Max of `|eta(a,b,c) + eta(b,a,c)|` over adjacent swaps.
    pub fn antisymmetry_residual(&self) -> f64 {
        self.eta.symmetry_residual()
    }

    /// Max of `|eta(JX,JY,Z) + eta(X,Y,Z)|` over frame triples.
    pub fn type_residual(&self) -> f64 {
        let jj = self.eta.transform_slot(0, &self.j).transform_slot(1, &self.j);
        jj.add(&self.eta).max_abs()
    }

    pub fn is_zero(&self) -> bool {
        self.eta.data.iter().all(|x| x.is_zero())
    }
}

/// `<eta, eta>` with all indices raised, divided by 3!. On an orthonormal frame
/// this is `sum_{a<b<c} eps_a eps_b eps_c eta_abc^2`.
pub fn form_length<S: Field>(form: &ThreeForm<S>) -> Result<S> {
    let ginv = linalg::inverse(&form.g, 0.0)
        .ok_or_else(|| Error::DegenerateMetric("metric is singular".into()))?;
    let up = form.eta.transform_slot(0, &ginv).transform_slot(1, &ginv).transform_slot(2, &ginv);
    let mut acc = S::zero();
    for (x, y) in form.eta.data.iter().zip(&up.data) {
        acc += x.clone() * y.clone();
    }
    Ok(acc / S::from_i64(6))
}

/// `J e_i = s e_k` for a signed permutation `J`.
fn signed_permutation<S: Field>(j: &Mat<S>) -> Result<Vec<(usize, S)>> {
    let n = j.ncols();
    (0..n)
        .map(|i| {
            let nz: Vec<usize> = (0..n).filter(|&k| !j[(k, i)].is_zero()).collect();
            match nz.as_slice() {
                [k] if j[(*k, i)].clone() * j[(*k, i)].clone() == S::one() => Ok((*k, j[(*k, i)].clone())),
                _ => Err(Error::PreconditionFailed(format!(
                    "type closure needs J to permute the frame up to sign (column {i})"
                ))),
            }
        })
        .collect()
}

/// Sorts a triple, returning the permutation sign, or `None` on a repeated index.
fn sorted(mut t: [usize; 3]) -> Option<([usize; 3], bool)> {
    let mut odd = false;
    for (a, b) in [(0, 1), (1, 2), (0, 1)] {
        if t[a] > t[b] {
            t.swap(a, b);
            odd = !odd;
        }
    }
    (t[0] != t[1] && t[1] != t[2]).then_some((t, odd))
}

fn agree<S: Field>(a: &S, b: &S) -> bool {
    if S::is_exact() {
        a == b
    } else {
        let s = a.to_f64().abs().max(b.to_f64().abs()).max(1.0);
        (a.clone() - b.clone()).negligible(1e-12 * s)
    }
}

fn clash<S: Field>(t: [usize; 3], first: &S, second: &S) -> Error {
    Error::InconsistentAssignment {
        indices: (t[0], t[1], t[2]),
        first: first.to_string(),
        second: second.to_string(),
    }
}

/// The unique antisymmetric extension of `assignments` satisfying
/// `eta(JX,JY,Z) = -eta(X,Y,Z)`; components outside the generated orbits are zero.
pub fn extend_by_type<S: Field>(dim: usize, j: &Mat<S>, assignments: &[([usize; 3], S)]) -> Result<Tensor<S>> {
    if j.shape() != (dim, dim) {
        return Err(Error::ShapeMismatch(format!("J is {:?} on dim {dim}", j.shape())));
    }
    let jmap = signed_permutation(j)?;
    let mut known: HashMap<[usize; 3], S> = HashMap::new();
    let mut stack: Vec<([usize; 3], S)> = Vec::new();
    for (t, v) in assignments {
        if t.iter().any(|&i| i >= dim) {
            return Err(Error::ShapeMismatch(format!("index {t:?} out of range {dim}")));
        }
        stack.push((*t, v.clone()));
    }
    while let Some((t, v)) = stack.pop() {
        let Some((key, odd)) = sorted(t) else {
            if !v.is_zero() {
                return Err(clash(t, &v, &S::zero()));
            }
            continue;
        };
        let v = if odd { -v } else { v };
        if let Some(old) = known.get(&key) {
            if !agree(old, &v) {
                return Err(clash(key, old, &v));
            }
            continue;
        }
        known.insert(key, v.clone());
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let (kp, sp) = &jmap[key[p]];
            let (kq, sq) = &jmap[key[q]];
            let mut t2 = key;
            t2[p] = *kp;
            t2[q] = *kq;
            stack.push((t2, -(sp.clone() * sq.clone() * v.clone())));
        }
    }
    let mut eta = Tensor::zeros(dim, 3);
    for (t, v) in known {
        if v.is_zero() {
            continue;
        }
        for (perm, sign) in [
            ([0, 1, 2], false),
            ([1, 2, 0], false),
            ([2, 0, 1], false),
            ([1, 0, 2], true),
            ([0, 2, 1], true),
            ([2, 1, 0], true),
        ] {
            let idx = [t[perm[0]], t[perm[1]], t[perm[2]]];
            eta.set(&idx, if sign { -v.clone() } else { v.clone() });
        }
    }
    Ok(eta.with_symmetry(Symmetry::Antisymmetric))
}

/// Nonzero components with increasing indices.
pub fn components<S: Field>(eta: &Tensor<S>) -> Vec<([usize; 3], S)> {
    let n = eta.dim;
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let v = eta.get(&[a, b, c]);
                if !v.is_zero() {
                    out.push(([a, b, c], v.clone()));
                }
            }
        }
    }
    out
}
