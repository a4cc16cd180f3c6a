//! Pointwise curvature data and the verifiers built on it.

mod identities;
mod io;

pub use identities::*;
pub use io::{load_point, parse_point, point_to_json, to_backend};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{self, Signature};
use crate::linalg::{self, Mat};
use crate::scalar::Field;
use crate::tensor::{Symmetry, Tensor};

/// Sign convention of a four-tensor `R(X,Y,Z,W)`.
///
/// `Gray`: `g(R(X,Y)W, Z)`, so that `R(X,Y,X,Y)` is the sectional-curvature
/// numerator. `Standard`: `g(R(X,Y)Z, W)`, the negative of the former.
/// Both use `R(X,Y) = [D_X, D_Y] - D_[X,Y]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    #[default]
    Gray,
    Standard,
}

impl std::fmt::Display for Convention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Convention::Gray => write!(f, "gray: R(X,Y,Z,W) = g(R(X,Y)W,Z)"),
            Convention::Standard => write!(f, "standard: R(X,Y,Z,W) = g(R(X,Y)Z,W)"),
        }
    }
}

/// Metric, complex structure, first and second derivatives of J and the
/// Levi-Civita curvature at one point, in one basis. The basis need not be
/// orthonormal: every trace goes through the inverse metric.
#[derive(Clone, Debug)]
pub struct CurvaturePoint<S: Field> {
    pub g: Mat<S>,
    pub ginv: Mat<S>,
    pub j: Mat<S>,
    /// `nabla_j[x]` is the matrix of `(D_{e_x} J)`; columns are images.
    pub nabla_j: Vec<Mat<S>>,
    /// `nabla2_j[w][x]` is the matrix of the second derivative `D^2_{e_w,e_x} J`.
    pub nabla2_j: Option<Vec<Vec<Mat<S>>>>,
    /// Curvature in the `Gray` convention regardless of the input convention.
    pub r: Tensor<S>,
    /// Convention of the curvature as it was supplied.
    pub input_convention: Convention,
    /// `dd[w,x,y,z] = g((D_w J)x, (D_y J)z)`.
    pub dd: Tensor<S>,
}

impl<S: Field> CurvaturePoint<S> {
    pub fn new(
        g: Mat<S>,
        j: Mat<S>,
        nabla_j: Vec<Mat<S>>,
        nabla2_j: Option<Vec<Vec<Mat<S>>>>,
        r: Tensor<S>,
        convention: Convention,
    ) -> Result<CurvaturePoint<S>> {
        let n = g.nrows();
        let shape_ok = g.ncols() == n
            && j.shape() == (n, n)
            && nabla_j.len() == n
            && nabla_j.iter().all(|m| m.shape() == (n, n))
            && r.dim == n
            && r.order == 4
            && nabla2_j.as_ref().map_or(true, |d2| {
                d2.len() == n && d2.iter().all(|row| row.len() == n && row.iter().all(|m| m.shape() == (n, n)))
            });
        if !shape_ok {
            return Err(Error::ShapeMismatch("curvature point components disagree in size".into()));
        }
        let ginv = linalg::inverse(&g, linalg::RANK_TOL)
            .ok_or_else(|| Error::DegenerateMetric("metric is singular".into()))?;
        let r = match convention {
            Convention::Gray => r,
            Convention::Standard => r.scale(&-S::one()),
        }
        .with_symmetry(Symmetry::SymmetricPairs);
        let dd = derivative_pairing(&g, &nabla_j);
        Ok(CurvaturePoint { g, ginv, j, nabla_j, nabla2_j, r, input_convention: convention, dd })
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn signature(&self, tol: f64) -> Result<Signature> {
        frame::gram_check(&self.g, tol)
    }

    /// `(D_x J) y` as a vector.
    pub fn dj(&self, x: usize, y: usize) -> linalg::Vector<S> {
        self.nabla_j[x].column(y).into_owned()
    }

    /// `D_v J` for an arbitrary direction `v`.
    pub fn dj_dir(&self, v: &linalg::Vector<S>) -> Mat<S> {
        let n = self.dim();
        let mut m = Mat::from_element(n, n, S::zero());
        for x in 0..n {
            if v[x].is_zero() {
                continue;
            }
            m += linalg::scale(&self.nabla_j[x], &v[x]);
        }
        m
    }

    /// Curvature in the requested convention.
    pub fn curvature_as(&self, c: Convention) -> Tensor<S> {
        match c {
            Convention::Gray => self.r.clone(),
            Convention::Standard => self.r.scale(&-S::one()),
        }
    }

    /// Largest input magnitude, used to normalize residuals.
    pub fn scale(&self) -> f64 {
        let mut s = self.r.max_abs().max(self.dd.max_abs());
        if let Some(d2) = &self.nabla2_j {
            for row in d2 {
                for m in row {
                    s = s.max(linalg::max_abs(m));
                }
            }
        }
        s
    }

    /// Re-expresses the point in the basis whose vectors are the columns of `b`.
    pub fn change_basis(&self, b: &Mat<S>) -> Result<CurvaturePoint<S>> {
        let n = self.dim();
        let binv = linalg::inverse(b, linalg::RANK_TOL)
            .ok_or_else(|| Error::DegenerateMetric("basis change is singular".into()))?;
        let conj = |m: &Mat<S>| linalg::mat_mul(&linalg::mat_mul(&binv, m), b);
        let comb = |ms: &[Mat<S>], x: usize| {
            let mut acc = Mat::from_element(n, n, S::zero());
            for (a, m) in ms.iter().enumerate() {
                if !b[(a, x)].is_zero() {
                    acc += linalg::scale(m, &b[(a, x)]);
                }
            }
            acc
        };
        let g = linalg::mat_mul(&linalg::mat_mul(&b.transpose(), &self.g), b);
        let j = conj(&self.j);
        let nabla_j: Vec<Mat<S>> = (0..n).map(|x| conj(&comb(&self.nabla_j, x))).collect();
        let nabla2_j = self.nabla2_j.as_ref().map(|d2| {
            (0..n)
                .map(|w| {
                    let by_w: Vec<Mat<S>> = (0..n)
                        .map(|x| {
                            let mut acc = Mat::from_element(n, n, S::zero());
                            for a in 0..n {
                                if b[(a, w)].is_zero() {
                                    continue;
                                }
                                acc += linalg::scale(&comb(&d2[a], x), &b[(a, w)]);
                            }
                            acc
                        })
                        .collect();
                    by_w.iter().map(|m| conj(m)).collect()
                })
                .collect()
        });
        let mut r = self.r.clone();
        for s in 0..4 {
            r = r.transform_slot(s, b);
        }
        CurvaturePoint::new(g, j, nabla_j, nabla2_j, r, Convention::Gray)
    }

    /// Structural residuals of the input: pair symmetries and first Bianchi
    /// of R, and the skewness `(D_X J)Y = -(D_Y J)X` with J-anticommutation.
    pub fn structural_residuals(&self) -> (f64, f64, f64) {
        let n = self.dim();
        let sym = self.r.symmetry_residual();
        let bianchi = self
            .r
            .add(&self.r.permute(&[0, 2, 3, 1]))
            .add(&self.r.permute(&[0, 3, 1, 2]))
            .max_abs();
        let mut skew: f64 = 0.0;
        for x in 0..n {
            for y in 0..n {
                let s = self.dj(x, y) + self.dj(y, x);
                skew = skew.max(s.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max));
            }
            let anti = linalg::mat_mul(&self.nabla_j[x], &self.j) + linalg::mat_mul(&self.j, &self.nabla_j[x]);
            skew = skew.max(linalg::max_abs(&anti));
        }
        (sym, bianchi, skew)
    }
}

/// `dd[w,x,y,z] = g((D_w J)x, (D_y J)z)`.
pub fn derivative_pairing<S: Field>(g: &Mat<S>, nabla_j: &[Mat<S>]) -> Tensor<S> {
    let n = g.nrows();
    let gd: Vec<Mat<S>> = nabla_j.iter().map(|d| linalg::mat_mul(g, d)).collect();
    let pair: Vec<Vec<Mat<S>>> = (0..n)
        .map(|w| (0..n).map(|y| linalg::mat_mul(&nabla_j[w].transpose(), &gd[y])).collect())
        .collect();
    Tensor::from_fn(n, 4, |i| pair[i[0]][i[2]][(i[1], i[3])].clone())
}
