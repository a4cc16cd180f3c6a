use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Vector};
use crate::scalar::{rationalize, Field, Rational};

use super::normal::Case10;
use super::ThreeForm;

/// Relative gap below which float eigenvalues are merged.
pub const CLUSTER_GAP: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct Eigen<S: Field> {
    pub value: f64,
    pub imag: f64,
    /// The eigenvalue, when it was certified in the backend.
    pub exact: Option<S>,
    pub algebraic: usize,
    pub geometric: usize,
    /// Columns span the eigenspace (empty for non-real eigenvalues).
    pub basis: Mat<S>,
    /// `g` restricted to the eigenspace.
    pub gram: Mat<S>,
    /// An eigenvector that is null for `g`, when the eigenspace is degenerate.
    pub null_vector: Option<Vector<S>>,
}

#[derive(Clone, Debug)]
pub struct RSpectrum<S: Field> {
    /// Endomorphism with `g(rX,Y) = -tr(A_Y A_X)`, `A_X = (eta(X,.,.))^sharp`.
    pub r: Mat<S>,
    pub eigen: Vec<Eigen<S>>,
    pub diagonalizable: bool,
    pub decomposable: bool,
    /// `max |g(rX,Y) - g(X,rY)|`.
    pub symmetry_residual: f64,
    /// `max |[J, r]|`.
    pub j_residual: f64,
}

impl<S: Field> RSpectrum<S> {
    pub fn scale(&self) -> f64 {
        linalg::max_abs(&self.r).max(1.0)
    }

    /// `(value, multiplicity)` pairs with real values, ascending.
    pub fn multiset(&self) -> Vec<(f64, usize)> {
        self.eigen.iter().map(|e| (e.value, e.algebraic)).collect()
    }

    pub fn kernel_dim(&self) -> usize {
        let s = self.scale();
        self.eigen
            .iter()
            .filter(|e| e.value.abs() <= CLUSTER_GAP * s && e.imag == 0.0)
            .map(|e| e.algebraic)
            .sum()
    }
}

/// `A_X` as matrices, `A_x[k][i] = (eta(e_x, e_i, .))^sharp_k`.
fn a_ops<S: Field>(form: &ThreeForm<S>, ginv: &Mat<S>) -> Vec<Mat<S>> {
    let n = form.dim();
    (0..n)
        .map(|x| {
            Mat::from_fn(n, n, |k, i| {
                let mut acc = S::zero();
                for l in 0..n {
                    if !ginv[(k, l)].is_zero() {
                        acc += ginv[(k, l)].clone() * form.get(x, i, l).clone();
                    }
                }
                acc
            })
        })
        .collect()
}

pub fn r_from_threeform<S: Field>(form: &ThreeForm<S>, tol: f64) -> Result<RSpectrum<S>> {
    let n = form.dim();
    let ginv = linalg::inverse(&form.g, tol).ok_or_else(|| Error::DegenerateMetric("metric is singular".into()))?;
    let a = a_ops(form, &ginv);
    // g(rX,Y) = -tr(A_Y A_X) = sum_ij ginv_ij g(A_X e_i, A_Y e_j)
    let ga: Vec<Mat<S>> = a.iter().map(|ax| linalg::mat_mul(&form.g, ax)).collect();
    let mut form_r = Mat::from_element(n, n, S::zero());
    for x in 0..n {
        for y in x..n {
            let m = linalg::mat_mul(&a[x].transpose(), &ga[y]);
            let mut acc = S::zero();
            for i in 0..n {
                for j in 0..n {
                    if !ginv[(i, j)].is_zero() {
                        acc += ginv[(i, j)].clone() * m[(i, j)].clone();
                    }
                }
            }
            form_r[(x, y)] = acc.clone();
            form_r[(y, x)] = acc;
        }
    }
    let r = linalg::mat_mul(&ginv, &form_r);
    let gr = linalg::mat_mul(&form.g, &r);
    let symmetry_residual = linalg::max_abs_diff(&gr, &gr.transpose());
    let j_residual = linalg::max_abs(&linalg::commutator(&form.j, &r));
    let eigen = eigenstructure(&r, &form.g, tol)?;
    let diagonalizable = eigen.iter().all(|e| e.imag == 0.0) && eigen.iter().map(|e| e.geometric).sum::<usize>() == n;
    let orthogonal = eigen.iter().enumerate().all(|(i, a)| {
        eigen[i + 1..].iter().all(|b| {
            let cross = linalg::mat_mul(&a.basis.transpose(), &linalg::mat_mul(&form.g, &b.basis));
            let size = linalg::max_abs(&a.basis).max(1.0) * linalg::max_abs(&b.basis).max(1.0);
            linalg::max_abs(&cross) <= tol * size * linalg::max_abs(&form.g).max(1.0)
        })
    });
    let decomposable = diagonalizable && orthogonal && eigen.iter().all(|e| e.null_vector.is_none());
    Ok(RSpectrum { r, eigen, diagonalizable, decomposable, symmetry_residual, j_residual })
}

fn clusters(vals: &[(f64, f64)], scale: f64) -> Vec<Vec<(f64, f64)>> {
    let mut sorted = vals.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut out: Vec<Vec<(f64, f64)>> = Vec::new();
    for v in sorted {
        let near = out.iter_mut().find(|c| {
            let (x, y) = c[0];
            (x - v.0).hypot(y - v.1) <= CLUSTER_GAP * scale
        });
        match near {
            Some(c) => c.push(v),
            None => out.push(vec![v]),
        }
    }
    out
}

fn shifted<S: Field>(r: &Mat<S>, lambda: &S) -> Mat<S> {
    let n = r.nrows();
    Mat::from_fn(n, n, |i, j| if i == j { r[(i, j)].clone() - lambda.clone() } else { r[(i, j)].clone() })
}

/// Rational guesses for a float eigenvalue: small denominators first, then
/// the best bounded-denominator approximation.
fn candidates(x: f64, scale: f64) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::new();
    for d in 1..=720i64 {
        let n = (x * d as f64).round();
        if (n / d as f64 - x).abs() <= CLUSTER_GAP * scale && n.abs() < 1e15 {
            let q = Rational::new((n as i64).into(), d.into());
            if !out.contains(&q) {
                out.push(q);
            }
            if out.len() >= 3 {
                break;
            }
        }
    }
    out.extend(rationalize(x).filter(|q| !out.contains(q)));
    out
}

fn power_rank<S: Field>(m: &Mat<S>, k: usize, tol: f64) -> usize {
    let mut p = m.clone();
    for _ in 1..k {
        p = linalg::mat_mul(&p, m);
    }
    linalg::rank(&p, tol)
}

fn eigenstructure<S: Field>(r: &Mat<S>, g: &Mat<S>, tol: f64) -> Result<Vec<Eigen<S>>> {
    let n = r.nrows();
    let rf = linalg::to_f64_mat(r);
    let scale = linalg::max_abs(&rf).max(1.0);
    let vals = linalg::eigenvalues(&rf).ok_or_else(|| Error::NumericalBreakdown("Schur iteration did not converge".into()))?;
    let rank_tol = tol.max(1e-8);
    let mut out = Vec::new();
    for c in clusters(&vals, scale) {
        let k = c.len();
        let re = c.iter().map(|v| v.0).sum::<f64>() / k as f64;
        let im = c.iter().map(|v| v.1).sum::<f64>() / k as f64;
        if im.abs() > CLUSTER_GAP * scale {
            out.push(Eigen {
                value: re,
                imag: im,
                exact: None,
                algebraic: k,
                geometric: 0,
                basis: Mat::from_element(n, 0, S::zero()),
                gram: Mat::from_element(0, 0, S::zero()),
                null_vector: None,
            });
            continue;
        }
        let mut exact = None;
        let mut algebraic = k;
        let mut lambda = S::from_rational(&Rational::from_float(re).unwrap_or_default());
        if S::is_exact() {
            for q in candidates(re, scale) {
                let cand = S::from_rational(&q);
                let m = shifted(r, &cand);
                if linalg::rank(&m, 0.0) < n {
                    algebraic = n - power_rank(&m, n, 0.0);
                    exact = Some(cand.clone());
                    lambda = cand;
                    break;
                }
            }
        }
        let basis = if S::is_exact() && exact.is_none() {
            // irrational eigenvalue: eigenvectors from the float matrix
            let lf = re;
            let kf = linalg::kernel(&shifted(&rf, &lf), rank_tol);
            kf.map(|x| S::from_rational(&Rational::from_float(x).unwrap_or_default()))
        } else {
            linalg::kernel(&shifted(r, &lambda), rank_tol)
        };
        let rank_tol = if S::is_exact() && exact.is_none() { 1e-8 } else { rank_tol };
        let gram = linalg::mat_mul(&basis.transpose(), &linalg::mat_mul(g, &basis));
        let null_vector = if basis.ncols() > 0 && linalg::rank(&gram, rank_tol) < basis.ncols() {
            let kv = linalg::kernel(&gram, rank_tol);
            Some(linalg::mat_vec(&basis, &kv.column(0).into_owned()))
        } else {
            None
        };
        out.push(Eigen {
            value: exact.as_ref().map(|x: &S| x.to_f64()).unwrap_or(re),
            imag: 0.0,
            exact,
            algebraic,
            geometric: basis.ncols(),
            basis,
            gram,
            null_vector,
        });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dim10Class {
    SplitsOffKaehler,
    TwistorialCandidate,
    NotDecomposable,
    Other,
}

impl std::fmt::Display for Dim10Class {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Dim10Class::SplitsOffKaehler => "splits-off-Kähler",
            Dim10Class::TwistorialCandidate => "twistorial-candidate",
            Dim10Class::NotDecomposable => "not-decomposable",
            Dim10Class::Other => "other",
        };
        write!(f, "{s}")
    }
}

/// Reads off the geometric type of a dimension-10 form from its r-spectrum:
/// a 4-dimensional kernel with a single 6-dimensional eigenspace splits off
/// a Kähler factor; a trivial kernel with eigenvalues `a+b` (twice), `a`, `b`
/// (four times each) is a twistor candidate.
pub fn classify_dim10<S: Field>(sp: &RSpectrum<S>) -> Dim10Class {
    if !sp.decomposable {
        return Dim10Class::NotDecomposable;
    }
    let s = sp.scale();
    let close = |a: f64, b: f64| (a - b).abs() <= CLUSTER_GAP * s;
    let kernel = sp.kernel_dim();
    let rest: Vec<(f64, usize)> = sp.multiset().into_iter().filter(|(v, _)| !close(*v, 0.0)).collect();
    if kernel == 4 && rest.len() == 1 && rest[0].1 == 6 {
        return Dim10Class::SplitsOffKaehler;
    }
    if kernel == 0 {
        let mut by_mult = rest.clone();
        by_mult.sort_by_key(|x| x.1);
        match by_mult.as_slice() {
            [(top, 2), (a, 4), (b, 4)] if close(*top, a + b) => return Dim10Class::TwistorialCandidate,
            [(top, 2), (a, 8)] if close(*top, 2.0 * a) => return Dim10Class::TwistorialCandidate,
            _ => {}
        }
    }
    Dim10Class::Other
}

/// The r-matrix of a dimension-10 normal form as written in closed form,
/// block-diagonal on `e_1..e_5` and `Je_1..Je_5`.
pub fn stated_r_matrix<S: Field>(case: Case10, alpha: &S, beta: &S, eps: &[i8]) -> Mat<S> {
    let four = S::from_i64(4);
    let a2 = alpha.clone() * alpha.clone();
    let b2 = beta.clone() * beta.clone();
    let e = |i: usize| S::from_i64(eps[i] as i64);
    let mut c = Mat::from_element(5, 5, S::zero());
    match case {
        Case10::First => {
            c[(0, 0)] = four.clone() * (a2.clone() + b2.clone());
            c[(1, 1)] = four.clone() * a2.clone();
            c[(2, 2)] = four.clone() * a2;
            c[(3, 3)] = four.clone() * b2.clone();
            c[(4, 4)] = four * b2;
        }
        Case10::Second => {
            let t = b2.clone() * e(3) * e(4);
            c[(0, 0)] = four.clone() * (a2.clone() + t.clone());
            c[(0, 2)] = four.clone() * t.clone();
            c[(2, 0)] = four.clone() * t.clone();
            c[(1, 1)] = four.clone() * a2.clone();
            c[(2, 2)] = four.clone() * (a2 + t);
            c[(4, 4)] = four * b2 * (S::from_i64(2) * e(0) * e(3) - S::one());
        }
    }
    let mut r = Mat::from_element(10, 10, S::zero());
    for i in 0..5 {
        for j in 0..5 {
            r[(i, j)] = c[(i, j)].clone();
            r[(i + 5, j + 5)] = c[(i, j)].clone();
        }
    }
    r
}
