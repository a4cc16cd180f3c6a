//! Pseudo-orthonormal frames, signatures and complex-structure checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Vector};
use crate::scalar::Field;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
}

impl Signature {
    pub fn dim(&self) -> usize {
        self.p + self.q
    }
    /// Sign of `p - q`.
    pub fn sign(&self) -> i32 {
        (self.p as i64 - self.q as i64).signum() as i32
    }
    pub fn of_eps(eps: &[i8]) -> Signature {
        let p = eps.iter().filter(|&&e| e > 0).count();
        Signature { p, q: eps.len() - p }
    }
}

impl std::fmt::Display for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PseudoFrame {
    pub dim: usize,
    pub eps: Vec<i8>,
    pub adapted: bool,
}

impl PseudoFrame {
    pub fn new(eps: Vec<i8>, adapted: bool) -> PseudoFrame {
        PseudoFrame { dim: eps.len(), eps, adapted }
    }
    pub fn half(&self) -> usize {
        self.dim / 2
    }
    pub fn signature(&self) -> Signature {
        Signature::of_eps(&self.eps)
    }
    pub fn metric<S: Field>(&self) -> Mat<S> {
        eps_metric(&self.eps)
    }
}

pub fn eps_metric<S: Field>(eps: &[i8]) -> Mat<S> {
    let n = eps.len();
    let mut g = Mat::from_element(n, n, S::zero());
    for (i, &e) in eps.iter().enumerate() {
        g[(i, i)] = S::from_i64(e as i64);
    }
    g
}

/// The block structure `J e_i = e_{i+n}`, `J e_{i+n} = -e_i`; columns are images.
pub fn standard_j<S: Field>(n: usize) -> Mat<S> {
    let mut j = Mat::from_element(2 * n, 2 * n, S::zero());
    for i in 0..n {
        j[(i + n, i)] = S::one();
        j[(i, i + n)] = -S::one();
    }
    j
}

fn check_square<S: Field>(m: &Mat<S>, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "{what} is {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

fn is_null<S: Field>(x: &S, tol: f64) -> bool {
    x.negligible(tol)
}

/// Diagonalizes `g` by congruence. Returns columns `B` with `B^T g B` diagonal
/// and the diagonal entries.
pub fn orthogonal_basis<S: Field>(g: &Mat<S>, tol: f64) -> Result<(Mat<S>, Vec<S>)> {
    check_square(g, "metric")?;
    let n = g.nrows();
    let scale = linalg::max_abs(g).max(1.0);
    let abs_tol = tol * scale;
    let mut cand: Vec<Vector<S>> = (0..n)
        .map(|i| {
            let mut v = Vector::from_element(n, S::zero());
            v[i] = S::one();
            v
        })
        .collect();
    let mut basis = Vec::new();
    let mut norms = Vec::new();
    for step in 0..n {
        let v = pick_pivot(g, &cand, abs_tol).ok_or_else(|| {
            Error::DegenerateMetric(format!("null complement after {step} vectors"))
        })?;
        let nv = linalg::bilinear(g, &v, &v);
        cand = cand
            .into_iter()
            .map(|w| {
                let c = linalg::bilinear(g, &w, &v) / nv.clone();
                w - &v * c
            })
            .collect();
        basis.push(v);
        norms.push(nv);
    }
    let b = Mat::from_columns(&basis);
    Ok((b, norms))
}

/// Chooses a non-null vector in the span of `cand`: the candidate of largest
/// norm, or a sum of two candidates when every candidate is null.
fn pick_pivot<S: Field>(g: &Mat<S>, cand: &[Vector<S>], abs_tol: f64) -> Option<Vector<S>> {
    let mut best: Option<(f64, usize)> = None;
    for (i, w) in cand.iter().enumerate() {
        let nw = linalg::bilinear(g, w, w);
        if is_null(&nw, abs_tol) {
            continue;
        }
        let m = nw.to_f64().abs();
        if best.map_or(true, |(b, _)| m > b) {
            best = Some((m, i));
        }
    }
    if let Some((_, i)) = best {
        return Some(cand[i].clone());
    }
    for i in 0..cand.len() {
        for j in i + 1..cand.len() {
            let gij = linalg::bilinear(g, &cand[i], &cand[j]);
            if !is_null(&gij, abs_tol) {
                return Some(&cand[i] + &cand[j]);
            }
        }
    }
    None
}

/// Signature of a symmetric nondegenerate bilinear form.
pub fn gram_check<S: Field>(g: &Mat<S>, tol: f64) -> Result<Signature> {
    check_square(g, "metric")?;
    let asym = linalg::max_abs_diff(g, &g.transpose());
    if asym > tol * linalg::max_abs(g).max(1.0) {
        return Err(Error::ShapeMismatch(format!("metric not symmetric ({asym:e})")));
    }
    let (_, norms) = orthogonal_basis(g, tol)?;
    let p = norms.iter().filter(|x| x.to_f64() > 0.0).count();
    Ok(Signature { p, q: norms.len() - p })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComplexStructureResidual {
    /// Max-norm of `J^2 + Id`.
    pub square: f64,
    /// Max-norm of `J^T g J - g`.
    pub compat: f64,
}

impl ComplexStructureResidual {
    pub fn max(&self) -> f64 {
        self.square.max(self.compat)
    }
}

pub fn check_complex_structure<S: Field>(j: &Mat<S>, g: &Mat<S>) -> Result<ComplexStructureResidual> {
    check_square(j, "J")?;
    check_square(g, "metric")?;
    if j.nrows() != g.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "J is {0}x{0} but metric is {1}x{1}",
            j.nrows(),
            g.nrows()
        )));
    }
    let n = j.nrows();
    let jj = linalg::mat_mul(j, j) + Mat::<S>::identity(n, n);
    let gj = linalg::mat_mul(&linalg::mat_mul(&j.transpose(), g), j) - g;
    Ok(ComplexStructureResidual {
        square: linalg::max_abs(&jj),
        compat: linalg::max_abs(&gj),
    })
}

#[derive(Clone, Debug)]
pub struct AdaptedFrame<S: Field> {
    pub frame: PseudoFrame,
    /// Columns are the frame vectors in the input coordinates.
    pub basis: Mat<S>,
    /// `g(e_i, e_i)`; equal to `eps` when `normalized`.
    pub norms: Vec<S>,
    /// False when exact square roots of the norms were unavailable; the frame
    /// is then orthogonal and J-adapted but not unit length.
    pub normalized: bool,
}

/// J-adapted pseudo-orthonormal frame: `e_{i+n} = J e_i`.
pub fn adapt_frame<S: Field>(g: &Mat<S>, j: &Mat<S>, tol: f64) -> Result<AdaptedFrame<S>> {
    check_square(g, "metric")?;
    let res = check_complex_structure(j, g)?;
    let scale = linalg::max_abs(g).max(1.0);
    if res.max() > tol * scale {
        return Err(Error::PreconditionFailed(format!(
            "J is not a g-compatible complex structure (residual {:e})",
            res.max()
        )));
    }
    let dim = g.nrows();
    if dim % 2 != 0 {
        return Err(Error::ShapeMismatch(format!("odd dimension {dim}")));
    }
    let n = dim / 2;
    let abs_tol = tol * scale;
    let mut cand: Vec<Vector<S>> = (0..dim)
        .map(|i| {
            let mut v = Vector::from_element(dim, S::zero());
            v[i] = S::one();
            v
        })
        .collect();
    let mut first = Vec::new();
    let mut norms = Vec::new();
    for step in 0..n {
        let v = pick_pivot(g, &cand, abs_tol).ok_or(Error::NullPivotExhausted(step))?;
        let jv = linalg::mat_vec(j, &v);
        let nv = linalg::bilinear(g, &v, &v);
        cand = cand
            .into_iter()
            .map(|w| {
                let a = linalg::bilinear(g, &w, &v) / nv.clone();
                let b = linalg::bilinear(g, &w, &jv) / nv.clone();
                w - &v * a - &jv * b
            })
            .collect();
        first.push(v);
        norms.push(nv);
    }
    let mut normalized = true;
    let mut cols = Vec::with_capacity(dim);
    let mut scaled = Vec::with_capacity(n);
    for (v, nv) in first.iter().zip(&norms) {
        match nv.abs_val().try_sqrt() {
            Some(s) if normalized => scaled.push(v / s),
            _ => {
                normalized = false;
                scaled.push(v.clone());
            }
        }
    }
    if !normalized {
        scaled = first.clone();
    }
    for v in &scaled {
        cols.push(v.clone());
    }
    for v in &scaled {
        cols.push(linalg::mat_vec(j, v));
    }
    let basis = Mat::from_columns(&cols);
    let mut eps: Vec<i8> = norms.iter().map(|x| if x.to_f64() > 0.0 { 1 } else { -1 }).collect();
    eps.extend(eps.clone());
    let all_norms: Vec<S> = if normalized {
        eps.iter().map(|&e| S::from_i64(e as i64)).collect()
    } else {
        norms.iter().chain(norms.iter()).cloned().collect()
    };
    Ok(AdaptedFrame {
        frame: PseudoFrame::new(eps, true),
        basis,
        norms: all_norms,
        normalized,
    })
}

/// A rational isometry of `g` commuting with `J`, as the Cayley transform
/// `(I - K)^{-1}(I + K)` of a random `g`-skew `K` commuting with `J`.
/// Entries of the generator are small integers drawn from `seed`.
pub fn random_isometry<S: Field>(g: &Mat<S>, j: &Mat<S>, seed: u64) -> Result<Mat<S>> {
    use rand::{Rng, SeedableRng};
    let n = g.nrows();
    let ginv = linalg::inverse(g, linalg::RANK_TOL).ok_or_else(|| Error::DegenerateMetric("metric is singular".into()))?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..16 {
        let mut a = Mat::from_element(n, n, S::zero());
        for r in 0..n {
            for c in r + 1..n {
                let v = S::from_ratio(rng.gen_range(-3..=3), 4);
                a[(r, c)] = v.clone();
                a[(c, r)] = -v;
            }
        }
        let k0 = linalg::mat_mul(&ginv, &a);
        let k = (k0.clone() - linalg::mat_mul(j, &linalg::mat_mul(&k0, j))) * S::from_ratio(1, 2);
        let id = Mat::<S>::identity(n, n);
        if let Some(inv) = linalg::inverse(&(id.clone() - k.clone()), linalg::RANK_TOL) {
            return Ok(linalg::mat_mul(&inv, &(id + k)));
        }
    }
    Err(Error::NumericalBreakdown("no invertible Cayley generator found".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    fn diag(v: &[i64]) -> Mat<Rational> {
        let n = v.len();
        let mut g = Mat::from_element(n, n, rat(0, 1));
        for (i, &x) in v.iter().enumerate() {
            g[(i, i)] = rat(x, 1);
        }
        g
    }

    #[test]
    fn cayley_isometry_preserves_structure() {
        let g: Mat<Rational> = eps_metric(&[1, -1, 1, 1, -1, 1]);
        let j = standard_j::<Rational>(3);
        let b = random_isometry(&g, &j, 7).unwrap();
        assert_eq!(linalg::mat_mul(&b.transpose(), &linalg::mat_mul(&g, &b)), g);
        assert_eq!(linalg::mat_mul(&b, &j), linalg::mat_mul(&j, &b));
        assert_ne!(b, Mat::identity(6, 6));
    }

    #[test]
    fn signatures() {
        assert_eq!(gram_check(&diag(&[1, 1, 1, 1]), 0.0).unwrap(), Signature { p: 4, q: 0 });
        assert_eq!(gram_check(&diag(&[1, 1, -1, -1]), 0.0).unwrap(), Signature { p: 2, q: 2 });
        assert!(matches!(gram_check(&diag(&[1, 0]), 0.0), Err(Error::DegenerateMetric(_))));
    }

    #[test]
    fn hyperbolic_plane_needs_combined_pivot() {
        let g = Mat::from_row_slice(2, 2, &[rat(0, 1), rat(1, 1), rat(1, 1), rat(0, 1)]);
        assert_eq!(gram_check(&g, 0.0).unwrap(), Signature { p: 1, q: 1 });
    }

    #[test]
    fn identity_is_not_complex() {
        let j = Mat::<Rational>::identity(4, 4);
        let r = check_complex_structure(&j, &diag(&[1, 1, 1, 1])).unwrap();
        assert_eq!(r.square, 2.0);
    }
}
