use crate::curvature::{self, Convention, CurvaturePoint};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Vector};
use crate::report::Check;
use crate::scalar::Field;
use crate::tensor::{argmax, Tensor};

use super::HomogeneousModel;

/// Bracket data of a reductive split in the backend scalar, restricted to `m`.
#[derive(Clone, Debug)]
pub struct Reductive<S: Field> {
    pub n: usize,
    /// `cm[x][y]`: the `m`-part of `[e_x, e_y]`.
    pub cm: Vec<Vec<Vector<S>>>,
    /// `ch[x][y][a]`: coefficient of `h_a` in `[e_x, e_y]`.
    pub ch: Vec<Vec<Vec<S>>>,
    /// `ad(h_a)` on `m`.
    pub adh: Vec<Mat<S>>,
}

impl<S: Field> Reductive<S> {
    pub fn new(model: &HomogeneousModel) -> Reductive<S> {
        let n = model.dim_m();
        let c = &model.brackets;
        let cm = (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| Vector::from_fn(n, |k, _| S::from_rational(&c[model.m[x]][model.m[y]][model.m[k]])))
                    .collect()
            })
            .collect();
        let ch = (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| model.h.iter().map(|&a| S::from_rational(&c[model.m[x]][model.m[y]][a])).collect())
                    .collect()
            })
            .collect();
        Reductive { n, cm, ch, adh: model.ad_h() }
    }

    /// `sum_k v_k ops[k]`.
    pub fn combine(ops: &[Mat<S>], v: &Vector<S>) -> Mat<S> {
        let n = ops[0].nrows();
        let mut acc = Mat::from_element(n, n, S::zero());
        for (k, op) in ops.iter().enumerate() {
            if !v[k].is_zero() {
                acc += linalg::scale(op, &v[k]);
            }
        }
        acc
    }
}

/// Levi-Civita operator of an invariant metric: `lam[x]` is the matrix of
/// `Y -> 1/2 [X,Y]_m + U(X,Y)`, with
/// `2 g(U(X,Y), Z) = g([Z,X]_m, Y) + g(X, [Z,Y]_m)`.
pub fn nomizu<S: Field>(red: &Reductive<S>, g: &Mat<S>) -> Result<Vec<Mat<S>>> {
    let n = red.n;
    let ginv = linalg::inverse(g, linalg::RANK_TOL).ok_or_else(|| Error::DegenerateMetric("metric on m".into()))?;
    let half = S::from_ratio(1, 2);
    let mut lam = vec![Mat::from_element(n, n, S::zero()); n];
    let mut e = vec![Vector::from_element(n, S::zero()); n];
    for (i, v) in e.iter_mut().enumerate() {
        v[i] = S::one();
    }
    for x in 0..n {
        for y in 0..n {
            let rhs = Vector::from_fn(n, |z, _| {
                linalg::bilinear(g, &red.cm[z][x], &e[y]) + linalg::bilinear(g, &e[x], &red.cm[z][y])
            });
            let u = linalg::mat_vec(&ginv, &rhs) * half.clone();
            let col = &red.cm[x][y] * half.clone() + u;
            lam[x].set_column(y, &col);
        }
    }
    Ok(lam)
}

/// `R(X,Y) = [L_X, L_Y] - L_{[X,Y]_m} - ad([X,Y]_h)` for a connection given
/// by its invariant operator `L`.
pub fn curvature_endos<S: Field>(red: &Reductive<S>, lam: &[Mat<S>]) -> Vec<Vec<Mat<S>>> {
    let n = red.n;
    (0..n)
        .map(|x| {
            (0..n)
                .map(|y| {
                    let mut m = linalg::commutator(&lam[x], &lam[y]) - Reductive::combine(lam, &red.cm[x][y]);
                    for (a, ad) in red.adh.iter().enumerate() {
                        if !red.ch[x][y][a].is_zero() {
                            m -= linalg::scale(ad, &red.ch[x][y][a]);
                        }
                    }
                    m
                })
                .collect()
        })
        .collect()
}

/// `R(x,y,z,w) = g(R(x,y) e_w, e_z)`.
pub fn curvature_tensor<S: Field>(g: &Mat<S>, endos: &[Vec<Mat<S>>]) -> Tensor<S> {
    let n = g.nrows();
    let ge: Vec<Vec<Mat<S>>> = endos.iter().map(|row| row.iter().map(|m| linalg::mat_mul(g, m)).collect()).collect();
    Tensor::from_fn(n, 4, |i| ge[i[0]][i[1]][(i[2], i[3])].clone())
}

/// Covariant derivative of an invariant endomorphism: `D_x T = [L_x, T]`.
pub fn derivative<S: Field>(lam: &[Mat<S>], t: &Mat<S>) -> Vec<Mat<S>> {
    lam.iter().map(|l| linalg::commutator(l, t)).collect()
}

/// Second derivative of an invariant field: `D^2_{w,x} = [L_w, D_x] - D_{L_w x}`.
pub fn second_derivative<S: Field>(lam: &[Mat<S>], d: &[Mat<S>]) -> Vec<Vec<Mat<S>>> {
    let n = lam.len();
    (0..n)
        .map(|w| {
            (0..n)
                .map(|x| {
                    let lwx = lam[w].column(x).into_owned();
                    linalg::commutator(&lam[w], &d[x]) - Reductive::combine(d, &lwx)
                })
                .collect()
        })
        .collect()
}

/// A model evaluated at the origin.
#[derive(Clone, Debug)]
pub struct HomogeneousPoint<S: Field> {
    pub red: Reductive<S>,
    pub lam: Vec<Mat<S>>,
    pub point: CurvaturePoint<S>,
}

impl<S: Field> HomogeneousPoint<S> {
    pub fn new(model: &HomogeneousModel) -> Result<HomogeneousPoint<S>> {
        let red = Reductive::<S>::new(model);
        let g = linalg::from_rational_mat::<S>(&model.metric);
        let j = linalg::from_rational_mat::<S>(&model.j);
        HomogeneousPoint::from_parts(red, g, j)
    }

    pub fn from_parts(red: Reductive<S>, g: Mat<S>, j: Mat<S>) -> Result<HomogeneousPoint<S>> {
        let lam = nomizu(&red, &g)?;
        let endos = curvature_endos(&red, &lam);
        let r = curvature_tensor(&g, &endos);
        let d = derivative(&lam, &j);
        let d2 = second_derivative(&lam, &d);
        let point = CurvaturePoint::new(g, j, d, Some(d2), r, Convention::Gray)?;
        Ok(HomogeneousPoint { red, lam, point })
    }

    pub fn dim(&self) -> usize {
        self.red.n
    }

    /// Torsion-freeness and metric compatibility of the Nomizu operator.
    pub fn nomizu_checks(&self, tol: f64) -> Vec<Check> {
        let n = self.dim();
        let g = &self.point.g;
        let mut torsion: f64 = 0.0;
        let mut compat: f64 = 0.0;
        for x in 0..n {
            for y in 0..n {
                let t = self.lam[x].column(y) - self.lam[y].column(x) - &self.red.cm[x][y];
                torsion = torsion.max(t.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max));
            }
            let c = linalg::mat_mul(&self.lam[x].transpose(), g) + linalg::mat_mul(g, &self.lam[x]);
            compat = compat.max(linalg::max_abs(&c));
        }
        let scale = self.lam.iter().map(linalg::max_abs).fold(0.0, f64::max);
        vec![
            Check::residual("connection: torsion-free", "L_X Y - L_Y X = [X,Y]_m", torsion, scale, tol, S::is_exact(), None),
            Check::residual("connection: metric", "g(L_X Y, Z) + g(Y, L_X Z) = 0", compat, scale, tol, S::is_exact(), None),
        ]
    }

    /// Curvature of the canonical Hermitian connection computed from its own
    /// invariant operator `L - 1/2 J (D J)`, compared with the closed-form
    /// relation to the Levi-Civita curvature; also checks that J and the
    /// torsion are parallel for it.
    pub fn canonical_route_checks(&self, tol: f64) -> Vec<Check> {
        let n = self.dim();
        let cp = &self.point;
        let half = S::from_ratio(1, 2);
        let lbar: Vec<Mat<S>> = (0..n)
            .map(|x| &self.lam[x] - linalg::scale(&linalg::mat_mul(&cp.j, &cp.nabla_j[x]), &half))
            .collect();
        let rbar_direct = curvature_tensor(&cp.g, &curvature_endos(&self.red, &lbar));
        let rbar_formula = curvature::canonical_curvature(cp);
        let j_par: Vec<Mat<S>> = derivative(&lbar, &cp.j);
        let t_par = second_derivative(&lbar, &cp.nabla_j);
        let worst = |ms: &mut dyn Iterator<Item = &Mat<S>>| ms.map(linalg::max_abs).fold(0.0, f64::max);
        let scale = cp.scale();
        let diff = rbar_direct.sub(&rbar_formula);
        let (raw, idx) = argmax(&diff);
        vec![
            Check::residual(
                "canonical: homogeneous route agrees",
                "curvature of L - 1/2 J(DJ) = R - 1/2 g(DJ,DJ) + 1/4[..]",
                raw,
                scale,
                tol,
                S::is_exact(),
                Some(format!("frame tuple {idx:?}")),
            ),
            Check::residual(
                "canonical: J parallel",
                "Dbar J = 0",
                worst(&mut j_par.iter()),
                scale,
                tol,
                S::is_exact(),
                None,
            ),
            Check::residual(
                "canonical: torsion parallel",
                "Dbar (DJ) = 0",
                worst(&mut t_par.iter().flatten()),
                scale,
                tol,
                S::is_exact(),
                None,
            ),
        ]
    }
}

#[derive(Clone, Debug)]
pub struct NkVerdict<S: Field> {
    pub nearly: bool,
    pub strict: bool,
    pub kaehler: bool,
    /// Normalized max-norm of `(D_X J)Y + (D_Y J)X`.
    pub residual: f64,
    pub witness: Option<(usize, usize)>,
    /// Constant type, for strict six-dimensional models.
    pub alpha: Option<S>,
}

/// Nearly-Kähler polarization over all frame pairs; strictness as
/// injectivity of `X -> D_X J` (an exact rank test).
pub fn nearly_kaehler_check<S: Field>(cp: &CurvaturePoint<S>, tol: f64) -> NkVerdict<S> {
    let n = cp.dim();
    let mut residual: f64 = 0.0;
    let mut witness = None;
    for x in 0..n {
        for y in x..n {
            let s = cp.dj(x, y) + cp.dj(y, x);
            let m = s.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
            if m > residual {
                residual = m;
                witness = Some((x, y));
            }
        }
    }
    let scale = cp.nabla_j.iter().map(linalg::max_abs).fold(0.0, f64::max);
    let norm = if scale > 0.0 { residual / scale } else { residual };
    let nearly = if S::is_exact() { residual == 0.0 } else { norm <= tol };
    let kaehler = if S::is_exact() { scale == 0.0 } else { scale <= tol };
    let stacked = Mat::from_fn(n * n, n, |row, x| cp.nabla_j[x][(row / n, row % n)].clone());
    let strict = !kaehler && linalg::rank(&stacked, 1e-8) == n;
    let alpha = if nearly && strict && n == 6 {
        curvature::constant_type(cp, tol).ok().map(|c| c.alpha)
    } else {
        None
    };
    NkVerdict { nearly, strict, kaehler, residual: norm, witness: if nearly { None } else { witness }, alpha }
}
