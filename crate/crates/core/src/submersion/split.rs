use crate::error::{Error, Result};
use crate::homogeneous::{nomizu, HomogeneousModel, HomogeneousPoint, Reductive};
use crate::linalg::{self, Mat, Vector};
use crate::report::Check;
use crate::scalar::Field;

/// Orthogonal splitting `m = H + V` of a homogeneous point along coordinate
/// index sets, with the variation parameter relative to the model metric.
#[derive(Clone, Debug)]
pub struct SubmersionSplit<S: Field> {
    pub point: HomogeneousPoint<S>,
    pub h: Vec<usize>,
    pub v: Vec<usize>,
    pub ph: Mat<S>,
    pub pv: Mat<S>,
    pub t: S,
}

/// O'Neill tensors as operators: `a[e]` is `F -> A_{e} F`, `t[e]` is `F -> T_{e} F`.
#[derive(Clone, Debug)]
pub struct OneillTensors<S: Field> {
    pub a: Vec<Mat<S>>,
    pub t: Vec<Mat<S>>,
}

impl<S: Field> OneillTensors<S> {
    pub fn a_vec(&self, e: usize, f: usize) -> Vector<S> {
        self.a[e].column(f).into_owned()
    }

    pub fn t_vec(&self, e: usize, f: usize) -> Vector<S> {
        self.t[e].column(f).into_owned()
    }

    pub fn scale(&self) -> f64 {
        self.a.iter().chain(self.t.iter()).map(linalg::max_abs).fold(0.0, f64::max)
    }
}

pub(crate) fn projector<S: Field>(n: usize, idx: &[usize]) -> Mat<S> {
    let mut p = Mat::from_element(n, n, S::zero());
    for &i in idx {
        p[(i, i)] = S::one();
    }
    p
}

pub(crate) fn unit<S: Field>(n: usize, i: usize) -> Vector<S> {
    let mut v = Vector::from_element(n, S::zero());
    v[i] = S::one();
    v
}

pub(crate) fn vec_max<S: Field>(v: &Vector<S>) -> f64 {
    v.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
}

/// Tracks the worst residual over a family of comparisons and where it occurred.
pub(crate) struct Worst {
    pub raw: f64,
    pub at: Option<String>,
}

impl Worst {
    pub fn new() -> Worst {
        Worst { raw: 0.0, at: None }
    }

    pub fn see(&mut self, r: f64, at: impl FnOnce() -> String) {
        if r > self.raw {
            self.raw = r;
            self.at = Some(at());
        }
    }

    pub fn check(self, name: &str, anchor: &str, scale: f64, tol: f64, exact: bool) -> Check {
        Check::residual(name, anchor, self.raw, scale, tol, exact, self.at)
    }
}

impl<S: Field> SubmersionSplit<S> {
    pub fn new(point: HomogeneousPoint<S>, h: Vec<usize>, v: Vec<usize>) -> Result<SubmersionSplit<S>> {
        let n = point.dim();
        let mut seen = vec![false; n];
        for &i in h.iter().chain(v.iter()) {
            if i >= n || seen[i] {
                return Err(Error::ShapeMismatch(format!("split index {i} out of range or repeated")));
            }
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) || h.is_empty() || v.is_empty() {
            return Err(Error::ShapeMismatch("horizontal and vertical sets must partition the frame".into()));
        }
        let ph = projector(n, &h);
        let pv = projector(n, &v);
        Ok(SubmersionSplit { point, h, v, ph, pv, t: S::one() })
    }

    /// The split declared in the model file, at the model metric.
    pub fn from_model(model: &HomogeneousModel) -> Result<SubmersionSplit<S>> {
        let (h, v) = model
            .hv
            .clone()
            .ok_or_else(|| Error::MissingField(format!("model {} declares no horizontal/vertical split", model.name)))?;
        SubmersionSplit::new(HomogeneousPoint::new(model)?, h, v)
    }

    pub fn dim(&self) -> usize {
        self.point.dim()
    }

    pub fn g(&self) -> &Mat<S> {
        &self.point.point.g
    }

    pub fn j(&self) -> &Mat<S> {
        &self.point.point.j
    }

    pub fn lam(&self) -> &[Mat<S>] {
        &self.point.lam
    }

    pub fn red(&self) -> &Reductive<S> {
        &self.point.red
    }

    /// Same split with a different complex structure on the same metric.
    pub fn with_j(&self, j: Mat<S>) -> Result<SubmersionSplit<S>> {
        let point = HomogeneousPoint::from_parts(self.red().clone(), self.g().clone(), j)?;
        Ok(SubmersionSplit { point, ..self.clone() })
    }

    /// Projector identities, orthogonality, J-invariance and ad(h)-invariance.
    pub fn validate(&self, tol: f64) -> Vec<Check> {
        let n = self.dim();
        let exact = S::is_exact();
        let id = Mat::<S>::identity(n, n);
        let g = self.g();
        let j = self.j();
        let complement = linalg::max_abs(&(&self.ph + &self.pv - &id))
            .max(linalg::max_abs(&linalg::mat_mul(&self.ph, &self.pv)));
        let gsym = linalg::max_abs(&(linalg::mat_mul(&self.pv.transpose(), g) - linalg::mat_mul(g, &self.pv)));
        let jinv = linalg::max_abs(&linalg::commutator(j, &self.ph));
        let adinv = self
            .red()
            .adh
            .iter()
            .map(|ad| linalg::max_abs(&linalg::commutator(ad, &self.pv)))
            .fold(0.0, f64::max);
        let gs = linalg::max_abs(g).max(1.0);
        vec![
            Check::residual("split: complementary projectors", "pi_H + pi_V = Id, pi_H pi_V = 0", complement, 1.0, tol, exact, None),
            Check::residual("split: orthogonal", "g(pi_V X, Y) = g(X, pi_V Y)", gsym, gs, tol, exact, None),
            Check::residual("split: J-invariant", "[J, pi_H] = 0", jinv, 1.0, tol, exact, None),
            Check::residual("split: isotropy-invariant", "[ad(h), pi_V] = 0", adinv, 1.0, tol, exact, None),
        ]
    }

    /// Fails with the first violated split property.
    pub fn require_valid(&self, tol: f64) -> Result<()> {
        match self.validate(tol).into_iter().find(|c| !c.pass) {
            Some(c) => Err(Error::PreconditionFailed(format!("{} (residual {:e})", c.name, c.residual))),
            None => Ok(()),
        }
    }

    /// `T_E F = pi_H (D_{pi_V E} pi_V) pi_V F + pi_V (D_{pi_V E} pi_H) pi_H F`
    /// and `A` the same with `pi_H E` in the direction slot, using
    /// `D_x pi = [L_x, pi]`.
    pub fn oneill(&self) -> OneillTensors<S> {
        let n = self.dim();
        let lam = self.lam();
        let build = |p_dir: &Mat<S>| -> Vec<Mat<S>> {
            (0..n)
                .map(|e| {
                    let dir = p_dir.column(e).into_owned();
                    let l = Reductive::combine(lam, &dir);
                    let dv = linalg::commutator(&l, &self.pv);
                    let dh = linalg::commutator(&l, &self.ph);
                    linalg::mat_mul(&linalg::mat_mul(&self.ph, &dv), &self.pv)
                        + linalg::mat_mul(&linalg::mat_mul(&self.pv, &dh), &self.ph)
                })
                .collect()
        };
        OneillTensors { a: build(&self.ph), t: build(&self.pv) }
    }

    /// Canonical variation: scales the vertical part of the metric by `t`
    /// and recomputes the Levi-Civita data from the same brackets.
    pub fn canonical_variation(&self, t: &S) -> Result<SubmersionSplit<S>> {
        if t.is_zero() {
            return Err(Error::ZeroParameter);
        }
        let g = self.g();
        let gt = linalg::mat_mul(&linalg::mat_mul(&self.ph.transpose(), g), &self.ph)
            + linalg::scale(&linalg::mat_mul(&linalg::mat_mul(&self.pv.transpose(), g), &self.pv), t);
        let point = HomogeneousPoint::from_parts(self.red().clone(), gt, self.j().clone())?;
        Ok(SubmersionSplit { point, t: self.t.clone() * t.clone(), ..self.clone() })
    }
}

/// Alternation of `A` on `H` and the bracket relation `pi_V [X,Y] = 2 A_X Y`.
pub fn oneill_checks<S: Field>(split: &SubmersionSplit<S>, ot: &OneillTensors<S>, tol: f64) -> Vec<Check> {
    let g = split.g();
    let exact = S::is_exact();
    let scale = ot.scale();
    let mut alt = Worst::new();
    let mut skew = Worst::new();
    let mut lie = Worst::new();
    for &x in &split.h {
        for &y in &split.h {
            alt.see(vec_max(&(ot.a_vec(x, y) + ot.a_vec(y, x))), || format!("X=e{x}, Y=e{y}"));
            let br = linalg::mat_vec(&split.pv, &split.red().cm[x][y]);
            lie.see(vec_max(&(br - ot.a_vec(x, y) * S::from_i64(2))), || format!("X=e{x}, Y=e{y}"));
            for &u in &split.v {
                let l = linalg::bilinear(g, &ot.a_vec(x, y), &unit(split.dim(), u));
                let r = linalg::bilinear(g, &ot.a_vec(x, u), &unit(split.dim(), y));
                skew.see((l + r).to_f64().abs(), || format!("X=e{x}, Y=e{y}, U=e{u}"));
            }
        }
    }
    vec![
        alt.check("O'Neill: A alternating on H", "A_X Y = -A_Y X", scale, tol, exact),
        skew.check("O'Neill: A skew across H and V", "g(A_X Y, U) = -g(A_X U, Y)", scale, tol, exact),
        lie.check("O'Neill: vertical bracket", "pi_V [X,Y] = 2 A_X Y", scale, tol, exact),
    ]
}

/// Scaling laws of the O'Neill tensors under the canonical variation and
/// the connection differences, comparing `varied` (parameter `t` relative
/// to `base`) with `base`.
pub fn variation_checks<S: Field>(base: &SubmersionSplit<S>, varied: &SubmersionSplit<S>, tol: f64) -> Vec<Check> {
    let n = base.dim();
    let t = varied.t.clone() / base.t.clone();
    let tm1 = t.clone() - S::one();
    let exact = S::is_exact();
    let o = base.oneill();
    let ot = varied.oneill();
    let scale = o.scale().max(ot.scale()).max(1.0);
    let (lam, lamt) = (base.lam(), varied.lam());
    let diff: Vec<Mat<S>> = (0..n).map(|e| &lamt[e] - &lam[e]).collect();
    let mut w = [Worst::new(), Worst::new(), Worst::new(), Worst::new(), Worst::new(), Worst::new(), Worst::new(), Worst::new()];
    for &x in &base.h {
        for &y in &base.h {
            w[0].see(vec_max(&(ot.a_vec(x, y) - o.a_vec(x, y))), || format!("X=e{x}, Y=e{y}"));
            let d = diff[x].column(y).into_owned();
            w[6].see(vec_max(&linalg::mat_vec(&base.ph, &d)), || format!("X=e{x}, Y=e{y}"));
        }
        for &u in &base.v {
            w[1].see(vec_max(&(ot.a_vec(x, u) - o.a_vec(x, u) * t.clone())), || format!("X=e{x}, U=e{u}"));
            let d = diff[u].column(x).into_owned();
            w[4].see(vec_max(&(linalg::mat_vec(&base.ph, &d) - o.a_vec(x, u) * tm1.clone())), || format!("V=e{u}, X=e{x}"));
            let d = diff[x].column(u).into_owned();
            w[7].see(vec_max(&linalg::mat_vec(&base.pv, &d)), || format!("X=e{x}, V=e{u}"));
        }
    }
    for &u in &base.v {
        for &v in &base.v {
            w[2].see(vec_max(&(ot.t_vec(u, v) - o.t_vec(u, v) * t.clone())), || format!("U=e{u}, V=e{v}"));
            let d = diff[u].column(v).into_owned();
            w[5].see(vec_max(&(d - o.t_vec(u, v) * tm1.clone())), || format!("U=e{u}, V=e{v}"));
        }
        for &x in &base.h {
            w[3].see(vec_max(&(ot.t_vec(u, x) - o.t_vec(u, x))), || format!("U=e{u}, X=e{x}"));
        }
    }
    let [a_hh, a_hv, t_vv, t_vh, d_vh, d_vv, d_hh, d_hv] = w;
    vec![
        a_hh.check("variation: A on H unchanged", "A^t_X Y = A_X Y", scale, tol, exact),
        a_hv.check("variation: A on V scales", "A^t_X U = t A_X U", scale, tol, exact),
        t_vv.check("variation: T on V scales", "T^t_U V = t T_U V", scale, tol, exact),
        t_vh.check("variation: T on H unchanged", "T^t_U X = T_U X", scale, tol, exact),
        d_vh.check("variation: mixed connection difference", "pi_H(D^t_V X - D_V X) = (t-1) A_X V", scale, tol, exact),
        d_vv.check("variation: vertical connection difference", "D^t_U V = D_U V + (t-1) T_U V", scale, tol, exact),
        d_hh.check("variation: horizontal part unchanged", "pi_H(D^t_X Y) = pi_H(D_X Y)", scale, tol, exact),
        d_hv.check("variation: vertical part along H unchanged", "pi_V(D^t_X V) = pi_V(D_X V)", scale, tol, exact),
    ]
}

/// Conditions on the O'Neill data and `DJ` under which a submersion with
/// Kähler total space is compatible with J.
pub fn kahler_submersion_conditions<S: Field>(split: &SubmersionSplit<S>, tol: f64) -> Vec<Check> {
    let cp = &split.point.point;
    let j = &cp.j;
    let exact = S::is_exact();
    let o = split.oneill();
    let scale = o.scale().max(cp.nabla_j.iter().map(linalg::max_abs).fold(0.0, f64::max)).max(1.0);
    let mut w1 = Worst::new();
    let mut w2 = Worst::new();
    let mut w3 = Worst::new();
    let mut w4 = Worst::new();
    for &x in &split.h {
        for &y in &split.h {
            w1.see(vec_max(&linalg::mat_vec(&split.ph, &cp.dj(x, y))), || format!("X=e{x}, Y=e{y}"));
        }
        for &v in &split.v {
            w1.see(vec_max(&linalg::mat_vec(&split.ph, &cp.dj(v, x))), || format!("V=e{v}, X=e{x}"));
            w2.see(vec_max(&linalg::mat_vec(&split.pv, &cp.dj(x, v))), || format!("X=e{x}, V=e{v}"));
        }
        w3.see(linalg::max_abs(&linalg::commutator(&o.a[x], j)), || format!("X=e{x}"));
    }
    for &u in &split.v {
        for &v in &split.v {
            w2.see(vec_max(&linalg::mat_vec(&split.pv, &cp.dj(u, v))), || format!("U=e{u}, V=e{v}"));
        }
        w4.see(linalg::max_abs(&linalg::commutator(&o.t[u], j)), || format!("V=e{u}"));
    }
    vec![
        w1.check("Kähler submersion: horizontal DJ", "pi_H((D_X J)Y) = pi_H((D_V J)X) = 0", scale, tol, exact),
        w2.check("Kähler submersion: vertical DJ", "(D^V_U J)V = pi_V((D_X J)V) = 0", scale, tol, exact),
        w3.check("Kähler submersion: A commutes with J", "A_X J = J A_X", scale, tol, exact),
        w4.check("Kähler submersion: T commutes with J", "T_V J = J T_V", scale, tol, exact),
    ]
}

/// Levi-Civita operators of the variation with parameter `t`, assembled from
/// the base connection and the base O'Neill tensors.
pub fn assembled_variation<S: Field>(split: &SubmersionSplit<S>, t: &S) -> Vec<Mat<S>> {
    let n = split.dim();
    let lam = split.lam();
    let o = split.oneill();
    let tm1 = t.clone() - S::one();
    let (ph, pv) = (&split.ph, &split.pv);
    (0..n)
        .map(|e| {
            let mut m = Mat::from_element(n, n, S::zero());
            if split.h.contains(&e) {
                m += linalg::mat_mul(&lam[e], ph);
                m += linalg::mat_mul(&linalg::mat_mul(pv, &lam[e]), pv);
                m += linalg::scale(&linalg::mat_mul(&linalg::mat_mul(ph, &lam[e]), pv), t);
            } else {
                m += lam[e].clone();
                for &x in &split.h {
                    let col = m.column(x) + o.a_vec(x, e) * tm1.clone();
                    m.set_column(x, &col);
                }
                for &v in &split.v {
                    let col = m.column(v) + o.t_vec(e, v) * tm1.clone();
                    m.set_column(v, &col);
                }
            }
            m
        })
        .collect()
}

/// Compares the assembled variation with the Levi-Civita operator computed
/// directly from the varied metric.
pub fn assembled_variation_check<S: Field>(split: &SubmersionSplit<S>, t: &S, tol: f64) -> Result<Check> {
    let asm = assembled_variation(split, t);
    let varied = split.canonical_variation(t)?;
    let direct = nomizu(split.red(), varied.g())?;
    let mut w = Worst::new();
    for (e, (a, d)) in asm.iter().zip(direct.iter()).enumerate() {
        w.see(linalg::max_abs_diff(a, d), || format!("direction e{e}"));
    }
    let scale = direct.iter().map(linalg::max_abs).fold(0.0, f64::max);
    Ok(w.check("variation: assembled connection", "Levi-Civita of g_t from base data and A, T", scale, tol, S::is_exact()))
}
