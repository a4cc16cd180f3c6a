use crate::error::{Error, Result};
use crate::frame::Signature;
use crate::linalg::{self, Mat};
use crate::report::Check;
use crate::scalar::Field;
use crate::tensor::{argmax, Tensor};

use super::CurvaturePoint;

fn witness(idx: &[usize]) -> String {
    format!("frame tuple {idx:?}")
}

/// Residual check for a tensor that should vanish.
pub fn vanishing<S: Field>(name: &str, anchor: &str, t: &Tensor<S>, scale: f64, tol: f64) -> Check {
    let (raw, idx) = argmax(t);
    Check::residual(name, anchor, raw, scale, tol, S::is_exact(), Some(witness(&idx)))
}

fn vanishing_mat<S: Field>(name: &str, anchor: &str, m: &Mat<S>, scale: f64, tol: f64) -> Check {
    vanishing(name, anchor, &Tensor::from_matrix(m), scale, tol)
}

/// Applies J in each listed slot.
pub fn with_j<S: Field>(t: &Tensor<S>, j: &Mat<S>, slots: &[usize]) -> Tensor<S> {
    slots.iter().fold(t.clone(), |acc, &s| acc.transform_slot(s, j))
}

/// Cyclic sum over slots 1, 2, 3 of an order-4 tensor.
pub fn cyclic_123<S: Field>(t: &Tensor<S>) -> Tensor<S> {
    t.add(&t.permute(&[0, 2, 3, 1])).add(&t.permute(&[0, 3, 1, 2]))
}

pub fn gray_identities<S: Field>(cp: &CurvaturePoint<S>, tol: f64) -> Vec<Check> {
    let r = &cp.r;
    let j = &cp.j;
    let scale = cp.scale();
    let first = r.sub(&with_j(r, j, &[2, 3])).sub(&cp.dd);
    // Polarize the identity that is quadratic in W over the pair (slot 0, slot 2).
    let j13 = with_j(r, j, &[1, 3]);
    let f = r
        .add(&j13)
        .sub(&j13.permute(&[0, 2, 1, 3]))
        .sub(&cp.dd.scale(&S::from_i64(2)));
    let second = f.add(&f.permute(&[2, 1, 0, 3]));
    let third = r.sub(&with_j(r, j, &[0, 1, 2, 3]));
    vec![
        vanishing(
            "gray: first identity",
            "R(W,X,Y,Z) - R(W,X,JY,JZ) = g((D_W J)X, (D_Y J)Z)",
            &first,
            scale,
            tol,
        ),
        vanishing(
            "gray: second identity",
            "R(W,X,W,Z) + R(W,JX,W,JZ) - R(W,JW,X,JZ) = 2 g((D_W J)X, (D_W J)Z)",
            &second,
            scale,
            tol,
        ),
        vanishing("gray: type condition", "R(W,X,Y,Z) = R(JW,JX,JY,JZ)", &third, scale, tol),
    ]
}

/// Ricci data as bilinear forms `F[x][y] = F(e_x, e_y)`.
#[derive(Clone, Debug)]
pub struct RicciPair<S: Field> {
    pub ric: Mat<S>,
    pub ric_star: Mat<S>,
    /// `Ric - Ric*` from the curvature.
    pub r: Mat<S>,
    /// `sum eps_i g((D_X J)e_i, (D_Y J)e_i)`.
    pub r_from_derivative: Mat<S>,
}

impl<S: Field> RicciPair<S> {
    /// Endomorphism `A` with `g(AX, Y) = F(X, Y)` for a symmetric form.
    pub fn endo(ginv: &Mat<S>, form: &Mat<S>) -> Mat<S> {
        linalg::mat_mul(ginv, &form.transpose())
    }
}

pub fn ricci_pair<S: Field>(cp: &CurvaturePoint<S>) -> RicciPair<S> {
    let n = cp.dim();
    let ric = cp.r.permute(&[0, 2, 1, 3]).contract(2, 3, &cp.ginv).expect("order 4").to_matrix();
    // R(X, JY, a, J b) traced over a, b
    let rj = with_j(&cp.r, &cp.j, &[1, 3]);
    let half = S::from_ratio(1, 2);
    let ric_star = rj.contract(2, 3, &cp.ginv).expect("order 4").to_matrix().map(|x| x * half.clone());
    let r = &ric - &ric_star;
    let r_from_derivative = cp.dd.permute(&[0, 2, 1, 3]).contract(2, 3, &cp.ginv).expect("order 4").to_matrix();
    debug_assert_eq!(ric.nrows(), n);
    RicciPair { ric, ric_star, r, r_from_derivative }
}

pub fn ricci_checks<S: Field>(cp: &CurvaturePoint<S>, rp: &RicciPair<S>, tol: f64) -> Vec<Check> {
    let scale = cp.scale();
    let r_endo = RicciPair::endo(&cp.ginv, &rp.r);
    let ric_endo = RicciPair::endo(&cp.ginv, &rp.ric);
    let star_endo = RicciPair::endo(&cp.ginv, &rp.ric_star);
    vec![
        vanishing_mat(
            "ricci: r from curvature = r from derivative",
            "Ric - Ric* = sum eps_i g((D_X J)e_i, (D_Y J)e_i)",
            &(&rp.r - &rp.r_from_derivative),
            scale,
            tol,
        ),
        vanishing_mat("ricci: [J, r] = 0", "[J, r] = 0", &linalg::commutator(&cp.j, &r_endo), scale, tol),
        vanishing_mat("ricci: r symmetric", "g(rX,Y) = g(X,rY)", &(&rp.r - rp.r.transpose()), scale, tol),
        vanishing_mat("ricci: [J, Ric] = 0", "[J, Ric] = 0", &linalg::commutator(&cp.j, &ric_endo), scale, tol),
        vanishing_mat("ricci: [J, Ric*] = 0", "[J, Ric*] = 0", &linalg::commutator(&cp.j, &star_endo), scale, tol),
    ]
}

/// Curvature of the canonical Hermitian connection `D - 1/2 J (D J)`.
pub fn canonical_curvature<S: Field>(cp: &CurvaturePoint<S>) -> Tensor<S> {
    let quarter = S::from_ratio(1, 4);
    let half = S::from_ratio(1, 2);
    let dd = &cp.dd;
    // g((D_W J)Y, (D_X J)Z) - g((D_W J)Z, (D_X J)Y) at (w,x,y,z)
    let a = dd.permute(&[0, 2, 1, 3]);
    let b = dd.permute(&[0, 3, 1, 2]);
    cp.r.sub(&dd.scale(&half)).add(&a.sub(&b).scale(&quarter))
}

pub fn canonical_checks<S: Field>(cp: &CurvaturePoint<S>, rbar: &Tensor<S>, tol: f64) -> Vec<Check> {
    let scale = cp.scale();
    let j = &cp.j;
    let r = &cp.r;
    let quarter = S::from_ratio(1, 4);
    let rjj = with_j(r, j, &[2, 3]);
    let alt = r.scale(&S::from_i64(3)).add(&rjj).add(&cyclic_123(&rjj)).scale(&quarter);
    // R̄(W,JW,Y,JZ) relation, polarized over the pair of W slots.
    let rbar_p = with_j(rbar, j, &[1, 3]);
    let r_p = with_j(r, j, &[1, 3]);
    let r_wywz = r.permute(&[0, 2, 1, 3]);
    let r_wjywjz = with_j(r, j, &[1, 3]).permute(&[0, 2, 1, 3]);
    let prime = rbar_p
        .scale(&S::from_i64(4))
        .sub(&r_p.scale(&S::from_i64(5)))
        .add(&r_wywz)
        .add(&r_wjywjz);
    // rbar_p(w,v,y,z) = R̄(w,Jv,y,Jz); the identity is quadratic in the
    // pair (w,v) once v = w, so symmetrize over slots 0 and 1.
    let prime_sym = prime.add(&prime.permute(&[1, 0, 2, 3]));
    let bianchi = cyclic_123(rbar).add(&cyclic_123(&cp.dd));
    vec![
        vanishing(
            "canonical: two forms of the relation agree",
            "R - 1/2 g(DJ,DJ) + 1/4[..] = 1/4[3R + R(W,X,JY,JZ) + cyclic_XYZ R(W,X,JY,JZ)]",
            &rbar.sub(&alt),
            scale,
            tol,
        ),
        vanishing(
            "canonical: J-pair relation",
            "4 Rbar(W,JW,Y,JZ) = 5R(W,JW,Y,JZ) - R(W,Y,W,Z) - R(W,JY,W,JZ)",
            &prime_sym,
            scale,
            tol,
        ),
        vanishing(
            "canonical: pair symmetry",
            "Rbar(W,X,Y,Z) = Rbar(Y,Z,W,X)",
            &rbar.sub(&rbar.permute(&[2, 3, 0, 1])),
            scale,
            tol,
        ),
        vanishing(
            "canonical: antisymmetry in the first pair",
            "Rbar(W,X,Y,Z) = -Rbar(X,W,Y,Z)",
            &rbar.add(&rbar.permute(&[1, 0, 2, 3])),
            scale,
            tol,
        ),
        vanishing(
            "canonical: antisymmetry in the second pair",
            "Rbar(W,X,Y,Z) = -Rbar(W,X,Z,Y)",
            &rbar.add(&rbar.permute(&[0, 1, 3, 2])),
            scale,
            tol,
        ),
        vanishing(
            "canonical: J-invariance of the second pair",
            "Rbar(W,X,Y,Z) = Rbar(W,X,JY,JZ)",
            &rbar.sub(&with_j(rbar, j, &[2, 3])),
            scale,
            tol,
        ),
        vanishing(
            "canonical: J-invariance of the first pair",
            "Rbar(W,X,Y,Z) = Rbar(JW,JX,Y,Z)",
            &rbar.sub(&with_j(rbar, j, &[0, 1])),
            scale,
            tol,
        ),
        vanishing(
            "canonical: first Bianchi with torsion",
            "cyclic_XYZ Rbar(W,X,Y,Z) = -cyclic_XYZ g((D_W J)X, (D_Y J)Z)",
            &bianchi,
            scale,
            tol,
        ),
    ]
}

/// `sum r^{ab} [R(W,a,X,b) - 5 R(W,a,JX,Jb)]` as a form in `(W, X)`.
pub fn thm_curv_form<S: Field>(cp: &CurvaturePoint<S>, rp: &RicciPair<S>) -> Mat<S> {
    let rup = linalg::mat_mul(&linalg::mat_mul(&cp.ginv, &rp.r), &cp.ginv);
    let rj = with_j(&cp.r, &cp.j, &[2, 3]).scale(&S::from_i64(5));
    let t = cp.r.sub(&rj).permute(&[0, 2, 1, 3]);
    t.contract(2, 3, &rup).expect("order 4").to_matrix()
}

pub fn thm_curv_identity<S: Field>(cp: &CurvaturePoint<S>, rp: &RicciPair<S>, tol: f64) -> Check {
    let form = thm_curv_form(cp, rp);
    let scale = cp.scale().powi(2);
    vanishing_mat(
        "curvature theorem identity",
        "sum eps_i eps_j g(r e_i, e_j)[R(W,e_i,X,e_j) - 5 R(W,e_i,JX,Je_j)] = 0",
        &form,
        scale,
        tol,
    )
}

pub fn second_derivative_identities<S: Field>(cp: &CurvaturePoint<S>, rp: &RicciPair<S>, tol: f64) -> Vec<Check> {
    const A1: &str = "2 g(D^2_{W,X}(J)Y, Z) = -cyclic_XYZ g((D_W J)X, (D_Y J)JZ)";
    const A2: &str = "sum eps_i D^2_{e_i,e_i}(J)Y = -r(JY)";
    let Some(d2) = &cp.nabla2_j else {
        return vec![
            Check::skipped("second derivative identity", A1, "no second derivative supplied"),
            Check::skipped("second derivative trace", A2, "no second derivative supplied"),
        ];
    };
    let n = cp.dim();
    let scale = cp.scale();
    let two = S::from_i64(2);
    let gd2: Vec<Vec<Mat<S>>> = d2
        .iter()
        .map(|row| row.iter().map(|m| linalg::mat_mul(&cp.g, m)).collect())
        .collect();
    let lhs = Tensor::from_fn(n, 4, |i| gd2[i[0]][i[1]][(i[3], i[2])].clone() * two.clone());
    let e = with_j(&cp.dd, &cp.j, &[3]);
    let first = lhs.add(&cyclic_123(&e));
    let mut trace = Mat::from_element(n, n, S::zero());
    for a in 0..n {
        for b in 0..n {
            if !cp.ginv[(a, b)].is_zero() {
                trace += linalg::scale(&d2[a][b], &cp.ginv[(a, b)]);
            }
        }
    }
    let r_endo = RicciPair::endo(&cp.ginv, &rp.r);
    trace += linalg::mat_mul(&r_endo, &cp.j);
    vec![
        vanishing("second derivative identity", A1, &first, scale, tol),
        vanishing_mat("second derivative trace", A2, &trace, scale, tol),
    ]
}

#[derive(Clone, Debug)]
pub struct ConstantType<S: Field> {
    pub alpha: S,
    pub residual: f64,
    pub signature: Signature,
    /// Whether `sign(alpha) = sign(p - q)`.
    pub sign_rule: bool,
}

/// Fully polarized coefficients of `g((D_X J)Y, (D_X J)Y)` and of
/// `g(X,X)g(Y,Y) - g(X,Y)^2 - g(JX,Y)^2`, symmetrized in the two X slots and
/// the two Y slots. Index order (x1, x2, y1, y2).
fn type_forms<S: Field>(cp: &CurvaturePoint<S>) -> (Tensor<S>, Tensor<S>) {
    let n = cp.dim();
    let g = &cp.g;
    let om = linalg::mat_mul(&cp.j.transpose(), g);
    let p0 = cp.dd.permute(&[0, 2, 1, 3]);
    let half = S::from_ratio(1, 2);
    let q0 = Tensor::from_fn(n, 4, |i| {
        let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
        g[(a, b)].clone() * g[(c, d)].clone()
            - g[(a, c)].clone() * g[(b, d)].clone()
            - om[(a, c)].clone() * om[(b, d)].clone()
    });
    let sym = |t: &Tensor<S>| {
        let s = t
            .add(&t.permute(&[1, 0, 2, 3]))
            .add(&t.permute(&[0, 1, 3, 2]))
            .add(&t.permute(&[1, 0, 3, 2]));
        s.scale(&half).scale(&half)
    };
    (sym(&p0), sym(&q0))
}

pub fn constant_type<S: Field>(cp: &CurvaturePoint<S>, tol: f64) -> Result<ConstantType<S>> {
    if cp.dim() != 6 {
        return Err(Error::PreconditionFailed(format!("constant type needs dimension 6, got {}", cp.dim())));
    }
    let signature = cp.signature(tol)?;
    let (p, q) = type_forms(cp);
    let (_, idx) = argmax(&q);
    let alpha = p.get(&idx).clone() / q.get(&idx).clone();
    let diff = p.sub(&q.scale(&alpha));
    let (raw, widx) = argmax(&diff);
    let scale = p.max_abs().max(q.max_abs());
    let residual = if scale > 0.0 { raw / scale } else { raw };
    let bad = if S::is_exact() { raw != 0.0 } else { residual > tol };
    if bad {
        return Err(Error::NotConstantType { residual, witness: witness(&widx) });
    }
    let sign_rule = alpha.sign(tol) == signature.sign();
    Ok(ConstantType { alpha, residual, signature, sign_rule })
}

#[derive(Clone, Debug)]
pub struct Einstein<S: Field> {
    pub lambda: S,
    /// Max-norm of `Ric - lambda g` over the largest Ricci component.
    pub residual: f64,
}

pub fn einstein_check<S: Field>(cp: &CurvaturePoint<S>, rp: &RicciPair<S>) -> Einstein<S> {
    let g = &cp.g;
    let mut num = S::zero();
    let mut den = S::zero();
    for (a, b) in rp.ric.iter().zip(g.iter()) {
        num += a.clone() * b.clone();
        den += b.clone() * b.clone();
    }
    let lambda = num / den;
    let diff = &rp.ric - linalg::scale(g, &lambda);
    let scale = linalg::max_abs(&rp.ric);
    let raw = linalg::max_abs(&diff);
    Einstein { lambda, residual: if scale > 0.0 { raw / scale } else { raw } }
}

/// Runs every pointwise identity and records them in `report`.
pub fn curvature_suite<S: Field>(cp: &CurvaturePoint<S>, tol: f64, report: &mut crate::report::Report) {
    let (sym, bianchi, skew) = cp.structural_residuals();
    let scale = cp.scale();
    let exact = S::is_exact();
    report.push(Check::residual("input: curvature pair symmetries", "R(W,X,Y,Z) = -R(X,W,Y,Z) = R(Y,Z,W,X)", sym, scale, tol, exact, None));
    report.push(Check::residual("input: first Bianchi", "cyclic_XYZ R(W,X,Y,Z) = 0", bianchi, scale, tol, exact, None));
    report.push(Check::residual("input: nearly-Kähler skewness", "(D_X J)Y = -(D_Y J)X, (D_X J)J = -J(D_X J)", skew, scale, tol, exact, None));
    report.extend(gray_identities(cp, tol));
    let rp = ricci_pair(cp);
    report.extend(ricci_checks(cp, &rp, tol));
    let rbar = canonical_curvature(cp);
    report.extend(canonical_checks(cp, &rbar, tol));
    report.push(thm_curv_identity(cp, &rp, tol));
    report.extend(second_derivative_identities(cp, &rp, tol));
}
