use crate::error::{Error, Result};
use crate::homogeneous::{nearly_kaehler_check, HomogeneousPoint};
use crate::linalg::{self, Mat};
use crate::report::Check;
use crate::scalar::Field;

use super::split::{assembled_variation, kahler_submersion_conditions, unit, vec_max, SubmersionSplit, Worst};

/// The flipped structure and the identities relating it to the original.
#[derive(Clone, Debug)]
pub struct Flip<S: Field> {
    /// `J` on `H`, `-J` on `V`, with the vertical metric halved.
    pub split: SubmersionSplit<S>,
    pub checks: Vec<Check>,
    pub strict: bool,
}

/// `J pi_H - J pi_V`.
pub fn flipped_j<S: Field>(split: &SubmersionSplit<S>) -> Mat<S> {
    let j = split.j();
    linalg::mat_mul(j, &split.ph) - linalg::mat_mul(j, &split.pv)
}

/// Flips the complex structure along the fibers and halves the fiber
/// metric. Requires totally geodesic fibers and the Kähler-submersion
/// conditions on the input.
pub fn twistor_flip<S: Field>(split: &SubmersionSplit<S>, tol: f64) -> Result<Flip<S>> {
    split.require_valid(tol)?;
    let exact = S::is_exact();
    let o = split.oneill();
    let tmax = o.t.iter().map(linalg::max_abs).fold(0.0, f64::max);
    let geodesic = if exact { tmax == 0.0 } else { tmax <= tol * o.scale().max(1.0) };
    if !geodesic {
        return Err(Error::PreconditionFailed(format!("fibers are not totally geodesic: |T| = {tmax:e}")));
    }
    let cp = &split.point.point;
    if let Some(c) = kahler_submersion_conditions(split, tol).into_iter().find(|c| !c.pass) {
        return Err(Error::PreconditionFailed(format!("{} (residual {:e})", c.name, c.residual)));
    }
    let dscale = cp.nabla_j.iter().map(linalg::max_abs).fold(0.0, f64::max);
    if if exact { dscale != 0.0 } else { dscale > tol } {
        return Err(Error::PreconditionFailed(format!("total space is not Kähler: |DJ| = {dscale:e}")));
    }

    let half = S::from_ratio(1, 2);
    let varied = split.canonical_variation(&half)?;
    let jhat = flipped_j(split);
    let hp = HomogeneousPoint::from_parts(split.red().clone(), varied.g().clone(), jhat.clone())?;
    let flipped = SubmersionSplit { point: hp, ..varied };

    let n = split.dim();
    let j = split.j();
    let fp = &flipped.point.point;
    let scale = o.scale().max(fp.nabla_j.iter().map(linalg::max_abs).fold(0.0, f64::max)).max(1.0);
    let mut checks = Vec::new();

    let asm = assembled_variation(split, &half);
    let mut w = Worst::new();
    for e in 0..n {
        w.see(linalg::max_abs_diff(&asm[e], &flipped.lam()[e]), || format!("direction e{e}"));
    }
    checks.push(w.check("flip: assembled connection", "Levi-Civita of g_1/2 from base data and A", scale, tol, exact));

    let res = crate::frame::check_complex_structure(&jhat, flipped.g())?;
    checks.push(Check::residual("flip: complex structure", "Jhat^2 = -Id", res.square, 1.0, tol, exact, None));
    checks.push(Check::residual("flip: compatible metric", "ghat(Jhat.,Jhat.) = ghat", res.compat, 1.0, tol, exact, None));

    let two = S::from_i64(2);
    let mut e1 = Worst::new();
    let mut e2 = Worst::new();
    let mut e3 = Worst::new();
    let mut e4 = Worst::new();
    for &x in &split.h {
        for &y in &split.h {
            let rhs = linalg::mat_vec(j, &o.a_vec(x, y)) * two.clone();
            e1.see(vec_max(&(fp.dj(x, y) - rhs)), || format!("X=e{x}, Y=e{y}"));
        }
        for &v in &split.v {
            let jv = linalg::mat_vec(j, &unit(n, v));
            let rhs = -linalg::mat_vec(&o.a[x], &jv);
            e2.see(vec_max(&(fp.dj(x, v) - rhs)), || format!("X=e{x}, V=e{v}"));
            let rhs = linalg::mat_vec(j, &o.a_vec(x, v));
            e3.see(vec_max(&(fp.dj(v, x) - rhs)), || format!("V=e{v}, X=e{x}"));
        }
    }
    for &u in &split.v {
        for &v in &split.v {
            e4.see(vec_max(&fp.dj(u, v)), || format!("U=e{u}, V=e{v}"));
        }
    }
    checks.push(e1.check("flip: horizontal derivative", "(Dhat_X Jhat)Y = 2 J A_X Y", scale, tol, exact));
    checks.push(e2.check("flip: mixed derivative along H", "(Dhat_X Jhat)V = -A_X J V", scale, tol, exact));
    checks.push(e3.check("flip: mixed derivative along V", "(Dhat_V Jhat)X = J A_X V", scale, tol, exact));
    checks.push(e4.check("flip: vertical derivative", "(Dhat_U Jhat)V = 0", scale, tol, exact));

    let nk = nearly_kaehler_check(fp, tol);
    checks.push(Check::residual(
        "flip: nearly-Kähler polarization",
        "(Dhat_X Jhat)Y + (Dhat_Y Jhat)X = 0",
        nk.residual,
        1.0,
        tol,
        exact,
        nk.witness.map(|(x, y)| format!("X=e{x}, Y=e{y}")),
    ));
    checks.extend(parallel_split_criteria(&flipped, tol));
    Ok(Flip { split: flipped, checks, strict: nk.strict })
}

/// The split is parallel for the canonical Hermitian connection of a
/// nearly-Kähler structure exactly when the O'Neill tensors are given by
/// the torsion: `A_X V = 1/2 J (D_X J)V`, `A_X Y = 1/2 pi_V(J (D_X J)Y)`, `T_V X = 0`.
pub fn parallel_split_criteria<S: Field>(split: &SubmersionSplit<S>, tol: f64) -> Vec<Check> {
    let cp = &split.point.point;
    let exact = S::is_exact();
    let o = split.oneill();
    let half = S::from_ratio(1, 2);
    let scale = o.scale().max(cp.nabla_j.iter().map(linalg::max_abs).fold(0.0, f64::max)).max(1.0);
    let mut wv = Worst::new();
    let mut wh = Worst::new();
    let mut wt = Worst::new();
    for &x in &split.h {
        for &v in &split.v {
            let rhs = linalg::mat_vec(&cp.j, &cp.dj(x, v)) * half.clone();
            wv.see(vec_max(&(o.a_vec(x, v) - rhs)), || format!("X=e{x}, V=e{v}"));
            wt.see(vec_max(&o.t_vec(v, x)), || format!("V=e{v}, X=e{x}"));
        }
        for &y in &split.h {
            let rhs = linalg::mat_vec(&split.pv, &linalg::mat_vec(&cp.j, &cp.dj(x, y))) * half.clone();
            wh.see(vec_max(&(o.a_vec(x, y) - rhs)), || format!("X=e{x}, Y=e{y}"));
        }
    }
    vec![
        wv.check("parallel split: A on V from torsion", "A_X V = 1/2 J (D_X J)V", scale, tol, exact),
        wh.check("parallel split: A on H from torsion", "A_X Y = 1/2 pi_V(J (D_X J)Y)", scale, tol, exact),
        wt.check("parallel split: T vanishes on H", "T_V X = 0", scale, tol, exact),
    ]
}

/// Flipping again with parameter 2 returns the original complex structure and metric.
pub fn double_flip_check<S: Field>(original: &SubmersionSplit<S>, flipped: &SubmersionSplit<S>, tol: f64) -> Result<Check> {
    let back = flipped.canonical_variation(&S::from_i64(2))?;
    let j_back = flipped_j(flipped);
    let raw = linalg::max_abs_diff(&j_back, original.j()).max(linalg::max_abs_diff(back.g(), original.g()));
    Ok(Check::residual("flip: double flip is the identity", "flip(flip(J,g), 2) = (J,g)", raw, 1.0, tol, S::is_exact(), None))
}

/// The Ricci difference `r` of the flipped point preserves `H` and `V`.
/// Returns the check and the eigenvalues of `r` on each block when they are scalar.
pub fn r_split_check<S: Field>(split: &SubmersionSplit<S>, tol: f64) -> (Check, Option<S>, Option<S>) {
    let cp = &split.point.point;
    let rp = crate::curvature::ricci_pair(cp);
    let r = &crate::curvature::RicciPair::endo(&cp.ginv, &rp.r);
    let raw = linalg::max_abs(&linalg::commutator(r, &split.pv));
    let scale = linalg::max_abs(r).max(1.0);
    let block_scalar = |idx: &[usize]| -> Option<S> {
        let s = r[(idx[0], idx[0])].clone();
        let ok = idx.iter().all(|&a| {
            idx.iter().all(|&b| {
                let want = if a == b { s.clone() } else { S::zero() };
                (r[(a, b)].clone() - want).negligible(tol * scale)
            })
        });
        ok.then_some(s)
    };
    let mu_h = block_scalar(&split.h);
    let mu_v = block_scalar(&split.v);
    (
        Check::residual("flip: r preserves the split", "[r, pi_V] = 0", raw, scale, tol, S::is_exact(), None),
        mu_h,
        mu_v,
    )
}
