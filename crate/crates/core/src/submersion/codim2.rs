use crate::curvature::{canonical_curvature, constant_type};
use crate::error::{Error, Result};
use crate::homogeneous::Reductive;
use crate::linalg::{self, Mat, Vector};
use crate::report::Check;
use crate::scalar::Field;
use crate::tensor::Tensor;

use super::split::{unit, vec_max, SubmersionSplit, Worst};

fn dscale<S: Field>(split: &SubmersionSplit<S>) -> f64 {
    split.point.point.nabla_j.iter().map(linalg::max_abs).fold(0.0, f64::max).max(1.0)
}

/// `R(w, b, c, d)` with the first slot a vector.
fn first_slot<S: Field>(r: &Tensor<S>, w: &Vector<S>, b: usize, c: usize, d: usize) -> S {
    let mut acc = S::zero();
    for a in 0..r.dim {
        if !w[a].is_zero() {
            acc += w[a].clone() * r.get(&[a, b, c, d]).clone();
        }
    }
    acc
}

/// Requires a two-dimensional vertical space invariant under J and parallel
/// for the canonical Hermitian connection `L - 1/2 J(DJ)`.
pub fn require_parallel_codim2<S: Field>(split: &SubmersionSplit<S>, tol: f64) -> Result<()> {
    split.require_valid(tol)?;
    if split.v.len() != 2 {
        return Err(Error::PreconditionFailed(format!("vertical space has dimension {}, need 2", split.v.len())));
    }
    let cp = &split.point.point;
    let half = S::from_ratio(1, 2);
    let mut worst: f64 = 0.0;
    for (x, l) in split.lam().iter().enumerate() {
        let lbar = l - linalg::scale(&linalg::mat_mul(&cp.j, &cp.nabla_j[x]), &half);
        worst = worst.max(linalg::max_abs(&linalg::commutator(&lbar, &split.pv)));
    }
    let bad = if S::is_exact() { worst != 0.0 } else { worst > tol * dscale(split) };
    if bad {
        return Err(Error::PreconditionFailed(format!(
            "split is not parallel for the canonical Hermitian connection (residual {worst:e})"
        )));
    }
    Ok(())
}

/// Curvature and composition identities of a nearly-Kähler point whose
/// tangent space splits into canonical-parallel, J-invariant `H + V`.
pub fn reducible_case_identities<S: Field>(split: &SubmersionSplit<S>, tol: f64) -> Result<Vec<Check>> {
    require_parallel_codim2(split, tol)?;
    let cp = &split.point.point;
    let n = split.dim();
    let g = &cp.g;
    let j = &cp.j;
    let d = &cp.nabla_j;
    let exact = S::is_exact();
    let rbar = canonical_curvature(cp);
    let ds = dscale(split);
    let scale = rbar.max_abs().max(ds * ds).max(1.0);
    let (ph, pv) = (&split.ph, &split.pv);
    let (h, v) = (&split.h, &split.v);

    let mut lemma = Worst::new();
    for &x in h {
        for y in 0..n {
            for &u in v {
                for &w in v {
                    let lhs = rbar.get(&[x, y, u, w]).clone();
                    let comm = linalg::commutator(&d[u], &d[w]);
                    let rhs = linalg::bilinear(g, &comm.column(x).into_owned(), &unit(n, y))
                        - linalg::bilinear(g, &cp.dj(x, y), &cp.dj(u, w));
                    lemma.see((lhs - rhs).to_f64().abs(), || format!("X=e{x}, Y=e{y}, U=e{u}, V=e{w}"));
                }
            }
        }
    }

    let mut comp1 = Worst::new();
    let mut comp2 = Worst::new();
    let mut comp3 = Worst::new();
    for &x in h {
        for &vv in v {
            let dd = linalg::mat_mul(&d[x], &d[vv]);
            let dd2 = linalg::mat_mul(&d[vv], &d[x]);
            for &w in v {
                comp1.see(vec_max(&dd.column(w).into_owned()), || format!("(D_X J)(D_V J)W at X=e{x}, V=e{vv}, W=e{w}"));
            }
            for &y in h {
                comp1.see(vec_max(&dd2.column(y).into_owned()), || format!("(D_V J)(D_X J)Y at V=e{vv}, X=e{x}, Y=e{y}"));
            }
        }
        for &y in h {
            let xy = linalg::mat_mul(&d[x], &d[y]);
            for &z in h {
                comp2.see(vec_max(&linalg::mat_vec(pv, &xy.column(z).into_owned())), || format!("X=e{x}, Y=e{y}, Z=e{z}"));
            }
            for &w in v {
                comp3.see(vec_max(&linalg::mat_vec(ph, &xy.column(w).into_owned())), || format!("X=e{x}, Y=e{y}, V=e{w}"));
            }
        }
    }
    for &a in v {
        for &b in v {
            let ab = linalg::mat_mul(&d[a], &d[b]);
            for &x in h {
                comp3.see(vec_max(&linalg::mat_vec(pv, &ab.column(x).into_owned())), || format!("V=e{a}, W=e{b}, X=e{x}"));
            }
        }
    }

    // torsion T(X,Y) = -J (D_X J) Y
    let tor = |x: usize, y: usize| -linalg::mat_vec(j, &cp.dj(x, y));
    let mut tvv = Worst::new();
    let mut txu = Worst::new();
    let mut txy = Worst::new();
    let mut span_cols = Vec::new();
    for &a in v {
        for &b in v {
            tvv.see(vec_max(&tor(a, b)), || format!("V=e{a}, W=e{b}"));
        }
        for &x in h {
            txu.see(vec_max(&linalg::mat_vec(pv, &tor(x, a))), || format!("X=e{x}, U=e{a}"));
        }
    }
    for &x in h {
        for &y in h {
            let t = tor(x, y);
            if n == 6 {
                txy.see(vec_max(&linalg::mat_vec(ph, &t)), || format!("X=e{x}, Y=e{y}"));
            }
            span_cols.push(linalg::mat_vec(pv, &t));
        }
    }
    let span = Mat::from_columns(&span_cols);
    let span_rank = linalg::rank(&span, 1e-8);

    let mut loc = Worst::new();
    for &x in h {
        for &y in h {
            let jy = linalg::mat_vec(j, &unit(n, y));
            let w = linalg::mat_vec(&d[x], &jy);
            for &v1 in v {
                for &v2 in v {
                    for &v3 in v {
                        let lhs = first_slot(&rbar, &w, v1, v2, v3);
                        let inner = linalg::commutator(&d[v2], &d[v3]);
                        let outer = linalg::commutator(&d[v1], &inner);
                        let rhs = linalg::bilinear(g, &jy, &outer.column(x).into_owned());
                        loc.see((lhs - rhs).to_f64().abs(), || format!("X=e{x}, Y=e{y}, V=(e{v1},e{v2},e{v3})"));
                    }
                }
            }
        }
    }

    let mut out = vec![
        lemma.check("reducible: mixed canonical curvature", "Rbar(X,Y,U,V) = g([D_U J, D_V J]X, Y) - g((D_X J)Y, (D_U J)V)", scale, tol, exact),
        comp1.check("reducible: mixed compositions vanish", "(D_X J)(D_V J)W = 0, (D_V J)(D_X J)Y = 0", ds * ds, tol, exact),
        comp2.check("reducible: horizontal composition stays in H", "(D_X J)(D_Y J)Z in H", ds * ds, tol, exact),
        comp3.check("reducible: compositions respect the split", "(D_V J)(D_W J)X in H, (D_X J)(D_Y J)V in V", ds * ds, tol, exact),
        tvv.check("reducible: torsion vanishes on V", "T(V,W) = 0", ds, tol, exact),
        txu.check("reducible: mixed torsion is horizontal", "T(X,U) in H", ds, tol, exact),
    ];
    if n == 6 {
        out.push(txy.check("reducible: horizontal torsion is vertical", "T(X,Y) in V", ds, tol, exact));
    }
    out.push(Check::predicate(
        "reducible: horizontal torsion spans V",
        "span pi_V T(H,H) = V",
        span_rank == v.len(),
        Some(format!("rank {span_rank}")),
    ));
    out.push(loc.check(
        "reducible: fiber curvature formula",
        "Rbar((D_X J)JY, V1, V2, V3) = g(JY, [D_V1 J, [D_V2 J, D_V3 J]]X)",
        scale * ds,
        tol,
        exact,
    ));
    Ok(out)
}

/// Restriction of an operator to the rows and columns of `idx`.
fn block<S: Field>(m: &Mat<S>, idx: &[usize]) -> Mat<S> {
    Mat::from_fn(idx.len(), idx.len(), |a, b| m[(idx[a], idx[b])].clone())
}

fn scalar_part<S: Field>(m: &Mat<S>) -> (S, f64) {
    let k = m.nrows();
    let s = linalg::trace(m) / S::from_i64(k as i64);
    let off = m - Mat::<S>::identity(k, k) * s.clone();
    (s, linalg::max_abs(&off))
}

/// Smallest over largest singular value.
fn singular_ratio<S: Field>(m: &Mat<S>) -> f64 {
    let f = linalg::to_f64_mat(m);
    let sv = f.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if max > 0.0 {
        min / max
    } else {
        0.0
    }
}

/// Square of the vertical derivative on `H` and the curvature form of `V`.
#[derive(Clone, Debug)]
pub struct Codim2<S: Field> {
    /// `A^2 = kappa eps_V Id` for `A = (D_V J)|_H`, `V` a unit vertical vector.
    pub kappa: S,
    pub eps_v: i32,
    pub checks: Vec<Check>,
}

/// The vertical direction used for the codimension-two quantities: the
/// first vertical frame vector, with `g(V,V)` carried along instead of
/// normalizing.
fn vertical<S: Field>(split: &SubmersionSplit<S>) -> Result<(usize, S)> {
    let v = split.v[0];
    let c = split.g()[(v, v)].clone();
    if c.is_zero() {
        return Err(Error::PreconditionFailed("first vertical frame vector is null".into()));
    }
    Ok((v, c))
}

/// `A = (D_V J)|_H` squares to `kappa eps_V Id`; the curvature form
/// `Omega(X,Y) = eps_V g(Rbar(X,Y)V, JV)` equals `-2 kappa (2 omega^V - omega^H)`.
pub fn asquare_and_omega<S: Field>(split: &SubmersionSplit<S>, tol: f64) -> Result<Codim2<S>> {
    require_parallel_codim2(split, tol)?;
    let cp = &split.point.point;
    let n = split.dim();
    let exact = S::is_exact();
    let (v, c) = vertical(split)?;
    let eps_v = if c.to_f64() > 0.0 { 1 } else { -1 };
    let a = block(&cp.nabla_j[v], &split.h);
    let ratio = singular_ratio(&a);
    let injective = if exact { linalg::rank(&a, 0.0) == a.nrows() } else { ratio > 1e-8 };
    if !injective {
        return Err(Error::NotTwistorialType { ratio });
    }
    let a2 = linalg::mat_mul(&a, &a);
    let (s, off) = scalar_part(&a2);
    let a2scale = linalg::max_abs(&a2).max(1.0);
    if if exact { off != 0.0 } else { off > tol * a2scale } {
        return Err(Error::NotScalar(off / a2scale));
    }
    // A^2 scales with g(V,V) = eps_V |V|^2
    let kappa = s / c.clone();
    let mut checks = vec![Check::residual("codim 2: A^2 is scalar", "A^2 = kappa eps_V Id on H", off, a2scale, tol, exact, None)];

    let mut comm = Worst::new();
    for &u in &split.v {
        let du = block(&cp.nabla_j[u], &split.h);
        comm.see(linalg::max_abs(&linalg::commutator(&a2, &du)), || format!("U=e{u}"));
    }
    checks.push(comm.check("codim 2: A^2 commutes with vertical derivatives", "[A^2, D_U J] = 0", a2scale * dscale(split), tol, exact));

    let rbar = canonical_curvature(cp);
    let g = &cp.g;
    let j = &cp.j;
    let jv = linalg::mat_vec(j, &unit(n, v));
    let two = S::from_i64(2);
    let omega = |x: usize, y: usize, p: &Mat<S>| {
        let px = linalg::mat_vec(p, &unit(n, x));
        let py = linalg::mat_vec(p, &unit(n, y));
        linalg::bilinear(g, &px, &linalg::mat_vec(j, &py))
    };
    let mut om = Worst::new();
    let mut omax: f64 = 0.0;
    for x in 0..n {
        for y in 0..n {
            // g(Rbar(X,Y)V, JV) = Rbar(X,Y,JV,V), divided by g(V,V)
            let mut r = S::zero();
            for b in 0..n {
                if !jv[b].is_zero() {
                    r += jv[b].clone() * rbar.get(&[x, y, b, v]).clone();
                }
            }
            let big = r / c.clone();
            omax = omax.max(big.to_f64().abs());
            let rhs = -(two.clone() * kappa.clone())
                * (two.clone() * omega(x, y, &split.pv) - omega(x, y, &split.ph));
            om.see((big - rhs).to_f64().abs(), || format!("X=e{x}, Y=e{y}"));
        }
    }
    checks.push(om.check("codim 2: curvature form", "Omega = -2 kappa (2 omega^V - omega^H)", omax.max(1.0), tol, exact));
    Ok(Codim2 { kappa, eps_v, checks })
}

/// Gaussian curvature of the fibers and the mixed sectional curvature.
#[derive(Clone, Debug)]
pub struct FiberCurvature<S: Field> {
    pub k: S,
    pub alpha: S,
    pub checks: Vec<Check>,
}

/// `K = R(JV,V,JV,V) / (g(V,V) g(JV,JV) - g(V,JV)^2)` and
/// `R(X,V,X,V) = 1/4 alpha g(X,X) g(V,V)` on a strict six-dimensional point.
pub fn fiber_curvature<S: Field>(split: &SubmersionSplit<S>, tol: f64) -> Result<FiberCurvature<S>> {
    let cp = &split.point.point;
    let n = split.dim();
    if n != 6 {
        return Err(Error::PreconditionFailed(format!("fiber curvature needs dimension 6, got {n}")));
    }
    split.require_valid(tol)?;
    let o = split.oneill();
    let tmax = o.t.iter().map(linalg::max_abs).fold(0.0, f64::max);
    if if S::is_exact() { tmax != 0.0 } else { tmax > tol * o.scale().max(1.0) } {
        return Err(Error::PreconditionFailed(format!("fibers are not totally geodesic: |T| = {tmax:e}")));
    }
    let nk = crate::homogeneous::nearly_kaehler_check(cp, tol);
    if !(nk.nearly && nk.strict) {
        return Err(Error::PreconditionFailed("point is not strict nearly-Kähler".into()));
    }
    let alpha = constant_type(cp, tol)?.alpha;
    let g = &cp.g;
    let v = unit::<S>(n, split.v[0]);
    let jv = linalg::mat_vec(&cp.j, &v);
    let r4 = |a: &Vector<S>, b: &Vector<S>, c: &Vector<S>, d: &Vector<S>| {
        let mut acc = S::zero();
        for i in 0..n {
            if a[i].is_zero() {
                continue;
            }
            for jj in 0..n {
                if b[jj].is_zero() {
                    continue;
                }
                for k in 0..n {
                    if c[k].is_zero() {
                        continue;
                    }
                    for l in 0..n {
                        if d[l].is_zero() {
                            continue;
                        }
                        acc += a[i].clone() * b[jj].clone() * c[k].clone() * d[l].clone() * cp.r.get(&[i, jj, k, l]).clone();
                    }
                }
            }
        }
        acc
    };
    let gvv = linalg::bilinear(g, &v, &v);
    let den = gvv.clone() * linalg::bilinear(g, &jv, &jv) - linalg::bilinear(g, &v, &jv) * linalg::bilinear(g, &v, &jv);
    let k = r4(&jv, &v, &jv, &v) / den;
    let four = S::from_i64(4);
    let kdiff = k.clone() - four.clone() * alpha.clone();
    let kscale = k.to_f64().abs().max((four.clone() * alpha.clone()).to_f64().abs());
    let mut mixed = Worst::new();
    for &x in &split.h {
        let ex = unit::<S>(n, x);
        let lhs = r4(&ex, &v, &ex, &v);
        let rhs = alpha.clone() * linalg::bilinear(g, &ex, &ex) * gvv.clone() / four.clone();
        mixed.see((lhs - rhs).to_f64().abs(), || format!("X=e{x}"));
    }
    let checks = vec![
        Check::residual("fiber: Gaussian curvature", "K = 4 alpha", kdiff.to_f64().abs(), kscale, 1e-8, S::is_exact(), None),
        mixed.check("fiber: mixed sectional curvature", "R(X,V,X,V) = 1/4 alpha g(X,X) g(V,V)", cp.r.max_abs(), tol, S::is_exact()),
    ];
    Ok(FiberCurvature { k, alpha, checks })
}

/// Endomorphisms of `H` built from J and the vertical derivative.
#[derive(Clone, Debug)]
pub struct Triple {
    /// `(eps_1, eps_2, eps_3)` with `J_i^2 = eps_i Id`.
    pub eps: [i32; 3],
    pub ops: [Mat<f64>; 3],
    pub checks: Vec<Check>,
}

fn sign_of(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// `J1 = J|_H`, `J2 = (D_V J)|_H / sqrt|alpha|`, `J3 = J1 J2` for a unit
/// vertical `V` built from `a V0 + b J V0`. Float, because of `sqrt|alpha|`.
pub fn quaternionic_triple<S: Field>(split: &SubmersionSplit<S>, mix: (f64, f64), connection_form: &[f64], tol: f64) -> Result<Triple> {
    require_parallel_codim2(split, tol)?;
    let cp = &split.point.point;
    let n = split.dim();
    let alpha = constant_type(cp, tol)?.alpha.to_f64();
    if alpha == 0.0 {
        return Err(Error::PreconditionFailed("constant type vanishes".into()));
    }
    let sa = alpha.abs().sqrt();
    let sgn = sign_of(alpha);
    let g = linalg::to_f64_mat(&cp.g);
    let j = linalg::to_f64_mat(&cp.j);
    let ph = linalg::to_f64_mat(&split.ph);
    let d: Vec<Mat<f64>> = cp.nabla_j.iter().map(linalg::to_f64_mat).collect();
    let d2: Vec<Vec<Mat<f64>>> = cp
        .nabla2_j
        .as_ref()
        .ok_or_else(|| Error::MissingConnection("second derivative of J".into()))?
        .iter()
        .map(|row| row.iter().map(linalg::to_f64_mat).collect())
        .collect();
    let lam: Vec<Mat<f64>> = split.lam().iter().map(linalg::to_f64_mat).collect();

    let v0 = unit::<f64>(n, split.v[0]);
    let raw = &v0 * mix.0 + linalg::mat_vec(&j, &v0) * mix.1;
    let c = linalg::bilinear(&g, &raw, &raw);
    let eps_v = sign_of(c);
    let vn = raw / c.abs().sqrt();
    let dv = Reductive::combine(&d, &vn);

    let j1 = linalg::mat_mul(&j, &ph);
    let j2 = linalg::mat_mul(&dv, &ph) / sa;
    let j3 = linalg::mat_mul(&j1, &j2);
    let ops = [j1.clone(), j2.clone(), j3.clone()];
    let hb = |m: &Mat<f64>| block(m, &split.h);
    let mut eps = [0i32; 3];
    let mut sq = 0.0f64;
    for (i, op) in ops.iter().enumerate() {
        let (s, off) = scalar_part(&hb(&linalg::mat_mul(op, op)));
        eps[i] = sign_of(s) as i32;
        sq = sq.max(off).max((s.abs() - 1.0).abs());
    }
    let anti = linalg::max_abs(&hb(&(linalg::mat_mul(&j1, &j2) + linalg::mat_mul(&j2, &j1))))
        .max(linalg::max_abs(&hb(&(&j3 + linalg::mat_mul(&j2, &j1)))));
    let expected = sign_of(-alpha * eps_v) as i32;
    let mut checks = vec![
        Check::residual("triple: squares are signs", "J_i^2 = eps_i Id", sq, 1.0, tol, false, None),
        Check::residual("triple: anti-commuting", "J1 J2 = -J2 J1 = J3", anti, 1.0, tol, false, None),
        Check::predicate(
            "triple: sign rule",
            "eps_1 = -1, eps_2 = eps_3 = sign(-alpha eps_V)",
            eps == [-1, expected, expected],
            Some(format!("eps = {eps:?}, expected (-1, {expected}, {expected})")),
        ),
    ];

    // derivatives along each frame direction chi, with the vertical field
    // extended so that its canonical derivative is c(chi) JV
    let half = 0.5;
    let epsf = [eps[0] as f64, eps[1] as f64, eps[2] as f64];
    let mut worst = Worst::new();
    for chi in 0..n {
        let e = unit::<f64>(n, chi);
        let cchi = connection_form.get(chi).copied().unwrap_or(0.0);
        let jvn = linalg::mat_vec(&j, &vn);
        let bar_dv = &jvn * cchi;
        let lc_dv = &bar_dv + linalg::mat_vec(&j, &linalg::mat_vec(&d[chi], &vn)) * half;
        let dph = linalg::commutator(&lam[chi], &ph);
        let dj1 = linalg::mat_mul(&d[chi], &ph) + linalg::mat_mul(&j, &dph);
        let d2v = Reductive::combine(&d2[chi], &vn);
        let dtv = &d2v + Reductive::combine(&d, &lc_dv);
        let dj2 = (linalg::mat_mul(&dtv, &ph) + linalg::mat_mul(&dv, &dph)) / sa;
        let dj3 = linalg::mat_mul(&dj1, &j2) + linalg::mat_mul(&j1, &dj2);
        // rotating V by an angle f adds -df J3 to D J2, which fixes the sign of theta_1
        let theta = [
            -sgn * linalg::bilinear(&g, &jvn, &bar_dv),
            -sgn * sa * linalg::bilinear(&g, &vn, &linalg::mat_vec(&j, &e)),
            sgn * sa * linalg::bilinear(&g, &vn, &e),
        ];
        let dj = [dj1, dj2, dj3];
        for i in 0..3 {
            let (jj, k) = ((i + 1) % 3, (i + 2) % 3);
            let rhs = &ops[jj] * (-theta[k] * epsf[jj]) + &ops[k] * (theta[jj] * epsf[k]);
            let lhs = linalg::mat_mul(&ph, &dj[i]);
            let diff = hb(&(lhs - rhs));
            worst.see(linalg::max_abs(&diff), || format!("J{} along e{chi}", i + 1));
        }
    }
    checks.push(worst.check(
        "triple: horizontal derivatives",
        "pi_H (D_chi J_i) = -theta_k(chi) eps_j J_j + theta_j(chi) eps_k J_k",
        1.0,
        tol,
        false,
    ));
    Ok(Triple { eps, ops, checks })
}

/// The span of the triple does not depend on the unit vertical vector.
pub fn triple_span_check(a: &Triple, b: &Triple, h: &[usize], tol: f64) -> Check {
    let k = h.len();
    let cols: Vec<Vector<f64>> = a
        .ops
        .iter()
        .chain(b.ops.iter())
        .map(|m| {
            let blk = block(m, h);
            Vector::from_iterator(k * k, blk.iter().cloned())
        })
        .collect();
    let rank = linalg::rank(&Mat::from_columns(&cols), 1e-8);
    Check::predicate(
        "triple: span independent of the vertical vector",
        "span(J_i(V)) = span(J_i(aV + bJV))",
        rank == 3,
        Some(format!("joint rank {rank}, tol {tol:e}")),
    )
}
