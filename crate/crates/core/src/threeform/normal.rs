//! Normal forms in real dimensions 8 and 10.
//!
//! In complex coordinates the form is the real part of a complex three-form
//! `rho`. In dimension 10 the covectors `d` with `d ^ rho = 0` form a line
//! (`rho = d ^ omega` with `omega` of rank four) or a 3-space (`rho`
//! decomposable). A non-null `d` gives the first normal form, a null one the
//! second.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::standard_j;
use crate::linalg::{self, Mat};
use crate::report::Check;
use crate::scalar::{cx_i, cx_real, norm_sqr, Backend, Elim, Field, Rational};

use super::complex::{
    adapted, add, columns, eps_half, kernel_of, l1, phase, real_frame, real_scaled, real_vec, root,
    scaled, unclassified, unit, Halt, Herm, Rho, Step, C, CV,
};
use super::support::{support_kernel, SupportResult};
use super::{extend_by_type, form_length, ThreeForm};

fn length_check<S: Field>(form: &ThreeForm<S>, tol: f64) -> Result<()> {
    let len = form_length(form)?;
    if len.negligible(tol * form.scale().powi(2).max(1.0)) {
        return Err(Error::NullLength);
    }
    Ok(())
}

fn halt_to_error(h: Halt) -> Error {
    match h {
        Halt::Fail(e) => e,
        Halt::Irrational(what) => Error::PreconditionFailed(format!("{what} needs a square root outside the backend")),
    }
}

#[derive(Clone, Debug)]
pub struct NormalForm8<S: Field> {
    /// `Z` and `J Z` for the complex kernel line, in input coordinates.
    pub kernel_line: Mat<S>,
    /// `g(Z, Z)`; nonzero when the line is non-isotropic.
    pub line_norm: S,
    pub support: SupportResult<S>,
    pub checks: Vec<Check>,
}

fn perm_sign(p: &[usize]) -> i64 {
    let mut s = 1;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                s = -s;
            }
        }
    }
    s
}

/// Kernel line of a type form in dimension 8. The complex form is `Z -| vol`
/// for a vector `Z` spanning the kernel.
pub fn normal_form_dim8<S: Field>(form: &ThreeForm<S>, tol: f64) -> Result<NormalForm8<S>> {
    if form.dim() != 8 {
        return Err(Error::ShapeMismatch(format!("expected dimension 8, got {}", form.dim())));
    }
    length_check(form, tol)?;
    let support = support_kernel(form, tol)?;
    let (af, basis) = adapted(form, false, tol).map_err(halt_to_error)?;
    let rho = Rho::of(&af);
    let mut z: CV<S> = vec![cx_real(S::zero()); 4];
    for (a, za) in z.iter_mut().enumerate() {
        let rest: Vec<usize> = (0..4).filter(|&x| x != a).collect();
        let p = [a, rest[0], rest[1], rest[2]];
        *za = rho.at(rest[0], rest[1], rest[2]).clone() * cx_real(S::from_i64(perm_sign(&p)));
    }
    let zr = real_vec(&z);
    let jz = real_vec(&scaled(&z, &cx_i()));
    let to_input = |v: &[S]| linalg::mat_vec(&basis, &crate::linalg::Vector::from_vec(v.to_vec()));
    let line = Mat::from_columns(&[to_input(&zr), to_input(&jz)]);
    let line_norm = linalg::bilinear(&form.g, &line.column(0).into_owned(), &line.column(0).into_owned());
    let k = &support.kernel;
    let rank_joint = linalg::rank(&linalg::hstack(k, &line), tol);
    let jk = linalg::mat_mul(&form.j, k);
    let gram = linalg::mat_mul(&k.transpose(), &linalg::mat_mul(&form.g, k));
    let checks = vec![
        Check::predicate("kernel has real dimension 2", "dim K = 2", support.dim_kernel == 2, Some(format!("dim K = {}", support.dim_kernel))),
        Check::predicate(
            "kernel is J-invariant",
            "J K = K",
            support.dim_kernel > 0 && linalg::rank(&linalg::hstack(k, &jk), tol) == support.dim_kernel,
            None,
        ),
        Check::predicate(
            "kernel is the line of Z",
            "K = span(Z, JZ), rho = Z -| vol",
            support.dim_kernel == 2 && rank_joint == 2,
            None,
        ),
        Check::predicate(
            "kernel is non-isotropic",
            "g restricted to K nondegenerate",
            k.ncols() > 0 && linalg::rank(&gram, tol) == k.ncols(),
            None,
        ),
        Check::predicate("support is the complement of the kernel", "Sigma = K^perp", support.complement, None),
    ];
    Ok(NormalForm8 { kernel_line: line, line_norm, support, checks })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Case10 {
    /// `eta(e1,e2,e3) = alpha`, `eta(e4,e5,e1) = beta`.
    First,
    /// `eta(e1,e2,e3) = alpha`, `eta(e4,e5,e1+e3) = beta` with `<e1,e1> = -<e3,e3>`.
    Second,
}

impl std::fmt::Display for Case10 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Case10::First => write!(f, "i"),
            Case10::Second => write!(f, "ii"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct NormalForm10<S: Field> {
    pub case: Case10,
    pub alpha: S,
    pub beta: S,
    /// Columns `e_1..e_5, Je_1..Je_5` in input coordinates.
    pub basis: Mat<S>,
    pub eps: Vec<i8>,
    /// Whether `d ^ rho = 0` has a three-dimensional solution space.
    pub decomposable: bool,
    /// `<Z,Z>` for `Z = phi -| rho`, with `rho = phi -| vol`.
    pub z_norm: f64,
    /// `<phi,phi>^2 <rho,rho>`.
    pub z_claim: f64,
    pub reconstruction: Check,
}

impl<S: Field> NormalForm10<S> {
    pub fn assignments(&self) -> Vec<([usize; 3], S)> {
        let mut a = vec![([0, 1, 2], self.alpha.clone())];
        if !self.beta.is_zero() {
            a.push(([3, 4, 0], self.beta.clone()));
            if self.case == Case10::Second {
                a.push(([3, 4, 2], self.beta.clone()));
            }
        }
        a
    }
}

/// A normal form computed exactly when every square root stays rational,
/// otherwise in floating point.
#[derive(Clone, Debug)]
pub enum Dim10NormalForm {
    Exact(NormalForm10<Rational>),
    Float(NormalForm10<f64>),
}

impl Dim10NormalForm {
    pub fn backend(&self) -> Backend {
        match self {
            Dim10NormalForm::Exact(_) => Backend::Exact,
            Dim10NormalForm::Float(_) => Backend::Float,
        }
    }
    pub fn case(&self) -> Case10 {
        match self {
            Dim10NormalForm::Exact(n) => n.case,
            Dim10NormalForm::Float(n) => n.case,
        }
    }
    pub fn alpha(&self) -> f64 {
        match self {
            Dim10NormalForm::Exact(n) => n.alpha.to_f64(),
            Dim10NormalForm::Float(n) => n.alpha,
        }
    }
    pub fn beta(&self) -> f64 {
        match self {
            Dim10NormalForm::Exact(n) => n.beta.to_f64(),
            Dim10NormalForm::Float(n) => n.beta,
        }
    }
    pub fn eps(&self) -> &[i8] {
        match self {
            Dim10NormalForm::Exact(n) => &n.eps,
            Dim10NormalForm::Float(n) => &n.eps,
        }
    }
    pub fn reconstruction(&self) -> &Check {
        match self {
            Dim10NormalForm::Exact(n) => &n.reconstruction,
            Dim10NormalForm::Float(n) => &n.reconstruction,
        }
    }
    pub fn basis_f64(&self) -> Mat<f64> {
        match self {
            Dim10NormalForm::Exact(n) => linalg::to_f64_mat(&n.basis),
            Dim10NormalForm::Float(n) => n.basis.clone(),
        }
    }
    pub fn z_values(&self) -> (f64, f64) {
        match self {
            Dim10NormalForm::Exact(n) => (n.z_norm, n.z_claim),
            Dim10NormalForm::Float(n) => (n.z_norm, n.z_claim),
        }
    }
}

/// Normal form of a rational type form in dimension 10, exact when possible.
pub fn normal_form_dim10_auto(form: &ThreeForm<Rational>, tol: f64) -> Result<Dim10NormalForm> {
    if form.dim() != 10 {
        return Err(Error::ShapeMismatch(format!("expected dimension 10, got {}", form.dim())));
    }
    length_check(form, tol)?;
    match build10(form, tol) {
        Ok(nf) => Ok(Dim10NormalForm::Exact(nf)),
        Err(Halt::Fail(e)) => Err(e),
        Err(Halt::Irrational(_)) => build10(&form.to_f64(), tol).map(Dim10NormalForm::Float).map_err(|h| match h {
            Halt::Irrational(w) => Error::NumericalBreakdown(format!("{w} is negative")),
            Halt::Fail(e) => e,
        }),
    }
}

/// Normal form in the backend of the input. On the exact backend this fails
/// when a required square root is irrational; see [`normal_form_dim10_auto`].
pub fn normal_form_dim10<S: Field>(form: &ThreeForm<S>, tol: f64) -> Result<NormalForm10<S>> {
    if form.dim() != 10 {
        return Err(Error::ShapeMismatch(format!("expected dimension 10, got {}", form.dim())));
    }
    length_check(form, tol)?;
    build10(form, tol).map_err(halt_to_error)
}

/// `<Z,Z>` and `<phi,phi>^2 <rho,rho>` on the coordinate frame.
fn z_identity<S: Field>(rho: &Rho<S>, eps: &[i8]) -> (f64, f64) {
    let n = rho.n;
    let e = |a: usize| eps[a] as f64;
    let r = |a, b, c| {
        let z = rho.at(a, b, c);
        (z.re.to_f64(), z.im.to_f64())
    };
    let mut phi = vec![vec![(0.0, 0.0); n]; n];
    let mut rr = 0.0;
    for a in 0..n {
        for b in a + 1..n {
            let rest: Vec<usize> = (0..n).filter(|&x| x != a && x != b).collect();
            let mut p = vec![a, b];
            p.extend(&rest);
            let s = perm_sign(&p) as f64;
            let (x, y) = r(rest[0], rest[1], rest[2]);
            phi[a][b] = (s * x, s * y);
            phi[b][a] = (-s * x, -s * y);
            for c in b + 1..n {
                let (x, y) = r(a, b, c);
                rr += e(a) * e(b) * e(c) * (x * x + y * y);
            }
        }
    }
    let mut pp = 0.0;
    for a in 0..n {
        for b in a + 1..n {
            let (x, y) = phi[a][b];
            pp += e(a) * e(b) * (x * x + y * y);
        }
    }
    let mut zz = 0.0;
    for c in 0..n {
        let (mut zr, mut zi) = (0.0, 0.0);
        for a in 0..n {
            for b in a + 1..n {
                let (p, q) = phi[a][b];
                let (x, y) = r(a, b, c);
                zr += p * x - q * y;
                zi += p * y + q * x;
            }
        }
        zz += e(c) * (zr * zr + zi * zi);
    }
    (zz, pp * pp * rr)
}

/// The pair `(z, w/(a eps_w))` with `w = A z`, where `A` is the antilinear map
/// `h(Y, A X) = omega(X, Y)`; `omega` is then `a` on the pair.
fn pair<S: Field>(herm: &Herm, m: &Mat<C<S>>, z: &CV<S>) -> Step<(S, CV<S>, i8)> {
    let n = herm.n();
    let zc: CV<S> = z.iter().map(|x| x.conj_val()).collect();
    let w: CV<S> = (0..n)
        .map(|a| {
            let mut acc = cx_real(S::zero());
            for b in 0..n {
                acc += m[(a, b)].clone() * zc[b].clone();
            }
            acc
        })
        .collect();
    let nw = herm.norm(&w);
    if herm.is_null(&nw, l1(&w).powi(2)) {
        return unclassified("the two-form is degenerate on an eigenspace");
    }
    let e: i8 = if nw.to_f64() > 0.0 { 1 } else { -1 };
    let a = root(&nw, "pair constant")?;
    let s = S::one() / (a.clone() * S::from_i64(e as i64));
    Ok((a, real_scaled(&w, &s), e))
}

fn build10<S: Field>(form: &ThreeForm<S>, tol: f64) -> Step<NormalForm10<S>> {
    let (af, p) = adapted(form, true, tol)?;
    let eps5 = eps_half(&af);
    let herm = Herm { eps: eps5.clone(), tol };
    let rho = Rho::of(&af);
    let n = 5;

    // covectors d with d ^ rho = 0
    let mut rows: Vec<CV<S>> = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let mut row = vec![cx_real(S::zero()); n];
                    row[a] = rho.at(b, c, d).clone();
                    row[b] = -rho.at(a, c, d).clone();
                    row[c] = rho.at(a, b, d).clone();
                    row[d] = -rho.at(a, b, c).clone();
                    rows.push(row);
                }
            }
        }
    }
    let divisors = kernel_of(&rows, n, tol);
    let (case, alpha, beta, frame, eps) = match divisors.len() {
        3 => decomposable(&herm, &rho, &divisors)?,
        1 => {
            let nv = herm.sharp(&divisors[0]);
            let nu = herm.norm(&nv);
            if herm.is_null(&nu, l1(&divisors[0]).powi(2)) {
                second_case(&herm, &rho, &nv, tol)?
            } else {
                first_case(&herm, &rho, &nv, tol)?
            }
        }
        k => return unclassified(format!("divisor space of dimension {k}")),
    };

    let b_ad = real_frame(&frame);
    let basis = linalg::mat_mul(&p, &b_ad);
    let mut eps10 = eps.clone();
    eps10.extend(eps.clone());
    let mut nf = NormalForm10 {
        case,
        alpha,
        beta,
        basis,
        eps: eps10,
        decomposable: divisors.len() == 3,
        z_norm: 0.0,
        z_claim: 0.0,
        reconstruction: Check::skipped("", "", ""),
    };
    let (zz, claim) = z_identity(&rho, &eps5);
    nf.z_norm = zz;
    nf.z_claim = claim;
    let target = extend_by_type(10, &standard_j(5), &nf.assignments())?;
    let b = &nf.basis;
    let pulled = form.eta.transform_slot(0, b).transform_slot(1, b).transform_slot(2, b);
    let diff = pulled.sub(&target);
    let (raw, at) = crate::tensor::argmax(&diff);
    nf.reconstruction = Check::residual(
        "normal form reproduces the input",
        "eta(B.,B.,B.) = closure of the normal-form constants",
        raw,
        form.scale().max(1.0),
        tol,
        S::is_exact(),
        Some(format!("component {at:?}")),
    );
    Ok(nf)
}

type Built<S> = (Case10, S, S, Vec<CV<S>>, Vec<i8>);

fn decomposable<S: Field>(herm: &Herm, rho: &Rho<S>, divisors: &[CV<S>]) -> Step<Built<S>> {
    let n = herm.n();
    let span: Vec<CV<S>> = divisors.iter().map(|d| herm.sharp(d)).collect();
    let mut top = herm.orthonormal(&span, 3, &[])?;
    let c = rho.eval(&top[0].0, &top[1].0, &top[2].0);
    if herm.is_null(&norm_sqr(&c), rho.scale().powi(2)) {
        return unclassified("decomposable form vanishes on its support");
    }
    let (ph, alpha) = phase(&c)?;
    top[0].0 = scaled(&top[0].0, &ph);
    let rows: Vec<CV<S>> = top.iter().map(|(u, _)| herm.row(u)).collect();
    let rest = herm.orthonormal(&kernel_of(&rows, n, herm.tol), 2, &[])?;
    let all: Vec<(CV<S>, i8)> = top.into_iter().chain(rest).collect();
    let eps = all.iter().map(|x| x.1).collect();
    Ok((Case10::First, alpha, S::zero(), all.into_iter().map(|x| x.0).collect(), eps))
}

fn first_case<S: Field>(herm: &Herm, rho: &Rho<S>, nv: &CV<S>, tol: f64) -> Step<Built<S>> {
    let n = herm.n();
    let (z1, e1) = herm.normalize(nv)?;
    let w = rho.insert(&z1);
    // columns A e_b: h(Y, A e_b) = omega(e_b, Y)
    let m = Mat::from_fn(n, n, |a, b| {
        let x = w[(b, a)].conj_val();
        if herm.eps[a] > 0 {
            x
        } else {
            -x
        }
    });
    let mconj = m.map(|x| x.conj_val());
    let sq = linalg::mat_mul(&m, &mconj);
    let half = S::from_ratio(1, 2);
    let s = linalg::trace(&sq).re * half.clone();
    let q = linalg::trace(&linalg::mat_mul(&sq, &sq)).re * half.clone();
    let p = (s.clone() * s.clone() - q) * half.clone();
    let mut disc = s.clone() * s.clone() - S::from_i64(4) * p;
    if !S::is_exact() && disc.to_f64() < 0.0 {
        disc = S::zero();
    }
    let r = root(&disc, "eigenvalue gap")?;
    let sigmas = [(s.clone() - r.clone()) * half.clone(), (s + r) * half];

    let mut done: Vec<(CV<S>, i8)> = vec![(z1.clone(), e1)];
    let mut pairs: Vec<(S, (CV<S>, i8), (CV<S>, i8))> = Vec::new();
    for sigma in &sigmas {
        let shifted = Mat::from_fn(n, n, |a, b| {
            let x = sq[(a, b)].clone();
            if a == b {
                x - cx_real(sigma.clone())
            } else {
                x
            }
        });
        let space = columns(&linalg::kernel(&shifted, tol.max(1e-9)));
        let picked = herm.orthonormal(&space, 1, &done)?;
        let (z, ez) = picked.into_iter().next().expect("one vector requested");
        let (a, w2, ew) = pair(herm, &m, &z)?;
        done.push((z.clone(), ez));
        done.push((w2.clone(), ew));
        pairs.push((a, (z, ez), (w2, ew)));
    }
    pairs.sort_by(|x, y| x.0.to_f64().total_cmp(&y.0.to_f64()));
    let (alpha, a2, a3) = pairs[0].clone();
    let (beta, b4, b5) = pairs[1].clone();
    let all = [(z1, e1), a2, a3, b4, b5];
    let eps = all.iter().map(|x| x.1).collect();
    Ok((Case10::First, alpha, beta, all.into_iter().map(|x| x.0).collect(), eps))
}

fn second_case<S: Field>(herm: &Herm, rho: &Rho<S>, nv: &CV<S>, tol: f64) -> Step<Built<S>> {
    let n = herm.n();
    let beta2 = rho.insert(nv);
    let images: Vec<CV<S>> = (0..n).map(|b| herm.sharp(&(0..n).map(|c| beta2[(b, c)].clone()).collect())).collect();
    let (z2, e2) = herm.orthonormal(&images, 1, &[])?.remove(0);

    let k = (0..n)
        .max_by(|&a, &b| {
            if S::is_exact() {
                (!nv[a].is_zero()).cmp(&!nv[b].is_zero()).then(b.cmp(&a))
            } else {
                nv[a].mag().total_cmp(&nv[b].mag())
            }
        })
        .expect("nonempty");
    let m0 = scaled(&unit(n, k), &(cx_real(S::one()) / herm.row(nv)[k].clone()));
    let w = rho.insert(&m0);
    let omega_row = |v: &CV<S>| -> CV<S> {
        (0..n)
            .map(|b| {
                let mut acc = cx_real(S::zero());
                for c in 0..n {
                    acc += w[(b, c)].clone() * v[c].clone();
                }
                acc
            })
            .collect()
    };
    let z45 = kernel_of(&[herm.row(nv), omega_row(nv), omega_row(&z2)], n, tol);
    if z45.len() != 2 {
        return unclassified(format!("complement of the null plane has dimension {}", z45.len()));
    }
    let mut rest = herm.orthonormal(&z45, 2, &[])?;

    let hp = kernel_of(&[herm.row(&z2), herm.row(&rest[0].0), herm.row(&rest[1].0)], n, tol);
    let mut live = hp
        .iter()
        .map(|v| (herm.h(nv, v), v))
        .filter(|(c, v)| !herm.is_null(&norm_sqr(c), (l1(nv) * l1(*v)).powi(2)));
    let m1 = if S::is_exact() { live.next() } else { live.max_by(|a, b| a.0.mag().total_cmp(&b.0.mag())) };
    let Some((c, v)) = m1 else {
        return unclassified("null direction has no partner");
    };
    let m1 = scaled(v, &(cx_real(S::one()) / c.conj_val()));
    let q = herm.norm(&m1) * S::from_ratio(1, 2);
    let m = add(&m1, &real_scaled(nv, &-q));

    let lift = |lambda: &S| {
        let a = real_scaled(&m, &(S::one() / lambda.clone()));
        let b = real_scaled(nv, &(lambda.clone() * S::from_ratio(1, 2)));
        (add(&a, &real_scaled(&b, &-S::one())), add(&a, &b))
    };
    let (z1, z3) = lift(&S::one());
    let ca = rho.eval(&z1, &z2, &z3);
    let cb = rho.eval(&rest[0].0, &rest[1].0, &z1);
    let s2 = rho.scale().powi(2);
    if herm.is_null(&norm_sqr(&ca), s2) || herm.is_null(&norm_sqr(&cb), s2) {
        return unclassified("vanishing constant in the null case");
    }
    let (pa, alpha) = phase(&ca)?;
    let (pb, beta) = phase(&cb)?;
    let z2 = scaled(&z2, &pa);
    rest[1].0 = scaled(&rest[1].0, &pb);
    let (z1, z3) = lift(&(beta / alpha.clone()));
    let frame = vec![z1, z2, z3, rest[0].0.clone(), rest[1].0.clone()];
    let eps = vec![-1, e2, 1, rest[0].1, rest[1].1];
    Ok((Case10::Second, alpha.clone(), alpha, frame, eps))
}
