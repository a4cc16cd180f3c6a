//! Complex coordinates on a J-adapted frame: `z_a = x_a + i x_{a+n}`, with
//! the Hermitian form `h(z,w) = sum eps_a z_a conj(w_a)`.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::Error;
use crate::frame::{adapt_frame, standard_j};
use crate::linalg::{self, Mat};
use crate::scalar::{cx_i, cx_real, norm_sqr, Elim, Field};

use super::ThreeForm;

pub(super) type C<S> = Complex<S>;
pub(super) type CV<S> = Vec<C<S>>;

/// Why a construction stopped: a genuine failure, or a square root that left
/// the exact backend.
#[derive(Debug)]
pub(super) enum Halt {
    Fail(Error),
    Irrational(&'static str),
}

impl From<Error> for Halt {
    fn from(e: Error) -> Halt {
        Halt::Fail(e)
    }
}

pub(super) type Step<T> = std::result::Result<T, Halt>;

pub(super) fn root<S: Field>(x: &S, what: &'static str) -> Step<S> {
    x.abs_val().try_sqrt().ok_or(Halt::Irrational(what))
}

pub(super) fn unclassified<T>(msg: impl Into<String>) -> Step<T> {
    Err(Halt::Fail(Error::Unclassified(msg.into())))
}

pub(super) fn add<S: Field>(a: &CV<S>, b: &CV<S>) -> CV<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub(super) fn scaled<S: Field>(a: &CV<S>, s: &C<S>) -> CV<S> {
    a.iter().map(|x| x.clone() * s.clone()).collect()
}

pub(super) fn real_scaled<S: Field>(a: &CV<S>, s: &S) -> CV<S> {
    scaled(a, &cx_real(s.clone()))
}

pub(super) fn l1<S: Field>(a: &CV<S>) -> f64 {
    a.iter().map(|x| x.mag()).sum()
}

pub(super) fn columns<S: Field>(m: &Mat<C<S>>) -> Vec<CV<S>> {
    (0..m.ncols()).map(|c| m.column(c).iter().cloned().collect()).collect()
}

pub(super) fn unit<S: Field>(n: usize, k: usize) -> CV<S> {
    let mut v = vec![cx_real(S::zero()); n];
    v[k] = cx_real(S::one());
    v
}

/// `conj(c)/|c|` and `|c|`.
pub(super) fn phase<S: Field>(c: &C<S>) -> Step<(C<S>, S)> {
    let m = root(&norm_sqr(c), "modulus")?;
    Ok((c.conj_val() / cx_real(m.clone()), m))
}

#[derive(Clone, Debug)]
pub(super) struct Herm {
    pub eps: Vec<i8>,
    pub tol: f64,
}

impl Herm {
    pub fn n(&self) -> usize {
        self.eps.len()
    }

    pub fn h<S: Field>(&self, z: &CV<S>, w: &CV<S>) -> C<S> {
        let mut acc = cx_real(S::zero());
        for a in 0..self.n() {
            let t = z[a].clone() * w[a].conj_val();
            if self.eps[a] > 0 {
                acc += t;
            } else {
                acc -= t;
            }
        }
        acc
    }

    pub fn norm<S: Field>(&self, z: &CV<S>) -> S {
        self.h(z, z).re
    }

    pub fn is_null<S: Field>(&self, x: &S, scale: f64) -> bool {
        x.negligible(self.tol * scale.max(f64::MIN_POSITIVE))
    }

    /// Coefficients of `X -> h(X, w)`.
    pub fn row<S: Field>(&self, w: &CV<S>) -> CV<S> {
        (0..self.n()).map(|a| self.signed(a, w[a].conj_val())).collect()
    }

    /// The vector `v` with `h(X, v) = d(X)`.
    pub fn sharp<S: Field>(&self, d: &CV<S>) -> CV<S> {
        (0..self.n()).map(|a| self.signed(a, d[a].conj_val())).collect()
    }

    fn signed<S: Field>(&self, a: usize, x: C<S>) -> C<S> {
        if self.eps[a] > 0 {
            x
        } else {
            -x
        }
    }

    pub fn normalize<S: Field>(&self, z: &CV<S>) -> Step<(CV<S>, i8)> {
        let nz = self.norm(z);
        if self.is_null(&nz, l1(z).powi(2)) {
            return unclassified("normalizing a null vector");
        }
        let s = root(&nz, "vector norm")?;
        let e = if nz.to_f64() > 0.0 { 1 } else { -1 };
        Ok((real_scaled(z, &(S::one() / s)), e))
    }

    /// Removes the components along orthonormal `done`.
    pub fn project<S: Field>(&self, z: &CV<S>, done: &[(CV<S>, i8)]) -> CV<S> {
        let mut out = z.clone();
        for (u, e) in done {
            let c = self.h(&out, u) * cx_real(S::from_i64(*e as i64));
            out = add(&out, &scaled(u, &-c));
        }
        out
    }

    /// `count` orthonormal vectors from the span of `cands`, orthogonal to `done`.
    pub fn orthonormal<S: Field>(&self, cands: &[CV<S>], count: usize, done: &[(CV<S>, i8)]) -> Step<Vec<(CV<S>, i8)>> {
        let mut pool: Vec<CV<S>> = cands.iter().map(|c| self.project(c, done)).collect();
        let mut all: Vec<(CV<S>, i8)> = done.to_vec();
        let mut out = Vec::new();
        for _ in 0..count {
            let mut trial: Vec<CV<S>> = pool.clone();
            for a in 0..pool.len() {
                for b in a + 1..pool.len() {
                    trial.push(add(&pool[a], &pool[b]));
                    trial.push(add(&pool[a], &scaled(&pool[b], &cx_i())));
                }
            }
            let mut live = trial.iter().filter(|v| !self.is_null(&self.norm(*v), l1(*v).powi(2)));
            let pick = if S::is_exact() {
                live.next().cloned()
            } else {
                live.max_by(|a, b| {
                    let ra = self.norm(*a).to_f64().abs() / l1(*a).powi(2);
                    let rb = self.norm(*b).to_f64().abs() / l1(*b).powi(2);
                    ra.total_cmp(&rb)
                })
                .cloned()
            };
            let Some(v) = pick else {
                return unclassified("degenerate subspace");
            };
            let u = self.normalize(&v)?;
            all.push(u.clone());
            out.push(u);
            pool = pool.iter().map(|c| self.project(c, &all)).collect();
        }
        Ok(out)
    }
}

/// Complex components `rho_abc = eta(e_a,e_b,e_c) - i eta(J e_a,e_b,e_c)`.
#[derive(Clone, Debug)]
pub(super) struct Rho<S: Field> {
    pub n: usize,
    pub data: Vec<C<S>>,
}

impl<S: Field> Rho<S> {
    pub fn of(form: &ThreeForm<S>) -> Rho<S> {
        let n = form.dim() / 2;
        let mut data = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    data.push(Complex::new(form.get(a, b, c).clone(), -form.get(a + n, b, c).clone()));
                }
            }
        }
        Rho { n, data }
    }

    pub fn at(&self, a: usize, b: usize, c: usize) -> &C<S> {
        &self.data[(a * self.n + b) * self.n + c]
    }

    pub fn eval(&self, x: &CV<S>, y: &CV<S>, z: &CV<S>) -> C<S> {
        let n = self.n;
        let mut acc = cx_real(S::zero());
        for a in 0..n {
            if x[a].is_zero() {
                continue;
            }
            for b in 0..n {
                if y[b].is_zero() {
                    continue;
                }
                let xy = x[a].clone() * y[b].clone();
                for c in 0..n {
                    let r = self.at(a, b, c);
                    if r.is_zero() || z[c].is_zero() {
                        continue;
                    }
                    acc += xy.clone() * r.clone() * z[c].clone();
                }
            }
        }
        acc
    }

    /// The two-form `(Y,Z) -> rho(x,Y,Z)` as a matrix.
    pub fn insert(&self, x: &CV<S>) -> Mat<C<S>> {
        let n = self.n;
        Mat::from_fn(n, n, |b, c| self.eval(x, &unit(n, b), &unit(n, c)))
    }

    pub fn scale(&self) -> f64 {
        self.data.iter().map(|x| x.mag()).fold(0.0, f64::max)
    }
}

/// Real coordinates of a complex vector on the adapted frame.
pub(super) fn real_vec<S: Field>(z: &CV<S>) -> Vec<S> {
    z.iter().map(|x| x.re.clone()).chain(z.iter().map(|x| x.im.clone())).collect()
}

/// Columns `z_1..z_n, i z_1..i z_n` as real vectors.
pub(super) fn real_frame<S: Field>(zs: &[CV<S>]) -> Mat<S> {
    let n = zs.len();
    let mut b = Mat::from_element(2 * n, 2 * n, S::zero());
    for (k, z) in zs.iter().enumerate() {
        let v = real_vec(z);
        let iv = real_vec(&scaled(z, &cx_i()));
        for a in 0..2 * n {
            b[(a, k)] = v[a].clone();
            b[(a, k + n)] = iv[a].clone();
        }
    }
    b
}

pub(super) fn is_unit_adapted<S: Field>(form: &ThreeForm<S>) -> bool {
    let dim = form.dim();
    let n = dim / 2;
    if form.j != standard_j(n) {
        return false;
    }
    (0..dim).all(|a| {
        (0..dim).all(|b| {
            let x = &form.g[(a, b)];
            if a != b {
                x.is_zero()
            } else {
                x.clone() * x.clone() == S::one() && (a >= n || *x == form.g[(a + n, a + n)])
            }
        })
    })
}

/// The form on a J-adapted frame (`J e_a = e_{a+n}`) and the change of frame.
/// With `unit`, the frame is also pseudo-orthonormal.
pub(super) fn adapted<S: Field>(form: &ThreeForm<S>, unit: bool, tol: f64) -> Step<(ThreeForm<S>, Mat<S>)> {
    let dim = form.dim();
    if is_unit_adapted(form) || (!unit && form.j == standard_j(dim / 2)) {
        return Ok((form.clone(), Mat::identity(dim, dim)));
    }
    let af = adapt_frame(&form.g, &form.j, tol)?;
    if unit && !af.normalized {
        return Err(Halt::Irrational("frame normalization"));
    }
    let f = form.in_frame(&af.basis, tol)?;
    Ok((f, af.basis))
}

pub(super) fn eps_half<S: Field>(form: &ThreeForm<S>) -> Vec<i8> {
    let n = form.dim() / 2;
    (0..n).map(|a| if form.g[(a, a)].to_f64() > 0.0 { 1 } else { -1 }).collect()
}

pub(super) fn mat_from_rows<S: Field>(rows: &[CV<S>], n: usize) -> Mat<C<S>> {
    Mat::from_fn(rows.len(), n, |r, c| rows[r][c].clone())
}

pub(super) fn kernel_of<S: Field>(rows: &[CV<S>], n: usize, tol: f64) -> Vec<CV<S>> {
    if rows.is_empty() {
        return (0..n).map(|k| unit(n, k)).collect();
    }
    columns(&linalg::kernel(&mat_from_rows(rows, n), tol))
}
