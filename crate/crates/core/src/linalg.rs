//! Gaussian elimination over any `Elim` scalar: rank, kernels, inverses,
//! determinants and characteristic polynomials. Exact scalars pivot on the
//! first nonzero entry; floats pivot on the largest entry above `tol`.

use nalgebra::{DMatrix, DVector};

use crate::scalar::Elim;

pub type Mat<S> = DMatrix<S>;
pub type Vector<S> = DVector<S>;

/// Default relative threshold for numerical rank decisions.
pub const RANK_TOL: f64 = 1e-9;

/// Eigenvalues of a real matrix as `(re, im)` pairs. The Schur iteration is
/// bounded and retried with looser deflation thresholds, since the unbounded
/// variant can cycle on matrices with clustered complex eigenvalues.
pub fn eigenvalues(m: &Mat<f64>) -> Option<Vec<(f64, f64)>> {
    let limit = 200 * m.nrows().max(1);
    [f64::EPSILON, 1e-14, 1e-12, 1e-10].iter().find_map(|&eps| {
        nalgebra::Schur::try_new(m.clone(), eps, limit).map(|s| s.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect())
    })
}

pub fn max_abs<E: Elim>(m: &Mat<E>) -> f64 {
    m.iter().map(|x| x.mag()).fold(0.0, f64::max)
}

fn is_zero_at<E: Elim>(x: &E, tol: f64) -> bool {
    if E::exact() {
        x.is_zero()
    } else {
        x.mag() <= tol
    }
}

/// Reduced row echelon form and pivot columns. `tol` is relative to the
/// largest entry for float scalars and ignored for exact ones.
pub fn rref<E: Elim>(m: &Mat<E>, tol: f64) -> (Mat<E>, Vec<usize>) {
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let abs_tol = tol * max_abs(m).max(1.0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let mut best: Option<usize> = None;
        for i in r..rows {
            if is_zero_at(&a[(i, c)], abs_tol) {
                continue;
            }
            match best {
                None => {
                    best = Some(i);
                    if E::exact() {
                        break;
                    }
                }
                Some(b) if a[(i, c)].mag() > a[(b, c)].mag() => best = Some(i),
                _ => {}
            }
        }
        let Some(p) = best else {
            for i in r..rows {
                a[(i, c)] = E::zero();
            }
            continue;
        };
        a.swap_rows(r, p);
        let inv = E::one() / a[(r, c)].clone();
        for j in c..cols {
            a[(r, j)] = a[(r, j)].clone() * inv.clone();
        }
        for i in 0..rows {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let f = a[(i, c)].clone();
            for j in c..cols {
                let v = a[(r, j)].clone() * f.clone();
                a[(i, j)] = a[(i, j)].clone() - v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank<E: Elim>(m: &Mat<E>, tol: f64) -> usize {
    rref(m, tol).1.len()
}

/// Basis of the right kernel as matrix columns.
pub fn kernel<E: Elim>(m: &Mat<E>, tol: f64) -> Mat<E> {
    let cols = m.ncols();
    let (a, pivots) = rref(m, tol);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut out = Mat::from_element(cols, free.len(), E::zero());
    for (k, &f) in free.iter().enumerate() {
        out[(f, k)] = E::one();
        for (r, &p) in pivots.iter().enumerate() {
            out[(p, k)] = -a[(r, f)].clone();
        }
    }
    out
}

/// A maximal linearly independent subset of the columns, in order.
pub fn column_basis<E: Elim>(m: &Mat<E>, tol: f64) -> Mat<E> {
    let (_, pivots) = rref(m, tol);
    select_columns(m, &pivots)
}

pub fn select_columns<E: Elim>(m: &Mat<E>, idx: &[usize]) -> Mat<E> {
    let mut out = Mat::from_element(m.nrows(), idx.len(), E::zero());
    for (k, &c) in idx.iter().enumerate() {
        out.set_column(k, &m.column(c));
    }
    out
}

pub fn hstack<E: Elim>(a: &Mat<E>, b: &Mat<E>) -> Mat<E> {
    assert_eq!(a.nrows(), b.nrows());
    let mut out = Mat::from_element(a.nrows(), a.ncols() + b.ncols(), E::zero());
    for c in 0..a.ncols() {
        out.set_column(c, &a.column(c));
    }
    for c in 0..b.ncols() {
        out.set_column(a.ncols() + c, &b.column(c));
    }
    out
}

/// Solves `a x = b` for square invertible `a`.
pub fn solve<E: Elim>(a: &Mat<E>, b: &Mat<E>, tol: f64) -> Option<Mat<E>> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n {
        return None;
    }
    let aug = hstack(a, b);
    let (r, pivots) = rref(&aug, tol);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    let mut x = Mat::from_element(n, b.ncols(), E::zero());
    for i in 0..n {
        for j in 0..b.ncols() {
            x[(i, j)] = r[(i, n + j)].clone();
        }
    }
    Some(x)
}

pub fn inverse<E: Elim>(a: &Mat<E>, tol: f64) -> Option<Mat<E>> {
    let n = a.nrows();
    solve(a, &Mat::identity(n, n), tol)
}

pub fn det<E: Elim>(a: &Mat<E>, tol: f64) -> E {
    let n = a.nrows();
    let mut m = a.clone();
    let abs_tol = tol * max_abs(a).max(1.0);
    let mut d = E::one();
    for c in 0..n {
        let mut best: Option<usize> = None;
        for i in c..n {
            if is_zero_at(&m[(i, c)], abs_tol) {
                continue;
            }
            match best {
                None => {
                    best = Some(i);
                    if E::exact() {
                        break;
                    }
                }
                Some(b) if m[(i, c)].mag() > m[(b, c)].mag() => best = Some(i),
                _ => {}
            }
        }
        let Some(p) = best else {
            return E::zero();
        };
        if p != c {
            m.swap_rows(p, c);
            d = -d;
        }
        let piv = m[(c, c)].clone();
        d = d * piv.clone();
        for i in c + 1..n {
            if m[(i, c)].is_zero() {
                continue;
            }
            let f = m[(i, c)].clone() / piv.clone();
            for j in c..n {
                let v = m[(c, j)].clone() * f.clone();
                m[(i, j)] = m[(i, j)].clone() - v;
            }
        }
    }
    d
}

pub fn trace<E: Elim>(a: &Mat<E>) -> E {
    let mut t = E::zero();
    for i in 0..a.nrows().min(a.ncols()) {
        t = t + a[(i, i)].clone();
    }
    t
}

/// Characteristic polynomial coefficients `[c_0, .., c_n]` of `det(x - a)`,
/// monic, by the Faddeev-LeVerrier recursion.
pub fn charpoly<E: Elim>(a: &Mat<E>) -> Vec<E> {
    let n = a.nrows();
    let mut coeffs = vec![E::zero(); n + 1];
    coeffs[n] = E::one();
    let mut m = Mat::<E>::identity(n, n);
    let mut k_val = E::zero();
    for k in 1..=n {
        k_val = k_val + E::one();
        let am = a * &m;
        let c = -(trace(&am) / k_val.clone());
        coeffs[n - k] = c.clone();
        m = am;
        for i in 0..n {
            m[(i, i)] = m[(i, i)].clone() + c.clone();
        }
    }
    coeffs
}

pub fn mat_mul<E: Elim>(a: &Mat<E>, b: &Mat<E>) -> Mat<E> {
    assert_eq!(a.ncols(), b.nrows());
    let mut out = Mat::from_element(a.nrows(), b.ncols(), E::zero());
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            let aik = &a[(i, k)];
            if aik.is_zero() {
                continue;
            }
            for j in 0..b.ncols() {
                let v = aik.clone() * b[(k, j)].clone();
                out[(i, j)] = out[(i, j)].clone() + v;
            }
        }
    }
    out
}

pub fn mat_vec<E: Elim>(a: &Mat<E>, v: &Vector<E>) -> Vector<E> {
    let mut out = Vector::from_element(a.nrows(), E::zero());
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            if a[(i, k)].is_zero() || v[k].is_zero() {
                continue;
            }
            out[i] = out[i].clone() + a[(i, k)].clone() * v[k].clone();
        }
    }
    out
}

pub fn commutator<E: Elim>(a: &Mat<E>, b: &Mat<E>) -> Mat<E> {
    mat_mul(a, b) - mat_mul(b, a)
}

pub fn scale<E: Elim>(a: &Mat<E>, s: &E) -> Mat<E> {
    a.map(|x| x * s.clone())
}

/// Bilinear form `u^T g v`.
pub fn bilinear<E: Elim>(g: &Mat<E>, u: &Vector<E>, v: &Vector<E>) -> E {
    let mut acc = E::zero();
    for i in 0..g.nrows() {
        if u[i].is_zero() {
            continue;
        }
        for j in 0..g.ncols() {
            if v[j].is_zero() || g[(i, j)].is_zero() {
                continue;
            }
            acc = acc + u[i].clone() * g[(i, j)].clone() * v[j].clone();
        }
    }
    acc
}

pub fn max_abs_diff<E: Elim>(a: &Mat<E>, b: &Mat<E>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x.clone() - y.clone()).mag())
        .fold(0.0, f64::max)
}

pub fn is_zero_mat<E: Elim>(a: &Mat<E>) -> bool {
    a.iter().all(|x| x.is_zero())
}

pub fn to_f64_mat<S: crate::scalar::Field>(a: &Mat<S>) -> Mat<f64> {
    a.map(|x| x.to_f64())
}

pub fn from_rational_mat<S: crate::scalar::Field>(a: &Mat<crate::scalar::Rational>) -> Mat<S> {
    a.map(|x| S::from_rational(&x))
}
