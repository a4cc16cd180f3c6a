use crate::error::Result;
use crate::linalg::{self, Mat};
use crate::scalar::Field;

use super::ThreeForm;

#[derive(Clone, Debug)]
pub struct SupportResult<S: Field> {
    /// Columns span the support: the sharps of `eta(X,Y,.)`.
    pub support: Mat<S>,
    /// Columns span `{X : X -| eta = 0}`.
    pub kernel: Mat<S>,
    pub dim_support: usize,
    pub dim_kernel: usize,
    pub j_invariant: bool,
    /// Whether `g` restricted to the support is nondegenerate.
    pub nondegenerate: bool,
    /// Whether the support equals the orthogonal complement of the kernel.
    pub complement: bool,
    /// Dimension of support ∩ kernel.
    pub overlap: usize,
}

pub fn support_kernel<S: Field>(form: &ThreeForm<S>, tol: f64) -> Result<SupportResult<S>> {
    let n = form.dim();
    let t = tol;
    let ginv = linalg::inverse(&form.g, tol)
        .ok_or_else(|| crate::Error::DegenerateMetric("metric is singular".into()))?;
    let mut cols = Mat::from_element(n, n * (n - 1) / 2, S::zero());
    let mut k = 0;
    for x in 0..n {
        for y in x + 1..n {
            for a in 0..n {
                let mut acc = S::zero();
                for b in 0..n {
                    acc += ginv[(a, b)].clone() * form.get(x, y, b).clone();
                }
                cols[(a, k)] = acc;
            }
            k += 1;
        }
    }
    let support = linalg::column_basis(&cols, t);
    let mut rows = Mat::from_element(n * n, n, S::zero());
    for y in 0..n {
        for z in 0..n {
            for x in 0..n {
                rows[(y * n + z, x)] = form.get(x, y, z).clone();
            }
        }
    }
    let kernel = linalg::kernel(&rows, t);
    let ds = support.ncols();
    let dk = kernel.ncols();
    let rank_of = |m: &Mat<S>| if m.ncols() == 0 { 0 } else { linalg::rank(m, t) };

    let js = linalg::mat_mul(&form.j, &support);
    let j_invariant = rank_of(&linalg::hstack(&support, &js)) == ds;
    let gram = linalg::mat_mul(&support.transpose(), &linalg::mat_mul(&form.g, &support));
    let nondegenerate = rank_of(&gram) == ds;
    let perp = if dk == 0 {
        Mat::identity(n, n)
    } else {
        linalg::kernel(&linalg::mat_mul(&kernel.transpose(), &form.g), t)
    };
    let complement = perp.ncols() == ds && rank_of(&linalg::hstack(&support, &perp)) == ds;
    let overlap = ds + dk - rank_of(&linalg::hstack(&support, &kernel));
    Ok(SupportResult {
        support,
        kernel,
        dim_support: ds,
        dim_kernel: dk,
        j_invariant,
        nondegenerate,
        complement,
        overlap,
    })
}
