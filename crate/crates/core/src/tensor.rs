//! Dense covariant tensors on a frame, with slot transforms and
//! metric-weighted traces.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::scalar::Field;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Symmetry {
    None,
    Antisymmetric,
    /// Antisymmetric in each of the pairs (0,1), (2,3) and symmetric under
    /// swapping the pairs.
    SymmetricPairs,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<S> {
    pub dim: usize,
    pub order: usize,
    pub data: Vec<S>,
    pub symmetry: Symmetry,
}

impl<S: Field> Tensor<S> {
    pub fn zeros(dim: usize, order: usize) -> Tensor<S> {
        Tensor {
            dim,
            order,
            data: vec![S::zero(); dim.pow(order as u32)],
            symmetry: Symmetry::None,
        }
    }

    pub fn from_fn(dim: usize, order: usize, mut f: impl FnMut(&[usize]) -> S) -> Tensor<S> {
        let mut t = Tensor::zeros(dim, order);
        let mut idx = vec![0; order];
        for k in 0..t.data.len() {
            t.unflatten(k, &mut idx);
            t.data[k] = f(&idx);
        }
        t
    }

    pub fn with_symmetry(mut self, s: Symmetry) -> Tensor<S> {
        self.symmetry = s;
        self
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.order);
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn unflatten(&self, mut k: usize, out: &mut [usize]) {
        for s in (0..self.order).rev() {
            out[s] = k % self.dim;
            k /= self.dim;
        }
    }

    pub fn get(&self, idx: &[usize]) -> &S {
        &self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: S) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Tensor<S> {
        Tensor {
            dim: self.dim,
            order: self.order,
            data: self.data.iter().map(f).collect(),
            symmetry: self.symmetry,
        }
    }

    pub fn map_into<T: Field>(&self, f: impl Fn(&S) -> T) -> Tensor<T> {
        Tensor {
            dim: self.dim,
            order: self.order,
            data: self.data.iter().map(f).collect(),
            symmetry: self.symmetry,
        }
    }

    pub fn zip_with(&self, other: &Tensor<S>, f: impl Fn(&S, &S) -> S) -> Tensor<S> {
        assert_eq!(self.data.len(), other.data.len());
        Tensor {
            dim: self.dim,
            order: self.order,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
            symmetry: Symmetry::None,
        }
    }

    pub fn add(&self, other: &Tensor<S>) -> Tensor<S> {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Tensor<S>) -> Tensor<S> {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, s: &S) -> Tensor<S> {
        self.map(|a| a.clone() * s.clone())
    }

    /// Reorders slots: `out[i_0..] = self[i_{perm[0]}..]`.
    pub fn permute(&self, perm: &[usize]) -> Tensor<S> {
        let mut src = vec![0; self.order];
        Tensor::from_fn(self.dim, self.order, |idx| {
            for (s, &p) in perm.iter().enumerate() {
                src[s] = idx[p];
            }
            self.get(&src).clone()
        })
    }

    /// Feeds `m e_y` into `slot`: `out(.., e_y, ..) = sum_a m[a,y] self(.., e_a, ..)`.
    pub fn transform_slot(&self, slot: usize, m: &Mat<S>) -> Tensor<S> {
        let mut out = Tensor::zeros(self.dim, self.order);
        let mut idx = vec![0; self.order];
        for k in 0..self.data.len() {
            if self.data[k].is_zero() {
                continue;
            }
            self.unflatten(k, &mut idx);
            let a = idx[slot];
            for y in 0..self.dim {
                let c = &m[(a, y)];
                if c.is_zero() {
                    continue;
                }
                idx[slot] = y;
                let o = out.offset(&idx);
                out.data[o] += self.data[k].clone() * c.clone();
            }
        }
        out
    }

    /// Trace over two slots weighted by `ginv` (the inverse metric, which is
    /// `diag(eps)` on an orthonormal frame).
    pub fn contract(&self, s1: usize, s2: usize, ginv: &Mat<S>) -> Result<Tensor<S>> {
        if s1 >= self.order || s2 >= self.order || s1 == s2 {
            return Err(Error::ShapeMismatch(format!(
                "cannot contract slots {s1},{s2} of an order-{} tensor",
                self.order
            )));
        }
        if ginv.nrows() != self.dim || ginv.ncols() != self.dim {
            return Err(Error::ShapeMismatch("weight matrix size".into()));
        }
        let rest: Vec<usize> = (0..self.order).filter(|&s| s != s1 && s != s2).collect();
        let mut full = vec![0; self.order];
        Ok(Tensor::from_fn(self.dim, self.order - 2, |idx| {
            for (k, &s) in rest.iter().enumerate() {
                full[s] = idx[k];
            }
            let mut acc = S::zero();
            for a in 0..self.dim {
                for b in 0..self.dim {
                    let w = &ginv[(a, b)];
                    if w.is_zero() {
                        continue;
                    }
                    full[s1] = a;
                    full[s2] = b;
                    acc += w.clone() * self.get(&full).clone();
                }
            }
            acc
        }))
    }

    /// Order-2 tensor as a matrix `m[(i,j)] = t(i,j)`.
    pub fn to_matrix(&self) -> Mat<S> {
        assert_eq!(self.order, 2);
        Mat::from_fn(self.dim, self.dim, |i, j| self.get(&[i, j]).clone())
    }

    pub fn from_matrix(m: &Mat<S>) -> Tensor<S> {
        Tensor::from_fn(m.nrows(), 2, |i| m[(i[0], i[1])].clone())
    }

    pub fn scalar(&self) -> S {
        assert_eq!(self.order, 0);
        self.data[0].clone()
    }

    /// Largest violation of the declared symmetry.
    pub fn symmetry_residual(&self) -> f64 {
        let perms: Vec<(Vec<usize>, bool)> = match (self.symmetry, self.order) {
            (Symmetry::None, _) => vec![],
            (Symmetry::Antisymmetric, k) => (0..k.saturating_sub(1))
                .map(|s| {
                    let mut p: Vec<usize> = (0..k).collect();
                    p.swap(s, s + 1);
                    (p, true)
                })
                .collect(),
            (Symmetry::SymmetricPairs, 4) => vec![
                (vec![1, 0, 2, 3], true),
                (vec![0, 1, 3, 2], true),
                (vec![2, 3, 0, 1], false),
            ],
            (Symmetry::SymmetricPairs, _) => return f64::INFINITY,
        };
        let mut worst: f64 = 0.0;
        for (p, anti) in perms {
            let q = self.permute(&p);
            let d = if anti { self.add(&q) } else { self.sub(&q) };
            worst = worst.max(d.max_abs());
        }
        worst
    }
}

/// Index of the largest-magnitude entry, for witnesses.
pub fn argmax<S: Field>(t: &Tensor<S>) -> (f64, Vec<usize>) {
    let mut best = (0.0, vec![0; t.order]);
    let mut idx = vec![0; t.order];
    for (k, x) in t.data.iter().enumerate() {
        let m = x.to_f64().abs();
        if m > best.0 {
            t.unflatten(k, &mut idx);
            best = (m, idx.clone());
        }
    }
    best
}

pub fn frame_trace<S: Field>(m: &Mat<S>) -> S {
    linalg::trace(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::eps_metric;
    use crate::scalar::{rat, Rational};

    #[test]
    fn eps_traces() {
        let id = Tensor::<Rational>::from_fn(6, 2, |i| if i[0] == i[1] { rat(1, 1) } else { rat(0, 1) });
        let t = id.contract(0, 1, &eps_metric(&[1; 6])).unwrap();
        assert_eq!(t.scalar(), rat(6, 1));
        let eps = [1, 1, -1, -1];
        let g: Mat<Rational> = eps_metric(&eps);
        let gt = Tensor::from_matrix(&g);
        // weights enter once against g(e_i,e_i) = eps_i: sum eps_i eps_i
        assert_eq!(gt.contract(0, 1, &eps_metric(&eps)).unwrap().scalar(), rat(4, 1));
        // plain sum of eps_i g(e_i,e_i) eps_i... p - q when one weight is dropped
        let ones: Mat<Rational> = eps_metric(&[1; 4]);
        assert_eq!(gt.contract(0, 1, &ones).unwrap().scalar(), rat(0, 1));
    }

    #[test]
    fn bad_slots() {
        let t = Tensor::<f64>::zeros(3, 2);
        assert!(t.contract(0, 0, &Mat::identity(3, 3)).is_err());
    }
}
