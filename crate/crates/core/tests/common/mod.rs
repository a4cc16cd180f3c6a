#![allow(dead_code)]

use npk_core::frame::standard_j;
use npk_core::linalg::Mat;
use npk_core::scalar::{rat, Field, Rational};
use npk_core::threeform::ThreeForm;
use rand::Rng;

/// Form on the block frame of real dimension `2 * eps_half.len()`.
pub fn block_form(eps_half: &[i8], a: &[([usize; 3], Rational)]) -> ThreeForm<Rational> {
    let mut eps = eps_half.to_vec();
    eps.extend_from_slice(eps_half);
    ThreeForm::from_assignments(&eps, standard_j(eps_half.len()), a).unwrap()
}

/// `eta(e1,e2,e3) = a`, `eta(e4,e5,e1) = b` in zero-based indices.
pub fn first_shape(eps_half: [i8; 5], a: Rational, b: Rational) -> ThreeForm<Rational> {
    block_form(&eps_half, &[([0, 1, 2], a), ([3, 4, 0], b)])
}

/// `eta(e1,e2,e3) = a`, `eta(e4,e5,e1+e3) = b`.
pub fn second_shape(eps_half: [i8; 5], a: Rational, b: Rational) -> ThreeForm<Rational> {
    block_form(&eps_half, &[([0, 1, 2], a), ([3, 4, 0], b.clone()), ([3, 4, 2], b)])
}

pub fn small_rational(rng: &mut impl Rng) -> Rational {
    let d = rng.gen_range(1..=4);
    rat(rng.gen_range(-6..=6), d)
}

pub fn nonzero_rational(rng: &mut impl Rng) -> Rational {
    loop {
        let q = small_rational(rng);
        if q != rat(0, 1) {
            return q;
        }
    }
}

/// Random type-(3,0)+(0,3) form from complex components `rho_abc` with
/// `a < b < c`: real part on `(e_a,e_b,e_c)`, minus the imaginary part on
/// `(Je_a,e_b,e_c)`.
pub fn random_type_form(rng: &mut impl Rng, eps_half: &[i8], density: f64) -> ThreeForm<Rational> {
    let n = eps_half.len();
    let mut a = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            for z in y + 1..n {
                if rng.gen_bool(density) {
                    a.push(([x, y, z], small_rational(rng)));
                    a.push(([x + n, y, z], -small_rational(rng)));
                }
            }
        }
    }
    block_form(eps_half, &a)
}

/// `g(rX,Y) = -tr(A_Y A_X)` with `g(A_X Y, Z) = eta(X,Y,Z)`.
pub fn r_by_trace<S: Field>(form: &ThreeForm<S>) -> Mat<S> {
    let n = form.dim();
    let ginv = npk_core::linalg::inverse(&form.g, 1e-12).unwrap();
    let ops: Vec<Mat<S>> = (0..n)
        .map(|x| {
            Mat::from_fn(n, n, |k, y| {
                let mut acc = S::zero();
                for l in 0..n {
                    acc += ginv[(k, l)].clone() * form.get(x, y, l).clone();
                }
                acc
            })
        })
        .collect();
    let mut gr = Mat::from_element(n, n, S::zero());
    for x in 0..n {
        for y in 0..n {
            let p = npk_core::linalg::mat_mul(&ops[y], &ops[x]);
            let mut t = S::zero();
            for i in 0..n {
                t += p[(i, i)].clone();
            }
            gr[(x, y)] = -t;
        }
    }
    npk_core::linalg::mat_mul(&ginv, &gr)
}

/// Signed sum over all increasing index triples on a diagonal frame.
pub fn length_by_triples<S: Field>(form: &ThreeForm<S>) -> S {
    let n = form.dim();
    let mut acc = S::zero();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let v = form.get(a, b, c).clone();
                let w = form.g[(a, a)].clone() * form.g[(b, b)].clone() * form.g[(c, c)].clone();
                acc += w * v.clone() * v;
            }
        }
    }
    acc
}

pub fn trace<S: Field>(m: &Mat<S>) -> S {
    let mut t = S::zero();
    for i in 0..m.nrows() {
        t += m[(i, i)].clone();
    }
    t
}

/// Frame change by a signed permutation of complex coordinates together with
/// Gaussian-rational unit phases; stays inside rational isometries
/// commuting with the block J when signs are permuted along.
pub fn phase_frame(rng: &mut impl Rng, eps_half: &[i8]) -> (Mat<Rational>, Vec<i8>) {
    const PHASES: [(i64, i64, i64); 6] = [(1, 0, 1), (0, 1, 1), (-1, 0, 1), (3, 4, 5), (5, 12, 13), (-8, 15, 17)];
    let n = eps_half.len();
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let mut b = Mat::from_element(2 * n, 2 * n, rat(0, 1));
    for (k, &src) in perm.iter().enumerate() {
        let (c, s, d) = PHASES[rng.gen_range(0..PHASES.len())];
        let (c, s) = (rat(c, d), rat(s, d));
        b[(src, k)] = c.clone();
        b[(src + n, k)] = s.clone();
        b[(src, k + n)] = -s;
        b[(src + n, k + n)] = c;
    }
    let eps: Vec<i8> = perm.iter().map(|&p| eps_half[p]).collect();
    (b, eps)
}
