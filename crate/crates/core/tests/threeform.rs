mod common;

use common::*;
use nalgebra::DMatrix;
use npk_core::frame::random_isometry;
use npk_core::linalg::{self, Mat};
use npk_core::scalar::{rat, Backend, Field, Rational};
use npk_core::threeform::*;
use npk_core::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;

fn float_rank(m: &Mat<f64>) -> usize {
    if m.ncols() == 0 {
        return 0;
    }
    let s = m.clone().svd(false, false).singular_values;
    let top = s.iter().cloned().fold(0.0, f64::max);
    s.iter().filter(|&&x| x > 1e-9 * top.max(1.0)).count()
}

fn spans_equal(a: &Mat<Rational>, b: &Mat<Rational>) -> bool {
    let ra = linalg::rank(a, TOL);
    ra == linalg::rank(b, TOL) && linalg::rank(&linalg::hstack(a, b), TOL) == ra
}

fn unit_columns(n: usize, idx: &[usize]) -> Mat<Rational> {
    Mat::from_fn(n, idx.len(), |r, c| if r == idx[c] { rat(1, 1) } else { rat(0, 1) })
}

fn multiset(sp: &RSpectrum<Rational>) -> Vec<(Rational, usize)> {
    let mut out: Vec<(Rational, usize)> = sp.eigen.iter().map(|e| (e.exact.clone().expect("exact eigenvalue"), e.algebraic)).collect();
    out.sort();
    out
}

fn expected(mut v: Vec<(Rational, usize)>) -> Vec<(Rational, usize)> {
    v.sort();
    v
}

#[test]
fn length_of_single_orbit_in_dim_six() {
    let f = block_form(&[1, 1, 1], &[([0, 1, 2], rat(1, 1))]);
    assert_eq!(form_length(&f).unwrap(), rat(4, 1));
    assert_eq!(length_by_triples(&f), rat(4, 1));
}

#[test]
fn length_with_mixed_signs_matches_triples() {
    let f = block_form(&[1, 1, -1], &[([0, 1, 2], rat(1, 1))]);
    assert_eq!(form_length(&f).unwrap(), length_by_triples(&f));
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for eps in [[1, -1, 1, -1], [-1, -1, 1, 1], [1, 1, 1, 1]] {
        let f = random_type_form(&mut rng, &eps, 0.7);
        assert_eq!(form_length(&f).unwrap(), length_by_triples(&f));
    }
}

#[test]
fn zero_form_has_full_kernel_and_no_support() {
    let f = block_form(&[1, 1, 1, 1], &[]);
    assert_eq!(form_length(&f).unwrap(), rat(0, 1));
    let s = support_kernel(&f, TOL).unwrap();
    assert_eq!((s.dim_support, s.dim_kernel), (0, 8));
    assert!(matches!(normal_form_dim8(&f, TOL), Err(Error::NullLength)));
}

#[test]
fn dim_eight_single_component_kernel() {
    for eps in [[1, 1, 1, 1], [1, 1, 1, -1]] {
        let f = block_form(&eps, &[([0, 1, 2], rat(3, 2))]);
        let s = support_kernel(&f, TOL).unwrap();
        assert_eq!(s.dim_support, 6);
        assert!(spans_equal(&s.kernel, &unit_columns(8, &[3, 7])));
        assert!(s.complement && s.j_invariant && s.nondegenerate);
        let nf = normal_form_dim8(&f, TOL).unwrap();
        assert!(nf.checks.iter().all(|c| c.pass), "{:?}", nf.checks);
        assert!(spans_equal(&nf.kernel_line, &unit_columns(8, &[3, 7])));
        assert_ne!(nf.line_norm, rat(0, 1));
    }
}

#[test]
fn dim_eight_null_length_is_rejected() {
    let f = block_form(&[1, 1, 1, -1], &[([0, 1, 2], rat(1, 1)), ([0, 1, 3], rat(1, 1))]);
    assert_eq!(form_length(&f).unwrap(), rat(0, 1));
    assert!(matches!(normal_form_dim8(&f, TOL), Err(Error::NullLength)));
}

#[test]
fn dim_eight_random_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for eps in [[1, 1, 1, 1], [1, -1, 1, 1]] {
        let mut done = 0;
        while done < 5 {
            let f = random_type_form(&mut rng, &eps, 0.6);
            if form_length(&f).unwrap() == rat(0, 1) {
                continue;
            }
            let nf = normal_form_dim8(&f, TOL).unwrap();
            assert!(nf.checks.iter().all(|c| c.pass), "{:?}", nf.checks);
            done += 1;
        }
    }
}

/// `rho = xi_1 ^ xi_2 ^ xi_3` with the null covectors `xi_a = z_a - z_{a+3}`
/// on signature (6,6).
fn isotropic_dim_twelve() -> ThreeForm<Rational> {
    let xi = |a: usize, b: usize| -> i64 {
        if b == a {
            1
        } else if b == a + 3 {
            -1
        } else {
            0
        }
    };
    let mut a = Vec::new();
    for x in 0..6 {
        for y in x + 1..6 {
            for z in y + 1..6 {
                let cols = [x, y, z];
                let m = DMatrix::<f64>::from_fn(3, 3, |p, q| xi(p, cols[q]) as f64);
                let d = m.determinant().round() as i64;
                if d != 0 {
                    a.push(([x, y, z], rat(d, 1)));
                }
            }
        }
    }
    block_form(&[1, 1, 1, -1, -1, -1], &a)
}

#[test]
fn isotropic_support_lies_in_kernel() {
    let f = isotropic_dim_twelve();
    assert_eq!(form_length(&f).unwrap(), rat(0, 1));
    let s = support_kernel(&f, TOL).unwrap();
    let sf = linalg::to_f64_mat(&s.support);
    let kf = linalg::to_f64_mat(&s.kernel);
    let ds = float_rank(&sf);
    let dk = float_rank(&kf);
    let joint = float_rank(&linalg::hstack(&sf, &kf));
    assert_eq!((ds, dk), (6, 6));
    assert_eq!(joint, dk);
    assert_eq!(s.overlap, s.dim_support);
    // an isotropic kernel is its own complement
    assert!(!s.nondegenerate && s.complement);
}

#[test]
fn r_matches_trace_oracle_on_random_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for eps in [[1, 1, 1, 1, 1], [1, -1, 1, -1, 1], [-1, 1, 1, 1, -1]] {
        let f = random_type_form(&mut rng, &eps, 0.5);
        let sp = r_from_threeform(&f, TOL).unwrap();
        assert_eq!(sp.r, r_by_trace(&f));
        assert_eq!(trace(&sp.r), form_length(&f).unwrap() * rat(6, 1));
    }
}

#[test]
fn first_case_spectrum() {
    let f = first_shape([1; 5], rat(1, 1), rat(2, 1));
    let sp = r_from_threeform(&f, TOL).unwrap();
    assert_eq!(sp.r, r_by_trace(&f));
    assert_eq!(multiset(&sp), expected(vec![(rat(20, 1), 2), (rat(4, 1), 4), (rat(16, 1), 4)]));
    assert!(sp.diagonalizable && sp.decomposable);
    assert_eq!(classify_dim10(&sp), Dim10Class::TwistorialCandidate);
    assert_eq!(sp.r, stated_r_matrix(Case10::First, &rat(1, 1), &rat(2, 1), &[1; 10]));
}

#[test]
fn first_case_spectrum_random_constants() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..3 {
        let a = nonzero_rational(&mut rng);
        let b = nonzero_rational(&mut rng);
        let f = first_shape([1; 5], a.clone(), b.clone());
        let sp = r_from_threeform(&f, TOL).unwrap();
        assert_eq!(sp.r, r_by_trace(&f));
        let four = rat(4, 1);
        let (aa, bb) = (a.clone() * a, b.clone() * b);
        let mut want: Vec<(Rational, usize)> = Vec::new();
        for (v, m) in [(four.clone() * (aa.clone() + bb.clone()), 2), (four.clone() * aa, 4), (four * bb, 4)] {
            match want.iter_mut().find(|(w, _)| *w == v) {
                Some(e) => e.1 += m,
                None => want.push((v, m)),
            }
        }
        assert_eq!(multiset(&sp), expected(want));
    }
}

#[test]
fn vanishing_second_constant_splits_off_kaehler() {
    let f = first_shape([1; 5], rat(3, 2), rat(0, 1));
    let sp = r_from_threeform(&f, TOL).unwrap();
    assert_eq!(multiset(&sp), expected(vec![(rat(0, 1), 4), (rat(9, 1), 6)]));
    let ker = sp.eigen.iter().find(|e| e.exact == Some(rat(0, 1))).unwrap();
    assert!(spans_equal(&ker.basis, &unit_columns(10, &[3, 4, 8, 9])));
    assert_eq!(classify_dim10(&sp), Dim10Class::SplitsOffKaehler);
}

#[test]
fn second_case_is_not_decomposable() {
    let f = second_shape([-1, 1, 1, 1, 1], rat(1, 1), rat(1, 1));
    let mut v = linalg::Vector::<Rational>::from_element(10, rat(0, 1));
    v[0] = rat(1, 1);
    v[2] = rat(1, 1);
    assert_eq!(linalg::bilinear(&f.g, &v, &v), rat(0, 1));
    let sp = r_from_threeform(&f, TOL).unwrap();
    assert_eq!(sp.r, r_by_trace(&f));
    assert_eq!(trace(&sp.r), rat(-24, 1));
    assert_eq!(form_length(&f).unwrap(), rat(-4, 1));
    assert!(!sp.decomposable);
    assert!(sp.eigen.iter().any(|e| e.null_vector.is_some()));
    assert_eq!(classify_dim10(&sp), Dim10Class::NotDecomposable);
}

#[test]
fn normal_form_fixed_points() {
    let nf = normal_form_dim10(&first_shape([1; 5], rat(1, 1), rat(2, 1)), TOL).unwrap();
    assert_eq!(nf.case, Case10::First);
    assert_eq!((nf.alpha.clone(), nf.beta.clone()), (rat(1, 1), rat(2, 1)));
    assert!(nf.reconstruction.pass && nf.reconstruction.residual == 0.0);

    let nf = normal_form_dim10(&second_shape([-1, 1, 1, 1, 1], rat(1, 1), rat(1, 1)), TOL).unwrap();
    assert_eq!(nf.case, Case10::Second);
    assert_eq!(nf.alpha, rat(1, 1));
    assert_eq!(nf.eps[0], -nf.eps[2]);
    assert!(nf.reconstruction.pass && nf.reconstruction.residual == 0.0);
}

#[test]
fn normal_form_is_invariant_under_isometries() {
    let f = first_shape([1, 1, -1, 1, 1], rat(1, 1), rat(2, 1));
    let base = normal_form_dim10_auto(&f, TOL).unwrap();
    for seed in 0..4 {
        let b = random_isometry(&f.g, &f.j, seed).unwrap();
        let moved = f.in_frame(&b, TOL).unwrap();
        let nf = normal_form_dim10_auto(&moved, TOL).unwrap();
        assert_eq!(nf.case(), base.case());
        assert!((nf.alpha() - base.alpha()).abs() < 1e-9);
        assert!((nf.beta() - base.beta()).abs() < 1e-9);
        assert!(nf.reconstruction().pass);
    }
}

#[test]
fn normal_form_stays_exact_under_phase_frames() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..4 {
        let eps = [1, 1, -1, 1, -1];
        let (b, _) = phase_frame(&mut rng, &eps);
        let f = second_shape(eps, rat(2, 3), rat(5, 4)).in_frame(&b, TOL).unwrap();
        let nf = normal_form_dim10_auto(&f, TOL).unwrap();
        assert_eq!(nf.backend(), Backend::Exact);
        assert_eq!(nf.case(), Case10::Second);
        assert_eq!(nf.reconstruction().residual, 0.0);
    }
}

#[test]
fn float_backend_agrees_with_exact() {
    let f = first_shape([1, 1, 1, -1, 1], rat(2, 3), rat(3, 2));
    let e = normal_form_dim10(&f, TOL).unwrap();
    let x = normal_form_dim10(&f.to_f64(), TOL).unwrap();
    assert_eq!(e.case, x.case);
    assert!((e.alpha.to_f64() - x.alpha).abs() < 1e-12);
    assert!((e.beta.to_f64() - x.beta).abs() < 1e-12);
}

#[test]
fn file_round_trip_preserves_spectrum() {
    let f = first_shape([1; 5], rat(1, 1), rat(2, 1));
    let file = ThreeFormFile::from_form(vec![1; 10], JSpec::Block, &f);
    let back = ThreeFormFile::parse(&file.to_text()).unwrap().to_form::<Rational>().unwrap();
    assert_eq!(back, f);
}
