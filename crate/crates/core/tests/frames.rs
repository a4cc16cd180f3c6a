use npk_core::frame::*;
use npk_core::linalg::{self, Mat};
use npk_core::scalar::{rat, Rational};

fn check_adapted(g: &Mat<f64>, j: &Mat<f64>, b: &Mat<f64>, eps: &[i8]) {
    let n = g.nrows();
    let gram = linalg::mat_mul(&b.transpose(), &linalg::mat_mul(g, b));
    let want: Mat<f64> = eps_metric(eps);
    assert!(linalg::max_abs_diff(&gram, &want) < 1e-12, "{gram}");
    let jb = linalg::mat_mul(j, b);
    let bj = linalg::mat_mul(b, &standard_j::<f64>(n / 2));
    assert!(linalg::max_abs_diff(&jb, &bj) < 1e-12);
}

#[test]
fn standard_structure_is_already_adapted() {
    let g: Mat<Rational> = eps_metric(&[1; 4]);
    let j = standard_j(2);
    let af = adapt_frame(&g, &j, 1e-12).unwrap();
    assert!(af.normalized);
    assert_eq!(af.basis, Mat::identity(4, 4));
}

#[test]
fn split_signature_pairs_signs() {
    // J e0 = e1, J e2 = e3 on diag(1,1,-1,-1)
    let g: Mat<Rational> = eps_metric(&[1, 1, -1, -1]);
    let mut j = Mat::from_element(4, 4, rat(0, 1));
    j[(1, 0)] = rat(1, 1);
    j[(0, 1)] = rat(-1, 1);
    j[(3, 2)] = rat(1, 1);
    j[(2, 3)] = rat(-1, 1);
    let res = check_complex_structure(&j, &g).unwrap();
    assert_eq!((res.square, res.compat), (0.0, 0.0));
    let af = adapt_frame(&g, &j, 1e-12).unwrap();
    assert_eq!(af.frame.eps, vec![1, -1, 1, -1]);
    check_adapted(&linalg::to_f64_mat(&g), &linalg::to_f64_mat(&j), &linalg::to_f64_mat(&af.basis), &af.frame.eps);
}

#[test]
fn off_diagonal_metric_gets_unit_frame() {
    let j0 = standard_j::<f64>(3);
    let g0: Mat<f64> = eps_metric(&[1, -1, 1, 1, -1, 1]);
    // M = 2 Id + J + (X - J X J) commutes with J
    let x = Mat::from_fn(6, 6, |r, c| ((r * 7 + c * 3) % 5) as f64 / 4.0 - 0.5);
    let c = &x - linalg::mat_mul(&j0, &linalg::mat_mul(&x, &j0));
    let m = Mat::<f64>::identity(6, 6) * 2.0 + &j0 + c;
    let g = linalg::mat_mul(&m.transpose(), &linalg::mat_mul(&g0, &m));
    assert!(check_complex_structure(&j0, &g).unwrap().max() < 1e-12);
    let af = adapt_frame(&g, &j0, 1e-12).unwrap();
    assert!(af.normalized);
    let sig = gram_check(&g, 1e-12).unwrap();
    assert_eq!((sig.p, sig.q), (4, 2));
    check_adapted(&g, &j0, &af.basis, &af.frame.eps);
}

#[test]
fn neutral_hermitian_form() {
    let g: Mat<Rational> = eps_metric(&[1, -1, 1, -1]);
    let res = check_complex_structure(&standard_j::<Rational>(2), &g).unwrap();
    assert_eq!((res.square, res.compat), (0.0, 0.0));
}
