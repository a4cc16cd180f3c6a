use npk_core::catalog;
use npk_core::curvature::*;
use npk_core::frame::random_isometry;
use npk_core::homogeneous::*;
use npk_core::linalg;
use npk_core::report::Report;
use npk_core::scalar::{rat, Field, Rational};
use npk_core::tensor::Tensor;
use npk_core::Error;
use serde_json::json;

const TOL: f64 = 1e-10;

fn point<S: Field>(id: &str) -> HomogeneousPoint<S> {
    HomogeneousPoint::new(&catalog::load(id).unwrap().model).unwrap()
}

fn suite<S: Field>(cp: &CurvaturePoint<S>) -> Report {
    let mut rep = Report::new("test", S::backend());
    curvature_suite(cp, TOL, &mut rep);
    rep
}

/// su(2) + R with the bi-invariant metric and empty isotropy.
fn compact_group() -> HomogeneousModel {
    let v = json!({
        "name": "su2-line",
        "basis": ["e0", "e1", "e2", "f"],
        "brackets": [[0, 1, 2, "1"], [1, 2, 0, "1"], [2, 0, 1, "1"]],
        "split": {"h": [], "m": [0, 1, 2, 3]},
        "metric": [["1","0","0","0"],["0","1","0","0"],["0","0","1","0"],["0","0","0","1"]],
        "j": [["0","-1","0","0"],["1","0","0","0"],["0","0","0","-1"],["0","0","1","0"]]
    });
    let m = HomogeneousModel::from_json(&v).unwrap();
    m.validate().unwrap();
    m
}

#[test]
fn catalog_lists_builtins() {
    let ids = catalog::builtin_ids();
    assert_eq!(ids.len(), 6);
    assert_eq!(catalog::list().unwrap().len(), 6);
    assert!(matches!(catalog::load("builtin:nope"), Err(Error::NotFound(_))));
    assert!(matches!(catalog::load("no-such-model"), Err(Error::NotFound(_))));
    let e = catalog::load("builtin:su3-flag").unwrap();
    assert_eq!(e.model.dim_m(), 6);
    for id in ids {
        let e = catalog::load(id).unwrap();
        let sig = e.model.signature().unwrap();
        let want = e.expected()["signature"].as_array().unwrap();
        assert_eq!([sig.p as u64, sig.q as u64], [want[0].as_u64().unwrap(), want[1].as_u64().unwrap()], "{id}");
    }
}

#[test]
fn jacobi_holds_on_builtins() {
    for id in catalog::builtin_ids() {
        let m = catalog::load(id).unwrap().model;
        let n = m.dim_g();
        let c = &m.brackets;
        let br = |x: &Vec<Rational>, y: &Vec<Rational>| -> Vec<Rational> {
            let mut out = vec![rat(0, 1); n];
            for i in 0..n {
                for j in 0..n {
                    if x[i] != rat(0, 1) && y[j] != rat(0, 1) {
                        for k in 0..n {
                            out[k] += x[i].clone() * y[j].clone() * c[i][j][k].clone();
                        }
                    }
                }
            }
            out
        };
        let unit = |i: usize| (0..n).map(|k| if k == i { rat(1, 1) } else { rat(0, 1) }).collect::<Vec<_>>();
        for a in 0..n {
            for b in 0..n {
                for d in 0..n {
                    let (x, y, z) = (unit(a), unit(b), unit(d));
                    let s1 = br(&x, &br(&y, &z));
                    let s2 = br(&y, &br(&z, &x));
                    let s3 = br(&z, &br(&x, &y));
                    for k in 0..n {
                        assert_eq!(s1[k].clone() + s2[k].clone() + s3[k].clone(), rat(0, 1), "{id}");
                    }
                }
            }
        }
    }
}

#[test]
fn bi_invariant_metric_gives_half_bracket() {
    let m = compact_group();
    let hp = HomogeneousPoint::<Rational>::new(&m).unwrap();
    let n = 4;
    for x in 0..n {
        for y in 0..n {
            let half: Vec<Rational> = (0..n).map(|k| m.brackets[x][y][k].clone() * rat(1, 2)).collect();
            let got: Vec<Rational> = hp.lam[x].column(y).iter().cloned().collect();
            assert_eq!(got, half);
        }
    }
    // R(X,Y)W = -1/4 [[X,Y],W] and R(X,Y,Z,W) = g(R(X,Y)W, Z)
    let expected = Tensor::from_fn(n, 4, |i| {
        let (x, y, z, w) = (i[0], i[1], i[2], i[3]);
        let mut acc = rat(0, 1);
        for l in 0..n {
            acc += m.brackets[x][y][l].clone() * m.brackets[l][w][z].clone();
        }
        acc * rat(-1, 4)
    });
    assert_eq!(hp.point.r.sub(&expected).max_abs(), 0.0);
    assert!(hp.nomizu_checks(TOL).iter().all(|c| c.pass));
}

#[test]
fn abelian_model_is_flat_and_kaehler() {
    let v = json!({
        "name": "flat",
        "basis": ["a", "b", "c", "d"],
        "brackets": [],
        "split": {"h": [], "m": [0, 1, 2, 3]},
        "metric": [["1","0","0","0"],["0","1","0","0"],["0","0","-1","0"],["0","0","0","-1"]],
        "j": [["0","-1","0","0"],["1","0","0","0"],["0","0","0","-1"],["0","0","1","0"]]
    });
    let m = HomogeneousModel::from_json(&v).unwrap();
    let hp = HomogeneousPoint::<Rational>::new(&m).unwrap();
    assert!(hp.point.r.is_zero());
    let v = nearly_kaehler_check(&hp.point, TOL);
    assert!(v.nearly && v.kaehler && !v.strict);
    assert!(suite(&hp.point).all_pass());
}

#[test]
fn flag_model_is_strict_of_positive_type() {
    let hp = point::<Rational>("su3-flag");
    assert!(hp.nomizu_checks(TOL).iter().all(|c| c.pass && c.exact));
    assert!(hp.canonical_route_checks(TOL).iter().all(|c| c.pass));
    let cp = &hp.point;
    let v = nearly_kaehler_check(cp, TOL);
    assert!(v.nearly && v.strict);
    let ct = constant_type(cp, TOL).unwrap();
    assert!(ct.alpha > rat(0, 1) && ct.sign_rule);
    let rp = ricci_pair(cp);
    let ein = einstein_check(cp, &rp);
    assert_eq!(ein.lambda, ct.alpha.clone() * rat(5, 1));
    assert_eq!(ein.residual, 0.0);
    assert_eq!(rp.r, linalg::scale(&cp.g, &(ct.alpha.clone() * rat(4, 1))));
    assert_eq!(rp.ric, linalg::scale(&rp.ric_star, &rat(5, 1)));
    let rep = suite(cp);
    assert!(rep.all_pass(), "{}", rep.to_text());
}

#[test]
fn group_products_pass_the_suite() {
    for id in ["gxg-su2", "gxg-sl2r"] {
        let hp = point::<Rational>(id);
        let rep = suite(&hp.point);
        assert!(rep.all_pass(), "{id}\n{}", rep.to_text());
        let ct = constant_type(&hp.point, TOL).unwrap();
        let want = hp.point.signature(TOL).unwrap();
        if id == "gxg-sl2r" {
            assert!(ct.alpha < rat(0, 1));
            assert_eq!((want.p, want.q), (4, 2));
        } else {
            assert!(ct.alpha > rat(0, 1));
        }
        let rp = ricci_pair(&hp.point);
        assert_eq!(einstein_check(&hp.point, &rp).lambda, ct.alpha * rat(5, 1));
    }
}

#[test]
fn kaehler_point_has_equal_curvatures() {
    let hp = point::<Rational>("cp3-twistor");
    let v = nearly_kaehler_check(&hp.point, TOL);
    assert!(v.kaehler && !v.strict);
    assert!(canonical_curvature(&hp.point).sub(&hp.point.r).is_zero());
    assert_eq!(constant_type(&hp.point, TOL).unwrap().alpha, rat(0, 1));
}

#[test]
fn rescaled_flag_metric_is_not_nearly_kaehler() {
    let m = catalog::load("su3-flag").unwrap().model;
    let mut g = m.metric.clone();
    for i in 0..2 {
        g[(i, i)] = g[(i, i)].clone() * rat(2, 1);
    }
    let hp = HomogeneousPoint::<Rational>::new(&m.with_metric(g)).unwrap();
    let v = nearly_kaehler_check(&hp.point, TOL);
    assert!(!v.nearly);
    assert!(v.witness.is_some());
}

#[test]
fn injected_curvature_fault_is_located() {
    let hp = point::<f64>("su3-flag");
    let mut cp = hp.point.clone();
    let old = *cp.r.get(&[0, 1, 0, 1]);
    cp.r.set(&[0, 1, 0, 1], old + 1e-3);
    let checks = gray_identities(&cp, TOL);
    let first = &checks[0];
    assert!(!first.pass);
    assert!(first.witness.is_some());
    let rp = ricci_pair(&cp);
    assert!(!thm_curv_identity(&cp, &rp, TOL).pass);
}

#[test]
fn float_and_exact_backends_agree() {
    let e = point::<Rational>("gxg-sl2r");
    let f = point::<f64>("gxg-sl2r");
    assert!(linalg::max_abs_diff(&linalg::to_f64_mat(&e.point.g), &f.point.g) == 0.0);
    let rep = suite(&f.point);
    assert!(rep.all_pass(), "{}", rep.to_text());
    let a = constant_type(&e.point, TOL).unwrap().alpha.to_f64();
    let b = constant_type(&f.point, TOL).unwrap().alpha;
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn residuals_are_frame_independent() {
    let hp = point::<Rational>("su3-flag");
    let b = random_isometry(&hp.point.g, &hp.point.j, 3).unwrap();
    let moved = hp.point.change_basis(&b).unwrap();
    assert_eq!(linalg::mat_mul(&b.transpose(), &linalg::mat_mul(&hp.point.g, &b)), hp.point.g);
    let rep = suite(&moved);
    assert!(rep.all_pass(), "{}", rep.to_text());
}
