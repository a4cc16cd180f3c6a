//! Identity suites and the order they run in.

use std::fmt;

use clap::ValueEnum;
use npk_core::curvature::{
    canonical_checks, canonical_curvature, constant_type, einstein_check, gray_identities, ricci_checks, ricci_pair,
    second_derivative_identities, thm_curv_identity, to_backend, CurvaturePoint,
};
use npk_core::frame::random_isometry;
use npk_core::homogeneous::{nearly_kaehler_check, HomogeneousPoint};
use npk_core::report::{Check, Report};
use npk_core::scalar::{Field, Rational};
use npk_core::submersion::{
    asquare_and_omega, assembled_variation_check, double_flip_check, fiber_curvature, oneill_checks, quaternionic_triple,
    r_split_check, reducible_case_identities, triple_span_check, twistor_flip, variation_checks, SubmersionSplit,
};
use npk_core::tensor::Tensor;
use npk_core::threeform::{ThreeForm, ThreeFormFile};
use npk_core::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::target::Target;
use crate::tools;

/// Variant order is the execution order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Suite {
    Gray,
    Canonical,
    Thmcurv,
    #[value(name = "d2j")]
    D2j,
    Type,
    Einstein,
    Threeform,
    Submersion,
    Twistor,
    Reducible,
    Quat,
    All,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.to_possible_value().expect("no skipped variants");
        write!(f, "{}", v.get_name())
    }
}

/// Requested suites in execution order, and whether each was named
/// explicitly (as opposed to implied by `all`).
pub fn plan(requested: &[Suite]) -> Vec<(Suite, bool)> {
    let all = requested.contains(&Suite::All);
    Suite::value_variants()
        .iter()
        .filter(|s| **s != Suite::All)
        .filter_map(|s| {
            let named = requested.contains(s);
            (named || all).then_some((*s, named))
        })
        .collect()
}

fn num<S: Field>(x: &S) -> Value {
    if S::is_exact() {
        json!(x.to_string())
    } else {
        json!(x.to_f64())
    }
}

fn precondition(msg: impl Into<String>) -> Error {
    Error::PreconditionFailed(msg.into())
}

/// `eta(X,Y,Z) = g((D_X J)Y, Z)`.
fn derivative_form<S: Field>(cp: &CurvaturePoint<S>) -> Result<ThreeForm<S>> {
    let n = cp.dim();
    let eta = Tensor::from_fn(n, 3, |i| {
        let mut acc = S::zero();
        for k in 0..n {
            acc += cp.nabla_j[i[0]][(k, i[1])].clone() * cp.g[(k, i[2])].clone();
        }
        acc
    });
    ThreeForm::new(eta, cp.g.clone(), cp.j.clone())
}

fn strict_six<S: Field>(cp: &CurvaturePoint<S>, tol: f64) -> Result<()> {
    let v = nearly_kaehler_check(cp, tol);
    if cp.dim() == 6 && v.nearly && v.strict {
        Ok(())
    } else {
        Err(precondition("needs a strict nearly-Kähler point of dimension 6"))
    }
}

fn tag(mut cs: Vec<Check>, suffix: &str) -> Vec<Check> {
    for c in &mut cs {
        c.name = format!("{} ({suffix})", c.name);
    }
    cs
}

pub struct Runner<'a, S: Field> {
    target: &'a Target,
    tol: f64,
    seed: u64,
    point: Option<CurvaturePoint<S>>,
    homogeneous: Option<HomogeneousPoint<S>>,
}

impl<'a, S: Field> Runner<'a, S> {
    /// Builds the curvature data of the target in the backend `S`.
    pub fn new(target: &'a Target, tol: f64, seed: u64) -> Result<Runner<'a, S>> {
        let (point, homogeneous) = match target {
            Target::Model(e) => {
                let hp = HomogeneousPoint::<S>::new(&e.model)?;
                (Some(hp.point.clone()), Some(hp))
            }
            Target::Point(p) => (Some(to_backend::<S>(p)?), None),
            Target::Form(_) => (None, None),
        };
        Ok(Runner { target, tol, seed, point, homogeneous })
    }

    fn curvature(&self) -> Result<&CurvaturePoint<S>> {
        self.point
            .as_ref()
            .ok_or_else(|| precondition(format!("a {} carries no curvature data", self.target.kind())))
    }

    fn split(&self) -> Result<SubmersionSplit<S>> {
        match (self.target, &self.homogeneous) {
            (Target::Model(e), Some(hp)) => {
                let (h, v) = e
                    .model
                    .hv
                    .clone()
                    .ok_or_else(|| precondition(format!("model {} declares no horizontal/vertical split", e.id)))?;
                SubmersionSplit::new(hp.clone(), h, v)
            }
            _ => Err(precondition(format!("a {} has no submersion structure", self.target.kind()))),
        }
    }

    /// The split itself when it is strict nearly-Kähler, otherwise its
    /// twistor flip when that is strict.
    fn nearly_kaehler_split(&self) -> Result<SubmersionSplit<S>> {
        let split = self.split()?;
        if nearly_kaehler_check(&split.point.point, self.tol).strict {
            return Ok(split);
        }
        let flip = twistor_flip(&split, self.tol)?;
        if flip.strict {
            Ok(flip.split)
        } else {
            Err(precondition("neither the model nor its flip is strict nearly-Kähler"))
        }
    }

    fn float_point(&self) -> Result<CurvaturePoint<f64>> {
        match self.target {
            Target::Model(e) => Ok(HomogeneousPoint::<f64>::new(&e.model)?.point),
            Target::Point(p) => to_backend::<f64>(p),
            Target::Form(_) => Err(precondition("a three-form carries no curvature data")),
        }
    }

    /// Residuals in a seeded random frame related by an isometry commuting
    /// with J. Residuals of passing checks must agree to `tol`, and no
    /// verdict may change.
    fn frame_invariance(&self) -> Result<Check> {
        fn pointwise(cp: &CurvaturePoint<f64>, tol: f64) -> Vec<Check> {
            let rp = ricci_pair(cp);
            let mut cs = gray_identities(cp, tol);
            cs.extend(ricci_checks(cp, &rp, tol));
            cs.extend(canonical_checks(cp, &canonical_curvature(cp), tol));
            cs.push(thm_curv_identity(cp, &rp, tol));
            cs
        }
        let cp = self.float_point()?;
        let b = random_isometry(&cp.g, &cp.j, self.seed)?;
        let moved = cp.change_basis(&b)?;
        let (before, after) = (pointwise(&cp, self.tol), pointwise(&moved, self.tol));
        let mut drift: f64 = 0.0;
        let mut witness = None;
        for (x, y) in before.iter().zip(&after) {
            if x.pass != y.pass {
                witness = Some(format!("verdict of {} changes", x.name));
                drift = f64::INFINITY;
            } else if x.pass && (x.residual - y.residual).abs() > drift {
                drift = (x.residual - y.residual).abs();
                witness = Some(x.name.clone());
            }
        }
        Ok(Check::residual(
            "gray: frame invariance",
            format!("residuals unchanged under a random isometry commuting with J (seed {})", self.seed),
            drift,
            1.0,
            self.tol,
            false,
            witness,
        ))
    }

    fn threeform(&self, rep: &mut Report) -> Result<()> {
        let tol = self.tol;
        if let Target::Form(file) = self.target {
            return self.threeform_file(file, rep);
        }
        let cp = self.curvature()?;
        let form = derivative_form(cp)?;
        if form.is_zero() {
            return Err(precondition("D J vanishes, there is no torsion form"));
        }
        let (sp, checks, support_dim) = tools::spectral(&form, tol)?;
        rep.extend(checks);
        let rp = ricci_pair(cp);
        rep.push(Check::residual(
            "threeform: r from the torsion form",
            "-tr(A_Y A_X) = sum_i eps_i g((D_X J)e_i, (D_Y J)e_i)",
            tools::r_form_gap(&form, &sp, &rp.r_from_derivative),
            sp.scale(),
            tol,
            S::is_exact(),
            None,
        ));
        let spectrum: Vec<Value> = sp.multiset().iter().map(|(v, m)| json!([v, m])).collect();
        rep.value("threeform.spectrum", spectrum);
        rep.value("threeform.support_dim", support_dim);
        Ok(())
    }

    fn threeform_file(&self, file: &ThreeFormFile, rep: &mut Report) -> Result<()> {
        let s = tools::summarize(file, S::backend(), self.tol, false)?;
        rep.extend(s.checks.iter().cloned());
        rep.value("threeform.spectrum", s.spectrum_text());
        rep.value("threeform.decomposable", s.decomposable);
        if let Some(c) = s.class {
            rep.value("threeform.class", c.to_string());
        }
        if let Ok(tools::Normal::Dim10 { case, alpha, beta, .. }) = &s.normal {
            rep.value("threeform.case", case.clone());
            rep.value("threeform.alpha", *alpha);
            rep.value("threeform.beta", *beta);
        }
        Ok(())
    }

    pub fn run(&self, suite: Suite, rep: &mut Report) -> Result<()> {
        let tol = self.tol;
        let exact = S::is_exact();
        match suite {
            Suite::Gray => {
                let cp = self.curvature()?;
                let (sym, bianchi, skew) = cp.structural_residuals();
                let scale = cp.scale();
                rep.push(Check::residual("input: curvature pair symmetries", "R(W,X,Y,Z) = -R(X,W,Y,Z) = R(Y,Z,W,X)", sym, scale, tol, exact, None));
                rep.push(Check::residual("input: first Bianchi", "cyclic_XYZ R(W,X,Y,Z) = 0", bianchi, scale, tol, exact, None));
                rep.push(Check::residual("input: nearly-Kähler skewness", "(D_X J)Y = -(D_Y J)X, (D_X J)J = -J(D_X J)", skew, scale, tol, exact, None));
                if let Some(hp) = &self.homogeneous {
                    rep.extend(hp.nomizu_checks(tol));
                }
                rep.extend(gray_identities(cp, tol));
                rep.push(self.frame_invariance()?);
            }
            Suite::Canonical => {
                let cp = self.curvature()?;
                rep.extend(canonical_checks(cp, &canonical_curvature(cp), tol));
                if let Some(hp) = &self.homogeneous {
                    rep.extend(hp.canonical_route_checks(tol));
                }
            }
            Suite::Thmcurv => {
                let cp = self.curvature()?;
                let rp = ricci_pair(cp);
                rep.extend(ricci_checks(cp, &rp, tol));
                rep.push(thm_curv_identity(cp, &rp, tol));
            }
            Suite::D2j => {
                let cp = self.curvature()?;
                rep.extend(second_derivative_identities(cp, &ricci_pair(cp), tol));
            }
            Suite::Type => {
                let cp = self.curvature()?;
                strict_six(cp, tol)?;
                const ANCHOR: &str = "g((D_X J)Y,(D_X J)Y) = alpha (g(X,X)g(Y,Y) - g(X,Y)^2 - g(JX,Y)^2)";
                match constant_type(cp, tol) {
                    Ok(ct) => {
                        rep.push(Check::residual("type: constant type", ANCHOR, ct.residual, 1.0, tol, exact, None));
                        rep.value("type.alpha", num(&ct.alpha));
                        rep.value("type.signature", ct.signature.to_string());
                        rep.value("type.sign_alpha_equals_sign_p_minus_q", ct.sign_rule);
                    }
                    Err(Error::NotConstantType { residual, witness }) => {
                        rep.push(Check::residual("type: constant type", ANCHOR, residual, 1.0, tol, false, Some(witness)));
                    }
                    Err(e) => return Err(e),
                }
            }
            Suite::Einstein => {
                let cp = self.curvature()?;
                strict_six(cp, tol)?;
                let rp = ricci_pair(cp);
                let ein = einstein_check(cp, &rp);
                rep.push(Check::residual("einstein: Ric = lambda g", "Ric = lambda g", ein.residual, 1.0, tol, exact, None));
                rep.value("einstein.lambda", num(&ein.lambda));
                if let Ok(ct) = constant_type(cp, tol) {
                    let gap = (ein.lambda.clone() - ct.alpha.clone() * S::from_i64(5)).to_f64().abs();
                    let scale = ein.lambda.to_f64().abs().max(1.0);
                    rep.push(Check::residual("einstein: lambda = 5 alpha", "Ric = 5 alpha g", gap, scale, tol, exact, None));
                }
            }
            Suite::Threeform => self.threeform(rep)?,
            Suite::Submersion => {
                let split = self.split()?;
                rep.extend(split.validate(tol));
                rep.extend(oneill_checks(&split, &split.oneill(), tol));
                for (n, d) in [(1, 2), (2, 1), (3, 1), (-1, 1)] {
                    let t = S::from_ratio(n, d);
                    let label = format!("t = {}", Rational::new(n.into(), d.into()));
                    let varied = split.canonical_variation(&t)?;
                    let mut cs = variation_checks(&split, &varied, tol);
                    cs.push(assembled_variation_check(&split, &t, tol)?);
                    rep.extend(tag(cs, &label));
                }
            }
            Suite::Twistor => {
                let split = self.split()?;
                let flip = twistor_flip(&split, tol)?;
                rep.extend(flip.checks.iter().cloned());
                rep.push(double_flip_check(&split, &flip.split, tol)?);
                let (c, _, _) = r_split_check(&flip.split, tol);
                rep.push(c);
                rep.value("twistor.strict", flip.strict);
                if flip.strict && flip.split.dim() == 6 {
                    let c2 = asquare_and_omega(&flip.split, tol)?;
                    rep.extend(c2.checks);
                    rep.value("twistor.kappa", num(&c2.kappa));
                    rep.value("twistor.eps_v", c2.eps_v);
                    let fc = fiber_curvature(&flip.split, tol)?;
                    rep.extend(fc.checks);
                    rep.value("twistor.fiber_curvature", num(&fc.k));
                    rep.value("twistor.alpha", num(&fc.alpha));
                } else {
                    rep.push(Check::skipped("twistor: codim-2 structure", "A^2 = kappa eps_V Id, K = 4 alpha", "flipped structure is not strict of dimension 6"));
                }
            }
            Suite::Reducible => {
                let s = self.nearly_kaehler_split()?;
                rep.extend(reducible_case_identities(&s, tol)?);
            }
            Suite::Quat => {
                let s = self.nearly_kaehler_split()?;
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                let cf: Vec<f64> = (0..s.dim()).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let a = quaternionic_triple(&s, (1.0, 0.0), &cf, tol)?;
                let b = quaternionic_triple(&s, (theta.cos(), theta.sin()), &cf, tol)?;
                rep.extend(tag(a.checks.clone(), "V = V0"));
                rep.extend(tag(b.checks.clone(), "rotated V"));
                rep.push(triple_span_check(&a, &b, &s.h, tol));
                rep.value("quat.signs", json!(a.eps));
            }
            Suite::All => unreachable!("expanded by plan"),
        }
        Ok(())
    }
}

/// Report of a run; suites that could not run are listed with the reason.
pub struct Outcome {
    pub report: Report,
    pub suites: Vec<Suite>,
    pub preconditions: Vec<(Suite, String)>,
}

pub fn run<S: Field>(target: &Target, label: &str, requested: &[Suite], tol: f64, seed: u64) -> Result<Outcome> {
    let runner = Runner::<S>::new(target, tol, seed)?;
    let mut report = Report::new(label, S::backend());
    let mut preconditions = Vec::new();
    let plan = plan(requested);
    for &(suite, named) in &plan {
        let mut part = Report::new(label, S::backend());
        match runner.run(suite, &mut part) {
            Ok(()) => {
                report.extend(part.checks);
                report.values.extend(part.values);
            }
            Err(e) if named => preconditions.push((suite, e.to_string())),
            Err(e) => report.push(Check::skipped(format!("{suite}: suite"), "precondition", e.to_string())),
        }
    }
    Ok(Outcome { report, suites: plan.into_iter().map(|(s, _)| s).collect(), preconditions })
}
