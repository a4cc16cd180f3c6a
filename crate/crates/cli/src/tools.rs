//! Three-form summaries: spectrum of r, decomposability, normal form and
//! the dimension-10 classification.

use npk_core::linalg;
use npk_core::report::Check;
use npk_core::scalar::{Backend, Field, Rational};
use npk_core::threeform::{
    classify_dim10, form_length, normal_form_dim10, normal_form_dim10_auto, normal_form_dim8, r_from_threeform,
    support_kernel, Dim10Class, RSpectrum, ThreeForm, ThreeFormFile,
};
use npk_core::Result;
use serde_json::{json, Value};

pub struct Entry {
    pub label: String,
    pub value: f64,
    pub imag: f64,
    pub algebraic: usize,
    pub geometric: usize,
}

pub enum Normal {
    Dim10 { case: String, alpha: f64, beta: f64, eps: Vec<i8>, backend: Backend },
    Dim8 { line_norm: f64 },
}

pub struct Summary {
    pub dim: usize,
    pub length: String,
    pub support_dim: usize,
    pub spectrum: Vec<Entry>,
    pub diagonalizable: bool,
    pub decomposable: bool,
    pub class: Option<Dim10Class>,
    /// The normal form, or why it could not be computed.
    pub normal: std::result::Result<Normal, String>,
    pub checks: Vec<Check>,
}

fn label(x: f64) -> String {
    let r = (x * 1e10).round() / 1e10;
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

fn entries<S: Field>(sp: &RSpectrum<S>) -> Vec<Entry> {
    let mut out: Vec<Entry> = sp
        .eigen
        .iter()
        .map(|e| Entry {
            label: match (&e.exact, e.imag) {
                (Some(x), _) => x.to_string(),
                (None, im) if im != 0.0 => format!("{}{}{}i", label(e.value), if im < 0.0 { "-" } else { "+" }, label(im.abs())),
                _ => label(e.value),
            },
            value: e.value,
            imag: e.imag,
            algebraic: e.algebraic,
            geometric: e.geometric,
        })
        .collect();
    out.sort_by(|a, b| a.algebraic.cmp(&b.algebraic).then(a.value.total_cmp(&b.value)).then(a.imag.total_cmp(&b.imag)));
    out
}

/// Spectrum and form checks in the backend `S`.
pub fn spectral<S: Field>(form: &ThreeForm<S>, tol: f64) -> Result<(RSpectrum<S>, Vec<Check>, usize)> {
    let exact = S::is_exact();
    let scale = form.scale().max(1.0);
    let sp = r_from_threeform(form, tol)?;
    let support = support_kernel(form, tol)?;
    let rs = sp.scale();
    let checks = vec![
        Check::residual("threeform: alternating", "eta(X,Y,Z) = -eta(Y,X,Z)", form.antisymmetry_residual(), scale, tol, exact, None),
        Check::residual("threeform: type", "eta(JX,JY,Z) = -eta(X,Y,Z)", form.type_residual(), scale, tol, exact, None),
        Check::residual("threeform: r is self-adjoint", "g(rX,Y) = g(X,rY)", sp.symmetry_residual, rs, tol, exact, None),
        Check::residual("threeform: r commutes with J", "[J, r] = 0", sp.j_residual, rs, tol, exact, None),
        Check::predicate("threeform: support is J-invariant", "J Sigma = Sigma", support.j_invariant, None),
    ];
    Ok((sp, checks, support.dim_support))
}

fn normal<S: Field>(form: &ThreeForm<S>, exact_form: Option<&ThreeForm<Rational>>, tol: f64) -> Result<(Normal, Vec<Check>)> {
    match form.dim() {
        10 => {
            if let Some(f) = exact_form {
                let nf = normal_form_dim10_auto(f, tol)?;
                let n = Normal::Dim10 {
                    case: nf.case().to_string(),
                    alpha: nf.alpha(),
                    beta: nf.beta(),
                    eps: nf.eps().to_vec(),
                    backend: nf.backend(),
                };
                Ok((n, vec![nf.reconstruction().clone()]))
            } else {
                let nf = normal_form_dim10(form, tol)?;
                let n = Normal::Dim10 {
                    case: nf.case.to_string(),
                    alpha: nf.alpha.to_f64(),
                    beta: nf.beta.to_f64(),
                    eps: nf.eps.clone(),
                    backend: S::backend(),
                };
                Ok((n, vec![nf.reconstruction]))
            }
        }
        8 => {
            let nf = normal_form_dim8(form, tol)?;
            Ok((Normal::Dim8 { line_norm: nf.line_norm.to_f64() }, nf.checks))
        }
        n => Err(npk_core::Error::PreconditionFailed(format!("normal forms are implemented in dimensions 8 and 10, not {n}"))),
    }
}

fn summarize_in<S: Field>(file: &ThreeFormFile, tol: f64, require_normal: bool) -> Result<Summary> {
    let form = file.to_form::<S>()?;
    let exact_form = if S::is_exact() { Some(file.to_form::<Rational>()?) } else { None };
    let (sp, mut checks, support_dim) = spectral(&form, tol)?;
    let class = (form.dim() == 10).then(|| classify_dim10(&sp));
    let normal = match normal(&form, exact_form.as_ref(), tol) {
        Ok((n, cs)) => {
            checks.extend(cs);
            Ok(n)
        }
        Err(e) if require_normal => return Err(e),
        Err(e) => Err(e.to_string()),
    };
    Ok(Summary {
        dim: form.dim(),
        length: form_length(&form)?.to_string(),
        support_dim,
        spectrum: entries(&sp),
        diagonalizable: sp.diagonalizable,
        decomposable: sp.decomposable,
        class,
        normal,
        checks,
    })
}

pub fn summarize(file: &ThreeFormFile, backend: Backend, tol: f64, require_normal: bool) -> Result<Summary> {
    match backend {
        Backend::Exact => summarize_in::<Rational>(file, tol, require_normal),
        Backend::Float => summarize_in::<f64>(file, tol, require_normal),
    }
}

impl Summary {
    /// `{value:multiplicity, ...}`, ordered by multiplicity and then value.
    pub fn spectrum_text(&self) -> String {
        let parts: Vec<String> = self.spectrum.iter().map(|e| format!("{}:{}", e.label, e.algebraic)).collect();
        format!("{{{}}}", parts.join(", "))
    }

    pub fn to_text(&self, detailed: bool) -> String {
        let mut s = format!("dimension: {}\nlength: {}\n", self.dim, self.length);
        match &self.normal {
            Ok(Normal::Dim10 { case, alpha, beta, eps, backend }) => {
                s.push_str(&format!("case: {case}\nalpha: {}\nbeta: {}\neps: {eps:?}\nnormal form backend: {backend}\n", label(*alpha), label(*beta)));
            }
            Ok(Normal::Dim8 { line_norm }) => s.push_str(&format!("kernel line norm: {}\n", label(*line_norm))),
            Err(e) => s.push_str(&format!("case: unavailable ({e})\n")),
        }
        s.push_str(&format!("spectrum: {}\n", self.spectrum_text()));
        if detailed {
            for e in &self.spectrum {
                s.push_str(&format!("  {} algebraic {} geometric {}\n", e.label, e.algebraic, e.geometric));
            }
        }
        s.push_str(&format!("support dimension: {}\n", self.support_dim));
        s.push_str(&format!("diagonalizable: {}\ndecomposable: {}\n", self.diagonalizable, self.decomposable));
        if let Some(c) = self.class {
            s.push_str(&format!("class: {c}\n"));
        }
        for c in &self.checks {
            s.push_str(&format!("{} {} residual {:.3e}\n", if c.pass { "PASS" } else { "FAIL" }, c.name, c.residual));
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let normal = match &self.normal {
            Ok(Normal::Dim10 { case, alpha, beta, eps, backend }) => {
                json!({"case": case, "alpha": alpha, "beta": beta, "eps": eps, "backend": backend})
            }
            Ok(Normal::Dim8 { line_norm }) => json!({"kernel_line_norm": line_norm}),
            Err(e) => json!({"unavailable": e}),
        };
        let spectrum: Vec<Value> = self
            .spectrum
            .iter()
            .map(|e| json!({"value": e.label, "re": e.value, "im": e.imag, "algebraic": e.algebraic, "geometric": e.geometric}))
            .collect();
        json!({
            "dim": self.dim,
            "length": self.length,
            "normal_form": normal,
            "spectrum": spectrum,
            "support_dim": self.support_dim,
            "diagonalizable": self.diagonalizable,
            "decomposable": self.decomposable,
            "class": self.class.map(|c| c.to_string()),
            "checks": self.checks,
        })
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Largest entry of `|g r - F|`, for comparing r with a bilinear form `F`.
pub fn r_form_gap<S: Field>(form: &ThreeForm<S>, sp: &RSpectrum<S>, f: &linalg::Mat<S>) -> f64 {
    linalg::max_abs_diff(&linalg::mat_mul(&form.g, &sp.r), f)
}
