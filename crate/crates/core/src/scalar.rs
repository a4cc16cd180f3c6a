//! Scalar backends: exact rationals and binary64 floats behind one trait.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, NumAssign, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;
pub type Cx<S> = Complex<S>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

impl Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Backend::Exact => write!(f, "exact"),
            Backend::Float => write!(f, "float"),
        }
    }
}

/// Field operations shared by both backends.
pub trait Field:
    Clone
    + Debug
    + Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Num
    + Neg<Output = Self>
    + NumAssign
{
    fn backend() -> Backend;
    fn from_i64(v: i64) -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    /// Exact square root when it exists in the backend.
    fn try_sqrt(&self) -> Option<Self>;
    /// Treats values with magnitude at most `tol` as zero on the float backend.
    fn negligible(&self, tol: f64) -> bool;

    fn is_exact() -> bool {
        Self::backend() == Backend::Exact
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rational(&Rational::new(n.into(), d.into()))
    }
    fn sign(&self, tol: f64) -> i32 {
        if self.negligible(tol) {
            0
        } else if self.to_f64() > 0.0 {
            1
        } else {
            -1
        }
    }
    fn abs_val(&self) -> Self {
        if self.to_f64() < 0.0 {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Field for Rational {
    fn backend() -> Backend {
        Backend::Exact
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn try_sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        if &(&n * &n) == self.numer() && &(&d * &d) == self.denom() {
            Some(Rational::new(n, d))
        } else {
            None
        }
    }
    fn negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }
}

impl Field for f64 {
    fn backend() -> Backend {
        Backend::Float
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_rational(q: &Rational) -> Self {
        Field::to_f64(q)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn try_sqrt(&self) -> Option<Self> {
        if *self < 0.0 {
            None
        } else {
            Some(self.sqrt())
        }
    }
    fn negligible(&self, tol: f64) -> bool {
        self.abs() <= tol
    }
}

/// Scalars admitted by the Gaussian-elimination routines: real backends and
/// their complexifications.
pub trait Elim: Clone + Debug + PartialEq + NumAssign + Neg<Output = Self> + 'static {
    fn exact() -> bool;
    fn mag(&self) -> f64;
    fn conj_val(&self) -> Self;
}

impl<S: Field> Elim for S {
    fn exact() -> bool {
        S::is_exact()
    }
    fn mag(&self) -> f64 {
        self.to_f64().abs()
    }
    fn conj_val(&self) -> Self {
        self.clone()
    }
}

impl<S: Field> Elim for Complex<S> {
    fn exact() -> bool {
        S::is_exact()
    }
    fn mag(&self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }
    fn conj_val(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
}

pub fn cx<S: Field>(re: S, im: S) -> Complex<S> {
    Complex::new(re, im)
}

pub fn cx_real<S: Field>(re: S) -> Complex<S> {
    Complex::new(re, S::zero())
}

pub fn cx_i<S: Field>() -> Complex<S> {
    Complex::new(S::zero(), S::one())
}

/// Squared modulus, which stays inside the real backend.
pub fn norm_sqr<S: Field>(z: &Complex<S>) -> S {
    z.re.clone() * z.re.clone() + z.im.clone() * z.im.clone()
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    t.parse::<Rational>()
        .map_err(|_| Error::Parse(format!("not an exact rational: {t:?}")))
}

pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

/// Best rational approximation with a bounded denominator, used to lift float
/// eigenvalues to exact candidates that are then verified exactly.
pub fn rationalize(x: f64) -> Option<Rational> {
    let r: Ratio<i64> = Ratio::approximate_float(x)?;
    if r.denom().abs() > 1_000_000 {
        return None;
    }
    Some(Rational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom())))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn one<S: Field>() -> S {
    S::one()
}

pub fn is_one<S: Field>(x: &S) -> bool {
    num_traits::One::is_one(x)
}
