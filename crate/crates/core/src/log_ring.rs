//! Laurent polynomials in the formal symbol `L = log q` over ℚ.
//!
//! Modified q-Bernoulli numbers live in ℚ + ℚ·L and the closed forms for
//! the convolution quantities in ℚ[L, L⁻¹]. Keeping them symbolic means an
//! identity that holds in ℚ[L, L⁻¹] cancels to an exact zero; `L` is only
//! replaced by a number at comparison points.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::arith::{PadicNumber, Rational};
use crate::error::{Error, Result};

/// Σ c_d · L^d with finite support; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default, Hash)]
pub struct LogLaurent {
    coeffs: BTreeMap<i32, Rational>,
}

impl LogLaurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(0, c)
    }

    /// The symbol `L` itself.
    pub fn log_symbol() -> Self {
        Self::monomial(1, Rational::one())
    }

    pub fn monomial(degree: i32, c: Rational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(degree, c);
        }
        LogLaurent { coeffs }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i32, Rational)>) -> Self {
        let mut out = LogLaurent::zero();
        for (d, c) in terms {
            out.add_term(d, &c);
        }
        out
    }

    fn add_term(&mut self, degree: i32, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(degree).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&degree);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, degree: i32) -> Rational {
        self.coeffs
            .get(&degree)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &Rational)> {
        self.coeffs.iter().map(|(d, c)| (*d, c))
    }

    /// (lowest, highest) degree with a nonzero coefficient.
    pub fn degree_range(&self) -> Option<(i32, i32)> {
        let lo = *self.coeffs.keys().next()?;
        let hi = *self.coeffs.keys().next_back()?;
        Some((lo, hi))
    }

    pub fn degrees_within(&self, lo: i32, hi: i32) -> bool {
        self.degree_range().is_none_or(|(a, b)| a >= lo && b <= hi)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LogLaurent {
            coeffs: self.coeffs.iter().map(|(d, v)| (*d, v * c)).collect(),
        }
    }

    /// Multiplies by `L^k`.
    pub fn shift(&self, k: i32) -> Self {
        LogLaurent {
            coeffs: self
                .coeffs
                .iter()
                .map(|(d, v)| (d + k, v.clone()))
                .collect(),
        }
    }

    /// The substitution `L ↦ −L`, i.e. `c_d ↦ (−1)^d c_d`.
    pub fn negate_log(&self) -> Self {
        LogLaurent {
            coeffs: self
                .coeffs
                .iter()
                .map(|(d, v)| (*d, if d.rem_euclid(2) == 1 { -v } else { v.clone() }))
                .collect(),
        }
    }

    /// Σ c_d · x^d in the target arithmetic.
    pub fn evaluate<T: EvalTarget>(&self, x: &T) -> Result<T> {
        ll_evaluate(self, x)
    }
}

/// Number systems a `LogLaurent` can be evaluated in.
pub trait EvalTarget: Clone {
    /// A rational embedded alongside `self` (same context).
    fn embed(&self, r: &Rational) -> Self;
    fn plus(&self, other: &Self) -> Result<Self>;
    fn times(&self, other: &Self) -> Result<Self>;
    fn inverse(&self) -> Result<Self>;
    fn is_zero_value(&self) -> bool;
}

impl EvalTarget for Rational {
    fn embed(&self, r: &Rational) -> Self {
        r.clone()
    }
    fn plus(&self, other: &Self) -> Result<Self> {
        Ok(self + other)
    }
    fn times(&self, other: &Self) -> Result<Self> {
        Ok(self * other)
    }
    fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.recip())
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
}

impl EvalTarget for PadicNumber {
    fn embed(&self, r: &Rational) -> Self {
        PadicNumber::from_rational(r, self.context())
    }
    fn plus(&self, other: &Self) -> Result<Self> {
        self.try_add(other)
    }
    fn times(&self, other: &Self) -> Result<Self> {
        self.try_mul(other)
    }
    fn inverse(&self) -> Result<Self> {
        PadicNumber::one(self.context()).try_div(self)
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
}

pub fn ll_evaluate<T: EvalTarget>(a: &LogLaurent, x: &T) -> Result<T> {
    let mut acc = x.embed(&Rational::zero());
    let Some((lo, _)) = a.degree_range() else {
        return Ok(acc);
    };
    if lo < 0 && x.is_zero_value() {
        return Err(Error::ZeroEvaluation);
    }
    let inv = if lo < 0 { Some(x.inverse()?) } else { None };
    for (d, c) in a.terms() {
        let base = if d < 0 { inv.as_ref().unwrap() } else { x };
        let mut pw = x.embed(&Rational::one());
        for _ in 0..d.unsigned_abs() {
            pw = pw.times(base)?;
        }
        acc = acc.plus(&pw.times(&x.embed(c))?)?;
    }
    Ok(acc)
}

impl Add<&LogLaurent> for &LogLaurent {
    type Output = LogLaurent;
    fn add(self, rhs: &LogLaurent) -> LogLaurent {
        let mut out = self.clone();
        for (d, c) in rhs.terms() {
            out.add_term(d, c);
        }
        out
    }
}

impl Sub<&LogLaurent> for &LogLaurent {
    type Output = LogLaurent;
    fn sub(self, rhs: &LogLaurent) -> LogLaurent {
        let mut out = self.clone();
        for (d, c) in rhs.terms() {
            out.add_term(d, &-c);
        }
        out
    }
}

impl Mul<&LogLaurent> for &LogLaurent {
    type Output = LogLaurent;
    fn mul(self, rhs: &LogLaurent) -> LogLaurent {
        let mut out = LogLaurent::zero();
        for (da, ca) in self.terms() {
            for (db, cb) in rhs.terms() {
                out.add_term(da + db, &(ca * cb));
            }
        }
        out
    }
}

impl Neg for &LogLaurent {
    type Output = LogLaurent;
    fn neg(self) -> LogLaurent {
        self.scale(&-Rational::one())
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<LogLaurent> for LogLaurent {
            type Output = LogLaurent;
            fn $m(self, rhs: LogLaurent) -> LogLaurent { (&self).$m(&rhs) }
        }
        impl $tr<&LogLaurent> for LogLaurent {
            type Output = LogLaurent;
            fn $m(self, rhs: &LogLaurent) -> LogLaurent { (&self).$m(rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for LogLaurent {
    type Output = LogLaurent;
    fn neg(self) -> LogLaurent {
        -&self
    }
}

impl std::iter::Sum for LogLaurent {
    fn sum<I: Iterator<Item = LogLaurent>>(iter: I) -> Self {
        iter.fold(LogLaurent::zero(), |a, b| a + b)
    }
}

impl fmt::Display for LogLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (d, c)) in self.terms().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if c.is_negative() { " - " } else { " + " })?;
            }
            match d {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{mag}·L")?,
                _ => write!(f, "{mag}·L^{d}")?,
            }
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct LogLaurentJson {
    render: String,
    coefficients: BTreeMap<i32, String>,
}

impl Serialize for LogLaurent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LogLaurentJson {
            render: self.to_string(),
            coefficients: self.terms().map(|(d, c)| (d, c.to_string())).collect(),
        }
        .serialize(s)
    }
}
