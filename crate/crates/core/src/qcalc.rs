//! q-brackets and the character-sum representation of `[x]_q^n`.
//!
//! Every function integrated in this crate is a finite combination
//! `Σ c_l q^{l·x}`. Exponents may be negative so that `[x]_{q⁻¹}^m` lives
//! in the same family as `[x]_q^n`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::rational::{self, binomial, int, pow_i, pow_u, Rational};
use crate::arith::{padic_log, real, PadicContext, PadicNumber};
use crate::error::{Error, Result};
use crate::log_ring::LogLaurent;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum QMode {
    /// q ∈ ℚ ⊂ ℚ_p with |1 − q|_p small enough for log and q^x to converge.
    Padic(PadicContext),
    /// 0 < q < 1, where geometric series in q converge.
    Real,
    /// Only algebraic identities are evaluated; no analytic constraint.
    Formal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QParam {
    q: Rational,
    mode: QMode,
}

impl QParam {
    pub fn padic(q: Rational, ctx: PadicContext) -> Result<Self> {
        Self::check_not_one(&q)?;
        let p = ctx.p();
        let need = if p == 2 { 2 } else { 1 };
        let v = rational::valuation(&(&q - int(1)), p)?;
        if v < need {
            return Err(Error::InadmissibleQ {
                q: q.to_string(),
                reason: format!("v_{p}(q − 1) = {v} < {need}"),
            });
        }
        Ok(QParam {
            q,
            mode: QMode::Padic(ctx),
        })
    }

    pub fn real(q: Rational) -> Result<Self> {
        if !(q.is_positive() && q < int(1)) {
            return Err(Error::InadmissibleQ {
                q: q.to_string(),
                reason: "real mode needs 0 < q < 1".into(),
            });
        }
        Ok(QParam {
            q,
            mode: QMode::Real,
        })
    }

    /// Any rational that is neither 0 nor a root of unity.
    pub fn formal(q: Rational) -> Result<Self> {
        Self::check_not_one(&q)?;
        if q.is_zero() || q == int(-1) {
            return Err(Error::InadmissibleQ {
                q: q.to_string(),
                reason: "q must not be 0 or −1".into(),
            });
        }
        Ok(QParam {
            q,
            mode: QMode::Formal,
        })
    }

    fn check_not_one(q: &Rational) -> Result<()> {
        if q.is_one() {
            return Err(Error::InadmissibleQ {
                q: "1".into(),
                reason: "q = 1 has no q-analogue".into(),
            });
        }
        Ok(())
    }

    pub fn value(&self) -> &Rational {
        &self.q
    }

    pub fn mode(&self) -> QMode {
        self.mode
    }

    pub fn padic_context(&self) -> Option<PadicContext> {
        match self.mode {
            QMode::Padic(ctx) => Some(ctx),
            _ => None,
        }
    }

    pub fn require_padic(&self) -> Result<PadicContext> {
        self.padic_context()
            .ok_or_else(|| Error::Domain(format!("q = {} is not in p-adic mode", self.q)))
    }

    /// `q⁻¹` in the same mode; real mode becomes formal since `1/q > 1`.
    pub fn inverse(&self) -> QParam {
        let q = self.q.recip();
        let mode = match self.mode {
            QMode::Real => QMode::Formal,
            m => m,
        };
        QParam { q, mode }
    }

    pub fn pow(&self, e: i64) -> Rational {
        pow_i(&self.q, e)
    }
}

impl fmt::Display for QParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.q)
    }
}

/// `[x]_q = (1 − q^x)/(1 − q)`.
pub fn q_bracket(x: u64, q: &QParam) -> Rational {
    q_bracket_int(x as i64, q.value())
}

/// `[x]_q` for any integer `x`; negative `x` gives `−q^x [−x]_q`.
pub fn q_bracket_int(x: i64, q: &Rational) -> Rational {
    (int(1) - pow_i(q, x)) / (int(1) - q)
}

/// x ↦ Σ_l c_l q^{l·x}.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CharacterSum {
    terms: BTreeMap<i64, Rational>,
}

impl CharacterSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_terms([(0, c)])
    }

    /// The single character `x ↦ q^{l·x}`.
    pub fn character(l: i64) -> Self {
        Self::from_terms([(l, Rational::one())])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Rational)>) -> Self {
        let mut out = CharacterSum::zero();
        for (l, c) in terms {
            out.add_term(l, &c);
        }
        out
    }

    fn add_term(&mut self, l: i64, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(l).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&l);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.terms.iter().map(|(l, c)| (*l, c))
    }

    pub fn coeff(&self, l: i64) -> Rational {
        self.terms.get(&l).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Pointwise value at an integer point.
    pub fn eval(&self, x: i64, q: &Rational) -> Rational {
        self.terms
            .iter()
            .map(|(l, c)| c * pow_i(q, l * x))
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (l, c) in other.terms() {
            out.add_term(l, c);
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        CharacterSum::from_terms(self.terms().map(|(l, v)| (l, v * c)))
    }

    /// Pointwise product; exponents add.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = CharacterSum::zero();
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                out.add_term(a + b, &(ca * cb));
            }
        }
        out
    }

    /// Multiplies by the character `q^{k·x}`.
    pub fn shift(&self, k: i64) -> Self {
        CharacterSum {
            terms: self.terms.iter().map(|(l, c)| (l + k, c.clone())).collect(),
        }
    }

    /// x ↦ f(−x).
    pub fn reflect(&self) -> Self {
        CharacterSum {
            terms: self.terms.iter().map(|(l, c)| (-l, c.clone())).collect(),
        }
    }

    /// d/dx as `L · Σ l·c_l q^{l·x}`, returned as (L, characters).
    pub fn derivative(&self) -> (LogLaurent, CharacterSum) {
        let chars = CharacterSum::from_terms(self.terms().map(|(l, c)| (l, c * int(l))));
        (LogLaurent::log_symbol(), chars)
    }

    pub fn min_coeff_valuation(&self, p: u64) -> i64 {
        self.terms
            .values()
            .filter_map(|c| rational::valuation(c, p).ok())
            .min()
            .unwrap_or(0)
    }
}

impl fmt::Display for CharacterSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (l, c)) in self.terms().enumerate() {
            let sep = match (i, c.is_negative()) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            };
            write!(f, "{sep}{}·q^({l}x)", c.abs())?;
        }
        Ok(())
    }
}

impl Serialize for CharacterSum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: BTreeMap<i64, String> = self.terms().map(|(l, c)| (l, c.to_string())).collect();
        rows.serialize(s)
    }
}

/// `[x]_q^n = (1−q)^{−n} Σ_l C(n,l)(−1)^l q^{l·x}`.
pub fn monomial_characters(n: u32, q: &QParam) -> CharacterSum {
    let scale = pow_u(&(int(1) - q.value()), n as u64).recip();
    CharacterSum::from_terms((0..=n as i64).map(|l| {
        let sign = if l % 2 == 0 { int(1) } else { int(-1) };
        (l, binomial(n as u64, l as u64) * sign * &scale)
    }))
}

/// `[x]_{q⁻¹}^m` written in characters of base `q` (exponents ≤ 0).
pub fn inverse_monomial_characters(m: u32, q: &QParam) -> CharacterSum {
    monomial_characters(m, &q.inverse()).reflect()
}

/// The derivative of `g(x) = [x]_q^n` as (scalar, characters) whose
/// product is `g′`: `n·L/(q−1) · [x]_q^{n−1} q^x`.
pub fn monomial_derivative(n: u32, q: &QParam) -> Result<(LogLaurent, CharacterSum)> {
    let (scalar, base) = monomial_derivative_unweighted(n, q)?;
    Ok((scalar, base.shift(1)))
}

/// The same scalar without the `q^x` factor: `n·L/(q−1) · [x]_q^{n−1}`.
/// This is not the derivative of `[x]_q^n`; it is kept to probe formulas
/// stated in that form.
pub fn monomial_derivative_unweighted(n: u32, q: &QParam) -> Result<(LogLaurent, CharacterSum)> {
    if n == 0 {
        return Err(Error::Domain("monomial_derivative needs n ≥ 1".into()));
    }
    let scalar = LogLaurent::monomial(1, int(n as i64) / (q.value() - int(1)));
    Ok((scalar, monomial_characters(n - 1, q)))
}

/// Evaluates elements of ℚ[L, L⁻¹] at `L = log_p q`, raising the working
/// precision until the result carries `M` significant digits.
#[derive(Clone, Debug)]
pub struct PadicLogEvaluator {
    q: Rational,
    ctx: PadicContext,
}

impl PadicLogEvaluator {
    const MAX_EXTRA: u32 = 400;

    pub fn new(q: &QParam) -> Result<Self> {
        Ok(PadicLogEvaluator {
            q: q.value().clone(),
            ctx: q.require_padic()?,
        })
    }

    pub fn context(&self) -> PadicContext {
        self.ctx
    }

    /// `log_p q` at relative precision `M`.
    pub fn log_q(&self) -> Result<PadicNumber> {
        let wide = self.ctx.with_precision(self.ctx.precision() + 2)?;
        padic_log(&PadicNumber::from_rational(&self.q, wide))?.with_context(self.ctx)
    }

    pub fn evaluate(&self, a: &LogLaurent) -> Result<PadicNumber> {
        if a.is_zero() {
            return Ok(PadicNumber::zero(self.ctx));
        }
        let m = self.ctx.precision();
        let p = self.ctx.p();
        let deficit = a
            .terms()
            .map(|(_, c)| -rational::valuation(c, p).unwrap_or(0))
            .max()
            .unwrap_or(0)
            .max(0) as u32;
        let mut extra = 8 + deficit;
        loop {
            let wctx = self.ctx.with_precision(m + extra)?;
            let lval = padic_log(&PadicNumber::from_rational(&self.q, wctx))?;
            let val = a.evaluate(&lval)?;
            let good = val.relative_precision().is_some_and(|r| r >= m);
            if good || extra >= Self::MAX_EXTRA {
                return val.with_context(self.ctx);
            }
            extra = (extra * 2).min(Self::MAX_EXTRA);
        }
    }
}

/// `ln q` as a rational accurate to `10^-digits`.
pub fn real_log(q: &QParam, digits: u32) -> Result<Rational> {
    real::ln(q.value(), digits)
}
