//! Classical, Carlitz and modified q-Bernoulli numbers.
//!
//! All three are produced by literal umbral expansion: `(β + 1)^n` is
//! expanded binomially, `β^i` is replaced by `β_i` and the single new
//! unknown is solved for. Modified values live in ℚ[L] with `L = log q`.

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::rational::{binomial, int, pow_u, Rational};
use crate::error::{Error, Result};
use crate::log_ring::LogLaurent;
use crate::qcalc::{q_bracket_int, QParam};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaKind {
    Classical,
    Carlitz,
    Modified,
    ModifiedInverseQ,
}

impl BetaKind {
    pub fn name(self) -> &'static str {
        match self {
            BetaKind::Classical => "classical",
            BetaKind::Carlitz => "carlitz",
            BetaKind::Modified => "modified",
            BetaKind::ModifiedInverseQ => "modified_inverse_q",
        }
    }
}

impl std::str::FromStr for BetaKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "classical" => BetaKind::Classical,
            "carlitz" => BetaKind::Carlitz,
            "modified" => BetaKind::Modified,
            "modified_inverse_q" | "modified-inverse-q" => BetaKind::ModifiedInverseQ,
            other => return Err(Error::Parse(format!("unknown kind {other:?}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BetaValue {
    Rational(Rational),
    Log(LogLaurent),
}

impl BetaValue {
    /// The value as an element of ℚ[L, L⁻¹].
    pub fn to_log(&self) -> LogLaurent {
        match self {
            BetaValue::Rational(r) => LogLaurent::constant(r.clone()),
            BetaValue::Log(a) => a.clone(),
        }
    }
}

impl fmt::Display for BetaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BetaValue::Rational(r) => write!(f, "{r}"),
            BetaValue::Log(a) => write!(f, "{a}"),
        }
    }
}

/// A memoized table `values[0..=n]` of one kind of Bernoulli number.
#[derive(Clone, Debug)]
pub struct BetaTable {
    kind: BetaKind,
    q: Option<QParam>,
    values: Vec<BetaValue>,
}

impl BetaTable {
    pub fn new(kind: BetaKind, q: Option<&QParam>) -> Result<Self> {
        if kind != BetaKind::Classical && q.is_none() {
            return Err(Error::Domain(format!("{} numbers need q", kind.name())));
        }
        let q = match kind {
            BetaKind::Classical => None,
            _ => q.cloned(),
        };
        let first = match kind {
            BetaKind::Classical | BetaKind::Carlitz => BetaValue::Rational(Rational::one()),
            _ => BetaValue::Log(LogLaurent::one()),
        };
        Ok(BetaTable {
            kind,
            q,
            values: vec![first],
        })
    }

    pub fn build(kind: BetaKind, q: Option<&QParam>, max_n: usize) -> Result<Self> {
        let mut t = BetaTable::new(kind, q)?;
        t.extend_to(max_n)?;
        Ok(t)
    }

    pub fn kind(&self) -> BetaKind {
        self.kind
    }

    pub fn q(&self) -> Option<&QParam> {
        self.q.as_ref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[BetaValue] {
        &self.values
    }

    pub fn get(&mut self, n: usize) -> Result<&BetaValue> {
        self.extend_to(n)?;
        Ok(&self.values[n])
    }

    pub fn extend_to(&mut self, max_n: usize) -> Result<()> {
        if self.values.len() > max_n {
            return Ok(());
        }
        match self.kind {
            BetaKind::Classical => {
                let v = classical_table(max_n);
                self.values = v.into_iter().map(BetaValue::Rational).collect();
            }
            BetaKind::Carlitz => {
                let q = self.q.as_ref().expect("checked in new").value().clone();
                let v = carlitz_table(max_n, &q)?;
                self.values = v.into_iter().map(BetaValue::Rational).collect();
            }
            BetaKind::Modified => {
                let q = self.q.as_ref().expect("checked in new").value().clone();
                let v = modified_table(max_n, &q)?;
                self.values = v.into_iter().map(BetaValue::Log).collect();
            }
            BetaKind::ModifiedInverseQ => {
                let q = self.q.as_ref().expect("checked in new").value().recip();
                let v = modified_table(max_n, &q)?;
                self.values = v
                    .into_iter()
                    .map(|a| BetaValue::Log(a.negate_log()))
                    .collect();
            }
        }
        Ok(())
    }
}

/// `B_0..=B_max` from `Σ_{i=0}^{n} C(n+1, i) B_i = 0`; `B_1 = −1/2`.
pub fn classical_table(max_n: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = vec![Rational::one()];
    for n in 1..=max_n {
        let s: Rational = (0..n)
            .map(|i| binomial(n as u64 + 1, i as u64) * &b[i])
            .fold(Rational::zero(), |a, x| a + x);
        b.push(-s / int(n as i64 + 1));
    }
    b
}

pub fn classical_bernoulli(n: usize) -> Rational {
    classical_table(n).pop().expect("table has n + 1 entries")
}

fn root_of_unity_check(q: &Rational, e: u64) -> Result<Rational> {
    let d = pow_u(q, e) - int(1);
    if d.is_zero() {
        return Err(Error::InadmissibleQ {
            q: q.to_string(),
            reason: format!("q^{e} = 1"),
        });
    }
    Ok(d)
}

/// `β_0..=β_max` from `(q^{n+1} − 1) β_n = δ_{n,1} − q Σ_{i<n} C(n,i) q^i β_i`.
pub fn carlitz_table(max_n: usize, q: &Rational) -> Result<Vec<Rational>> {
    let mut b: Vec<Rational> = vec![Rational::one()];
    for n in 1..=max_n {
        let d = root_of_unity_check(q, n as u64 + 1)?;
        let s: Rational = (0..n)
            .map(|i| binomial(n as u64, i as u64) * pow_u(q, i as u64) * &b[i])
            .fold(Rational::zero(), |a, x| a + x);
        let delta = if n == 1 { int(1) } else { int(0) };
        b.push((delta - q * s) / d);
    }
    Ok(b)
}

pub fn carlitz_beta(n: usize, q: &QParam) -> Result<Rational> {
    Ok(carlitz_table(n, q.value())?.pop().expect("non-empty"))
}

/// The closed value printed for `β_3`, `(1 − q)/([3]_q [4]_q)`.
pub fn carlitz_beta3_printed(q: &QParam) -> Rational {
    let qv = q.value();
    (int(1) - qv) / (q_bracket_int(3, qv) * q_bracket_int(4, qv))
}

/// `β̃_0..=β̃_max` from
/// `(q^n − 1) β̃_n = δ_{n,1} L/(q−1) − Σ_{i<n} C(n,i) q^i β̃_i`.
pub fn modified_table(max_n: usize, q: &Rational) -> Result<Vec<LogLaurent>> {
    let mut b: Vec<LogLaurent> = vec![LogLaurent::one()];
    let lead = LogLaurent::monomial(1, (q - int(1)).recip());
    for n in 1..=max_n {
        let d = root_of_unity_check(q, n as u64)?;
        let s: LogLaurent = (0..n)
            .map(|i| b[i].scale(&(binomial(n as u64, i as u64) * pow_u(q, i as u64))))
            .sum();
        let rhs = if n == 1 { &lead - &s } else { -s };
        b.push(rhs.scale(&d.recip()));
    }
    Ok(b)
}

pub fn modified_beta(n: usize, q: &QParam) -> Result<LogLaurent> {
    Ok(modified_table(n, q.value())?.pop().expect("non-empty"))
}

/// How the `l = 0` summand of the closed form, which contains `0/[0]_q`,
/// is read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroTerm {
    /// `L·l/[l]_q → (1 − q)` as `l → 0`; the summand becomes `(1−q)^{−n}`.
    Limit,
    /// `0/[0]_q ≔ 0`.
    Dropped,
}

/// `β̃_n = L/(1−q)^{n+1} Σ_{l=0}^{n} C(n,l) (−1)^{l−1} l/[l]_q`.
pub fn modified_beta_closed_with(n: usize, q: &QParam, zero: ZeroTerm) -> Result<LogLaurent> {
    let qv = q.value();
    let one_minus_q = int(1) - qv;
    let outer = pow_u(&one_minus_q, n as u64 + 1).recip();
    let mut acc = LogLaurent::zero();
    if zero == ZeroTerm::Limit {
        acc = acc + LogLaurent::constant(&outer * &one_minus_q);
    }
    for l in 1..=n {
        root_of_unity_check(qv, l as u64)?;
        let sign = if l % 2 == 1 { int(1) } else { int(-1) };
        let c = binomial(n as u64, l as u64) * sign * int(l as i64) / q_bracket_int(l as i64, qv);
        acc = acc + LogLaurent::monomial(1, c * &outer);
    }
    Ok(acc)
}

pub fn modified_beta_closed(n: usize, q: &QParam) -> Result<LogLaurent> {
    modified_beta_closed_with(n, q, ZeroTerm::Limit)
}

/// `β̃_{n,q⁻¹}` written in the symbol `L = log q`.
pub fn modified_beta_inverse_q(n: usize, q: &QParam) -> Result<LogLaurent> {
    Ok(modified_table(n, &q.value().recip())?
        .pop()
        .expect("non-empty")
        .negate_log())
}
