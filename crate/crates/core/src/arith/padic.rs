//! Capped relative-precision p-adic numbers.
//!
//! A nonzero value is stored as `p^v · u` with `u` a unit known modulo
//! `p^r`, where `r ≤ M` is its relative precision. Zero is either exact
//! (valuation +∞) or known only modulo some `p^A` after cancellation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use super::rational::{self, is_prime, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PadicContext {
    p: u64,
    precision: u32,
}

impl PadicContext {
    pub const MIN_PRECISION: u32 = 4;

    pub fn new(p: u64, precision: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if precision < Self::MIN_PRECISION {
            return Err(Error::PrecisionTooSmall(precision));
        }
        Ok(PadicContext { p, precision })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn with_precision(&self, precision: u32) -> Result<Self> {
        PadicContext::new(self.p, precision)
    }

    pub(crate) fn pow_p(&self, digits: u32) -> BigUint {
        num_traits::pow(BigUint::from(self.p), digits as usize)
    }
}

impl fmt::Display for PadicContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q_{} (M = {})", self.p, self.precision)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    /// `abs_prec == None` is the exact zero.
    Zero { abs_prec: Option<i64> },
    Nonzero {
        valuation: i64,
        unit: BigUint,
        rel_prec: u32,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicNumber {
    ctx: PadicContext,
    repr: Repr,
}

impl PadicNumber {
    pub fn zero(ctx: PadicContext) -> Self {
        PadicNumber {
            ctx,
            repr: Repr::Zero { abs_prec: None },
        }
    }

    /// Zero known only modulo `p^abs_prec`.
    pub fn zero_mod(ctx: PadicContext, abs_prec: i64) -> Self {
        PadicNumber {
            ctx,
            repr: Repr::Zero {
                abs_prec: Some(abs_prec),
            },
        }
    }

    pub fn one(ctx: PadicContext) -> Self {
        Self::from_rational(&Rational::one(), ctx)
    }

    pub fn from_int(n: i64, ctx: PadicContext) -> Self {
        Self::from_rational(&rational::int(n), ctx)
    }

    /// Embeds a rational, truncated to relative precision `M`.
    pub fn from_rational(r: &Rational, ctx: PadicContext) -> Self {
        if r.is_zero() {
            return Self::zero(ctx);
        }
        let p = ctx.p;
        let mut num = r.numer().clone();
        let mut den = r.denom().clone();
        let v = rational::remove_factor(&mut num, p) - rational::remove_factor(&mut den, p);
        let modulus = BigInt::from(ctx.pow_p(ctx.precision));
        let den_inv = mod_inverse(&den.mod_floor(&modulus), &modulus);
        let unit = (num * den_inv).mod_floor(&modulus);
        PadicNumber {
            ctx,
            repr: Repr::Nonzero {
                valuation: v,
                unit: rational::biguint_of(&unit),
                rel_prec: ctx.precision,
            },
        }
    }

    /// The integer `residue` known modulo `p^abs_prec` (abs_prec ≥ 1).
    pub fn from_residue(residue: &BigUint, abs_prec: u32, ctx: PadicContext) -> Self {
        let modulus = ctx.pow_p(abs_prec);
        let mut r = residue % &modulus;
        if r.is_zero() {
            return Self::zero_mod(ctx, abs_prec as i64);
        }
        let pb = BigUint::from(ctx.p);
        let mut v = 0u32;
        loop {
            let (q, rem) = r.div_rem(&pb);
            if !rem.is_zero() {
                break;
            }
            r = q;
            v += 1;
        }
        let rel = (abs_prec - v).min(ctx.precision);
        let unit = r % ctx.pow_p(rel);
        PadicNumber {
            ctx,
            repr: Repr::Nonzero {
                valuation: v as i64,
                unit,
                rel_prec: rel,
            },
        }
    }

    pub fn context(&self) -> PadicContext {
        self.ctx
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { .. })
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { abs_prec: None })
    }

    /// v_p of a nonzero value; `None` for zero (exact or not).
    pub fn valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Nonzero { valuation, .. } => Some(*valuation),
            Repr::Zero { .. } => None,
        }
    }

    /// The value is known modulo `p^k` for the returned `k`; `None` if exact.
    pub fn absolute_precision(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero { abs_prec } => *abs_prec,
            Repr::Nonzero {
                valuation,
                rel_prec,
                ..
            } => Some(valuation + *rel_prec as i64),
        }
    }

    pub fn relative_precision(&self) -> Option<u32> {
        match &self.repr {
            Repr::Nonzero { rel_prec, .. } => Some(*rel_prec),
            Repr::Zero { .. } => None,
        }
    }

    pub fn unit(&self) -> Option<&BigUint> {
        match &self.repr {
            Repr::Nonzero { unit, .. } => Some(unit),
            Repr::Zero { .. } => None,
        }
    }

    /// Base-p digits of the unit, least significant first.
    pub fn digits(&self) -> Vec<u64> {
        match &self.repr {
            Repr::Zero { .. } => Vec::new(),
            Repr::Nonzero { unit, rel_prec, .. } => {
                let pb = BigUint::from(self.ctx.p);
                let mut u = unit.clone();
                (0..*rel_prec)
                    .map(|_| {
                        let (q, r) = u.div_rem(&pb);
                        u = q;
                        digit_u64(&r)
                    })
                    .collect()
            }
        }
    }

    /// The rational `p^v · u` carried by the representation.
    pub fn to_rational(&self) -> Rational {
        match &self.repr {
            Repr::Zero { .. } => Rational::zero(),
            Repr::Nonzero {
                valuation, unit, ..
            } => {
                let u = Rational::from_integer(BigInt::from(unit.clone()));
                u * rational::pow_i(&rational::int(self.ctx.p as i64), *valuation)
            }
        }
    }

    fn check_ctx(&self, other: &Self) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::ContextMismatch(
                self.ctx.to_string(),
                other.ctx.to_string(),
            ));
        }
        Ok(())
    }

    /// Lowers the absolute precision to at most `abs_prec`.
    pub fn truncate_abs(&self, abs_prec: i64) -> Self {
        match &self.repr {
            Repr::Zero { abs_prec: None } => self.clone(),
            Repr::Zero { abs_prec: Some(a) } => Self::zero_mod(self.ctx, (*a).min(abs_prec)),
            Repr::Nonzero {
                valuation,
                unit,
                rel_prec,
            } => {
                if *valuation >= abs_prec {
                    return Self::zero_mod(self.ctx, abs_prec);
                }
                let rel = (*rel_prec as i64).min(abs_prec - valuation) as u32;
                PadicNumber {
                    ctx: self.ctx,
                    repr: Repr::Nonzero {
                        valuation: *valuation,
                        unit: unit % self.ctx.pow_p(rel),
                        rel_prec: rel,
                    },
                }
            }
        }
    }

    /// Moves the value into another context with the same prime, capping
    /// relative precision at the new `M`.
    pub fn with_context(&self, ctx: PadicContext) -> Result<Self> {
        if ctx.p != self.ctx.p {
            return Err(Error::ContextMismatch(
                self.ctx.to_string(),
                ctx.to_string(),
            ));
        }
        let repr = match &self.repr {
            Repr::Zero { abs_prec } => Repr::Zero {
                abs_prec: *abs_prec,
            },
            Repr::Nonzero {
                valuation,
                unit,
                rel_prec,
            } => {
                let rel = (*rel_prec).min(ctx.precision);
                Repr::Nonzero {
                    valuation: *valuation,
                    unit: unit % ctx.pow_p(rel),
                    rel_prec: rel,
                }
            }
        };
        Ok(PadicNumber { ctx, repr })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        let ctx = self.ctx;
        let out = match (&self.repr, &other.repr) {
            (Repr::Zero { abs_prec: None }, _) => other.clone(),
            (_, Repr::Zero { abs_prec: None }) => self.clone(),
            (Repr::Zero { abs_prec: Some(a) }, _) => other.truncate_abs(*a),
            (_, Repr::Zero { abs_prec: Some(b) }) => self.truncate_abs(*b),
            (
                Repr::Nonzero {
                    valuation: va,
                    unit: ua,
                    rel_prec: ra,
                },
                Repr::Nonzero {
                    valuation: vb,
                    unit: ub,
                    rel_prec: rb,
                },
            ) => {
                let abs = (va + *ra as i64).min(vb + *rb as i64);
                let vmin = (*va).min(*vb);
                let width = (abs - vmin) as u32;
                let modulus = ctx.pow_p(width);
                let shifted = |u: &BigUint, v: i64| -> BigUint {
                    let shift = (v - vmin) as u32;
                    if shift >= width {
                        BigUint::zero()
                    } else {
                        u * ctx.pow_p(shift)
                    }
                };
                let s = (shifted(ua, *va) + shifted(ub, *vb)) % &modulus;
                if s.is_zero() {
                    PadicNumber::zero_mod(ctx, abs)
                } else {
                    let shifted = PadicNumber::from_residue(&s, width, ctx);
                    shifted.shift(vmin)
                }
            }
        };
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        let ctx = self.ctx;
        let out = match (&self.repr, &other.repr) {
            (Repr::Zero { abs_prec: None }, _) | (_, Repr::Zero { abs_prec: None }) => {
                PadicNumber::zero(ctx)
            }
            (Repr::Zero { abs_prec: Some(a) }, Repr::Zero { abs_prec: Some(b) }) => {
                PadicNumber::zero_mod(ctx, a + b)
            }
            (Repr::Zero { abs_prec: Some(a) }, Repr::Nonzero { valuation, .. })
            | (Repr::Nonzero { valuation, .. }, Repr::Zero { abs_prec: Some(a) }) => {
                PadicNumber::zero_mod(ctx, a + valuation)
            }
            (
                Repr::Nonzero {
                    valuation: va,
                    unit: ua,
                    rel_prec: ra,
                },
                Repr::Nonzero {
                    valuation: vb,
                    unit: ub,
                    rel_prec: rb,
                },
            ) => {
                let rel = (*ra).min(*rb);
                PadicNumber {
                    ctx,
                    repr: Repr::Nonzero {
                        valuation: va + vb,
                        unit: (ua * ub) % ctx.pow_p(rel),
                        rel_prec: rel,
                    },
                }
            }
        };
        Ok(out)
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        let ctx = self.ctx;
        let (vb, ub, rb) = match &other.repr {
            Repr::Zero { .. } => return Err(Error::DivisionByZero),
            Repr::Nonzero {
                valuation,
                unit,
                rel_prec,
            } => (*valuation, unit, *rel_prec),
        };
        let out = match &self.repr {
            Repr::Zero { abs_prec: None } => PadicNumber::zero(ctx),
            Repr::Zero { abs_prec: Some(a) } => PadicNumber::zero_mod(ctx, a - vb),
            Repr::Nonzero {
                valuation: va,
                unit: ua,
                rel_prec: ra,
            } => {
                let rel = (*ra).min(rb);
                let modulus = ctx.pow_p(rel);
                let inv = mod_inverse_u(&(ub % &modulus), &modulus);
                PadicNumber {
                    ctx,
                    repr: Repr::Nonzero {
                        valuation: va - vb,
                        unit: (ua * inv) % modulus,
                        rel_prec: rel,
                    },
                }
            }
        };
        Ok(out)
    }

    /// Integer powers, negative exponents included.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let mut result = PadicNumber::one(self.ctx);
        let mut base = self.clone();
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                result = result.try_mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.try_mul(&base)?;
            }
        }
        if e < 0 {
            PadicNumber::one(self.ctx).try_div(&result)
        } else {
            Ok(result)
        }
    }

    /// Multiplies by `p^k`.
    pub fn shift(&self, k: i64) -> Self {
        let repr = match &self.repr {
            Repr::Zero { abs_prec } => Repr::Zero {
                abs_prec: abs_prec.map(|a| a + k),
            },
            Repr::Nonzero {
                valuation,
                unit,
                rel_prec,
            } => Repr::Nonzero {
                valuation: valuation + k,
                unit: unit.clone(),
                rel_prec: *rel_prec,
            },
        };
        PadicNumber {
            ctx: self.ctx,
            repr,
        }
    }

    fn neg_ref(&self) -> Self {
        let repr = match &self.repr {
            Repr::Zero { abs_prec } => Repr::Zero {
                abs_prec: *abs_prec,
            },
            Repr::Nonzero {
                valuation,
                unit,
                rel_prec,
            } => Repr::Nonzero {
                valuation: *valuation,
                unit: self.ctx.pow_p(*rel_prec) - unit,
                rel_prec: *rel_prec,
            },
        };
        PadicNumber {
            ctx: self.ctx,
            repr,
        }
    }

    /// How many digits two values share: `v_p(self − other)`, or the
    /// precision bound when the difference vanishes to known digits.
    /// `None` means exactly equal.
    pub fn agreement(&self, other: &Self) -> Result<Option<i64>> {
        let d = self.try_sub(other)?;
        Ok(match &d.repr {
            Repr::Zero { abs_prec } => *abs_prec,
            Repr::Nonzero { valuation, .. } => Some(*valuation),
        })
    }

    /// The p-adic logarithm `Σ_{k≥1} (−1)^{k+1} (u−1)^k / k`.
    pub fn log(&self) -> Result<Self> {
        padic_log(self)
    }
}

fn digit_u64(r: &BigUint) -> u64 {
    r.iter_u64_digits().next().unwrap_or(0)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    debug_assert!(e.gcd.is_one(), "no inverse modulo {m}");
    e.x.mod_floor(m)
}

fn mod_inverse_u(a: &BigUint, m: &BigUint) -> BigUint {
    let inv = mod_inverse(&BigInt::from(a.clone()), &BigInt::from(m.clone()));
    rational::biguint_of(&inv)
}

/// Embeds `r` into ℚ_p at the given precision.
pub fn padic_of_rational(r: &Rational, ctx: PadicContext) -> PadicNumber {
    PadicNumber::from_rational(r, ctx)
}

/// Smallest k with `k·v − ⌊log_p k⌋ ≥ M + v`; terms of index ≥ k are dropped.
pub(crate) fn log_series_cutoff(p: u64, v: i64, precision: u32) -> u64 {
    let target = precision as i64 + v;
    let mut k: u64 = 1;
    loop {
        if k as i64 * v - floor_log(p, k) >= target {
            return k;
        }
        k += 1;
    }
}

fn floor_log(p: u64, k: u64) -> i64 {
    let mut t = 0;
    let mut pow = p;
    while pow <= k {
        t += 1;
        pow = pow.saturating_mul(p);
    }
    t
}

pub fn padic_log(u: &PadicNumber) -> Result<PadicNumber> {
    let ctx = u.ctx;
    let one = PadicNumber::one(ctx);
    let x = u.try_sub(&one)?;
    if x.is_zero() {
        return Ok(x);
    }
    let v = x.valuation().expect("nonzero");
    let min_v = if ctx.p == 2 { 2 } else { 1 };
    if v < min_v {
        return Err(Error::LogDomain);
    }
    let cutoff = log_series_cutoff(ctx.p, v, ctx.precision);
    let mut sum = PadicNumber::zero(ctx);
    let mut power = x.clone();
    for k in 1..cutoff {
        let term = power.try_div(&PadicNumber::from_int(k as i64, ctx))?;
        sum = if k % 2 == 1 {
            sum.try_add(&term)?
        } else {
            sum.try_sub(&term)?
        };
        power = power.try_mul(&x)?;
    }
    Ok(sum.truncate_abs(v + ctx.precision as i64))
}

impl Neg for PadicNumber {
    type Output = PadicNumber;
    fn neg(self) -> PadicNumber {
        self.neg_ref()
    }
}

impl Neg for &PadicNumber {
    type Output = PadicNumber;
    fn neg(self) -> PadicNumber {
        self.neg_ref()
    }
}

macro_rules! forward_op {
    ($tr:ident, $m:ident, $try:ident) => {
        impl $tr<&PadicNumber> for &PadicNumber {
            type Output = PadicNumber;
            fn $m(self, rhs: &PadicNumber) -> PadicNumber {
                self.$try(rhs)
                    .expect("p-adic operands in different contexts")
            }
        }
        impl $tr<PadicNumber> for PadicNumber {
            type Output = PadicNumber;
            fn $m(self, rhs: PadicNumber) -> PadicNumber {
                (&self).$m(&rhs)
            }
        }
    };
}

forward_op!(Add, add, try_add);
forward_op!(Sub, sub, try_sub);
forward_op!(Mul, mul, try_mul);

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.ctx.p;
        match &self.repr {
            Repr::Zero { abs_prec: None } => write!(f, "0 (exact)"),
            Repr::Zero { abs_prec: Some(a) } => write!(f, "0 (mod {p}^{a})"),
            Repr::Nonzero {
                valuation,
                unit,
                rel_prec,
            } => write!(f, "{p}^{valuation} * {unit} (mod {p}^{rel_prec})"),
        }
    }
}

#[derive(Serialize)]
struct PadicJson {
    render: String,
    valuation: Option<i64>,
    precision: Option<i64>,
    digits: Vec<u64>,
}

impl Serialize for PadicNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PadicJson {
            render: self.to_string(),
            valuation: self.valuation(),
            precision: self.absolute_precision(),
            digits: self.digits(),
        }
        .serialize(s)
    }
}
