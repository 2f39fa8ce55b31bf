//! Riemann sums `S_N = p^{−N} Σ_{x<p^N} f(x)` and their convergence.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::rational::{self, bit_size, int, pow_i, Rational};
use crate::arith::residue::ResidueRing;
use crate::arith::{PadicContext, PadicNumber};
use crate::error::{Error, Result};
use crate::qcalc::{CharacterSum, QParam};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SumMethod {
    /// Literal sum over every x.
    Enumeration,
    /// `Σ_{x<P} q^{lx} = (q^{lP} − 1)/(q^l − 1)` in exact rationals.
    Geometric,
    /// The same geometric sums modulo a power of p.
    ModularGeometric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CostCap {
    /// Largest bit size allowed for an exact `q^{lP}` before switching to
    /// modular arithmetic.
    pub max_bits: u64,
    /// Largest number of points an enumeration may visit.
    pub max_points: u64,
}

impl Default for CostCap {
    fn default() -> Self {
        CostCap {
            max_bits: 16_384,
            max_points: 50_000_000,
        }
    }
}

impl CostCap {
    pub fn check_points(&self, points: u64) -> Result<()> {
        if points > self.max_points {
            return Err(Error::ResourceCap(format!(
                "{points} summation points exceed the cap of {}",
                self.max_points
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SumValue {
    Exact(Rational),
    Padic(PadicNumber),
}

impl SumValue {
    pub fn to_padic(&self, ctx: PadicContext) -> Result<PadicNumber> {
        match self {
            SumValue::Exact(r) => Ok(PadicNumber::from_rational(r, ctx)),
            SumValue::Padic(x) => x.with_context(ctx),
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            SumValue::Exact(r) => Some(r),
            SumValue::Padic(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RiemannSumResult {
    pub level: u32,
    pub value: SumValue,
    pub method: SumMethod,
}

/// `p^level` as u64, or a resource error.
pub fn points(p: u64, level: u32) -> Result<u64> {
    p.checked_pow(level)
        .ok_or_else(|| Error::ResourceCap(format!("{p}^{level} overflows")))
}

/// `S_N` of a character sum. `Geometric` falls back to modular arithmetic
/// when an exact power would exceed the bit cap.
pub fn riemann_sum(
    f: &CharacterSum,
    q: &QParam,
    level: u32,
    method: SumMethod,
    cap: &CostCap,
) -> Result<RiemannSumResult> {
    let ctx = q.require_padic()?;
    let p = ctx.p();
    let count = points(p, level)?;
    let scale = Rational::from_integer(BigInt::from(count)).recip();
    let qv = q.value();
    let value = match method {
        SumMethod::Enumeration => {
            cap.check_points(count.saturating_mul(f.len() as u64))?;
            let mut total = Rational::zero();
            for (l, c) in f.terms() {
                let step = pow_i(qv, l);
                let mut pw = Rational::one();
                let mut s = Rational::zero();
                for _ in 0..count {
                    s += &pw;
                    pw *= &step;
                }
                total += c * s;
            }
            SumValue::Exact(total * scale)
        }
        SumMethod::Geometric => {
            let qbits = bit_size(qv);
            let max_l = f.terms().map(|(l, _)| l.unsigned_abs()).max().unwrap_or(0);
            if qbits.saturating_mul(max_l).saturating_mul(count) > cap.max_bits {
                return riemann_sum(f, q, level, SumMethod::ModularGeometric, cap);
            }
            let mut total = Rational::zero();
            for (l, c) in f.terms() {
                total += c * geometric_exact(qv, l, count);
            }
            SumValue::Exact(total * scale)
        }
        SumMethod::ModularGeometric => {
            let chars = ModularChars::new(f, qv, p, ResidueRing::max_digits(p))?;
            SumValue::Padic(chars.scaled_sum(chars.sum_prefix(count), level, ctx))
        }
    };
    Ok(RiemannSumResult {
        level,
        value,
        method,
    })
}

fn geometric_exact(q: &Rational, l: i64, count: u64) -> Rational {
    if l == 0 {
        return Rational::from_integer(BigInt::from(count));
    }
    let r = pow_i(q, l);
    let big = pow_i(&r, count as i64);
    (big - int(1)) / (r - int(1))
}

/// `S_N` of an arbitrary sequence by enumeration.
pub fn riemann_sum_fn<F>(f: F, p: u64, level: u32, cap: &CostCap) -> Result<Rational>
where
    F: Fn(u64) -> Rational,
{
    let count = points(p, level)?;
    cap.check_points(count)?;
    let s = (0..count).map(f).fold(Rational::zero(), |a, b| a + b);
    Ok(s / Rational::from_integer(BigInt::from(count)))
}

/// A character sum `p^{−s} Σ c'_l q^{lx}` with p-integral `c'_l`, reduced
/// modulo `p^K`.
#[derive(Clone, Debug)]
pub(crate) struct ModularChars {
    pub ring: ResidueRing,
    pub shift: i64,
    terms: Vec<ModTerm>,
}

#[derive(Clone, Copy, Debug)]
struct ModTerm {
    coeff: u128,
    ratio: u128,
    inv_ratio: u128,
}

impl ModularChars {
    pub fn new(f: &CharacterSum, q: &Rational, p: u64, digits: u32) -> Result<Self> {
        let ring = ResidueRing::new(p, digits)?;
        let shift = (-f.min_coeff_valuation(p)).max(0);
        let pshift = rational::pow_u(&int(p as i64), shift as u64);
        let terms = f
            .terms()
            .map(|(l, c)| {
                Ok(ModTerm {
                    coeff: ring.reduce(&(c * &pshift))?,
                    ratio: ring.reduce(&pow_i(q, l))?,
                    inv_ratio: ring.reduce(&pow_i(q, -l))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ModularChars { ring, shift, terms })
    }

    /// `Σ_{x<count} p^s f(x) mod p^K`.
    pub fn sum_prefix(&self, count: u64) -> u128 {
        self.terms.iter().fold(0, |acc, t| {
            let g = self.ring.geometric_sum(t.ratio, count);
            self.ring.add(acc, self.ring.mul(t.coeff, g))
        })
    }

    /// `p^s f(x) mod p^K` for `x = 0..count`.
    pub fn table(&self, count: u64) -> Vec<u128> {
        let mut out = vec![0u128; count as usize];
        for t in &self.terms {
            let mut pw = t.coeff;
            for slot in out.iter_mut() {
                *slot = self.ring.add(*slot, pw);
                pw = self.ring.mul(pw, t.ratio);
            }
        }
        out
    }

    /// `p^s f(−x) mod p^K` for `x = 0..count`.
    pub fn table_negative(&self, count: u64) -> Vec<u128> {
        let mut out = vec![0u128; count as usize];
        for t in &self.terms {
            let mut pw = t.coeff;
            for slot in out.iter_mut() {
                *slot = self.ring.add(*slot, pw);
                pw = self.ring.mul(pw, t.inv_ratio);
            }
        }
        out
    }

    /// `p^{−s−level} · residue` as a p-adic number.
    pub fn scaled_sum(&self, residue: u128, level: u32, ctx: PadicContext) -> PadicNumber {
        self.ring
            .to_padic(residue, ctx)
            .shift(-(self.shift + level as i64))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvergenceProfile {
    pub levels: Vec<u32>,
    pub values: Vec<PadicNumber>,
    /// `v_p(S_{N+1} − S_N)` for consecutive levels; `None` when equal.
    pub deltas: Vec<Option<i64>>,
    pub stabilized_value: PadicNumber,
    /// Absolute digits trusted in the stabilized value; `None` when every
    /// level agrees exactly.
    pub stabilized_digits: Option<i64>,
}

impl ConvergenceProfile {
    /// Builds a profile from p-adic values at consecutive levels.
    pub fn from_values(levels: Vec<u32>, values: Vec<PadicNumber>) -> Result<Self> {
        let sums = values.into_iter().map(SumValue::Padic).collect();
        Self::from_sums(levels, sums)
    }

    /// Builds a profile from sums at consecutive levels; exact neighbours
    /// are compared exactly.
    pub fn from_sums(levels: Vec<u32>, sums: Vec<SumValue>) -> Result<Self> {
        if sums.len() < 2 {
            return Err(Error::Domain("a profile needs at least two levels".into()));
        }
        let ctx = match sums.iter().find_map(|s| match s {
            SumValue::Padic(x) => Some(x.context()),
            SumValue::Exact(_) => None,
        }) {
            Some(c) => c,
            None => return Err(Error::Domain("exact sums need a context".into())),
        };
        Self::from_sums_in(levels, sums, ctx)
    }

    pub fn from_sums_in(levels: Vec<u32>, sums: Vec<SumValue>, ctx: PadicContext) -> Result<Self> {
        if sums.len() < 2 {
            return Err(Error::Domain("a profile needs at least two levels".into()));
        }
        let deltas = sums
            .windows(2)
            .map(|w| match (&w[0], &w[1]) {
                (SumValue::Exact(a), SumValue::Exact(b)) if a == b => Ok(None),
                (SumValue::Exact(a), SumValue::Exact(b)) => {
                    rational::valuation(&(b - a), ctx.p()).map(Some)
                }
                (a, b) => b.to_padic(ctx)?.agreement(&a.to_padic(ctx)?),
            })
            .collect::<Result<Vec<_>>>()?;
        let values = sums
            .iter()
            .map(|s| s.to_padic(ctx))
            .collect::<Result<Vec<_>>>()?;
        let last = *deltas.last().expect("two or more values");
        let top = values.last().expect("non-empty");
        let stabilized_value = match (last, sums.last()) {
            (Some(d), _) => top.truncate_abs(d),
            (None, Some(SumValue::Exact(r))) => PadicNumber::from_rational(r, ctx),
            (None, _) => top.clone(),
        };
        Ok(ConvergenceProfile {
            levels,
            values,
            deltas,
            stabilized_value,
            stabilized_digits: last,
        })
    }

    /// Significant digits of the stabilized value.
    pub fn relative_digits(&self) -> Option<i64> {
        let d = self.stabilized_digits?;
        Some(match self.stabilized_value.valuation() {
            Some(v) => d - v,
            None => 0,
        })
    }
}

/// Riemann sums of `f` at every level in `levels`, computed in parallel and
/// combined in level order.
pub fn convergence_profile(
    f: &CharacterSum,
    q: &QParam,
    levels: std::ops::RangeInclusive<u32>,
    cap: &CostCap,
) -> Result<ConvergenceProfile> {
    let ctx = q.require_padic()?;
    let lv: Vec<u32> = levels.collect();
    let sums = lv
        .par_iter()
        .map(|&n| Ok(riemann_sum(f, q, n, SumMethod::Geometric, cap)?.value))
        .collect::<Result<Vec<_>>>()?;
    ConvergenceProfile::from_sums_in(lv, sums, ctx)
}
