//! `A_{m,n}^q = I_0^{(z)}([z]_{q⁻¹}^m ⊛ [z]_q^{n−1})` by Riemann sums and
//! by the closed double sum.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use super::discrete_convolution;
use crate::arith::rational::{binomial, int, pow_i, pow_u, Rational};
use crate::arith::PadicNumber;
use crate::bernoulli::{modified_beta_inverse_q, modified_table};
use crate::error::{Error, Result};
use crate::log_ring::LogLaurent;
use crate::qcalc::{inverse_monomial_characters, monomial_characters, CharacterSum, QParam};
use crate::volkenborn::{points, ConvergenceProfile, CostCap, ModularChars};

/// The second factor of the convolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AmnKernel {
    /// `[z]_q^{n−1}`.
    Plain,
    /// `[z]_q^{n−1} q^z`, the `z`-dependent part of the derivative of
    /// `[z]_q^n`.
    DerivativeWeighted,
}

impl AmnKernel {
    fn characters(self, n: u32, q: &QParam) -> CharacterSum {
        let base = monomial_characters(n - 1, q);
        match self {
            AmnKernel::Plain => base,
            AmnKernel::DerivativeWeighted => base.shift(1),
        }
    }

    fn eval(self, n: u32, j: u64, q: &Rational) -> Rational {
        let b = pow_u(&crate::qcalc::q_bracket_int(j as i64, q), (n - 1) as u64);
        match self {
            AmnKernel::Plain => b,
            AmnKernel::DerivativeWeighted => b * pow_i(q, j as i64),
        }
    }
}

/// Which direct quantity the closed form `a_closed(m, n)` is compared with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexConvention {
    /// `A_{m,n}` with the plain kernel.
    Literal,
    /// `A_{m,n+1}` with the plain kernel.
    IndexShifted,
    /// `A_{m,n}` with the derivative-weighted kernel.
    DerivativeWeighted,
}

impl IndexConvention {
    pub const ALL: [IndexConvention; 3] = [
        IndexConvention::Literal,
        IndexConvention::IndexShifted,
        IndexConvention::DerivativeWeighted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IndexConvention::Literal => "literal",
            IndexConvention::IndexShifted => "index_shifted",
            IndexConvention::DerivativeWeighted => "derivative_weighted",
        }
    }

    /// `(m, n, kernel)` of the direct value matched against `a_closed(m, n)`.
    pub fn direct_key(self, m: u32, n: u32) -> (u32, u32, AmnKernel) {
        match self {
            IndexConvention::Literal => (m, n, AmnKernel::Plain),
            IndexConvention::IndexShifted => (m, n + 1, AmnKernel::Plain),
            IndexConvention::DerivativeWeighted => (m, n, AmnKernel::DerivativeWeighted),
        }
    }
}

/// The convention under which the closed form matches direct integration
/// on every grid point tried. Re-checked by the suite on each run.
pub const PINNED_CONVENTION: IndexConvention = IndexConvention::DerivativeWeighted;

/// Significant digits a direct value must reach before it is reported.
pub const MIN_STABLE_DIGITS: i64 = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AmnDirect {
    pub m: u32,
    pub n: u32,
    pub kernel: AmnKernel,
    pub q: String,
    /// Top level summed.
    pub level: u32,
    pub profile: ConvergenceProfile,
    pub value: PadicNumber,
}

/// Stabilized Riemann value of `z ↦ ([·]_{q⁻¹}^m ⊛ k_n)(z)`. Starts by
/// comparing levels `level` and `level + 1`; if fewer than four digits
/// agree, moves up one level at a time until the point cap is reached.
pub fn a_direct(
    m: u32,
    n: u32,
    kernel: AmnKernel,
    q: &QParam,
    level: u32,
    cap: &CostCap,
) -> Result<AmnDirect> {
    if n == 0 {
        return Err(Error::Domain("A_{m,n} needs n ≥ 1".into()));
    }
    let ctx = q.require_padic()?;
    let p = ctx.p();
    let digits = crate::arith::residue::ResidueRing::max_digits(p);
    let fm = ModularChars::new(&inverse_monomial_characters(m, q), q.value(), p, digits)?;
    let gm = ModularChars::new(&kernel.characters(n, q), q.value(), p, digits)?;
    let ring = fm.ring;
    let shift = fm.shift + gm.shift;
    let mut base = level.max(1);
    loop {
        let top = base + 1;
        let count = points(p, top)?;
        if cap.check_points(count.saturating_mul(4)).is_err() {
            return Err(Error::InsufficientPrecision(format!(
                "A_{{{m},{n}}} ({kernel:?}) did not reach {MIN_STABLE_DIGITS} stable digits below the point cap"
            )));
        }
        let f = fm.table(count);
        let g = gm.table(count);
        let mut prefix = Vec::with_capacity(g.len());
        let mut acc = 0u128;
        for x in &g {
            acc = ring.add(acc, *x);
            prefix.push(acc);
        }
        let levels: Vec<u32> = (1..=top).collect();
        let values: Vec<PadicNumber> = levels
            .iter()
            .map(|&lv| {
                let pn = p.pow(lv) as usize;
                // Σ_{z<P} Σ_{i≤z} f(i) g(z−i) = Σ_{i<P} f(i) G(P−1−i)
                let s = (0..pn).fold(0u128, |a, i| {
                    ring.add(a, ring.mul(f[i], prefix[pn - 1 - i]))
                });
                ring.to_padic(s, ctx).shift(-(shift + lv as i64))
            })
            .collect();
        let profile = ConvergenceProfile::from_values(levels, values)?;
        let stable = profile
            .relative_digits()
            .is_none_or(|d| d >= MIN_STABLE_DIGITS);
        if stable {
            return Ok(AmnDirect {
                m,
                n,
                kernel,
                q: q.to_string(),
                level: top,
                value: profile.stabilized_value.clone(),
                profile,
            });
        }
        base += 1;
    }
}

/// `S_N` of the same integrand with every `h(z)` formed by an explicit
/// discrete convolution in exact rationals. Quadratic in `p^N`.
pub fn a_direct_literal(
    m: u32,
    n: u32,
    kernel: AmnKernel,
    q: &QParam,
    level: u32,
    cap: &CostCap,
) -> Result<Rational> {
    if n == 0 {
        return Err(Error::Domain("A_{m,n} needs n ≥ 1".into()));
    }
    let p = q.require_padic()?.p();
    let count = points(p, level)?;
    cap.check_points(count.saturating_mul(count))?;
    let qv = q.value();
    let inv = qv.recip();
    let f: Vec<Rational> = (0..count)
        .map(|i| pow_u(&crate::qcalc::q_bracket_int(i as i64, &inv), m as u64))
        .collect();
    let g: Vec<Rational> = (0..count).map(|j| kernel.eval(n, j, qv)).collect();
    let mut total = int(0);
    for z in 0..count as usize {
        total += discrete_convolution(&f, &g, z)?;
    }
    Ok(total / Rational::from_integer(BigInt::from(count)))
}

/// `(q−1)/(nL) Σ_{l=1}^{n} Σ_{k=0}^{l} C(n,l) C(l,k) (−1)^l q^{−l} (q−1)^k
/// β̃_{m+l,q⁻¹} β̃_{n+k−l,q}`.
pub fn a_closed(m: u32, n: u32, q: &QParam) -> Result<LogLaurent> {
    if n == 0 {
        return Err(Error::Domain("A_{m,n} needs n ≥ 1".into()));
    }
    let qv = q.value();
    let qm1 = qv - int(1);
    let beta = modified_table(2 * n as usize, qv)?;
    let mut acc = LogLaurent::zero();
    for l in 1..=n {
        let inv = modified_beta_inverse_q((m + l) as usize, q)?;
        let sign = if l % 2 == 0 { int(1) } else { int(-1) };
        let outer = binomial(n as u64, l as u64) * sign * pow_i(qv, -(l as i64));
        for k in 0..=l {
            let c = &outer * binomial(l as u64, k as u64) * pow_u(&qm1, k as u64);
            acc = acc + (&inv * &beta[(n + k - l) as usize]).scale(&c);
        }
    }
    Ok(acc * LogLaurent::monomial(-1, qm1 / int(n as i64)))
}

/// Which q a direct value is taken over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QSide {
    Base,
    Inverse,
}

pub type DirectKey = (u32, u32, AmnKernel, QSide);

/// Direct values for a set of keys, computed in parallel and stored in key
/// order.
#[derive(Clone, Debug)]
pub struct DirectTable {
    entries: BTreeMap<DirectKey, Result<AmnDirect>>,
}

impl DirectTable {
    pub fn build(keys: &BTreeSet<DirectKey>, q: &QParam, level: u32, cap: &CostCap) -> Self {
        let inv = q.inverse();
        let list: Vec<DirectKey> = keys.iter().copied().collect();
        let results: Vec<Result<AmnDirect>> = list
            .par_iter()
            .map(|&(m, n, kernel, side)| {
                let qq = match side {
                    QSide::Base => q,
                    QSide::Inverse => &inv,
                };
                a_direct(m, n, kernel, qq, level, cap)
            })
            .collect();
        DirectTable {
            entries: list.into_iter().zip(results).collect(),
        }
    }

    pub fn get(&self, key: DirectKey) -> Result<&AmnDirect> {
        match self.entries.get(&key) {
            Some(Ok(v)) => Ok(v),
            Some(Err(e)) => Err(e.clone()),
            None => Err(Error::Domain(format!(
                "no direct value computed for {key:?}"
            ))),
        }
    }
}
