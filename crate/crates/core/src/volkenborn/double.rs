//! `∫∫ [x]_{q⁻¹}^m [z−x]_q^n dμ_0(x) dμ_0(z)` by expansion and by brute
//! force.

use rayon::prelude::*;

use super::riemann::{points, ConvergenceProfile, CostCap, ModularChars};
use super::weighted_monomial_integral;
use crate::arith::rational::{binomial, int, pow_i};
use crate::arith::residue::ResidueRing;
use crate::arith::PadicNumber;
use crate::bernoulli::modified_beta_inverse_q;
use crate::error::Result;
use crate::log_ring::LogLaurent;
use crate::qcalc::{inverse_monomial_characters, monomial_characters, QParam};

/// Expansion through `[z−x]_q = [z]_q − q^{z−x}[x]_q` and
/// `q^{−x}[x]_q = q^{−1}[x]_{q⁻¹}`:
/// `Σ_l C(n,l) (−1)^l q^{−l} β̃_{m+l,q⁻¹} I_0([z]_q^{n−l} q^{lz})`.
pub fn double_integral(m: u32, n: u32, q: &QParam) -> Result<LogLaurent> {
    let mut acc = LogLaurent::zero();
    for l in 0..=n {
        let sign = if l % 2 == 0 { int(1) } else { int(-1) };
        let c = binomial(n as u64, l as u64) * sign * pow_i(q.value(), -(l as i64));
        let inv = modified_beta_inverse_q((m + l) as usize, q)?;
        let w = weighted_monomial_integral(n - l, l, q)?;
        acc = acc + (inv * w).scale(&c);
    }
    Ok(acc)
}

/// Which bracket the second factor of the brute-force integrand uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SecondKernel {
    /// `[z−x]_q^n`.
    BaseQ,
    /// `[z−x]_{q⁻¹}^n`.
    InverseQ,
}

/// `p^{−2N} Σ_{x<p^N} Σ_{z<p^N} [x]_{q⁻¹}^m [z−x]^n`, visiting every pair.
pub fn double_riemann_sum(
    m: u32,
    n: u32,
    q: &QParam,
    level: u32,
    kernel: SecondKernel,
    cap: &CostCap,
) -> Result<PadicNumber> {
    let ctx = q.require_padic()?;
    let p = ctx.p();
    let count = points(p, level)?;
    cap.check_points(count.saturating_mul(count))?;
    let digits = ResidueRing::max_digits(p);
    let first = ModularChars::new(&inverse_monomial_characters(m, q), q.value(), p, digits)?;
    let second_chars = match kernel {
        SecondKernel::BaseQ => monomial_characters(n, q),
        SecondKernel::InverseQ => inverse_monomial_characters(n, q),
    };
    let second = ModularChars::new(&second_chars, q.value(), p, digits)?;
    let ring = first.ring;
    let f = first.table(count);
    let g_pos = second.table(count);
    let g_neg = second.table_negative(count);
    let g = |d: i64| -> u128 {
        if d >= 0 {
            g_pos[d as usize]
        } else {
            g_neg[(-d) as usize]
        }
    };
    let total = (0..count as i64)
        .into_par_iter()
        .map(|x| {
            let inner = (0..count as i64).fold(0u128, |a, z| ring.add(a, g(z - x)));
            ring.mul(f[x as usize], inner)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0u128, |a, b| ring.add(a, b));
    Ok(ring
        .to_padic(total, ctx)
        .shift(-(first.shift + second.shift + 2 * level as i64)))
}

pub fn double_riemann_profile(
    m: u32,
    n: u32,
    q: &QParam,
    levels: std::ops::RangeInclusive<u32>,
    kernel: SecondKernel,
    cap: &CostCap,
) -> Result<ConvergenceProfile> {
    let lv: Vec<u32> = levels.collect();
    let values = lv
        .iter()
        .map(|&l| double_riemann_sum(m, n, q, l, kernel, cap))
        .collect::<Result<Vec<_>>>()?;
    ConvergenceProfile::from_values(lv, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::PadicContext;
    use crate::bernoulli::modified_beta;
    use crate::qcalc::PadicLogEvaluator;

    fn q4() -> QParam {
        QParam::padic(int(4), PadicContext::new(3, 12).unwrap()).unwrap()
    }

    #[test]
    fn trivial_cases() {
        let q = q4();
        assert_eq!(double_integral(0, 0, &q).unwrap(), LogLaurent::one());
        // m = 0, n = 1: β̃_1 − q^{-1} β̃_{1,q⁻¹} · L/(q − 1)
        let b1 = modified_beta(1, &q).unwrap();
        let bi = modified_beta_inverse_q(1, &q).unwrap();
        let want =
            b1 - (bi * LogLaurent::monomial(1, int(1) / int(3))).scale(&pow_i(q.value(), -1));
        assert_eq!(double_integral(0, 1, &q).unwrap(), want);
        assert_ne!(
            double_integral(0, 1, &q).unwrap(),
            modified_beta(1, &q).unwrap()
        );
    }

    #[test]
    fn expansion_matches_brute_force() {
        let q = q4();
        let ev = PadicLogEvaluator::new(&q).unwrap();
        let cap = CostCap::default();
        for m in 0..=3 {
            for n in 0..=3 {
                let prof =
                    double_riemann_profile(m, n, &q, 3..=4, SecondKernel::BaseQ, &cap).unwrap();
                let want = ev.evaluate(&double_integral(m, n, &q).unwrap()).unwrap();
                let agree = want.agreement(&prof.stabilized_value).unwrap();
                let digits = prof.stabilized_digits.unwrap();
                assert!(
                    agree.is_none_or(|a| a >= digits - 1),
                    "m={m} n={n} {agree:?} vs {digits}"
                );
            }
        }
    }
}
