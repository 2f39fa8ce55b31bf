//! The discrete convolution `(f ⊛ g)(n) = Σ_{i≤n} f(i) g(n−i)`, the star
//! convolution at the trivial character, and the invariant `A_{m,n}^q`.

mod amn;
mod identities;

pub use amn::{
    a_closed, a_direct, a_direct_literal, AmnDirect, AmnKernel, DirectKey, DirectTable,
    IndexConvention, QSide, MIN_STABLE_DIGITS, PINNED_CONVENTION,
};
pub use identities::{
    closed_form_check, closed_form_keys, euler_analogue_check, integral_identity_check,
    integral_identity_keys, resolve_convention, symmetry_keys, symmetry_report,
    valuation_bound_check, valuation_keys, AmnLab, ConventionResolution,
};

use std::ops::{Add, Mul};

use num_traits::Zero;

use crate::arith::rational::{int, pow_i, Rational};
use crate::arith::PadicNumber;
use crate::error::{Error, Result};
use crate::log_ring::LogLaurent;
use crate::qcalc::{
    inverse_monomial_characters, monomial_characters, CharacterSum, PadicLogEvaluator, QParam,
};
use crate::volkenborn::character_integral;

/// `Σ_{i=0}^{n} f[i] g[n−i]`.
pub fn discrete_convolution<T>(f: &[T], g: &[T], n: usize) -> Result<T>
where
    T: Clone + Zero,
    for<'a> &'a T: Mul<&'a T, Output = T>,
    T: Add<T, Output = T>,
{
    if f.len() <= n || g.len() <= n {
        return Err(Error::Domain(format!(
            "sequences of length {} and {} do not reach index {n}",
            f.len(),
            g.len()
        )));
    }
    Ok((0..=n).fold(T::zero(), |acc, i| acc + &f[i] * &g[n - i]))
}

/// The star convolution at `z` of two character sums,
/// `I_0^{(x)}(f(x) g(z−x)) − (f ⊛ g′)(z)`, exactly in ℚ[L, L⁻¹].
pub fn star_convolution_of(f: &CharacterSum, g: &CharacterSum, q: &QParam, z: u64) -> LogLaurent {
    let qv = q.value();
    // g(z − x) = Σ_j b_j q^{jz} q^{−jx}
    let mut integral = LogLaurent::zero();
    for (i, a) in f.terms() {
        for (j, b) in g.terms() {
            let c = a * b * pow_i(qv, j * z as i64);
            integral = integral + character_integral(i - j, q).scale(&c);
        }
    }
    let (scalar, dchars) = g.derivative();
    let conv: Rational = (0..=z as i64)
        .map(|i| f.eval(i, qv) * dchars.eval(z as i64 - i, qv))
        .fold(int(0), |a, b| a + b);
    integral - scalar.scale(&conv)
}

/// [`star_convolution_of`] for `f = [·]_{q⁻¹}^m` and `g = [·]_q^n`.
pub fn star_convolution(m: u32, n: u32, q: &QParam, z: u64) -> LogLaurent {
    star_convolution_of(
        &inverse_monomial_characters(m, q),
        &monomial_characters(n, q),
        q,
        z,
    )
}

pub fn star_convolution_value(m: u32, n: u32, q: &QParam, z: u64) -> Result<PadicNumber> {
    PadicLogEvaluator::new(q)?.evaluate(&star_convolution(m, n, q, z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::rat;
    use crate::arith::PadicContext;
    use crate::bernoulli::{modified_beta, modified_beta_inverse_q};
    use crate::volkenborn::{riemann_sum_fn, CostCap};
    use proptest::prelude::*;

    #[test]
    fn convolution_examples() {
        let ones = vec![int(1); 5];
        assert_eq!(discrete_convolution(&ones, &ones, 4).unwrap(), int(5));
        let ramp: Vec<Rational> = (0..5).map(int).collect();
        assert_eq!(discrete_convolution(&ramp, &ones, 4).unwrap(), int(10));
        assert!(discrete_convolution(&ramp, &ones, 5).is_err());
    }

    fn seq() -> impl Strategy<Value = Vec<Rational>> {
        prop::collection::vec((-50i64..50, 1i64..20).prop_map(|(a, b)| rat(a, b)), 17)
    }

    proptest! {
        #[test]
        fn convolution_commutes_and_is_bilinear(f in seq(), g in seq(), h in seq(), n in 0usize..=16, c in -9i64..9) {
            prop_assert_eq!(discrete_convolution(&f, &g, n).unwrap(), discrete_convolution(&g, &f, n).unwrap());
            let gh: Vec<Rational> = g.iter().zip(&h).map(|(a, b)| a + b * int(c)).collect();
            let lhs = discrete_convolution(&f, &gh, n).unwrap();
            let rhs = discrete_convolution(&f, &g, n).unwrap() + discrete_convolution(&f, &h, n).unwrap() * int(c);
            prop_assert_eq!(lhs, rhs);
        }
    }

    fn q4() -> QParam {
        QParam::padic(int(4), PadicContext::new(3, 10).unwrap()).unwrap()
    }

    #[test]
    fn star_at_origin() {
        // m = 0, n = 1, z = 0: I_0([−x]_q) − f(0) g′(0), with g′(0) = L/(q − 1)
        let q = q4();
        let qv = q.value();
        let inv = qv.recip();
        // [−x]_q = (1 − q^{−x})/(1 − q); I_0(q^{−x}) = −L/(q^{−1} − 1)
        let i0 = (LogLaurent::one() - LogLaurent::monomial(1, int(-1) / (&inv - int(1))))
            .scale(&(int(1) - qv).recip());
        let want = i0 - LogLaurent::monomial(1, (qv - int(1)).recip());
        assert_eq!(star_convolution(0, 1, &q, 0), want);
    }

    #[test]
    fn star_is_linear_in_g() {
        let q = q4();
        let f = inverse_monomial_characters(1, &q);
        let g1 = monomial_characters(1, &q);
        let g2 = monomial_characters(2, &q);
        for z in 0..6 {
            let doubled = star_convolution_of(&f, &g1.add(&g1), &q, z);
            assert_eq!(doubled, star_convolution(1, 1, &q, z).scale(&int(2)));
            let sum = star_convolution_of(&f, &g1.add(&g2), &q, z);
            assert_eq!(
                sum,
                star_convolution(1, 1, &q, z) + star_convolution(1, 2, &q, z)
            );
        }
    }

    #[test]
    fn star_integrates_to_product_of_integrals() {
        let q = q4();
        let ev = PadicLogEvaluator::new(&q).unwrap();
        let cap = CostCap::default();
        for (m, n) in [(0u32, 1u32), (1, 1), (1, 2)] {
            let l = ev.log_q().unwrap();
            let sum_at = |level: u32| -> PadicNumber {
                // Riemann sum of the coefficients in L, then evaluate
                let count = 3u64.pow(level);
                let stars: Vec<LogLaurent> =
                    (0..count).map(|z| star_convolution(m, n, &q, z)).collect();
                let mut acc = LogLaurent::zero();
                for d in 0..=1 {
                    let s = riemann_sum_fn(|z| stars[z as usize].coeff(d), 3, level, &cap).unwrap();
                    acc = acc + LogLaurent::monomial(d, s);
                }
                acc.evaluate(&l).unwrap()
            };
            let s3 = sum_at(3);
            let s4 = sum_at(4);
            let digits = s4.agreement(&s3).unwrap().unwrap();
            let want = ev
                .evaluate(
                    &(modified_beta_inverse_q(m as usize, &q).unwrap()
                        * modified_beta(n as usize, &q).unwrap()),
                )
                .unwrap();
            let agree = want.agreement(&s4).unwrap().unwrap();
            assert!(
                agree >= digits - 1,
                "m={m} n={n} agree={agree} digits={digits}"
            );
            assert!(digits >= 2);
        }
    }
}
