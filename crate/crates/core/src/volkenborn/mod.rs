//! The invariant integral `I_0(f) = lim p^{−N} Σ_{x<p^N} f(x)` on the
//! character-sum family, exactly in ℚ[L] and by Riemann sums.

mod double;
mod riemann;

pub use double::{double_integral, double_riemann_profile, double_riemann_sum, SecondKernel};
pub(crate) use riemann::ModularChars;
pub use riemann::{
    convergence_profile, points, riemann_sum, riemann_sum_fn, ConvergenceProfile, CostCap,
    RiemannSumResult, SumMethod, SumValue,
};

use crate::arith::rational::{binomial, int, pow_i, pow_u};
use crate::bernoulli::modified_table;
use crate::error::Result;
use crate::log_ring::LogLaurent;
use crate::qcalc::{monomial_characters, CharacterSum, QParam};

/// `I_0(q^{l·x}) = l·L/(q^l − 1)`, and 1 for `l = 0`.
pub fn character_integral(l: i64, q: &QParam) -> LogLaurent {
    if l == 0 {
        return LogLaurent::one();
    }
    let c = int(l) / (pow_i(q.value(), l) - int(1));
    LogLaurent::monomial(1, c)
}

/// `I_0(f)` for a character sum, term by term.
pub fn integrate(f: &CharacterSum, q: &QParam) -> LogLaurent {
    f.terms()
        .map(|(l, c)| character_integral(l, q).scale(c))
        .sum()
}

/// `I_0([x]_q^n)`.
pub fn monomial_integral(n: u32, q: &QParam) -> LogLaurent {
    integrate(&monomial_characters(n, q), q)
}

/// `I_0([z]_q^r q^{lz})` from `q^z = 1 + (q−1)[z]_q`:
/// `Σ_k C(l,k) (q−1)^k β̃_{r+k}`.
pub fn weighted_monomial_integral(r: u32, l: u32, q: &QParam) -> Result<LogLaurent> {
    let beta = modified_table((r + l) as usize, q.value())?;
    let qm1 = q.value() - int(1);
    Ok((0..=l)
        .map(|k| {
            let c = binomial(l as u64, k as u64) * pow_u(&qm1, k as u64);
            beta[(r + k) as usize].scale(&c)
        })
        .fold(LogLaurent::zero(), |a, b| a + b))
}

/// The same integral by expanding the product into characters.
pub fn weighted_monomial_integral_direct(r: u32, l: u32, q: &QParam) -> LogLaurent {
    integrate(&monomial_characters(r, q).shift(l as i64), q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{rat, Rational};
    use crate::arith::PadicContext;
    use crate::bernoulli::modified_beta;
    use crate::qcalc::{q_bracket, PadicLogEvaluator};

    fn q_padic(p: u64, q: i64, m: u32) -> QParam {
        QParam::padic(int(q), PadicContext::new(p, m).unwrap()).unwrap()
    }

    #[test]
    fn character_integral_examples() {
        let q = q_padic(5, 6, 8);
        assert_eq!(character_integral(0, &q), LogLaurent::one());
        assert_eq!(
            character_integral(1, &q),
            LogLaurent::monomial(1, rat(1, 5))
        );
        assert_eq!(
            character_integral(2, &q),
            LogLaurent::monomial(1, rat(2, 35))
        );
    }

    #[test]
    fn monomial_integral_matches_recurrence() {
        for q in [q_padic(5, 6, 8), q_padic(3, 4, 8)] {
            assert_eq!(monomial_integral(0, &q), LogLaurent::one());
            for n in 0..=12u32 {
                assert_eq!(
                    monomial_integral(n, &q),
                    modified_beta(n as usize, &q).unwrap()
                );
            }
        }
        let q = q_padic(5, 6, 8);
        assert_eq!(
            monomial_integral(1, &q),
            LogLaurent::from_terms([(0, rat(-1, 5)), (1, rat(1, 25))])
        );
    }

    #[test]
    fn weighted_routes_agree() {
        let q = q_padic(5, 6, 8);
        assert_eq!(
            weighted_monomial_integral(3, 0, &q).unwrap(),
            modified_beta(3, &q).unwrap()
        );
        assert_eq!(
            weighted_monomial_integral(0, 1, &q).unwrap(),
            character_integral(1, &q)
        );
        for r in 0..=5 {
            for l in 0..=5 {
                assert_eq!(
                    weighted_monomial_integral(r, l, &q).unwrap(),
                    weighted_monomial_integral_direct(r, l, &q),
                    "r={r} l={l}"
                );
            }
        }
    }

    #[test]
    fn riemann_examples() {
        let cap = CostCap::default();
        let q = q_padic(5, 6, 8);
        let one = CharacterSum::constant(int(1));
        for n in 1..=3 {
            let s = riemann_sum(&one, &q, n, SumMethod::Geometric, &cap).unwrap();
            assert_eq!(s.value.exact().unwrap(), &int(1));
        }
        let br = monomial_characters(1, &q);
        let s1 = riemann_sum(&br, &q, 1, SumMethod::Enumeration, &cap).unwrap();
        assert_eq!(s1.value.exact().unwrap(), &int(62));
        let manual: Rational = (0..5).map(|x| q_bracket(x, &q)).sum::<Rational>() / int(5);
        assert_eq!(manual, int(62));

        for p in [3u64, 5, 7] {
            for level in 1..=4 {
                let s = riemann_sum_fn(|x| int(x as i64), p, level, &cap).unwrap();
                let pn = int(p.pow(level) as i64);
                assert_eq!(s, (&pn - int(1)) / int(2));
                let v = crate::arith::valuation(&(s + rat(1, 2)), p).unwrap();
                assert_eq!(v, level as i64);
            }
        }
    }

    #[test]
    fn geometric_matches_enumeration_and_modular() {
        let cap = CostCap::default();
        for (p, qv) in [(3u64, 4i64), (5, 6)] {
            let ctx = PadicContext::new(p, 12).unwrap();
            let q = QParam::padic(int(qv), ctx).unwrap();
            for n in 0..=3u32 {
                let f = monomial_characters(n, &q).add(&CharacterSum::character(-1));
                for level in 1..=4 {
                    let e = riemann_sum(&f, &q, level, SumMethod::Enumeration, &cap).unwrap();
                    let g = riemann_sum(&f, &q, level, SumMethod::Geometric, &cap).unwrap();
                    assert_eq!(e.value, g.value);
                    let m = riemann_sum(&f, &q, level, SumMethod::ModularGeometric, &cap).unwrap();
                    let exact = e.value.to_padic(ctx).unwrap();
                    let modular = m.value.to_padic(ctx).unwrap();
                    let agree = exact.agreement(&modular).unwrap();
                    assert!(agree.is_none_or(|a| a >= exact.valuation().unwrap_or(0) + 12));
                }
            }
        }
    }

    #[test]
    fn bit_cap_falls_back_to_modular() {
        let q = q_padic(7, 8, 10);
        let cap = CostCap {
            max_bits: 1000,
            ..CostCap::default()
        };
        let f = monomial_characters(2, &q);
        let s = riemann_sum(&f, &q, 4, SumMethod::Geometric, &cap).unwrap();
        assert_eq!(s.method, SumMethod::ModularGeometric);
        let tight = CostCap {
            max_points: 10,
            ..CostCap::default()
        };
        assert!(riemann_sum(&f, &q, 3, SumMethod::Enumeration, &tight).is_err());
    }

    #[test]
    fn profile_examples() {
        let cap = CostCap::default();
        let q = q_padic(5, 6, 10);
        let p1 = convergence_profile(&CharacterSum::constant(int(1)), &q, 1..=4, &cap).unwrap();
        assert!(p1.deltas.iter().all(|d| d.is_none()));
        assert_eq!(p1.stabilized_digits, None);

        for (p, qv) in [(3u64, 4i64), (5, 6)] {
            let q = q_padic(p, qv, 12);
            let prof = convergence_profile(&monomial_characters(1, &q), &q, 1..=6, &cap).unwrap();
            for (i, d) in prof.deltas.iter().enumerate() {
                let level = prof.levels[i] as i64;
                assert!(d.unwrap() >= level - 1, "p={p} N={level} delta={d:?}");
            }
            let sq = convergence_profile(&monomial_characters(2, &q), &q, 1..=6, &cap).unwrap();
            let ds: Vec<i64> = sq.deltas.iter().map(|d| d.unwrap()).collect();
            assert!(ds.last() > ds.first());
        }
    }

    #[test]
    fn character_integral_matches_riemann_limit() {
        let cap = CostCap::default();
        let q = q_padic(5, 6, 10);
        let ev = PadicLogEvaluator::new(&q).unwrap();
        for l in [1i64, 2, -1, 3] {
            let prof = convergence_profile(&CharacterSum::character(l), &q, 3..=6, &cap).unwrap();
            let want = ev.evaluate(&character_integral(l, &q)).unwrap();
            let agree = want.agreement(&prof.stabilized_value).unwrap().unwrap();
            assert!(agree >= prof.stabilized_digits.unwrap(), "l={l}");
        }
    }
}
