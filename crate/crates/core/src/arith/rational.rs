//! Exact rationals and the integer helpers built on them.
//!
//! `Rational` is `num_rational::BigRational`, which already keeps values in
//! lowest terms with a positive denominator. This module adds the pieces the
//! rest of the crate needs on top: parsing `a/b` strings, p-adic valuations,
//! binomial coefficients and decimal rendering.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// `n/d` as a rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"a/b"` or `"a"`. Rejects zero denominators.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Deterministic primality check by trial division; `p` is always small here.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p < 4 {
        return true;
    }
    if p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Strips every factor `p` from `n`, returning the count.
pub(crate) fn remove_factor(n: &mut BigInt, p: u64) -> i64 {
    if n.is_zero() {
        return 0;
    }
    let pb = BigInt::from(p);
    let mut count = 0;
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return count;
        }
        *n = q;
        count += 1;
    }
}

/// v_p(r) for nonzero `r`: the exponent v with r = p^v · (p-free unit).
pub fn valuation(r: &Rational, p: u64) -> Result<i64> {
    if r.is_zero() {
        return Err(Error::ValuationOfZero);
    }
    let mut num = r.numer().clone();
    let mut den = r.denom().clone();
    Ok(remove_factor(&mut num, p) - remove_factor(&mut den, p))
}

/// v_p of a nonzero integer.
pub fn valuation_int(n: &BigInt, p: u64) -> Result<i64> {
    if n.is_zero() {
        return Err(Error::ValuationOfZero);
    }
    let mut n = n.clone();
    Ok(remove_factor(&mut n, p))
}

/// The binomial coefficient C(n, k) as an exact rational; zero when k > n.
pub fn binomial(n: u64, k: u64) -> Rational {
    Rational::from_integer(binomial_int(n, k))
}

pub fn binomial_int(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= BigInt::from(n - i);
        acc /= BigInt::from(i + 1);
    }
    acc
}

/// `base^e` for a signed exponent. Panics on `0^negative`.
pub fn pow_i(base: &Rational, e: i64) -> Rational {
    let mag = pow_u(base, e.unsigned_abs());
    if e < 0 {
        mag.recip()
    } else {
        mag
    }
}

pub fn pow_u(base: &Rational, mut e: u64) -> Rational {
    let mut result = Rational::one();
    let mut b = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            result *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    result
}

/// Bit size of numerator plus denominator.
pub fn bit_size(r: &Rational) -> u64 {
    r.numer().bits() + r.denom().bits()
}

/// Renders `r` in scientific notation with `sig` significant digits,
/// e.g. `1.38629436111989e0`. Rounds half away from zero.
pub fn render_sci(r: &Rational, sig: usize) -> String {
    assert!(sig >= 1);
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let a = r.abs();
    // initial exponent guess from digit counts, corrected below
    let num_digits = a.numer().to_string().len() as i64;
    let den_digits = a.denom().to_string().len() as i64;
    let mut e = num_digits - den_digits;
    let ten = BigInt::from(10);
    let scaled = |e: i64| -> Rational {
        let shift = sig as i64 - 1 - e;
        if shift >= 0 {
            &a * Rational::from_integer(num_traits::pow(ten.clone(), shift as usize))
        } else {
            &a / Rational::from_integer(num_traits::pow(ten.clone(), (-shift) as usize))
        }
    };
    let lo = Rational::from_integer(num_traits::pow(ten.clone(), sig - 1));
    let hi = Rational::from_integer(num_traits::pow(ten.clone(), sig));
    loop {
        let s = scaled(e);
        if s < lo {
            e -= 1;
        } else if s >= hi {
            e += 1;
        } else {
            break;
        }
    }
    let s = scaled(e);
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let mut digits = (s + half).floor().to_integer();
    if digits >= *hi.numer() {
        digits /= &ten;
        e += 1;
    }
    let ds = digits.to_string();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(&ds[..1]);
    if ds.len() > 1 {
        out.push('.');
        out.push_str(&ds[1..]);
    }
    out.push_str(&format!("e{e}"));
    out
}

/// Exact rational from an `f64` (every finite double is a dyadic rational).
pub fn from_f64(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::Parse(format!("non-finite float {x}")))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn biguint_of(n: &BigInt) -> BigUint {
    match n.sign() {
        Sign::Minus => panic!("negative value where a residue was expected"),
        _ => n.magnitude().clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation(&int(50), 5).unwrap(), 2);
        assert_eq!(valuation(&rat(1, 9), 3).unwrap(), -2);
        assert_eq!(valuation(&int(7), 7).unwrap(), 1);
        assert_eq!(valuation(&int(0), 7), Err(Error::ValuationOfZero));
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(5, 2), int(10));
        assert_eq!(binomial(9, 0), int(1));
        assert_eq!(binomial(3, 5), int(0));
        // Pascal triangle oracle
        let mut row = vec![1u128];
        for n in 1..=40usize {
            let mut next = vec![1u128; n + 1];
            for k in 1..n {
                next[k] = row[k - 1] + row[k];
            }
            row = next;
        }
        assert_eq!(row[20], 137_846_528_820);
        assert_eq!(
            binomial(40, 20),
            Rational::from_integer(BigInt::from(row[20]))
        );
    }

    #[test]
    fn parse_and_reject() {
        assert_eq!(parse_rational("6").unwrap(), int(6));
        assert_eq!(parse_rational(" -3/6 ").unwrap(), rat(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x/2").is_err());
    }

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn sci_rendering() {
        assert_eq!(render_sci(&rat(1, 3), 5), "3.3333e-1");
        assert_eq!(render_sci(&rat(-2, 3), 3), "-6.67e-1");
        assert_eq!(render_sci(&int(99999), 3), "1.00e5");
        assert_eq!(render_sci(&int(1), 1), "1e0");
        assert_eq!(render_sci(&rat(1, 1000), 2), "1.0e-3");
    }
}
