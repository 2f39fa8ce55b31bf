//! High-precision real logarithms as rational approximations.
//!
//! Archimedean checks keep every partial sum exact; only `ln q` is
//! approximate. It is returned as a dyadic rational accurate to within
//! `10^-digits`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::rational::{int, Rational};
use crate::error::{Error, Result};

const GUARD_BITS: u64 = 32;

fn bits_for(digits: u32) -> u64 {
    // log2(10) < 3.33
    (digits as u64 * 333).div_ceil(100) + GUARD_BITS
}

/// `2^bits · atanh(a/b)` truncated, for |a/b| < 1.
fn atanh_fixed(a: &BigInt, b: &BigInt, bits: u64) -> BigInt {
    let one = BigInt::one() << bits;
    let a2 = a * a;
    let b2 = b * b;
    let mut power = (&one * a) / b;
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        sum += &power / BigInt::from(2 * k + 1);
        power = (power * &a2) / &b2;
        k += 1;
    }
    sum
}

/// Natural log of a positive rational to within `10^-digits`.
pub fn ln(x: &Rational, digits: u32) -> Result<Rational> {
    if !x.is_positive() {
        return Err(Error::Domain(format!("ln of non-positive {x}")));
    }
    let bits = bits_for(digits);
    // x = 2^k · y with y ∈ [2/3, 4/3)
    let mut k: i64 = 0;
    let mut y = x.clone();
    let two = int(2);
    let lo = Rational::new(BigInt::from(2), BigInt::from(3));
    let hi = Rational::new(BigInt::from(4), BigInt::from(3));
    while y >= hi {
        y /= &two;
        k += 1;
    }
    while y < lo {
        y *= &two;
        k -= 1;
    }
    // ln y = 2 atanh((y−1)/(y+1))
    let z = (&y - int(1)) / (&y + int(1));
    let mut fixed = atanh_fixed(z.numer(), z.denom(), bits) * 2;
    if k != 0 {
        let ln2 = atanh_fixed(&BigInt::one(), &BigInt::from(3), bits) * 2;
        fixed += ln2 * BigInt::from(k);
    }
    Ok(Rational::new(fixed, BigInt::one() << bits))
}
