//! Residues modulo `p^K` in machine words.
//!
//! Large Riemann sums run here instead of in exact rationals: every
//! integrand in this crate is p-integral, so its sum is an integer known
//! exactly modulo `p^K`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::padic::{PadicContext, PadicNumber};
use super::rational::Rational;
use crate::error::{Error, Result};

const MODULUS_LIMIT: u128 = 1 << 63;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResidueRing {
    p: u64,
    digits: u32,
    modulus: u128,
}

impl ResidueRing {
    pub fn new(p: u64, digits: u32) -> Result<Self> {
        let mut modulus: u128 = 1;
        for _ in 0..digits {
            modulus *= p as u128;
            if modulus >= MODULUS_LIMIT {
                return Err(Error::ResourceCap(format!(
                    "{p}^{digits} does not fit the modular engine"
                )));
            }
        }
        Ok(ResidueRing { p, digits, modulus })
    }

    /// Largest K with p^K below the engine limit.
    pub fn max_digits(p: u64) -> u32 {
        let mut k = 0;
        let mut m: u128 = 1;
        while m * (p as u128) < MODULUS_LIMIT {
            m *= p as u128;
            k += 1;
        }
        k
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    #[inline]
    pub fn add(&self, a: u128, b: u128) -> u128 {
        (a + b) % self.modulus
    }

    #[inline]
    pub fn sub(&self, a: u128, b: u128) -> u128 {
        (a + self.modulus - b) % self.modulus
    }

    #[inline]
    pub fn mul(&self, a: u128, b: u128) -> u128 {
        (a * b) % self.modulus
    }

    pub fn pow(&self, mut base: u128, mut e: u64) -> u128 {
        let mut r = 1 % self.modulus;
        base %= self.modulus;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        r
    }

    /// Reduces a p-integral rational. Fails when p divides the denominator.
    pub fn reduce(&self, r: &Rational) -> Result<u128> {
        let m = BigInt::from(self.modulus);
        let den = r.denom().mod_floor(&m);
        let e = den.extended_gcd(&m);
        if e.gcd != BigInt::from(1) {
            return Err(Error::Domain(format!("{r} is not {}-integral", self.p)));
        }
        let v = (r.numer() * e.x).mod_floor(&m);
        Ok(v.to_u128().expect("residue below modulus"))
    }

    /// Σ_{x<count} ratio^x by binary splitting; no division needed.
    pub fn geometric_sum(&self, ratio: u128, count: u64) -> u128 {
        // returns (Σ_{x<n} r^x, r^n)
        fn go(ring: &ResidueRing, r: u128, n: u64) -> (u128, u128) {
            if n == 0 {
                return (0, 1 % ring.modulus);
            }
            if n % 2 == 1 {
                let (s, pw) = go(ring, r, n - 1);
                (ring.add(1, ring.mul(r, s)), ring.mul(pw, r))
            } else {
                let (s, pw) = go(ring, r, n / 2);
                (ring.mul(s, ring.add(1, pw)), ring.mul(pw, pw))
            }
        }
        go(self, ratio % self.modulus, count).0
    }

    /// The residue as a p-adic number known modulo `p^K`.
    pub fn to_padic(&self, x: u128, ctx: PadicContext) -> PadicNumber {
        PadicNumber::from_residue(&BigUint::from(x), self.digits, ctx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::rat;

    #[test]
    fn capacity() {
        assert!(ResidueRing::new(7, 22).is_ok());
        assert!(ResidueRing::new(7, 23).is_err());
        assert_eq!(ResidueRing::max_digits(7), 22);
        assert_eq!(ResidueRing::max_digits(2), 62);
    }

    #[test]
    fn reduce_and_geometric() {
        let ring = ResidueRing::new(3, 6).unwrap();
        let h = ring.reduce(&rat(-1, 2)).unwrap();
        assert_eq!(ring.mul(h, 2), ring.modulus() - 1);
        assert!(ring.reduce(&rat(1, 3)).is_err());
        for n in 0..40u64 {
            let brute = (0..n).fold(0u128, |acc, x| ring.add(acc, ring.pow(4, x)));
            assert_eq!(ring.geometric_sum(4, n), brute);
        }
    }
}
