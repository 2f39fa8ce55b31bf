//! Exact rationals, p-adic valuations, capped-precision p-adic numbers and
//! the p-adic logarithm.

pub mod padic;
pub mod rational;
pub mod real;
pub mod residue;

pub use padic::{padic_log, padic_of_rational, PadicContext, PadicNumber};
pub use rational::{binomial, parse_rational, rat, valuation, Rational};
