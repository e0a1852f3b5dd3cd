//! Integers, rationals and the combinatorial scalars used everywhere else.
//!
//! [`Rational`] is `num_rational::BigRational`, which reduces to lowest terms
//! with a positive denominator after every operation.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Exponent of 2 in a rational number, or `Infinite` for zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation2 {
    Finite(i64),
    Infinite,
}

impl Valuation2 {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation2::Finite(v) => Some(v),
            Valuation2::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation2::Finite(v) => write!(f, "{v}"),
            Valuation2::Infinite => f.write_str("inf"),
        }
    }
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Binomial coefficient; zero when `k < 0` or `k > n`.
pub fn binomial(n: i64, k: i64) -> Result<BigInt> {
    if n < 0 {
        return Err(Error::NegativeArgument(n));
    }
    if k < 0 || k > n {
        return Ok(BigInt::zero());
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        // acc * (n - i) is always divisible by (i + 1) at this point
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Ok(acc)
}

/// Binomial coefficient for arguments already known to be valid.
pub(crate) fn binom(n: usize, k: i64) -> BigInt {
    binomial(n as i64, k).expect("nonnegative n")
}

pub fn factorial(n: i64) -> Result<BigInt> {
    if n < 0 {
        return Err(Error::NegativeArgument(n));
    }
    Ok((2..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i)))
}

pub(crate) fn fact(n: usize) -> BigInt {
    factorial(n as i64).expect("nonnegative n")
}

/// `d_n = lcm(1, ..., n)`, with `d_0 = 1`.
pub fn lcm_upto(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc.lcm(&BigInt::from(i)))
}

/// Multinomial coefficient `(m_1 + ... + m_d)! / (m_1! ... m_d!)`.
pub fn multinomial(parts: &[u32]) -> BigInt {
    let mut acc = BigInt::one();
    let mut total: i64 = 0;
    for &p in parts {
        total += i64::from(p);
        acc *= binom(total as usize, i64::from(p));
    }
    acc
}

fn int_val2(n: &BigInt) -> i64 {
    n.trailing_zeros().map(|z| z as i64).unwrap_or(0)
}

/// 2-adic valuation of a rational.
pub fn val2(q: &Rational) -> Valuation2 {
    if q.is_zero() {
        return Valuation2::Infinite;
    }
    Valuation2::Finite(int_val2(q.numer()) - int_val2(q.denom()))
}

pub fn is_power_of_two(n: &BigInt) -> bool {
    n.is_positive() && (n & (n - BigInt::one())).is_zero()
}
