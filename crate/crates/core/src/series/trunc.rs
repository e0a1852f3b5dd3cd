use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numeric::Rational;
use crate::poly::{MultiPoly, UPoly, VarSet};

/// Power series `c_0 + c_1 t + ... + c_N t^N + O(t^(N+1))` with polynomial
/// coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncSeries {
    vars: VarSet,
    coeffs: Vec<MultiPoly>,
}

impl TruncSeries {
    /// Series of order `order`; missing coefficients are zero and excess ones
    /// are dropped.
    pub fn new(vars: &VarSet, order: usize, mut coeffs: Vec<MultiPoly>) -> Self {
        coeffs.resize(order + 1, MultiPoly::zero(vars));
        for c in &coeffs {
            assert_eq!(c.vars(), vars, "coefficient ring");
        }
        TruncSeries {
            vars: vars.clone(),
            coeffs,
        }
    }

    pub fn zero(vars: &VarSet, order: usize) -> Self {
        Self::new(vars, order, Vec::new())
    }

    pub fn one(vars: &VarSet, order: usize) -> Self {
        Self::new(vars, order, vec![MultiPoly::one(vars)])
    }

    /// `coeff * t^k`, truncated.
    pub fn monomial(vars: &VarSet, order: usize, k: usize, coeff: MultiPoly) -> Self {
        let mut s = Self::zero(vars, order);
        if k <= order {
            s.coeffs[k] = coeff;
        }
        s
    }

    pub fn from_upoly(p: &UPoly, order: usize) -> Self {
        Self::new(p.ring(), order, p.coeffs().to_vec())
    }

    /// `sum_n terms[n] t^(stride * n)`.
    pub fn from_terms_spaced(vars: &VarSet, order: usize, terms: &[MultiPoly], stride: usize) -> Self {
        let mut s = Self::zero(vars, order);
        for (n, p) in terms.iter().enumerate() {
            let k = n * stride;
            if k > order {
                break;
            }
            s.coeffs[k] = p.clone();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn coeffs(&self) -> &[MultiPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &MultiPoly {
        &self.coeffs[k]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(MultiPoly::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order(), "cannot raise a truncation order");
        Self::new(&self.vars, order, self.coeffs[..=order].to_vec())
    }

    fn check(&self, other: &TruncSeries) -> Result<()> {
        self.vars.check_same(&other.vars)?;
        if self.order() != other.order() {
            return Err(Error::OrderMismatch(self.order(), other.order()));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &TruncSeries) -> Result<TruncSeries> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(TruncSeries::new(&self.vars, self.order(), coeffs))
    }

    pub fn try_sub(&self, other: &TruncSeries) -> Result<TruncSeries> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(TruncSeries::new(&self.vars, self.order(), coeffs))
    }

    /// Truncated Cauchy product.
    pub fn try_mul(&self, other: &TruncSeries) -> Result<TruncSeries> {
        self.check(other)?;
        let n = self.order();
        let mut out = vec![MultiPoly::zero(&self.vars); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Ok(TruncSeries::new(&self.vars, n, out))
    }

    pub fn scale(&self, s: &Rational) -> TruncSeries {
        self.map(|c| c.scale(s))
    }

    pub fn scale_poly(&self, p: &MultiPoly) -> TruncSeries {
        self.map(|c| c * p)
    }

    fn map(&self, f: impl Fn(&MultiPoly) -> MultiPoly) -> TruncSeries {
        TruncSeries::new(&self.vars, self.order(), self.coeffs.iter().map(f).collect())
    }

    /// `t -> -t`.
    pub fn reflect(&self) -> TruncSeries {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| if k % 2 == 1 { -c } else { c.clone() })
            .collect();
        TruncSeries::new(&self.vars, self.order(), coeffs)
    }

    /// Multiplication by `t^k`, keeping the order.
    pub fn shift_up(&self, k: usize) -> TruncSeries {
        let mut coeffs = vec![MultiPoly::zero(&self.vars); k];
        coeffs.extend(self.coeffs.iter().cloned());
        TruncSeries::new(&self.vars, self.order(), coeffs)
    }

    /// `d/dt`; the result has order one less.
    pub fn derivative(&self) -> TruncSeries {
        let n = self.order();
        assert!(n >= 1, "derivative of an order-0 series");
        let coeffs = (1..=n)
            .map(|k| self.coeffs[k].scale(&Rational::from_integer(BigInt::from(k))))
            .collect();
        TruncSeries::new(&self.vars, n - 1, coeffs)
    }

    /// The Euler derivation `t d/dt`, which preserves the order.
    pub fn theta(&self) -> TruncSeries {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c.scale(&Rational::from_integer(BigInt::from(k))))
            .collect();
        TruncSeries::new(&self.vars, self.order(), coeffs)
    }

    /// `self^(-1/2)`; the constant term must be exactly 1.
    ///
    /// Uses `A B' = alpha A' B` for `B = A^alpha`, which gives
    /// `n b_n = sum_{k=1}^n ((alpha + 1) k - n) a_k b_{n-k}`.
    pub fn inv_sqrt(&self) -> Result<TruncSeries> {
        self.power_unit(&Rational::new(BigInt::from(-1), BigInt::from(2)))
    }

    /// `self^alpha` for a series with constant term 1.
    pub fn power_unit(&self, alpha: &Rational) -> Result<TruncSeries> {
        match self.coeffs[0].as_constant() {
            Some(c) if c.is_one() => {}
            _ => return Err(Error::ConstantTermNotOne(self.coeffs[0].to_string())),
        }
        let n = self.order();
        let a1 = alpha + Rational::one();
        let mut out: Vec<MultiPoly> = vec![MultiPoly::one(&self.vars)];
        for m in 1..=n {
            let mut acc = MultiPoly::zero(&self.vars);
            for k in 1..=m {
                if self.coeffs[k].is_zero() || out[m - k].is_zero() {
                    continue;
                }
                let w = &a1 * Rational::from_integer(BigInt::from(k)) - Rational::from_integer(BigInt::from(m));
                if w.is_zero() {
                    continue;
                }
                acc.add_scaled(&(&self.coeffs[k] * &out[m - k]), &w);
            }
            out.push(acc.scale(&Rational::new(BigInt::one(), BigInt::from(m))));
        }
        Ok(TruncSeries::new(&self.vars, n, out))
    }

    /// First index where the two series differ.
    pub fn first_difference(&self, other: &TruncSeries) -> Option<usize> {
        let n = self.order().min(other.order());
        (0..=n).find(|&k| self.coeffs[k] != other.coeffs[k])
    }
}

macro_rules! series_binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl std::ops::$trait<&TruncSeries> for &TruncSeries {
            type Output = TruncSeries;
            fn $method(self, rhs: &TruncSeries) -> TruncSeries {
                self.$try(rhs).expect("series operands must share ring and order")
            }
        }
    };
}

series_binop!(Add, add, try_add);
series_binop!(Sub, sub, try_sub);
series_binop!(Mul, mul, try_mul);

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*t")?,
                _ => write!(f, "({c})*t^{k}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(t^{})", self.order() + 1)
    }
}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncSeries({self})")
    }
}
