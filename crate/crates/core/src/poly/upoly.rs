use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use super::{Monomial, MultiPoly, VarSet};
use crate::error::{Error, Result};
use crate::numeric::{binom, Rational};

/// Univariate polynomial in a named indeterminate (`t`, `n`, ...) whose
/// coefficients are [`MultiPoly`] over a common coefficient ring.
#[derive(Clone, PartialEq, Eq)]
pub struct UPoly {
    indeterminate: String,
    ring: VarSet,
    coeffs: Vec<MultiPoly>,
}

impl UPoly {
    pub fn new(indeterminate: &str, ring: &VarSet, coeffs: Vec<MultiPoly>) -> Self {
        for c in &coeffs {
            assert_eq!(c.vars(), ring, "coefficient ring");
        }
        let mut p = UPoly {
            indeterminate: indeterminate.to_string(),
            ring: ring.clone(),
            coeffs,
        };
        p.trim();
        p
    }

    pub fn zero(indeterminate: &str, ring: &VarSet) -> Self {
        Self::new(indeterminate, ring, Vec::new())
    }

    /// Polynomial with rational constant coefficients `c_0, c_1, ...`.
    pub fn from_rationals(indeterminate: &str, ring: &VarSet, coeffs: &[Rational]) -> Self {
        let cs = coeffs
            .iter()
            .map(|c| MultiPoly::constant(ring, c.clone()))
            .collect();
        Self::new(indeterminate, ring, cs)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(MultiPoly::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn indeterminate(&self) -> &str {
        &self.indeterminate
    }

    pub fn ring(&self) -> &VarSet {
        &self.ring
    }

    pub fn coeffs(&self) -> &[MultiPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> MultiPoly {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| MultiPoly::zero(&self.ring))
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True iff every even-degree coefficient vanishes.
    pub fn is_odd(&self) -> bool {
        self.coeffs.iter().step_by(2).all(MultiPoly::is_zero)
    }

    pub fn even_part(&self) -> UPoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| if k % 2 == 0 { c.clone() } else { MultiPoly::zero(&self.ring) })
            .collect();
        UPoly::new(&self.indeterminate, &self.ring, coeffs)
    }

    pub fn rename(&self, indeterminate: &str) -> UPoly {
        UPoly {
            indeterminate: indeterminate.to_string(),
            ..self.clone()
        }
    }

    /// Returns `p` with `p(t) = self(t + shift)`, in indeterminate `target`.
    pub fn compose_affine(&self, shift: &Rational, target: &str) -> UPoly {
        let mut out = vec![MultiPoly::zero(&self.ring); self.coeffs.len()];
        for (k, ck) in self.coeffs.iter().enumerate() {
            if ck.is_zero() {
                continue;
            }
            // ck * (t + s)^k = sum_j binom(k, j) s^(k-j) ck t^j
            let mut spow = Rational::one();
            for j in (0..=k).rev() {
                let factor = Rational::from_integer(binom(k, j as i64)) * &spow;
                out[j].add_scaled(ck, &factor);
                spow *= shift;
            }
        }
        UPoly::new(target, &self.ring, out)
    }

    /// Evaluates at a polynomial argument by Horner's rule. Coefficients must
    /// be constants or live in the argument's ring.
    pub fn eval_poly(&self, arg: &MultiPoly) -> Result<MultiPoly> {
        let lift = |c: &MultiPoly| -> Result<MultiPoly> {
            if c.vars() == arg.vars() {
                Ok(c.clone())
            } else {
                c.as_constant()
                    .map(|k| MultiPoly::constant(arg.vars(), k))
                    .ok_or_else(|| Error::VarSetMismatch {
                        left: self.ring.names().join(","),
                        right: arg.vars().names().join(","),
                    })
            }
        };
        let mut acc = MultiPoly::zero(arg.vars());
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * arg) + &lift(c)?;
        }
        Ok(acc)
    }

    /// The same polynomial as a [`MultiPoly`] over the ring with the
    /// indeterminate appended.
    pub fn to_multipoly(&self) -> Result<MultiPoly> {
        let vars = self.ring.with(&self.indeterminate)?;
        let mut out = MultiPoly::zero(&vars);
        for (k, c) in self.coeffs.iter().enumerate() {
            for (mono, coeff) in c.terms() {
                let mut exps = mono.exponents().to_vec();
                exps.push(k as u32);
                out.add_term(Monomial::new(exps), coeff.clone());
            }
        }
        Ok(out)
    }

    /// Splits a [`MultiPoly`] into a polynomial in `name` with coefficients
    /// in the remaining variables.
    pub fn from_multipoly(p: &MultiPoly, name: &str) -> Result<UPoly> {
        let idx = p
            .vars()
            .index_of(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        let ring = p.vars().without(name);
        let mut coeffs: Vec<MultiPoly> = Vec::new();
        for (mono, c) in p.terms() {
            let k = mono.exponents()[idx] as usize;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, MultiPoly::zero(&ring));
            }
            let mut exps = mono.exponents().to_vec();
            exps.remove(idx);
            coeffs[k].add_term(Monomial::new(exps), c.clone());
        }
        Ok(UPoly::new(name, &ring, coeffs))
    }

    /// Integer coefficients when every coefficient is an integer constant.
    pub fn integer_coeffs(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| {
                c.as_constant()
                    .filter(|k| k.is_integer())
                    .map(|k| k.to_integer())
            })
            .collect()
    }

    /// Univariate polynomial parsed from text in `indeterminate` over `ring`.
    pub fn parse(text: &str, indeterminate: &str, ring: &VarSet) -> Result<UPoly> {
        let vars = ring.with(indeterminate)?;
        UPoly::from_multipoly(&MultiPoly::parse(text, &vars)?, indeterminate)
    }

    pub fn monomial(indeterminate: &str, ring: &VarSet, degree: usize, coeff: MultiPoly) -> UPoly {
        let mut coeffs = vec![MultiPoly::zero(ring); degree + 1];
        coeffs[degree] = coeff;
        UPoly::new(indeterminate, ring, coeffs)
    }
}

impl std::ops::Add<&UPoly> for &UPoly {
    type Output = UPoly;
    fn add(self, rhs: &UPoly) -> UPoly {
        assert_eq!(self.ring, rhs.ring, "coefficient ring");
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect();
        UPoly::new(&self.indeterminate, &self.ring, coeffs)
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_multipoly() {
            Ok(p) => write!(f, "{p}"),
            Err(_) => write!(f, "<invalid indeterminate {}>", self.indeterminate),
        }
    }
}

impl fmt::Debug for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UPoly({self} in {} over {:?})", self.indeterminate, self.ring)
    }
}
