use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{Monomial, VarSet};
use crate::error::{Error, Result};
use crate::numeric::Rational;

/// Sparse polynomial over the rationals in the variables of a [`VarSet`].
///
/// Zero coefficients are never stored, so structural equality is
/// mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    vars: VarSet,
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero(vars: &VarSet) -> Self {
        MultiPoly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vars: &VarSet) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn constant(vars: &VarSet, c: Rational) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(vars.len()), c);
        }
        p
    }

    pub fn from_int(vars: &VarSet, c: i64) -> Self {
        Self::constant(vars, Rational::from_integer(BigInt::from(c)))
    }

    pub fn var(vars: &VarSet, name: &str) -> Result<Self> {
        let idx = vars
            .index_of(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        let mut exps = vec![0; vars.len()];
        exps[idx] = 1;
        Ok(Self::monomial(vars, Monomial::new(exps), Rational::one()))
    }

    pub fn monomial(vars: &VarSet, mono: Monomial, c: Rational) -> Self {
        debug_assert_eq!(mono.0.len(), vars.len());
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(mono, c);
        }
        p
    }

    /// Builds a polynomial from (exponent vector, coefficient) pairs, summing
    /// repeated monomials.
    pub fn from_terms<I>(vars: &VarSet, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut p = Self::zero(vars);
        for (exps, c) in terms {
            assert_eq!(exps.len(), vars.len(), "exponent vector length");
            p.add_term(Monomial::new(exps), c);
        }
        p
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> Rational {
        self.terms
            .get(&Monomial::new(exps.to_vec()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// The value if this polynomial is a constant (zero included).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub(crate) fn add_term(&mut self, mono: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn try_add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.vars.check_same(&other.vars)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.vars.check_same(&other.vars)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    /// Exact product. Coefficients are cleared to integers first so that the
    /// inner loop runs on big integers without gcd normalization.
    pub fn try_mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.vars.check_same(&other.vars)?;
        Ok(Self::sum_of_products(&self.vars, &[(self, other, BigInt::one())]))
    }

    /// `sum_i k_i * a_i * b_i` with one integer accumulator. All operands
    /// must live in `vars`.
    pub fn sum_of_products(vars: &VarSet, items: &[(&MultiPoly, &MultiPoly, BigInt)]) -> MultiPoly {
        let forms: Vec<_> = items
            .iter()
            .filter(|(a, b, k)| !a.is_zero() && !b.is_zero() && !k.is_zero())
            .map(|(a, b, k)| {
                assert!(a.vars == *vars && b.vars == *vars, "variable sets differ");
                let (da, ia) = a.integer_form();
                let (db, ib) = b.integer_form();
                (da * db, ia, ib, k)
            })
            .collect();
        let den = forms.iter().fold(BigInt::one(), |acc, f| acc.lcm(&f.0));
        let scaled: Vec<_> = forms
            .into_iter()
            .map(|(d, ia, ib, k)| {
                let factor = k * (&den / d);
                // scale the shorter side
                if ia.len() <= ib.len() {
                    (ia.into_iter().map(|(m, c)| (m, c * &factor)).collect::<Vec<_>>(), ib)
                } else {
                    (ia, ib.into_iter().map(|(m, c)| (m, c * &factor)).collect())
                }
            })
            .collect();
        let n = vars.len();
        let mut terms = BTreeMap::new();
        if n <= 4 {
            let mut acc: HashMap<u128, BigInt> = HashMap::new();
            for (ia, ib) in &scaled {
                let kb: Vec<u128> = ib.iter().map(|(m, _)| pack(m)).collect();
                for (ma, ca) in ia {
                    let ka = pack(ma);
                    for ((_, cb), kb) in ib.iter().zip(&kb) {
                        *acc.entry(ka + kb).or_default() += ca * cb;
                    }
                }
            }
            for (k, c) in acc {
                if !c.is_zero() {
                    terms.insert(unpack(k, n), Rational::new(c, den.clone()));
                }
            }
        } else {
            let mut acc: HashMap<Monomial, BigInt> = HashMap::new();
            for (ia, ib) in &scaled {
                for (ma, ca) in ia {
                    for (mb, cb) in ib {
                        *acc.entry(ma.mul(mb)).or_default() += ca * cb;
                    }
                }
            }
            for (m, c) in acc {
                if !c.is_zero() {
                    terms.insert(m, Rational::new(c, den.clone()));
                }
            }
        }
        MultiPoly {
            vars: vars.clone(),
            terms,
        }
    }

    /// Common denominator `D` and integer coefficients of `D * self`.
    fn integer_form(&self) -> (BigInt, Vec<(&Monomial, BigInt)>) {
        let den = self.lcm_denominator();
        let ints = self
            .terms
            .iter()
            .map(|(m, c)| (m, c.numer() * (&den / c.denom())))
            .collect();
        (den, ints)
    }

    pub fn lcm_denominator(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    pub fn scale(&self, s: &Rational) -> MultiPoly {
        if s.is_zero() {
            return Self::zero(&self.vars);
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, other: &MultiPoly, s: &Rational) {
        assert_eq!(self.vars, other.vars, "variable sets differ");
        if s.is_zero() {
            return;
        }
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c * s);
        }
    }

    pub fn pow(&self, exp: u32) -> MultiPoly {
        let mut result = Self::one(&self.vars);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Evaluates at a point given by name.
    pub fn eval(&self, point: &HashMap<String, Rational>) -> Result<Rational> {
        let values = self
            .vars
            .names()
            .iter()
            .map(|n| {
                point
                    .get(n)
                    .cloned()
                    .ok_or_else(|| Error::MissingAssignment(n.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.eval_slice(&values))
    }

    /// Evaluates at a point given positionally, in [`VarSet`] order.
    pub fn eval_slice(&self, values: &[Rational]) -> Rational {
        assert_eq!(values.len(), self.vars.len(), "point dimension");
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in values.iter().zip(m.0.iter()) {
                if e > 0 {
                    t *= num_traits::pow(v.clone(), e as usize);
                }
            }
            total += t;
        }
        total
    }

    /// Substitutes a value for one variable; the variable set is unchanged.
    pub fn substitute(&self, name: &str, value: &Rational) -> Result<MultiPoly> {
        let idx = self
            .vars
            .index_of(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        let mut out = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.0[idx];
            let mut exps = m.0.to_vec();
            exps[idx] = 0;
            let factor = num_traits::pow(value.clone(), e as usize);
            out.add_term(Monomial::new(exps), c * factor);
        }
        Ok(out)
    }

    /// Rewrites into `target`, which must contain every variable that occurs
    /// with a nonzero exponent.
    pub fn reembed(&self, target: &VarSet) -> Result<MultiPoly> {
        let map = self
            .vars
            .names()
            .iter()
            .map(|n| target.index_of(n))
            .collect::<Vec<_>>();
        let mut out = Self::zero(target);
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; target.len()];
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let j = map[i].ok_or_else(|| Error::UnknownVariable(self.vars.names()[i].clone()))?;
                exps[j] = e;
            }
            out.add_term(Monomial::new(exps), c.clone());
        }
        Ok(out)
    }

    /// Divides exactly by the linear form `sum_i m_i x_i`.
    ///
    /// The polynomial is read as univariate in the first variable with a
    /// nonzero multiplier and synthetic division runs on that variable.
    pub fn exact_div_linear(&self, m: &[i64]) -> Result<MultiPoly> {
        if m.len() != self.vars.len() {
            return Err(Error::BadDivisor);
        }
        let pivot = m.iter().position(|&mi| mi != 0).ok_or(Error::BadDivisor)?;
        let lead = Rational::from_integer(BigInt::from(m[pivot]));

        // rest = (sum_{i != pivot} m_i x_i) / m_pivot
        let mut rest = Self::zero(&self.vars);
        for (i, &mi) in m.iter().enumerate() {
            if i != pivot && mi != 0 {
                let mut exps = vec![0; m.len()];
                exps[i] = 1;
                rest.add_term(Monomial::new(exps), Rational::from_integer(BigInt::from(mi)) / &lead);
            }
        }

        // coefficients of self as a polynomial in x_pivot
        let mut by_power: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        for (mono, c) in &self.terms {
            let e = mono.0[pivot];
            let mut exps = mono.0.to_vec();
            exps[pivot] = 0;
            by_power
                .entry(e)
                .or_insert_with(|| Self::zero(&self.vars))
                .add_term(Monomial::new(exps), c.clone());
        }
        let degree = by_power.keys().next_back().copied().unwrap_or(0);
        let coeff = |k: u32| by_power.get(&k).cloned().unwrap_or_else(|| Self::zero(&self.vars));

        // synthetic division by (x_pivot + rest)
        let mut quotient: Vec<MultiPoly> = vec![Self::zero(&self.vars); degree as usize];
        let mut carry = Self::zero(&self.vars);
        for k in (1..=degree).rev() {
            let qk = &coeff(k) - &(&rest * &carry);
            quotient[(k - 1) as usize] = qk.clone();
            carry = qk;
        }
        let remainder = &coeff(0) - &(&rest * &carry);
        if !remainder.is_zero() {
            return Err(Error::InexactDivision {
                divisor: linear_form_text(&self.vars, m),
                remainder: remainder.to_string(),
            });
        }

        let inv_lead = lead.recip();
        let mut out = Self::zero(&self.vars);
        for (k, qk) in quotient.into_iter().enumerate() {
            for (mono, c) in qk.terms {
                let mut exps = mono.0.to_vec();
                exps[pivot] += k as u32;
                out.add_term(Monomial::new(exps), c * &inv_lead);
            }
        }
        Ok(out)
    }

    /// Distinct weighted degrees of the terms, ascending.
    pub fn weighted_degrees(&self, weights: &[u32]) -> Vec<u32> {
        let mut out: Vec<u32> = self
            .terms
            .keys()
            .map(|m| m.0.iter().zip(weights).map(|(e, w)| e * w).sum())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

fn linear_form_text(vars: &VarSet, m: &[i64]) -> String {
    let mut parts = Vec::new();
    for (name, &mi) in vars.names().iter().zip(m) {
        if mi != 0 {
            parts.push(if mi == 1 { name.clone() } else { format!("{mi}*{name}") });
        }
    }
    parts.join(" + ")
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

// The operator forms panic on mismatched variable sets; use the `try_*`
// methods where the inputs are not known to share one.
macro_rules! binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl $trait<&MultiPoly> for &MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                self.$try(rhs).expect("polynomial operands over different variable sets")
            }
        }
        impl $trait<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

/// Exponents in 32-bit fields, so that adding keys multiplies monomials.
fn pack(m: &Monomial) -> u128 {
    m.0.iter()
        .enumerate()
        .fold(0u128, |acc, (i, &e)| acc | (u128::from(e) << (32 * i)))
}

fn unpack(key: u128, n: usize) -> Monomial {
    Monomial((0..n).map(|i| (key >> (32 * i)) as u32).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, ratio};
    use proptest::prelude::*;

    fn bc() -> VarSet {
        VarSet::new(["b", "c"]).unwrap()
    }

    fn p(text: &str, vars: &VarSet) -> MultiPoly {
        MultiPoly::parse(text, vars).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let v = bc();
        let b = MultiPoly::var(&v, "b").unwrap();
        assert_eq!(&b + &b, p("2*b", &v));
        let two = MultiPoly::from_int(&v, 2);
        assert_eq!(&(&b - &two) * &b, p("b^2 - 2*b", &v));
        // (b^2 - 2b)/2 * (b - 6) + c, then / 3: the w_3 numerator step
        let w2 = p("1/2*b^2 - b", &v);
        let step = &(&w2 * &p("b - 6", &v)) + &p("c", &v);
        assert_eq!(step.scale(&ratio(1, 3)), p("1/6*b^3 - 4/3*b^2 + 2*b + 1/3*c", &v));
    }

    #[test]
    fn mismatched_varsets_rejected() {
        let a = MultiPoly::var(&bc(), "b").unwrap();
        let x = VarSet::new(["x"]).unwrap();
        let b = MultiPoly::var(&x, "x").unwrap();
        assert!(matches!(a.try_add(&b), Err(Error::VarSetMismatch { .. })));
        assert!(a.try_mul(&b).is_err());
    }

    #[test]
    fn eval_examples() {
        let x = VarSet::new(["x"]).unwrap();
        let pt = |v: Rational| HashMap::from([("x".to_string(), v)]);
        assert_eq!(p("x^2", &x).eval(&pt(ratio(1, 2))).unwrap(), ratio(1, 4));
        assert_eq!(p("1/8*x^2", &x).eval(&pt(int(1))).unwrap(), ratio(1, 8));
        let v = bc();
        let zero = HashMap::from([("b".to_string(), int(0)), ("c".to_string(), int(0))]);
        assert_eq!(p("6*b^2 - 12*b - 2*c", &v).eval(&zero).unwrap(), int(0));
        let partial = HashMap::from([("b".to_string(), int(1))]);
        assert_eq!(
            p("b + c", &v).eval(&partial).unwrap_err(),
            Error::MissingAssignment("c".into())
        );
    }

    #[test]
    fn exact_division_examples() {
        let x12 = VarSet::new(["x1", "x2"]).unwrap();
        let num = p("3/4*x1 + 3/4*x2", &x12);
        assert_eq!(num.exact_div_linear(&[1, 1]).unwrap(), p("3/4", &x12));

        let x = VarSet::new(["x"]).unwrap();
        assert_eq!(p("x^2", &x).exact_div_linear(&[1]).unwrap(), p("x", &x));

        let err = p("x1 + 1", &x12).exact_div_linear(&[1, 0]).unwrap_err();
        assert!(matches!(err, Error::InexactDivision { ref remainder, .. } if remainder == "1"));

        assert_eq!(p("x1", &x12).exact_div_linear(&[0, 0]), Err(Error::BadDivisor));
        assert_eq!(p("x1", &x12).exact_div_linear(&[1]), Err(Error::BadDivisor));
    }

    #[test]
    fn division_pivots_past_zero_entries() {
        let v = VarSet::new(["x1", "x2", "x3"]).unwrap();
        let lin = p("2*x2 + 3*x3", &v);
        let q = p("x1^2*x3 - 5/2*x2 + 7", &v);
        assert_eq!((&q * &lin).exact_div_linear(&[0, 2, 3]).unwrap(), q);
    }

    #[test]
    fn substitute_and_reembed() {
        let v = bc();
        let u2 = p("6*b^2 - 12*b - 2*c", &v);
        assert_eq!(u2.substitute("c", &int(0)).unwrap(), p("6*b^2 - 12*b", &v));
        let wide = VarSet::new(["a", "b", "c"]).unwrap();
        assert_eq!(u2.reembed(&wide).unwrap(), p("6*b^2 - 12*b - 2*c", &wide));
        let narrow = VarSet::new(["b"]).unwrap();
        assert!(u2.reembed(&narrow).is_err());
        assert_eq!(p("b^3", &v).reembed(&narrow).unwrap(), p("b^3", &narrow));
    }

    #[test]
    fn pow_matches_repeated_product() {
        let v = bc();
        let q = p("b - 2*c + 1/3", &v);
        let mut acc = MultiPoly::one(&v);
        for k in 0..6 {
            assert_eq!(q.pow(k), acc);
            acc = &acc * &q;
        }
    }

    fn vars3() -> VarSet {
        VarSet::new(["x1", "x2", "x3"]).unwrap()
    }

    prop_compose! {
        fn small_rational()(n in -20i64..=20, d in 1i64..=6) -> Rational { ratio(n, d) }
    }

    prop_compose! {
        fn poly_deg(nvars: usize, max_deg: u32)(
            terms in prop::collection::vec(
                (prop::collection::vec(0u32..=max_deg, nvars), small_rational()), 0..8)
        ) -> Vec<(Vec<u32>, Rational)> {
            terms.into_iter().map(|(mut e, c)| {
                // keep total degree within max_deg
                while e.iter().sum::<u32>() > max_deg {
                    if let Some(x) = e.iter_mut().find(|x| **x > 0) { *x -= 1; }
                }
                (e, c)
            }).collect()
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn product_commutes_with_evaluation(
            a in poly_deg(3, 6),
            b in poly_deg(3, 6),
            pt in prop::collection::vec(small_rational(), 3),
        ) {
            let v = vars3();
            let pa = MultiPoly::from_terms(&v, a);
            let pb = MultiPoly::from_terms(&v, b);
            let prod = &pa * &pb;
            prop_assert_eq!(prod.eval_slice(&pt), pa.eval_slice(&pt) * pb.eval_slice(&pt));
            prop_assert_eq!(&pb * &pa, prod);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn linear_division_inverts_multiplication(
            q in poly_deg(3, 5),
            m in prop::collection::vec(0i64..=4, 3),
            d in 1usize..=3,
        ) {
            let names: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
            let v = VarSet::new(names).unwrap();
            let mut m = m[..d].to_vec();
            if m.iter().all(|&x| x == 0) { m[d - 1] = 1; }
            let q = MultiPoly::from_terms(&v, q.into_iter().map(|(e, c)| (e[..d].to_vec(), c)));
            let lin = MultiPoly::from_terms(&v, m.iter().enumerate().map(|(i, &mi)| {
                let mut e = vec![0; d];
                e[i] = 1;
                (e, int(mi))
            }));
            prop_assert_eq!((&q * &lin).exact_div_linear(&m).unwrap(), q);
        }
    }
}
