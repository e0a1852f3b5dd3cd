use crate::error::{Error, Result};
use crate::poly::{UPoly, VarSet};
use crate::sequences::bc_ring;

use super::TruncSeries;

/// Linear differential operator `sum_k a_k(t) (d/dt)^k` with polynomial
/// coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OdeOperator {
    terms: Vec<(usize, UPoly)>,
}

impl OdeOperator {
    pub fn new(terms: Vec<(usize, UPoly)>) -> Self {
        OdeOperator { terms }
    }

    pub fn terms(&self) -> &[(usize, UPoly)] {
        &self.terms
    }

    pub fn max_order(&self) -> usize {
        self.terms.iter().map(|(k, _)| *k).max().unwrap_or(0)
    }

    /// Applies the operator, keeping only the coefficients that the input
    /// truncation determines: the result has order `N - max_order`.
    pub fn apply(&self, y: &TruncSeries) -> Result<TruncSeries> {
        let top = self.max_order();
        if y.order() < top {
            return Err(Error::InsufficientTerms {
                need: top + 1,
                have: y.order() + 1,
            });
        }
        let order = y.order() - top;
        let mut derivs = vec![y.clone()];
        for _ in 0..top {
            let next = derivs.last().unwrap().derivative();
            derivs.push(next);
        }
        let mut out = TruncSeries::zero(y.vars(), order);
        for (k, coeff) in &self.terms {
            let dk = derivs[*k].truncate(order);
            let a = TruncSeries::from_upoly(coeff, order);
            out = out.try_add(&a.try_mul(&dk)?)?;
        }
        Ok(out)
    }
}

fn t_poly(text: &str, ring: &VarSet) -> UPoly {
    UPoly::parse(text, "t", ring).expect("fixed operator text")
}

/// `t^2 D^2 + (1 + 2t) D - (c t^2 + b)`, annihilating `g(t) = sum w_n t^n`.
pub fn g_operator() -> OdeOperator {
    let r = bc_ring();
    OdeOperator::new(vec![
        (2, t_poly("t^2", &r)),
        (1, t_poly("1 + 2*t", &r)),
        (0, t_poly("-(c*t^2 + b)", &r)),
    ])
}

/// Symmetric square in `b, c` form:
/// `t^4 D^3 + 6 t^3 D^2 - (4c t^4 - (6 - 4b) t^2 + 1) D - 4t (2c t^2 + b)`,
/// annihilating `G(t) = g(t) g(-t)`.
pub fn sym_square_operator() -> OdeOperator {
    let r = bc_ring();
    OdeOperator::new(vec![
        (3, t_poly("t^4", &r)),
        (2, t_poly("6*t^3", &r)),
        (1, t_poly("-(4*c*t^4 - (6 - 4*b)*t^2 + 1)", &r)),
        (0, t_poly("-4*t*(2*c*t^2 + b)", &r)),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MultiPoly;
    use crate::sequences::{gen_u, gen_w};
    use proptest::prelude::*;

    #[test]
    fn constant_is_killed_by_d() {
        let v = VarSet::empty();
        let d = OdeOperator::new(vec![(1, UPoly::parse("1", "t", &v).unwrap())]);
        assert!(d.apply(&TruncSeries::one(&v, 5)).unwrap().is_zero());
    }

    #[test]
    fn g_residual_vanishes() {
        let g = TruncSeries::new(&bc_ring(), 40, gen_w(40).terms);
        let res = g_operator().apply(&g).unwrap();
        assert_eq!(res.order(), 38);
        assert!(res.is_zero());
    }

    #[test]
    fn g_residual_detects_perturbation() {
        let mut w = gen_w(10).terms;
        w[5] = &w[5] + &MultiPoly::one(&bc_ring());
        let res = g_operator().apply(&TruncSeries::new(&bc_ring(), 10, w)).unwrap();
        assert!(!res.is_zero());
    }

    #[test]
    fn symmetric_square_residual_vanishes() {
        let ring = bc_ring();
        let big_g = TruncSeries::from_terms_spaced(&ring, 40, &gen_u(20).terms, 2);
        let res = sym_square_operator().apply(&big_g).unwrap();
        assert_eq!(res.order(), 37);
        assert!(res.is_zero());
    }

    #[test]
    fn too_short_input_rejected() {
        let v = bc_ring();
        assert!(sym_square_operator().apply(&TruncSeries::one(&v, 2)).is_err());
    }

    proptest! {
        #[test]
        fn residual_is_linear(a in prop::collection::vec(-20i64..20, 9), b in prop::collection::vec(-20i64..20, 9)) {
            let ring = bc_ring();
            let mk = |v: &[i64]| TruncSeries::new(&ring, 8, v.iter().map(|&x| MultiPoly::from_int(&ring, x)).collect());
            let (sa, sb) = (mk(&a), mk(&b));
            let op = sym_square_operator();
            let lhs = op.apply(&(&sa + &sb)).unwrap();
            let rhs = &op.apply(&sa).unwrap() + &op.apply(&sb).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
