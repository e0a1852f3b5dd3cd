use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::Serialize;

use super::{g_operator, sym_square_operator, TruncSeries};
use crate::error::{Error, Result};
use crate::numeric::{binom, fact, int, Rational};
use crate::poly::{MultiPoly, VarSet};
use crate::sequences::{
    bc_ring, factorial_scaled, gen_u, gen_w, pochhammer_pair, u_bin, u_conv, w_inv,
};

/// First coefficient at which the two sides of an identity disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub index: usize,
    pub lhs: String,
    pub rhs: String,
}

/// Outcome of one identity check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationRecord {
    pub identity: String,
    pub order: usize,
    pub passed: bool,
    pub first_mismatch: Option<Mismatch>,
}

impl VerificationRecord {
    fn from_coeffs(identity: &str, order: usize, lhs: &[MultiPoly], rhs: &[MultiPoly]) -> Self {
        let first_mismatch = lhs
            .iter()
            .zip(rhs)
            .position(|(a, b)| a != b)
            .map(|i| Mismatch {
                index: i,
                lhs: lhs[i].to_string(),
                rhs: rhs[i].to_string(),
            });
        VerificationRecord {
            identity: identity.to_string(),
            order,
            passed: first_mismatch.is_none() && lhs.len() == rhs.len(),
            first_mismatch,
        }
    }

    fn from_series(identity: &str, order: usize, lhs: &TruncSeries, rhs: &TruncSeries) -> Self {
        Self::from_coeffs(identity, order, lhs.coeffs(), rhs.coeffs())
    }
}

/// The identities the `verify` command knows by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Identity {
    Id3,
    R2,
    HgC0,
    Clausen,
    Bin,
    Inv,
    Conv,
    OdeG,
    OdeBigG,
    Derivation,
}

impl Identity {
    pub const ALL: [Identity; 10] = [
        Identity::Id3,
        Identity::R2,
        Identity::HgC0,
        Identity::Clausen,
        Identity::Bin,
        Identity::Inv,
        Identity::Conv,
        Identity::OdeG,
        Identity::OdeBigG,
        Identity::Derivation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::Id3 => "id3",
            Identity::R2 => "r2",
            Identity::HgC0 => "hg-c0",
            Identity::Clausen => "clausen",
            Identity::Bin => "bin",
            Identity::Inv => "inv",
            Identity::Conv => "conv",
            Identity::OdeG => "ode-g",
            Identity::OdeBigG => "ode-G",
            Identity::Derivation => "derivation",
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Identity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Identity::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Identity::ALL.iter().map(|i| i.name()).collect();
                Error::Spec(format!("unknown identity `{s}`; expected one of {}", names.join(", ")))
            })
    }
}

/// Runs a named identity check. `order` is the `t`-truncation order for the
/// series identities and the index bound for `bin`, `conv` and `inv`.
pub fn verify(identity: Identity, order: usize) -> Result<VerificationRecord> {
    Ok(match identity {
        Identity::Id3 => verify_id3(order),
        Identity::R2 => verify_r2(order),
        Identity::HgC0 => verify_hg_c0(order),
        Identity::Clausen => verify_clausen(order),
        Identity::OdeG => verify_ode_g(order)?,
        Identity::OdeBigG => verify_ode_big_g(order)?,
        Identity::Bin => {
            let u = gen_u(order);
            let bin = u_bin(order, &gen_w(order))?;
            VerificationRecord::from_coeffs("bin", order, &u.terms, &bin.terms)
        }
        Identity::Conv => {
            let u = gen_u(order);
            let conv = u_conv(order, &gen_w(2 * order))?;
            VerificationRecord::from_coeffs("conv", order, &u.terms, &conv.terms)
        }
        Identity::Inv => {
            let scaled = factorial_scaled(&gen_w(order));
            match w_inv(order, &gen_u(order)) {
                Ok(inv) => VerificationRecord::from_coeffs("inv", order, &scaled, &inv.terms),
                Err(Error::OddPowerSurvives { n, residue }) => VerificationRecord {
                    identity: "inv".into(),
                    order,
                    passed: false,
                    first_mismatch: Some(Mismatch {
                        index: n,
                        lhs: scaled[n].to_string(),
                        rhs: format!("odd powers of sqrt(c) remain: {residue}"),
                    }),
                },
                Err(e) => return Err(e),
            }
        }
        Identity::Derivation => {
            let ring = bc_ring();
            let g = TruncSeries::new(&ring, order, gen_w(order).terms);
            let max_k = order.saturating_sub(2) / 2;
            let mut record = VerificationRecord {
                identity: "derivation".into(),
                order,
                passed: true,
                first_mismatch: None,
            };
            for k in 0..=max_k.min(3) {
                let r = derivation_record(&g, k);
                if !r.passed {
                    record = VerificationRecord { identity: "derivation".into(), ..r };
                    break;
                }
            }
            record
        }
    })
}

/// `sum u_n t^(2n) = sum_k (-1)^k c^k t^(4k) sum_n n! w_n binom(n+k,k)
/// binom(2n+2k,n+k) (-1)^n t^(2n)` through `t^order`.
pub fn verify_id3(order: usize) -> VerificationRecord {
    let ring = bc_ring();
    let half = order / 2;
    let u = gen_u(half);
    let lhs = TruncSeries::from_terms_spaced(&ring, order, &u.terms, 2);

    let nw = factorial_scaled(&gen_w(half));
    let c = MultiPoly::var(&ring, "c").unwrap();
    let mut rhs = vec![MultiPoly::zero(&ring); order + 1];
    let mut ck = MultiPoly::one(&ring);
    for k in 0..=order / 4 {
        for n in 0..=(order - 4 * k) / 2 {
            let scalar = binom(n + k, k as i64) * binom(2 * n + 2 * k, (n + k) as i64);
            let sign = if (n + k) % 2 == 0 { 1 } else { -1 };
            let term = &ck * &nw[n];
            rhs[4 * k + 2 * n].add_scaled(&term, &Rational::from_integer(scalar * sign));
        }
        ck = &ck * &c;
    }
    let rhs = TruncSeries::new(&ring, order, rhs);
    VerificationRecord::from_series("id3", order, &lhs, &rhs)
}

/// `sum u_n t^(2n) = (1 + 4ct^4)^(-1/2) sum_n binom(2n,n) n! w_n
/// (-t^2 / (1 + 4ct^4))^n` through `t^order`.
pub fn verify_r2(order: usize) -> VerificationRecord {
    let ring = bc_ring();
    let half = order / 2;
    let lhs = TruncSeries::from_terms_spaced(&ring, order, &gen_u(half).terms, 2);

    let four_c = MultiPoly::parse("4*c", &ring).unwrap();
    let base = &TruncSeries::one(&ring, order) + &TruncSeries::monomial(&ring, order, 4, four_c);
    let root = base.inv_sqrt().expect("constant term is 1");
    let x = (&root * &root).shift_up(2).scale(&int(-1));

    let nw = factorial_scaled(&gen_w(half));
    let mut sum = TruncSeries::zero(&ring, order);
    let mut xn = TruncSeries::one(&ring, order);
    for (n, p) in nw.iter().enumerate() {
        let coeff = p.scale(&Rational::from_integer(binom(2 * n, n as i64)));
        sum = &sum + &xn.scale_poly(&coeff);
        xn = &xn * &x;
    }
    let rhs = &root * &sum;
    VerificationRecord::from_series("r2", order, &lhs, &rhs)
}

fn b_ring() -> VarSet {
    VarSet::new(["b"]).expect("single name")
}

fn pochhammer_series(ring: &VarSet, order: usize, weight: impl Fn(usize) -> BigInt) -> TruncSeries {
    let coeffs = (0..=order)
        .map(|n| {
            pochhammer_pair(n, ring)
                .unwrap()
                .scale(&Rational::new(BigInt::from(1), weight(n)))
        })
        .collect();
    TruncSeries::new(ring, order, coeffs)
}

/// At `c = 0`, with `P_n = prod_{i<n} (i(i+1) - b)`:
/// `(sum P_n t^n/n!)(sum P_n (-t)^n/n!) = sum P_n binom(2n,n) t^(2n)`.
pub fn verify_hg_c0(order: usize) -> VerificationRecord {
    let ring = b_ring();
    let a = pochhammer_series(&ring, order, fact);
    let lhs = &a * &a.reflect();
    let rhs_terms: Vec<MultiPoly> = (0..=order / 2)
        .map(|n| {
            pochhammer_pair(n, &ring)
                .unwrap()
                .scale(&Rational::from_integer(binom(2 * n, n as i64)))
        })
        .collect();
    let rhs = TruncSeries::from_terms_spaced(&ring, order, &rhs_terms, 2);
    VerificationRecord::from_series("hg-c0", order, &lhs, &rhs)
}

/// `(sum P_n t^n / n!^2)^2 = sum P_n / n!^2 binom(2n,n) (t(1-t))^n`.
pub fn verify_clausen(order: usize) -> VerificationRecord {
    let ring = b_ring();
    let a = pochhammer_series(&ring, order, |n| {
        let f = fact(n);
        &f * &f
    });
    let lhs = &a * &a;

    let t_one_minus_t = TruncSeries::new(
        &ring,
        order,
        vec![
            MultiPoly::zero(&ring),
            MultiPoly::one(&ring),
            MultiPoly::from_int(&ring, -1),
        ],
    );
    let mut rhs = TruncSeries::zero(&ring, order);
    let mut power = TruncSeries::one(&ring, order);
    for n in 0..=order {
        let coeff = a.coeff(n).scale(&Rational::from_integer(binom(2 * n, n as i64)));
        rhs = &rhs + &power.scale_poly(&coeff);
        power = &power * &t_one_minus_t;
    }
    VerificationRecord::from_series("clausen", order, &lhs, &rhs)
}

/// `g(t) = sum w_n t^n` is annihilated by [`g_operator`].
pub fn verify_ode_g(order: usize) -> Result<VerificationRecord> {
    let ring = bc_ring();
    let g = TruncSeries::new(&ring, order, gen_w(order).terms);
    let residual = g_operator().apply(&g)?;
    let zero = TruncSeries::zero(&ring, residual.order());
    Ok(VerificationRecord::from_series("ode-g", order, &residual, &zero))
}

/// `G(t) = g(t) g(-t)` is annihilated by [`sym_square_operator`].
pub fn verify_ode_big_g(order: usize) -> Result<VerificationRecord> {
    let ring = bc_ring();
    let g = TruncSeries::new(&ring, order, gen_w(order).terms);
    let big_g = &g * &g.reflect();
    let residual = sym_square_operator().apply(&big_g)?;
    let zero = TruncSeries::zero(&ring, residual.order());
    Ok(VerificationRecord::from_series("ode-G", order, &residual, &zero))
}

fn derivation_record(f: &TruncSeries, k: usize) -> VerificationRecord {
    let mut iterates = vec![f.clone()];
    for _ in 0..=2 * k {
        let next = iterates.last().unwrap().theta();
        iterates.push(next);
    }
    let lhs = f * &iterates[2 * k + 1];
    let mut inner = TruncSeries::zero(f.vars(), f.order());
    for j in 0..=2 * k {
        let prod = &iterates[j] * &iterates[2 * k - j];
        inner = if j % 2 == 0 { &inner + &prod } else { &inner - &prod };
    }
    let rhs = inner.theta().scale(&Rational::new(1.into(), 2.into()));
    VerificationRecord::from_series(&format!("derivation(k={k})"), f.order(), &lhs, &rhs)
}

/// `f * D^(2k+1) f = 1/2 D(sum_{j=0}^{2k} (-1)^j D^j f D^(2k-j) f)` for the
/// derivation `D = t d/dt`.
pub fn derivation_identity_check(f: &TruncSeries, k: usize) -> bool {
    derivation_record(f, k).passed
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn id3_low_orders() {
        assert!(verify_id3(0).passed);
        let r = verify_id3(4);
        assert!(r.passed, "{r:?}");
        assert!(verify_id3(12).passed);
    }

    #[test]
    fn id3_fourth_coefficient_by_hand() {
        // 2! w_2 binom(4,2) from (k, n) = (0, 2) and -c binom(1,1) binom(2,1) from (1, 0)
        let ring = bc_ring();
        let w2x2 = MultiPoly::parse("b^2 - 2*b", &ring).unwrap();
        let total = &w2x2.scale(&int(6)) - &MultiPoly::parse("2*c", &ring).unwrap();
        assert_eq!(total, gen_u(2).terms[2]);
    }

    #[test]
    fn r2_low_orders() {
        assert!(verify_r2(0).passed);
        assert!(verify_r2(2).passed);
        assert!(verify_r2(10).passed);
    }

    #[test]
    fn hg_c0_low_orders() {
        assert!(verify_hg_c0(2).passed);
        assert!(verify_hg_c0(10).passed);
        // P_1 = -b
        assert_eq!(pochhammer_pair(1, &b_ring()).unwrap().to_string(), "-b");
    }

    #[test]
    fn hg_c0_factors_are_w_at_c0() {
        // sum P_n (-t)^n / n! is g(t) at c = 0
        let ring = bc_ring();
        let w = gen_w(10);
        for n in 0..=10 {
            let p = pochhammer_pair(n, &ring).unwrap();
            let sign = if n % 2 == 0 { 1 } else { -1 };
            let expect = p.scale(&Rational::new(sign.into(), fact(n)));
            assert_eq!(w.terms[n].substitute("c", &int(0)).unwrap(), expect, "n={n}");
        }
    }

    #[test]
    fn clausen_low_orders() {
        assert!(verify_clausen(0).passed);
        assert!(verify_clausen(1).passed);
        assert!(verify_clausen(8).passed);
    }

    #[test]
    fn derivation_identity() {
        let v = VarSet::new(["a0", "a1", "a2", "a3", "a4"]).unwrap();
        let coeffs = v.names().iter().map(|n| MultiPoly::var(&v, n).unwrap()).collect();
        let f = TruncSeries::new(&v, 10, coeffs);
        assert!(derivation_identity_check(&f, 0));
        assert!(derivation_identity_check(&f, 1));
        assert!(derivation_identity_check(&TruncSeries::one(&v, 6), 2));
    }

    #[test]
    fn derivation_identity_is_not_vacuous() {
        // the even-order analogue is false in general
        let v = VarSet::empty();
        let f = TruncSeries::new(&v, 6, vec![MultiPoly::one(&v); 3]);
        let lhs = &f * &f.theta().theta();
        let rhs = (&f * &f).theta().scale(&Rational::new(1.into(), 2.into()));
        assert_ne!(lhs, rhs);
    }

    #[test]
    fn mismatch_is_reported() {
        let ring = bc_ring();
        let a = vec![MultiPoly::one(&ring), MultiPoly::var(&ring, "b").unwrap()];
        let b = vec![MultiPoly::one(&ring), MultiPoly::var(&ring, "c").unwrap()];
        let r = VerificationRecord::from_coeffs("x", 1, &a, &b);
        assert!(!r.passed);
        assert_eq!(
            r.first_mismatch,
            Some(Mismatch { index: 1, lhs: "b".into(), rhs: "c".into() })
        );
    }

    #[test]
    fn identity_names_round_trip() {
        for id in Identity::ALL {
            assert_eq!(id.name().parse::<Identity>().unwrap(), id);
        }
        assert!("bogus".parse::<Identity>().is_err());
    }

    #[test]
    fn dispatcher_small_orders() {
        for id in Identity::ALL {
            let r = verify(id, 8).unwrap();
            assert!(r.passed, "{id}: {r:?}");
        }
    }
}
