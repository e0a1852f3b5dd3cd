//! The parameter sequences `w_n(b, c)` and `u_n(b, c)`, the Apéry numbers, and
//! the transformations relating `u` and `w`.
//!
//! `w` is generated by
//!
//! ```text
//! n w_n = (b - n(n-1)) w_{n-1} + c w_{n-3},          w_0 = 1
//! ```
//!
//! and `u` by
//!
//! ```text
//! n u_n = 2(2n-1)(n(n-1) - b) u_{n-1} - 4c(n-1) u_{n-2},   u_0 = 1
//! ```
//!
//! so that `sum u_n t^(2n) = g(t) g(-t)` with `g(t) = sum w_n t^n`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{binom, fact, int, Rational};
use crate::poly::{DenomProfile, Monomial, MultiPoly, VarSet};

/// How a [`ParamSeq`] was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Recursion,
    Convolution,
    BinFormula,
    InvFormula,
    C0ClosedForm,
}

/// A finite prefix of a sequence of polynomials over a fixed ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamSeq {
    pub ring: VarSet,
    pub terms: Vec<MultiPoly>,
    pub provenance: Provenance,
}

impl ParamSeq {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term(&self, n: usize) -> &MultiPoly {
        &self.terms[n]
    }

    pub fn profiles(&self) -> Vec<DenomProfile> {
        self.terms.iter().map(MultiPoly::denom_profile).collect()
    }

    fn require(&self, need: usize) -> Result<()> {
        if self.terms.len() < need {
            Err(Error::InsufficientTerms {
                need,
                have: self.terms.len(),
            })
        } else {
            Ok(())
        }
    }
}

/// The ring `Q[b, c]` all parameter sequences live in.
pub fn bc_ring() -> VarSet {
    VarSet::new(["b", "c"]).expect("distinct names")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    W,
    U,
}

/// Incremental generator for `w` or `u`; terms are cached and extended on
/// demand.
#[derive(Clone, Debug)]
pub struct Generator {
    kind: Kind,
    seq: ParamSeq,
    b: MultiPoly,
    c: MultiPoly,
}

impl Generator {
    fn new(kind: Kind) -> Self {
        let ring = bc_ring();
        Generator {
            kind,
            b: MultiPoly::var(&ring, "b").unwrap(),
            c: MultiPoly::var(&ring, "c").unwrap(),
            seq: ParamSeq {
                terms: vec![MultiPoly::one(&ring)],
                ring,
                provenance: Provenance::Recursion,
            },
        }
    }

    pub fn w() -> Self {
        Self::new(Kind::W)
    }

    pub fn u() -> Self {
        Self::new(Kind::U)
    }

    /// Ensures terms `0..=n` are present and returns the cached prefix.
    pub fn extend_to(&mut self, n: usize) -> &ParamSeq {
        while self.seq.terms.len() <= n {
            let next = self.step(self.seq.terms.len());
            self.seq.terms.push(next);
        }
        &self.seq
    }

    /// The first `n + 1` terms.
    pub fn prefix(&mut self, n: usize) -> ParamSeq {
        self.extend_to(n);
        ParamSeq {
            terms: self.seq.terms[..=n].to_vec(),
            ..self.seq.clone()
        }
    }

    fn step(&self, n: usize) -> MultiPoly {
        let ring = &self.seq.ring;
        let terms = &self.seq.terms;
        let back = |k: usize| if n >= k { Some(&terms[n - k]) } else { None };
        let ni = n as i64;
        let nn1 = MultiPoly::from_int(ring, ni * (ni - 1));
        let mut acc = MultiPoly::zero(ring);
        match self.kind {
            Kind::W => {
                acc = &acc + &(&(&self.b - &nn1) * back(1).unwrap());
                if let Some(w3) = back(3) {
                    acc = &acc + &(&self.c * w3);
                }
            }
            Kind::U => {
                let q1 = (&nn1 - &self.b).scale(&int(2 * (2 * ni - 1)));
                acc = &acc + &(&q1 * back(1).unwrap());
                if let Some(u2) = back(2) {
                    acc = &acc - &(&self.c * u2).scale(&int(4 * (ni - 1)));
                }
            }
        }
        acc.scale(&Rational::new(BigInt::one(), BigInt::from(n)))
    }
}

/// `w_0 ..= w_n`.
pub fn gen_w(n: usize) -> ParamSeq {
    Generator::w().prefix(n)
}

/// `u_0 ..= u_n`.
pub fn gen_u(n: usize) -> ParamSeq {
    Generator::u().prefix(n)
}

/// Apéry numbers `a_0 ..= a_n` from
/// `n^3 a_n = (2n-1)(17n^2-17n+5) a_{n-1} - (n-1)^3 a_{n-2}`.
pub fn gen_apery(n: usize) -> Result<Vec<BigInt>> {
    let mut a: Vec<BigInt> = vec![BigInt::one()];
    for k in 1..=n {
        let kk = BigInt::from(k);
        let quad: BigInt = &kk * &kk * 17 - &kk * 17 + 5;
        let mut rhs: BigInt = (BigInt::from(2 * k) - 1) * quad * &a[k - 1];
        if k >= 2 {
            let km1 = BigInt::from(k - 1);
            rhs -= &km1 * &km1 * &km1 * &a[k - 2];
        }
        let cube = &kk * &kk * &kk;
        let (q, r) = rhs.div_rem(&cube);
        if !r.is_zero() {
            return Err(Error::IntegralityViolation {
                n: k,
                divisor: cube.to_string(),
            });
        }
        a.push(q);
    }
    Ok(a)
}

/// `sum_k binom(n+k, k)^2 binom(n, k)^2`.
pub fn apery_sum(n: usize) -> BigInt {
    (0..=n as i64)
        .map(|k| {
            let x = binom(n + k as usize, k) * binom(n, k);
            &x * &x
        })
        .sum()
}

/// `u_n = sum_{k=0}^{2n} (-1)^k w_k w_{2n-k}` for `n = 0..=n_max`.
pub fn u_conv(n_max: usize, w: &ParamSeq) -> Result<ParamSeq> {
    w.require(2 * n_max + 1)?;
    let terms = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            // the k and 2n-k summands coincide
            let items: Vec<_> = (0..=n)
                .map(|k| {
                    let weight = match (k == n, k % 2 == 0) {
                        (true, even) => if even { 1 } else { -1 },
                        (false, even) => if even { 2 } else { -2 },
                    };
                    (&w.terms[k], &w.terms[2 * n - k], BigInt::from(weight))
                })
                .collect();
            MultiPoly::sum_of_products(&w.ring, &items)
        })
        .collect();
    Ok(ParamSeq {
        ring: w.ring.clone(),
        terms,
        provenance: Provenance::Convolution,
    })
}

/// `u_n = (-1)^n sum_k (-1)^k c^k (n-2k)! w_{n-2k} binom(n-k, k) binom(2n-2k, n-k)`.
pub fn u_bin(n_max: usize, w: &ParamSeq) -> Result<ParamSeq> {
    w.require(n_max + 1)?;
    let c = MultiPoly::var(&w.ring, "c")?;
    let terms = (0..=n_max)
        .map(|n| {
            let mut acc = MultiPoly::zero(&w.ring);
            let mut ck = MultiPoly::one(&w.ring);
            for k in 0..=n / 2 {
                let j = n - 2 * k;
                let scalar = fact(j) * binom(n - k, k as i64) * binom(2 * n - 2 * k, (n - k) as i64);
                let sign = if (n + k) % 2 == 0 { 1 } else { -1 };
                let term = &ck * &w.terms[j];
                acc.add_scaled(&term, &Rational::from_integer(scalar * sign));
                ck = &ck * &c;
            }
            acc
        })
        .collect();
    Ok(ParamSeq {
        ring: w.ring.clone(),
        terms,
        provenance: Provenance::BinFormula,
    })
}

/// Recovers `n! w_n` from `u` by the inversion formula, computed over
/// `Q[b, s]` with `s^2 = c`. Fails if an odd power of `s` survives.
pub fn w_inv(n_max: usize, u: &ParamSeq) -> Result<ParamSeq> {
    u.require(n_max + 1)?;
    let bs = VarSet::new(["b", "s"])?;
    let ci = u.ring.index_of("c").ok_or_else(|| Error::UnknownVariable("c".into()))?;
    let bi = u.ring.index_of("b").ok_or_else(|| Error::UnknownVariable("b".into()))?;
    let lifted: Vec<MultiPoly> = u.terms.iter().map(|p| c_to_s_squared(p, bi, ci, &bs)).collect();
    let s = MultiPoly::var(&bs, "s")?;

    let mut spow = vec![MultiPoly::one(&bs)];
    for k in 1..=n_max {
        spow.push(&spow[k - 1] * &s);
    }

    let mut terms = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut acc = MultiPoly::zero(&bs);
        for k in 0..=n {
            let scalar = inversion_weight(n, k);
            if !scalar.is_zero() {
                let term = &spow[n - k] * &lifted[k];
                acc.add_scaled(&term, &scalar);
            }
        }
        terms.push(s_squared_to_c(&acc, n, &u.ring, bi, ci)?);
    }
    Ok(ParamSeq {
        ring: u.ring.clone(),
        terms,
        provenance: Provenance::InvFormula,
    })
}

/// Rational weight of `c^((n-k)/2) u_k` in the inversion formula:
/// `sum_{m=k}^{n} binom(n,m)/binom(2m,m) (-1)^(n+m+k)
/// (binom(2m,m-k) - binom(2m,m-k-1)) 2^(m-k)`.
pub fn inversion_weight(n: usize, k: usize) -> Rational {
    let mut total = Rational::zero();
    for m in k..=n {
        let (mi, ki) = (m as i64, k as i64);
        let ballot = binom(2 * m, mi - ki) - binom(2 * m, mi - ki - 1);
        let mut t = Rational::new(binom(n, mi) * ballot, binom(2 * m, mi));
        t *= Rational::from_integer(BigInt::one() << (m - k));
        if (n + m + k) % 2 == 1 {
            t = -t;
        }
        total += t;
    }
    total
}

fn c_to_s_squared(p: &MultiPoly, bi: usize, ci: usize, bs: &VarSet) -> MultiPoly {
    MultiPoly::from_terms(
        bs,
        p.terms().map(|(m, c)| {
            let e = m.exponents();
            (vec![e[bi], 2 * e[ci]], c.clone())
        }),
    )
}

fn s_squared_to_c(p: &MultiPoly, n: usize, ring: &VarSet, bi: usize, ci: usize) -> Result<MultiPoly> {
    let odd: Vec<(Vec<u32>, Rational)> = p
        .terms()
        .filter(|(m, _)| m.exponents()[1] % 2 == 1)
        .map(|(m, c)| (m.exponents().to_vec(), c.clone()))
        .collect();
    if !odd.is_empty() {
        let residue = MultiPoly::from_terms(p.vars(), odd);
        return Err(Error::OddPowerSurvives {
            n,
            residue: residue.to_string(),
        });
    }
    let mut out = MultiPoly::zero(ring);
    for (m, c) in p.terms() {
        let e = m.exponents();
        let mut exps = vec![0; ring.len()];
        exps[bi] = e[0];
        exps[ci] = e[1] / 2;
        out.add_term(Monomial::new(exps), c.clone());
    }
    Ok(out)
}

/// `prod_{i=0}^{n-1} (i(i+1) - b)`, which equals `(1/2 + beta)_n (1/2 - beta)_n`
/// under `b = beta^2 - 1/4`. `ring` must contain `b`.
pub fn pochhammer_pair(n: usize, ring: &VarSet) -> Result<MultiPoly> {
    let b = MultiPoly::var(ring, "b")?;
    let mut acc = MultiPoly::one(ring);
    for i in 0..n as i64 {
        acc = &acc * &(&MultiPoly::from_int(ring, i * (i + 1)) - &b);
    }
    Ok(acc)
}

/// The closed form of `u_n(b, 0)`: `binom(2n, n) prod_{i<n} (i(i+1) - b)`,
/// over `Q[b, c]`.
pub fn u_c0(n: usize) -> MultiPoly {
    let ring = bc_ring();
    pochhammer_pair(n, &ring)
        .expect("ring has b")
        .scale(&Rational::from_integer(binom(2 * n, n as i64)))
}

/// `u_c0(0..=n_max)` as a sequence.
pub fn u_c0_seq(n_max: usize) -> ParamSeq {
    ParamSeq {
        ring: bc_ring(),
        terms: (0..=n_max).map(u_c0).collect(),
        provenance: Provenance::C0ClosedForm,
    }
}

/// `n! * seq_n` for each term.
pub fn factorial_scaled(seq: &ParamSeq) -> Vec<MultiPoly> {
    seq.terms
        .iter()
        .enumerate()
        .map(|(n, p)| p.scale(&Rational::from_integer(fact(n))))
        .collect()
}
