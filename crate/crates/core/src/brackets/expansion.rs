//! Expansion of `u_n` for a recurrence
//! `n u_n = sum_i p_i(n - i/2) u_{n-i}` with odd `p_i`, as a sum over
//! atom multisets weighted by bracket values.

use serde::Serialize;

use super::{BracketTable, QTuple};
use crate::error::{Error, Result};
use crate::numeric::Rational;
use crate::poly::{MultiPoly, UPoly, VarSet};

/// One odd monomial `coeff * t^degree` of `p_weight`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub weight: u32,
    pub degree: u32,
    pub coeff: MultiPoly,
}

/// Atoms of an odd-form recurrence over a common coefficient ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OddFormExpansion {
    ring: VarSet,
    atoms: Vec<Atom>,
}

/// Splits `p` (of weight `weight`) into its odd monomials, lowest degree first.
pub fn decompose_odd(p: &UPoly, weight: u32) -> Result<Vec<Atom>> {
    if !p.is_odd() {
        return Err(Error::NotOdd(p.to_string()));
    }
    Ok(p.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| Atom {
            weight,
            degree: k as u32,
            coeff: c.clone(),
        })
        .collect())
}

impl OddFormExpansion {
    /// `polys[i]` is `p_{i+1}`.
    pub fn new(polys: &[UPoly]) -> Result<Self> {
        let ring = polys
            .first()
            .map(|p| p.ring().clone())
            .ok_or_else(|| Error::Spec("recurrence has no terms".into()))?;
        let mut atoms = Vec::new();
        for (i, p) in polys.iter().enumerate() {
            ring.check_same(p.ring())?;
            atoms.extend(decompose_odd(p, i as u32 + 1)?);
        }
        Ok(OddFormExpansion { ring, atoms })
    }

    pub fn ring(&self) -> &VarSet {
        &self.ring
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    fn table(&self) -> Result<BracketTable> {
        let e = VarSet::empty();
        let qs = self
            .atoms
            .iter()
            .map(|a| {
                UPoly::monomial("t", &e, a.degree as usize, MultiPoly::one(&e))
            })
            .collect();
        Ok(BracketTable::new(QTuple::new(qs)?))
    }
}

/// One multiset of atoms and what it contributes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Contribution {
    pub multiplicities: Vec<u32>,
    pub bracket: String,
    pub coefficient: String,
    pub term: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExpansionReport {
    pub n: u32,
    /// `p_i: coeff*t^k` per atom, in table order.
    pub atoms: Vec<String>,
    pub contributions: Vec<Contribution>,
    pub total: String,
}

/// `u_n` as a polynomial in the coefficient ring.
pub fn expand_via_brackets(expansion: &OddFormExpansion, n: u32) -> Result<MultiPoly> {
    let (total, _) = expand(expansion, n)?;
    Ok(total)
}

/// `u_n` together with its per-multiset breakdown.
pub fn expansion_report(expansion: &OddFormExpansion, n: u32) -> Result<ExpansionReport> {
    let (total, contributions) = expand(expansion, n)?;
    Ok(ExpansionReport {
        n,
        atoms: expansion
            .atoms
            .iter()
            .map(|a| {
                let t = UPoly::monomial("t", &expansion.ring, a.degree as usize, a.coeff.clone());
                format!("p{}: {}", a.weight, t)
            })
            .collect(),
        contributions,
        total: total.to_string(),
    })
}

fn expand(expansion: &OddFormExpansion, n: u32) -> Result<(MultiPoly, Vec<Contribution>)> {
    let ring = &expansion.ring;
    let mut total = MultiPoly::zero(ring);
    let mut contributions = Vec::new();
    if expansion.atoms.is_empty() {
        if n == 0 {
            total = MultiPoly::one(ring);
        }
        return Ok((total, contributions));
    }
    let mut table = expansion.table()?;
    let weights: Vec<Rational> = expansion
        .atoms
        .iter()
        .map(|a| Rational::from_integer(a.weight.into()))
        .collect();
    for m in weighted_points(&expansion.atoms, n) {
        let bracket = table.get(&m)?.eval_slice(&weights);
        if num_traits::Zero::is_zero(&bracket) {
            continue;
        }
        let mut coefficient = MultiPoly::one(ring);
        for (a, &k) in expansion.atoms.iter().zip(&m) {
            coefficient = &coefficient * &a.coeff.pow(k);
        }
        let term = coefficient.scale(&bracket);
        total = &total + &term;
        contributions.push(Contribution {
            multiplicities: m,
            bracket: bracket.to_string(),
            coefficient: coefficient.to_string(),
            term: term.to_string(),
        });
    }
    Ok((total, contributions))
}

/// All `m` with `sum_j m_j * weight_j = n`, lexicographically descending.
fn weighted_points(atoms: &[Atom], n: u32) -> Vec<Vec<u32>> {
    fn rec(atoms: &[Atom], left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let Some((first, rest)) = atoms.split_first() else {
            if left == 0 {
                out.push(prefix.clone());
            }
            return;
        };
        for k in (0..=left / first.weight).rev() {
            prefix.push(k);
            rec(rest, left - k * first.weight, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(atoms, n, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{bc_ring, gen_u};

    fn u_rec1() -> OddFormExpansion {
        let ring = bc_ring();
        OddFormExpansion::new(&[
            UPoly::parse("4*t^3 - (4*b+1)*t", "t", &ring).unwrap(),
            UPoly::parse("-4*c*t", "t", &ring).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn atoms_of_the_u_recurrence() {
        let e = u_rec1();
        let shape: Vec<(u32, u32)> = e.atoms().iter().map(|a| (a.weight, a.degree)).collect();
        assert_eq!(shape, vec![(1, 1), (1, 3), (2, 1)]);
    }

    #[test]
    fn first_term_breakdown() {
        let r = expansion_report(&u_rec1(), 1).unwrap();
        let terms: Vec<&str> = r.contributions.iter().map(|c| c.term.as_str()).collect();
        assert_eq!(terms, vec!["-2*b - 1/2", "1/2"]);
        assert_eq!(r.total, "-2*b");
    }

    #[test]
    fn agrees_with_recursion() {
        let e = u_rec1();
        let u = gen_u(8);
        for n in 0..=8 {
            assert_eq!(&expand_via_brackets(&e, n).unwrap(), u.term(n as usize), "n={n}");
        }
    }

    #[test]
    fn rejects_even_part() {
        let ring = bc_ring();
        let p = UPoly::parse("b + 1/4 - t^2", "t", &ring).unwrap();
        assert!(matches!(decompose_odd(&p, 1), Err(Error::NotOdd(_))));
    }

    #[test]
    fn weighted_point_enumeration() {
        let e = u_rec1();
        assert_eq!(weighted_points(e.atoms(), 2).len(), 4);
        assert_eq!(weighted_points(e.atoms(), 0), vec![vec![0, 0, 0]]);
    }
}
