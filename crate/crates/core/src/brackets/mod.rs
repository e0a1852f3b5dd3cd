//! Bracket polynomials `<Q>_m` indexed by lattice points `m` in `Z_{>=0}^d`:
//!
//! ```text
//! <Q>_0 = 1
//! <Q>_m = sum_i Q_i(<m - e_i/2, x>) <Q>_{m - e_i} / <m, x>
//! ```
//!
//! For odd `Q_i` with integer coefficients every entry is a polynomial in
//! `x_1..x_d` whose denominators are powers of 2. The table enforces the
//! polynomial part (each division must be exact) and [`certify_table`]
//! checks the denominators.

mod expansion;

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{binom, multinomial, Rational};
use crate::poly::{MultiPoly, UPoly, VarSet};

pub use expansion::{
    decompose_odd, expand_via_brackets, expansion_report, Atom, Contribution, ExpansionReport,
    OddFormExpansion,
};

/// Tuple `(Q_1, ..., Q_d)` of integer polynomials in `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QTuple {
    polys: Vec<UPoly>,
    odd: bool,
}

impl QTuple {
    /// Odd tuple; rejects any non-odd member.
    pub fn new(polys: Vec<UPoly>) -> Result<Self> {
        let t = Self::permissive(polys)?;
        if let Some(p) = t.polys.iter().find(|p| !p.is_odd()) {
            return Err(Error::NotOdd(p.to_string()));
        }
        Ok(t)
    }

    /// Tuple without the oddness check, for negative testing.
    pub fn permissive(polys: Vec<UPoly>) -> Result<Self> {
        if polys.is_empty() {
            return Err(Error::Spec("bracket tuple must have at least one polynomial".into()));
        }
        for p in &polys {
            if p.integer_coeffs().is_none() {
                return Err(Error::NotIntegral(p.to_string()));
            }
        }
        let odd = polys.iter().all(UPoly::is_odd);
        Ok(QTuple { polys, odd })
    }

    /// Parses a comma-separated list of polynomials in `t`.
    pub fn parse(text: &str, permissive: bool) -> Result<Self> {
        let polys = text
            .split(',')
            .map(|part| UPoly::parse(part, "t", &VarSet::empty()))
            .collect::<Result<Vec<_>>>()?;
        if permissive {
            Self::permissive(polys)
        } else {
            Self::new(polys)
        }
    }

    pub fn dim(&self) -> usize {
        self.polys.len()
    }

    pub fn polys(&self) -> &[UPoly] {
        &self.polys
    }

    pub fn is_odd(&self) -> bool {
        self.odd
    }
}

impl fmt::Display for QTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.polys.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Memoized bracket values.
#[derive(Clone, Debug)]
pub struct BracketTable {
    qtuple: QTuple,
    xvars: VarSet,
    entries: HashMap<Vec<u32>, MultiPoly>,
    /// Every point with `|m| <= complete_level` is present.
    complete_level: Option<usize>,
}

impl BracketTable {
    pub fn new(qtuple: QTuple) -> Self {
        let d = qtuple.dim();
        let xvars = VarSet::new((1..=d).map(|i| format!("x{i}"))).expect("distinct names");
        let mut entries = HashMap::new();
        entries.insert(vec![0; d], MultiPoly::one(&xvars));
        BracketTable {
            qtuple,
            xvars,
            entries,
            complete_level: Some(0),
        }
    }

    pub fn qtuple(&self) -> &QTuple {
        &self.qtuple
    }

    pub fn xvars(&self) -> &VarSet {
        &self.xvars
    }

    pub fn dim(&self) -> usize {
        self.qtuple.dim()
    }

    /// Number of stored entries.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `<Q>_m`, computing and storing its whole dependency cone.
    pub fn get(&mut self, m: &[u32]) -> Result<MultiPoly> {
        self.check_dim(m)?;
        if let Some(p) = self.entries.get(m) {
            return Ok(p.clone());
        }
        // Fill the cone in order of increasing level so each entry finds its
        // predecessors.
        let level: u32 = m.iter().sum();
        let mut cone: Vec<Vec<u32>> = Vec::new();
        let mut stack = vec![m.to_vec()];
        let mut seen = std::collections::HashSet::new();
        while let Some(p) = stack.pop() {
            if self.entries.contains_key(&p) || !seen.insert(p.clone()) {
                continue;
            }
            for i in 0..p.len() {
                if p[i] > 0 {
                    let mut q = p.clone();
                    q[i] -= 1;
                    stack.push(q);
                }
            }
            cone.push(p);
        }
        cone.sort_by_key(|p| (p.iter().sum::<u32>(), p.clone()));
        for p in cone {
            let value = self.compute(&p)?;
            self.entries.insert(p, value);
        }
        debug_assert!(level > 0);
        Ok(self.entries[m].clone())
    }

    /// Builds every entry with `|m| <= bound`, one level at a time. Entries
    /// within a level are computed in parallel.
    pub fn build_to(&mut self, bound: usize) -> Result<()> {
        let start = self.complete_level.map_or(0, |l| l + 1);
        for level in start..=bound {
            let points = lattice_level(self.dim(), level);
            let computed: Vec<(Vec<u32>, Result<MultiPoly>)> = points
                .into_par_iter()
                .filter(|p| !self.entries.contains_key(p))
                .map(|p| {
                    let v = self.compute(&p);
                    (p, v)
                })
                .collect();
            for (p, v) in computed {
                self.entries.insert(p, v?);
            }
            self.complete_level = Some(level);
        }
        Ok(())
    }

    /// Stored entries at level `|m| = level`, in lexicographic order of `m`.
    pub fn level(&self, level: usize) -> Vec<(Vec<u32>, &MultiPoly)> {
        lattice_level(self.dim(), level)
            .into_iter()
            .filter_map(|p| self.entries.get(&p).map(|v| (p, v)))
            .collect()
    }

    fn check_dim(&self, m: &[u32]) -> Result<()> {
        if m.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: m.len(),
            });
        }
        Ok(())
    }

    /// One recursion step; all predecessors must already be stored.
    fn compute(&self, m: &[u32]) -> Result<MultiPoly> {
        let d = self.dim();
        let mut numerator = MultiPoly::zero(&self.xvars);
        for i in 0..d {
            if m[i] == 0 {
                continue;
            }
            let mut prev_m = m.to_vec();
            prev_m[i] -= 1;
            let prev = &self.entries[&prev_m];
            if prev.is_zero() {
                continue;
            }
            // <m - e_i/2, x> = sum_j m_j x_j - x_i / 2
            let form = MultiPoly::from_terms(
                &self.xvars,
                (0..d).map(|j| {
                    let mut e = vec![0; d];
                    e[j] = 1;
                    let mut c = Rational::from_integer(BigInt::from(m[j]));
                    if j == i {
                        c -= Rational::new(1.into(), 2.into());
                    }
                    (e, c)
                }),
            );
            let qi = self.qtuple.polys[i].eval_poly(&form)?;
            numerator = &numerator + &(&qi * prev);
        }
        let divisor: Vec<i64> = m.iter().map(|&v| i64::from(v)).collect();
        numerator.exact_div_linear(&divisor).map_err(|e| Error::Bracket {
            m: m.to_vec(),
            source: Box::new(e),
        })
    }
}

/// All `m` in `Z_{>=0}^d` with `|m| = level`, lexicographically descending.
pub fn lattice_level(d: usize, level: usize) -> Vec<Vec<u32>> {
    fn rec(d: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == d {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for v in (0..=left).rev() {
            prefix.push(v);
            rec(d, left - v, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if d > 0 {
        rec(d, level as u32, &mut Vec::with_capacity(d), &mut out);
    }
    out
}

/// `<(t, ..., t)>_m = binom(2|m|, |m|) / 4^|m| * multinomial(m)`, the
/// `z^m` coefficient of `(1 - z_1 - ... - z_d)^(-1/2)`.
pub fn r3_closed_form(m: &[u32]) -> Rational {
    let total: u32 = m.iter().sum();
    let central = binom(2 * total as usize, i64::from(total));
    Rational::new(central * multinomial(m), BigInt::from(1) << (2 * total))
}

/// One exported table row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableEntry {
    pub m: Vec<u32>,
    pub value: String,
    pub v2_defect: u64,
}

/// Largest 2-power denominator exponent among the entries of one level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelDefect {
    pub level: usize,
    pub entries: usize,
    pub max_v2_defect: u64,
}

/// Result of checking a table against `Z[1/2][x]` membership.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certification {
    pub tuple: String,
    pub bound: usize,
    pub odd_tuple: bool,
    pub all_two_adic: bool,
    pub levels: Vec<LevelDefect>,
    /// Least-squares slope of max defect against level, as an exact rational.
    pub defect_slope: String,
    /// Largest `max_v2_defect / level` over levels >= 1.
    pub max_defect_per_level: String,
    /// Whether every entry has only monomials of even total degree.
    pub all_even_degree: bool,
}

/// Builds the table to `bound` and checks every entry for power-of-2
/// denominators, recording the per-level 2-adic defect.
pub fn certify_table(table: &mut BracketTable, bound: usize) -> Result<Certification> {
    table.build_to(bound)?;
    let mut levels = Vec::with_capacity(bound + 1);
    let mut all_even_degree = true;
    for level in 0..=bound {
        let mut max_defect = 0;
        let entries = table.level(level);
        for (m, p) in &entries {
            let prof = p.denom_profile();
            if !prof.two_adic_only {
                return Err(Error::NotTwoAdic {
                    m: m.clone(),
                    denominator: prof.lcm_denominator.to_string(),
                });
            }
            max_defect = max_defect.max(prof.max_neg_v2);
            all_even_degree &= p.terms().all(|(mono, _)| mono.degree() % 2 == 0);
        }
        levels.push(LevelDefect {
            level,
            entries: entries.len(),
            max_v2_defect: max_defect,
        });
    }
    let points: Vec<(i64, i64)> = levels
        .iter()
        .map(|l| (l.level as i64, l.max_v2_defect as i64))
        .collect();
    let per_level = levels
        .iter()
        .filter(|l| l.level > 0)
        .map(|l| Rational::new(BigInt::from(l.max_v2_defect), BigInt::from(l.level)))
        .max()
        .unwrap_or_else(Rational::zero);
    Ok(Certification {
        tuple: table.qtuple().to_string(),
        bound,
        odd_tuple: table.qtuple().is_odd(),
        all_two_adic: true,
        levels,
        defect_slope: least_squares_slope(&points).to_string(),
        max_defect_per_level: per_level.to_string(),
        all_even_degree,
    })
}

/// Exact least-squares slope; zero for fewer than two points.
pub fn least_squares_slope(points: &[(i64, i64)]) -> Rational {
    let n = points.len() as i64;
    if n < 2 {
        return Rational::zero();
    }
    let sx: i64 = points.iter().map(|p| p.0).sum();
    let sy: i64 = points.iter().map(|p| p.1).sum();
    let sxx: i64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: i64 = points.iter().map(|p| p.0 * p.1).sum();
    let den = n * sxx - sx * sx;
    if den == 0 {
        return Rational::zero();
    }
    Rational::new(BigInt::from(n * sxy - sx * sy), BigInt::from(den))
}

/// Table rows with `|m| <= bound`, level by level.
pub fn export_table(table: &mut BracketTable, bound: usize) -> Result<Vec<TableEntry>> {
    table.build_to(bound)?;
    let mut rows = Vec::new();
    for level in 0..=bound {
        for (m, p) in table.level(level) {
            rows.push(TableEntry {
                m,
                value: p.to_string(),
                v2_defect: p.denom_profile().max_neg_v2,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, ratio, val2, Valuation2};
    use proptest::prelude::*;

    fn table(text: &str) -> BracketTable {
        BracketTable::new(QTuple::parse(text, false).unwrap())
    }

    fn x(text: &str, d: usize) -> MultiPoly {
        let v = VarSet::new((1..=d).map(|i| format!("x{i}"))).unwrap();
        MultiPoly::parse(text, &v).unwrap()
    }

    #[test]
    fn linear_tuple_matches_central_binomials() {
        let mut t = table("t");
        assert_eq!(t.get(&[0]).unwrap(), x("1", 1));
        assert_eq!(t.get(&[1]).unwrap(), x("1/2", 1));
        assert_eq!(t.get(&[2]).unwrap(), x("3/8", 1));
        assert_eq!(t.get(&[4]).unwrap(), x("35/128", 1));
    }

    #[test]
    fn cubic_tuple_by_hand() {
        let mut t = table("t^3");
        assert_eq!(t.get(&[1]).unwrap(), x("x1^2/8", 1));
        assert_eq!(t.get(&[2]).unwrap(), x("27*x1^4/128", 1));
    }

    #[test]
    fn pair_of_linear() {
        let mut t = table("t, t");
        assert_eq!(t.get(&[1, 1]).unwrap(), x("3/4", 2));
        assert!(matches!(t.get(&[1]), Err(Error::DimensionMismatch { expected: 2, got: 1 })));
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(r3_closed_form(&[3]), ratio(5, 16));
        assert_eq!(r3_closed_form(&[1, 1]), ratio(3, 4));
        assert_eq!(r3_closed_form(&[0, 0, 0]), int(1));
    }

    #[test]
    fn closed_form_agrees_exhaustively() {
        for d in 1..=3 {
            let tuple = vec!["t"; d].join(",");
            let mut t = table(&tuple);
            t.build_to(6).unwrap();
            for level in 0..=6 {
                for (m, p) in t.level(level) {
                    assert_eq!(p.as_constant().unwrap(), r3_closed_form(&m), "m={m:?}");
                }
            }
        }
    }

    #[test]
    fn lazy_and_levelwise_agree() {
        let mut lazy = table("t^3 - 3*t, t");
        let mut full = table("t^3 - 3*t, t");
        full.build_to(5).unwrap();
        for level in 0..=5 {
            for (m, p) in full.level(level) {
                assert_eq!(&lazy.get(&m).unwrap(), p);
            }
        }
    }

    #[test]
    fn permuting_the_tuple_permutes_the_table() {
        let mut ab = table("t^3, t");
        let mut ba = table("t, t^3");
        let swap = VarSet::new(["x1", "x2"]).unwrap();
        for level in 0..=5 {
            for m in lattice_level(2, level) {
                let p = ab.get(&m).unwrap();
                let q = ba.get(&[m[1], m[0]]).unwrap();
                // rename x1 <-> x2 in q
                let swapped = MultiPoly::from_terms(
                    &swap,
                    q.terms().map(|(mono, c)| {
                        let e = mono.exponents();
                        (vec![e[1], e[0]], c.clone())
                    }),
                );
                assert_eq!(p, swapped, "m={m:?}");
            }
        }
    }

    #[test]
    fn certify_cubic_defects() {
        let mut t = table("t^3");
        let cert = certify_table(&mut t, 2).unwrap();
        let defects: Vec<u64> = cert.levels.iter().map(|l| l.max_v2_defect).collect();
        assert_eq!(defects, vec![0, 3, 7]);
        assert!(cert.all_two_adic);
    }

    #[test]
    fn certify_linear_defects_follow_closed_form() {
        let mut t = table("t");
        let cert = certify_table(&mut t, 10).unwrap();
        for l in &cert.levels {
            let m = l.level as i64;
            let v = match val2(&Rational::from_integer(binom(2 * l.level, m))) {
                Valuation2::Finite(v) => v,
                Valuation2::Infinite => unreachable!(),
            };
            assert_eq!(l.max_v2_defect as i64, 2 * m - v);
        }
    }

    #[test]
    fn non_odd_tuple_rejected_without_permissive() {
        assert!(matches!(QTuple::parse("t^2", false), Err(Error::NotOdd(_))));
        assert!(QTuple::parse("t^2", true).is_ok());
        assert!(matches!(QTuple::parse("t/2", true), Err(Error::NotIntegral(_))));
    }

    #[test]
    fn single_even_monomial_still_certifies() {
        let mut t = BracketTable::new(QTuple::parse("t^2", true).unwrap());
        let cert = certify_table(&mut t, 6).unwrap();
        assert!(!cert.odd_tuple);
        assert_eq!(cert.levels[2].max_v2_defect, 5);
    }

    #[test]
    fn mixed_parity_tuple_is_not_polynomial() {
        let mut t = BracketTable::new(QTuple::parse("t^2, t", true).unwrap());
        let err = certify_table(&mut t, 3).unwrap_err();
        match err {
            Error::Bracket { m, source } => {
                assert_eq!(m, vec![1, 1]);
                assert!(matches!(*source, Error::InexactDivision { .. }));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_odd_tuples_fail_certification() {
        // a constant term breaks the very first division
        let mut t = BracketTable::new(QTuple::parse("t^2 + 1", true).unwrap());
        let err = certify_table(&mut t, 3).unwrap_err();
        assert!(matches!(err, Error::Bracket { ref m, .. } if m == &vec![1]), "{err:?}");
    }

    #[test]
    fn lattice_levels() {
        assert_eq!(lattice_level(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(lattice_level(3, 0), vec![vec![0, 0, 0]]);
        assert_eq!(lattice_level(3, 4).len(), 15);
    }

    #[test]
    fn slope_is_exact() {
        assert_eq!(least_squares_slope(&[(0, 0), (1, 3), (2, 7)]), ratio(7, 2));
        assert_eq!(least_squares_slope(&[(0, 5)]), int(0));
    }

    fn odd_poly(coeffs: &[i64]) -> UPoly {
        let e = VarSet::empty();
        let mut cs = vec![Rational::zero(); 2 * coeffs.len()];
        for (j, &c) in coeffs.iter().enumerate() {
            cs[2 * j + 1] = Rational::from_integer(c.into());
        }
        UPoly::from_rationals("t", &e, &cs)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn random_odd_tuples_certify(
            polys in prop::collection::vec(prop::collection::vec(-4i64..5, 1..4), 1..3),
        ) {
            let qs: Vec<UPoly> = polys.iter().map(|c| odd_poly(c)).collect();
            let mut t = BracketTable::new(QTuple::new(qs).unwrap());
            let cert = certify_table(&mut t, 4).unwrap();
            prop_assert!(cert.all_two_adic);
        }
    }
}
