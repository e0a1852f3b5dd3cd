//! Recurrence description language.
//!
//! ```text
//! # comment
//! ring b, c;
//! seq u;
//! rec: n*u[n] = 2*(2*n-1)*(n*(n-1)-b)*u[n-1] - 4*c*(n-1)*u[n-2];
//! ```
//!
//! `ring` may be omitted for recurrences with constant coefficients. The
//! left-hand side is `n^k*<seq>[n]`; the right-hand side must be linear in
//! `<seq>[n-1], <seq>[n-2], ...` with coefficients polynomial in `n` and the
//! ring variables. `<seq>[0] = 1` is implied.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Expr, Parser, TokenKind};
use crate::numeric::Rational;
use crate::poly::{MultiPoly, UPoly, VarSet};
use crate::sequences::{ParamSeq, Provenance};

/// Name of the index variable.
pub const INDEX: &str = "n";

/// A parsed recurrence `n^k u[n] = sum_{i=1}^r q_i(n) u[n-i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecurrenceSpec {
    ring: VarSet,
    seq: String,
    lead_power: u32,
    /// `q_1 ..= q_r` as polynomials in `n` over the ring.
    coeffs: Vec<UPoly>,
}

impl RecurrenceSpec {
    pub fn ring(&self) -> &VarSet {
        &self.ring
    }

    pub fn seq(&self) -> &str {
        &self.seq
    }

    /// `k` in the left-hand side `n^k u[n]`.
    pub fn lead_power(&self) -> u32 {
        self.lead_power
    }

    /// `q_1 ..= q_r`.
    pub fn coeffs(&self) -> &[UPoly] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Canonical text; parsing it gives back `self`.
    pub fn canonical(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for RecurrenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.ring.is_empty() {
            writeln!(f, "ring {};", self.ring.names().join(", "))?;
        }
        writeln!(f, "seq {};", self.seq)?;
        let lead = match self.lead_power {
            1 => INDEX.to_string(),
            k => format!("{INDEX}^{k}"),
        };
        write!(f, "rec: {lead}*{}[{INDEX}] =", self.seq)?;
        let r = self.coeffs.len();
        let mut first = true;
        for (i, q) in self.coeffs.iter().enumerate() {
            if q.is_zero() && i + 1 < r {
                continue;
            }
            let sep = if first { " " } else { "\n    + " };
            write!(f, "{sep}({q})*{}[{INDEX}-{}]", self.seq, i + 1)?;
            first = false;
        }
        writeln!(f, ";")
    }
}

/// Linear combination `sum_k coeff_k * seq[n-k]`; key 0 holds the part not
/// attached to any sequence reference.
#[derive(Clone, Debug)]
struct Lin {
    vars: VarSet,
    parts: BTreeMap<i64, MultiPoly>,
}

impl Lin {
    fn poly(p: MultiPoly) -> Self {
        let vars = p.vars().clone();
        let mut parts = BTreeMap::new();
        if !p.is_zero() {
            parts.insert(0, p);
        }
        Lin { vars, parts }
    }

    fn reference(vars: &VarSet, offset: i64) -> Self {
        Lin {
            vars: vars.clone(),
            parts: BTreeMap::from([(offset, MultiPoly::one(vars))]),
        }
    }

    /// The plain polynomial, when there are no sequence references.
    fn as_poly(&self) -> Option<MultiPoly> {
        match self.parts.len() {
            0 => Some(MultiPoly::zero(&self.vars)),
            1 => self.parts.get(&0).cloned(),
            _ => None,
        }
    }

    fn add(mut self, other: Lin, sign: i64) -> Lin {
        let s = Rational::from_integer(sign.into());
        for (k, p) in other.parts {
            let entry = self
                .parts
                .entry(k)
                .or_insert_with(|| MultiPoly::zero(&self.vars));
            entry.add_scaled(&p, &s);
            if entry.is_zero() {
                self.parts.remove(&k);
            }
        }
        self
    }

    fn scale(self, p: &MultiPoly) -> Lin {
        let parts = self
            .parts
            .into_iter()
            .map(|(k, q)| (k, &q * p))
            .filter(|(_, q)| !q.is_zero())
            .collect();
        Lin {
            vars: self.vars,
            parts,
        }
    }
}

struct Ctx<'a> {
    /// Ring variables plus the index.
    vars: &'a VarSet,
    seq: &'a str,
    /// Whether `seq[n]` itself may appear.
    allow_current: bool,
}

fn position(expr: &Expr) -> (usize, usize) {
    match expr {
        Expr::Var { line, column, .. } | Expr::Index { line, column, .. } => (*line, *column),
        Expr::Neg(e) | Expr::Pow(e, _) => position(e),
        Expr::Add(a, _) | Expr::Sub(a, _) | Expr::Mul(a, _) | Expr::Div(a, _) => position(a),
        Expr::Int(_) => (0, 0),
    }
}

fn nonlinear(expr: &Expr, what: &str) -> Error {
    let (line, column) = position(expr);
    Error::Syntax {
        line,
        column,
        message: format!("{what}; the recurrence must be linear in the sequence"),
    }
}

fn linearize(expr: &Expr, ctx: &Ctx) -> Result<Lin> {
    Ok(match expr {
        Expr::Int(k) => Lin::poly(MultiPoly::constant(ctx.vars, Rational::from_integer(k.clone()))),
        Expr::Var { name, .. } => Lin::poly(
            MultiPoly::var(ctx.vars, name).map_err(|_| Error::UnknownVariable(name.clone()))?,
        ),
        Expr::Index {
            seq,
            var,
            offset,
            line,
            column,
        } => {
            if seq != ctx.seq {
                return Err(Error::UnknownVariable(seq.clone()));
            }
            if var != INDEX {
                return Err(Error::UnknownVariable(var.clone()));
            }
            let ok = *offset >= 1 || (ctx.allow_current && *offset == 0);
            if !ok {
                let index = match offset {
                    0 => format!("{seq}[{INDEX}]"),
                    k if *k < 0 => format!("{seq}[{INDEX}+{}]", -k),
                    k => format!("{seq}[{INDEX}-{k}]"),
                };
                return Err(Error::IndexOutOfRange {
                    line: *line,
                    column: *column,
                    index,
                });
            }
            // Key 0 is the plain part, so `seq[n]` uses a sentinel.
            Lin::reference(ctx.vars, if *offset == 0 { CURRENT } else { *offset })
        }
        Expr::Neg(e) => Lin::poly(MultiPoly::zero(ctx.vars)).add(linearize(e, ctx)?, -1),
        Expr::Add(a, b) => linearize(a, ctx)?.add(linearize(b, ctx)?, 1),
        Expr::Sub(a, b) => linearize(a, ctx)?.add(linearize(b, ctx)?, -1),
        Expr::Mul(a, b) => {
            let la = linearize(a, ctx)?;
            let lb = linearize(b, ctx)?;
            match (la.as_poly(), lb.as_poly()) {
                (Some(p), _) => lb.scale(&p),
                (_, Some(q)) => la.scale(&q),
                _ => return Err(nonlinear(expr, "product of two sequence terms")),
            }
        }
        Expr::Div(a, b) => {
            let la = linearize(a, ctx)?;
            let den = linearize(b, ctx)?
                .as_poly()
                .ok_or_else(|| nonlinear(b, "division by a sequence term"))?;
            match den.as_constant() {
                Some(d) if !d.is_zero() => la.scale(&MultiPoly::constant(ctx.vars, d.recip())),
                Some(_) => return Err(Error::Spec("division by zero".into())),
                None => {
                    let (line, column) = position(b);
                    return Err(Error::Syntax {
                        line,
                        column,
                        message: format!("division by non-constant `{den}`; coefficients must be polynomial"),
                    });
                }
            }
        }
        Expr::Pow(base, e) => {
            let p = linearize(base, ctx)?
                .as_poly()
                .ok_or_else(|| nonlinear(base, "power of a sequence term"))?;
            Lin::poly(p.pow(*e))
        }
    })
}

const CURRENT: i64 = -1;

/// Parses a recurrence description.
pub fn parse(text: &str) -> Result<RecurrenceSpec> {
    let mut p = Parser::new(text)?;
    let mut ring_names: Option<Vec<String>> = None;
    let mut seq: Option<String> = None;
    let mut rec: Option<(Expr, Expr)> = None;

    while !p.at(&TokenKind::Eof) {
        let (word, tok) = p.expect_ident()?;
        match word.as_str() {
            "ring" => {
                if ring_names.is_some() {
                    return Err(syntax(tok.line, tok.column, "duplicate `ring` statement"));
                }
                let mut names = vec![p.expect_ident()?.0];
                while !p.at(&TokenKind::Semi) {
                    if p.at(&TokenKind::Comma) {
                        p.advance();
                    }
                    names.push(p.expect_ident()?.0);
                }
                p.expect(TokenKind::Semi)?;
                ring_names = Some(names);
            }
            "seq" => {
                if seq.is_some() {
                    return Err(syntax(tok.line, tok.column, "duplicate `seq` statement"));
                }
                seq = Some(p.expect_ident()?.0);
                p.expect(TokenKind::Semi)?;
            }
            "rec" => {
                if rec.is_some() {
                    return Err(syntax(tok.line, tok.column, "duplicate `rec` statement"));
                }
                p.expect(TokenKind::Colon)?;
                let lhs = p.parse_expr()?;
                p.expect(TokenKind::Equals)?;
                let rhs = p.parse_expr()?;
                p.expect(TokenKind::Semi)?;
                rec = Some((lhs, rhs));
            }
            other => {
                return Err(syntax(
                    tok.line,
                    tok.column,
                    &format!("expected `ring`, `seq` or `rec`, found `{other}`"),
                ))
            }
        }
    }
    p.expect_end()?;

    let eof = p.peek().clone();
    let seq = seq.ok_or_else(|| syntax(eof.line, eof.column, "missing `seq` statement"))?;
    let (lhs, rhs) = rec.ok_or_else(|| syntax(eof.line, eof.column, "missing `rec` statement"))?;

    let mut names = ring_names.unwrap_or_default();
    names.sort();
    for reserved in [INDEX, seq.as_str()] {
        if names.iter().any(|v| v == reserved) {
            return Err(Error::Spec(format!("`{reserved}` cannot be a ring variable")));
        }
    }
    let ring = VarSet::new(names)?;
    let vars = ring.with(INDEX)?;

    let lead_power = lead_power(&lhs, &vars, &seq)?;
    let body = linearize(
        &rhs,
        &Ctx {
            vars: &vars,
            seq: &seq,
            allow_current: false,
        },
    )?;
    if body.parts.contains_key(&0) {
        let (line, column) = position(&rhs);
        return Err(syntax(line, column, "term without a sequence reference"));
    }
    let r = references(&rhs).into_iter().max().unwrap_or(0);
    if r < 1 {
        let (line, column) = position(&rhs);
        return Err(syntax(line, column, "right-hand side references no earlier term"));
    }
    let coeffs = (1..=r)
        .map(|k| {
            let q = body.parts.get(&k).cloned().unwrap_or_else(|| MultiPoly::zero(&vars));
            UPoly::from_multipoly(&q, INDEX)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(RecurrenceSpec {
        ring,
        seq,
        lead_power,
        coeffs,
    })
}

fn syntax(line: usize, column: usize, message: &str) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.to_string(),
    }
}

/// Offsets of every sequence reference, including ones that cancel.
fn references(expr: &Expr) -> Vec<i64> {
    match expr {
        Expr::Index { offset, .. } => vec![*offset],
        Expr::Int(_) | Expr::Var { .. } => Vec::new(),
        Expr::Neg(e) | Expr::Pow(e, _) => references(e),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            let mut v = references(a);
            v.extend(references(b));
            v
        }
    }
}

fn lead_power(lhs: &Expr, vars: &VarSet, seq: &str) -> Result<u32> {
    let lin = linearize(
        lhs,
        &Ctx {
            vars,
            seq,
            allow_current: true,
        },
    )?;
    let (line, column) = position(lhs);
    let bad = || syntax(line, column, &format!("left-hand side must be {INDEX}^k*{seq}[{INDEX}] with k >= 1"));
    if lin.parts.len() != 1 {
        return Err(bad());
    }
    let p = lin.parts.get(&CURRENT).ok_or_else(bad)?;
    let idx = vars.index_of(INDEX).expect("index variable");
    let mut terms = p.terms();
    match (terms.next(), terms.next()) {
        (Some((mono, c)), None) if c.is_one() => {
            let k = mono.exponents()[idx];
            let only_n = mono.degree() == k;
            if only_n && k >= 1 {
                Ok(k)
            } else {
                Err(bad())
            }
        }
        _ => Err(bad()),
    }
}

/// `p_i(t) = q_i(t + i/2)`, one per `q_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OddForm {
    pub polys: Vec<UPoly>,
}

/// A shifted coefficient that is not odd.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EvenPart {
    pub index: usize,
    pub even_part: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OddFormAnalysis {
    Odd(OddForm),
    NotOdd {
        shifted: Vec<UPoly>,
        offenders: Vec<EvenPart>,
    },
    /// Leading power other than 1.
    NotApplicable { lead_power: u32 },
}

/// Shifts each `q_i` by `i/2` and checks oddness.
pub fn to_odd_form(spec: &RecurrenceSpec) -> OddFormAnalysis {
    if spec.lead_power != 1 {
        return OddFormAnalysis::NotApplicable {
            lead_power: spec.lead_power,
        };
    }
    let shifted: Vec<UPoly> = spec
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, q)| q.compose_affine(&Rational::new(BigInt::from(i + 1), 2.into()), "t"))
        .collect();
    let offenders: Vec<EvenPart> = shifted
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_odd())
        .map(|(i, p)| EvenPart {
            index: i + 1,
            even_part: p.even_part().to_string(),
        })
        .collect();
    if offenders.is_empty() {
        OddFormAnalysis::Odd(OddForm { polys: shifted })
    } else {
        OddFormAnalysis::NotOdd { shifted, offenders }
    }
}

/// `u_0 ..= u_N` by direct recursion, dividing by `n^k` at each step.
pub fn run_spec(spec: &RecurrenceSpec, n_max: usize) -> ParamSeq {
    let ring = &spec.ring;
    let mut terms = vec![MultiPoly::one(ring)];
    for n in 1..=n_max {
        let nr = Rational::from_integer(BigInt::from(n));
        let mut acc = MultiPoly::zero(ring);
        for (i, q) in spec.coeffs.iter().enumerate() {
            let Some(prev) = n.checked_sub(i + 1).map(|k| &terms[k]) else {
                break;
            };
            if q.is_zero() || prev.is_zero() {
                continue;
            }
            let qn = q.eval_poly(&MultiPoly::constant(ring, nr.clone())).expect("same ring");
            acc = &acc + &(&qn * prev);
        }
        let lead = num_traits::pow(nr.clone(), spec.lead_power as usize);
        terms.push(acc.scale(&lead.recip()));
    }
    ParamSeq {
        ring: ring.clone(),
        terms,
        provenance: Provenance::Recursion,
    }
}

/// Integer value of `u_n` when the ring is empty and the term is integral.
pub fn integer_terms(seq: &ParamSeq) -> Option<Vec<BigInt>> {
    seq.terms
        .iter()
        .map(|t| {
            t.as_constant()
                .filter(|c| c.is_integer())
                .map(|c| c.to_integer())
        })
        .collect()
}
