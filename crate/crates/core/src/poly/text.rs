//! Canonical text form: monomials in descending graded-lex order, explicit
//! `*` and `^`, rational coefficients written `p/q`.

use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{MultiPoly, VarSet};
use crate::error::{Error, Result};
use crate::expr::{Expr, Parser};
use crate::numeric::Rational;

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (mono, c)) in self.terms().rev().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = c.abs();
            let factors: Vec<String> = self
                .vars()
                .names()
                .iter()
                .zip(mono.exponents())
                .filter(|(_, &e)| e > 0)
                .map(|(n, &e)| if e == 1 { n.clone() } else { format!("{n}^{e}") })
                .collect();
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                f.write_str(&factors.join("*"))?;
            } else {
                write!(f, "{mag}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({self} over {:?})", self.vars())
    }
}

impl MultiPoly {
    /// Parses a polynomial expression over `vars`. Division is allowed only by
    /// nonzero constants.
    pub fn parse(text: &str, vars: &VarSet) -> Result<MultiPoly> {
        let mut parser = Parser::new(text)?;
        let expr = parser.parse_expr()?;
        parser.expect_end()?;
        eval_expr(&expr, vars)
    }
}

pub(crate) fn eval_expr(expr: &Expr, vars: &VarSet) -> Result<MultiPoly> {
    Ok(match expr {
        Expr::Int(n) => MultiPoly::constant(vars, Rational::from_integer(n.clone())),
        Expr::Var { name, line, column } => {
            MultiPoly::var(vars, name).map_err(|_| Error::Syntax {
                line: *line,
                column: *column,
                message: format!("unknown variable `{name}`"),
            })?
        }
        Expr::Index { line, column, .. } => {
            return Err(Error::Syntax {
                line: *line,
                column: *column,
                message: "sequence reference not allowed in a polynomial".into(),
            })
        }
        Expr::Neg(e) => -eval_expr(e, vars)?,
        Expr::Add(a, b) => eval_expr(a, vars)? + eval_expr(b, vars)?,
        Expr::Sub(a, b) => eval_expr(a, vars)? - eval_expr(b, vars)?,
        Expr::Mul(a, b) => eval_expr(a, vars)? * eval_expr(b, vars)?,
        Expr::Div(a, b) => {
            let num = eval_expr(a, vars)?;
            let den = eval_expr(b, vars)?;
            match den.as_constant() {
                Some(d) if !d.is_zero() => num.scale(&d.recip()),
                Some(_) => return Err(Error::Spec("division by zero".into())),
                None => {
                    return Err(Error::Spec(format!(
                        "division by non-constant `{den}`; only polynomial expressions are allowed"
                    )))
                }
            }
        }
        Expr::Pow(base, e) => eval_expr(base, vars)?.pow(*e),
    })
}
