//! Tokenizer and expression parser shared by the polynomial text format and
//! the recurrence language.
//!
//! Grammar (whitespace-insensitive, `#` starts a comment):
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/") unary)*
//! unary  := "-" unary | power
//! power  := atom ("^" INT)?
//! atom   := INT | IDENT | IDENT "[" index "]" | "(" expr ")"
//! index  := IDENT (("-" | "+") INT)?
//! ```

use num_bigint::BigInt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Colon,
    Equals,
    Comma,
    Eof,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Int(n) => format!("integer `{n}`"),
            TokenKind::Eof => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            TokenKind::Plus => "+",
            TokenKind::Minus => "-",
            TokenKind::Star => "*",
            TokenKind::Slash => "/",
            TokenKind::Caret => "^",
            TokenKind::LParen => "(",
            TokenKind::RParen => ")",
            TokenKind::LBracket => "[",
            TokenKind::RBracket => "]",
            TokenKind::Semi => ";",
            TokenKind::Colon => ":",
            TokenKind::Equals => "=",
            TokenKind::Comma => ",",
            _ => "?",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub column: usize,
}

pub fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);

    while let Some(&ch) = chars.peek() {
        let (tl, tc) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        if ch.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if ch == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                bump(&mut chars);
            }
            continue;
        }
        let kind = if ch.is_ascii_digit() {
            let mut digits = String::new();
            while let Some(&c) = chars.peek() {
                if !c.is_ascii_digit() {
                    break;
                }
                digits.push(c);
                bump(&mut chars);
            }
            TokenKind::Int(digits.parse().expect("ascii digits"))
        } else if ch.is_alphabetic() || ch == '_' {
            let mut ident = String::new();
            while let Some(&c) = chars.peek() {
                if !(c.is_alphanumeric() || c == '_') {
                    break;
                }
                ident.push(c);
                bump(&mut chars);
            }
            TokenKind::Ident(ident)
        } else {
            bump(&mut chars);
            match ch {
                '+' => TokenKind::Plus,
                '-' => TokenKind::Minus,
                '*' => TokenKind::Star,
                '/' => TokenKind::Slash,
                '^' => TokenKind::Caret,
                '(' => TokenKind::LParen,
                ')' => TokenKind::RParen,
                '[' => TokenKind::LBracket,
                ']' => TokenKind::RBracket,
                ';' => TokenKind::Semi,
                ':' => TokenKind::Colon,
                '=' => TokenKind::Equals,
                ',' => TokenKind::Comma,
                other => {
                    return Err(Error::Syntax {
                        line: tl,
                        column: tc,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            }
        };
        tokens.push(Token {
            kind,
            line: tl,
            column: tc,
        });
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        line,
        column,
    });
    Ok(tokens)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Var {
        name: String,
        line: usize,
        column: usize,
    },
    /// `seq[var - offset]`; `offset` is negative for `seq[var + k]`.
    Index {
        seq: String,
        var: String,
        offset: i64,
        line: usize,
        column: usize,
    },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

/// Cursor over a token stream.
pub struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub fn new(text: &str) -> Result<Self> {
        Ok(Parser {
            tokens: tokenize(text)?,
            pos: 0,
        })
    }

    pub fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    pub fn advance(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if tok.kind != TokenKind::Eof {
            self.pos += 1;
        }
        tok
    }

    pub fn at(&self, kind: &TokenKind) -> bool {
        &self.peek().kind == kind
    }

    pub fn error_here(&self, message: impl Into<String>) -> Error {
        let tok = self.peek();
        Error::Syntax {
            line: tok.line,
            column: tok.column,
            message: message.into(),
        }
    }

    pub fn expect(&mut self, kind: TokenKind) -> Result<Token> {
        if self.peek().kind == kind {
            Ok(self.advance())
        } else {
            Err(self.error_here(format!(
                "expected {}, found {}",
                kind.describe(),
                self.peek().kind.describe()
            )))
        }
    }

    pub fn expect_ident(&mut self) -> Result<(String, Token)> {
        match &self.peek().kind {
            TokenKind::Ident(name) => {
                let name = name.clone();
                Ok((name, self.advance()))
            }
            other => Err(self.error_here(format!("expected identifier, found {}", other.describe()))),
        }
    }

    pub fn expect_end(&mut self) -> Result<()> {
        self.expect(TokenKind::Eof).map(|_| ())
    }

    pub fn parse_expr(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_term()?;
        loop {
            match self.peek().kind {
                TokenKind::Plus => {
                    self.advance();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.parse_term()?));
                }
                TokenKind::Minus => {
                    self.advance();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.parse_term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_unary()?;
        loop {
            match self.peek().kind {
                TokenKind::Star => {
                    self.advance();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.parse_unary()?));
                }
                TokenKind::Slash => {
                    self.advance();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.parse_unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_unary(&mut self) -> Result<Expr> {
        if self.at(&TokenKind::Minus) {
            self.advance();
            return Ok(Expr::Neg(Box::new(self.parse_unary()?)));
        }
        self.parse_power()
    }

    fn parse_power(&mut self) -> Result<Expr> {
        let base = self.parse_atom()?;
        if !self.at(&TokenKind::Caret) {
            return Ok(base);
        }
        self.advance();
        match self.peek().kind.clone() {
            TokenKind::Int(n) => {
                let exp = u32::try_from(&n).map_err(|_| self.error_here("exponent too large"))?;
                self.advance();
                Ok(Expr::Pow(Box::new(base), exp))
            }
            other => Err(self.error_here(format!(
                "exponent must be a nonnegative integer literal, found {}",
                other.describe()
            ))),
        }
    }

    fn parse_atom(&mut self) -> Result<Expr> {
        let tok = self.peek().clone();
        match tok.kind {
            TokenKind::Int(n) => {
                self.advance();
                Ok(Expr::Int(n))
            }
            TokenKind::Ident(name) => {
                self.advance();
                if self.at(&TokenKind::LBracket) {
                    self.advance();
                    let (var, _) = self.expect_ident()?;
                    let offset = match self.peek().kind {
                        TokenKind::Minus | TokenKind::Plus => {
                            let sign = if self.advance().kind == TokenKind::Minus { 1 } else { -1 };
                            match self.peek().kind.clone() {
                                TokenKind::Int(k) => {
                                    self.advance();
                                    let k = i64::try_from(&k)
                                        .map_err(|_| self.error_here("index offset too large"))?;
                                    sign * k
                                }
                                other => {
                                    return Err(self.error_here(format!(
                                        "expected integer index offset, found {}",
                                        other.describe()
                                    )))
                                }
                            }
                        }
                        _ => 0,
                    };
                    self.expect(TokenKind::RBracket)?;
                    Ok(Expr::Index {
                        seq: name,
                        var,
                        offset,
                        line: tok.line,
                        column: tok.column,
                    })
                } else {
                    Ok(Expr::Var {
                        name,
                        line: tok.line,
                        column: tok.column,
                    })
                }
            }
            TokenKind::LParen => {
                self.advance();
                let inner = self.parse_expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(inner)
            }
            other => Err(self.error_here(format!("expected expression, found {}", other.describe()))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizes_with_positions_and_comments() {
        let toks = tokenize("a # note\n  b^2").unwrap();
        assert_eq!(toks[0].kind, TokenKind::Ident("a".into()));
        assert_eq!((toks[1].line, toks[1].column), (2, 3));
        assert_eq!(toks[2].kind, TokenKind::Caret);
        assert_eq!(toks.last().unwrap().kind, TokenKind::Eof);
    }

    #[test]
    fn rejects_stray_character() {
        let err = tokenize("a $ b").unwrap_err();
        assert_eq!(
            err,
            Error::Syntax {
                line: 1,
                column: 3,
                message: "unexpected character `$`".into()
            }
        );
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let e = Parser::new("-x^2").unwrap().parse_expr().unwrap();
        assert!(matches!(e, Expr::Neg(inner) if matches!(*inner, Expr::Pow(_, 2))));
    }

    #[test]
    fn parses_index_atoms() {
        let mut p = Parser::new("3*u[n-2]").unwrap();
        let e = p.parse_expr().unwrap();
        p.expect_end().unwrap();
        match e {
            Expr::Mul(_, rhs) => assert!(matches!(*rhs, Expr::Index { offset: 2, .. })),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_paren_reports_location() {
        let err = Parser::new("(a + b").unwrap().parse_expr().unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 1, column: 7, .. }), "{err:?}");
    }
}
