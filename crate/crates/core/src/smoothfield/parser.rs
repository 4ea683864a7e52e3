//! Infix expression parser.
//!
//! Grammar (standard precedence, `^` binds tightest and is right associative):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' unary)?
//! primary := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! Identifiers are `x0`..`x9`, the constants `pi` and `e`, the functions
//! `exp log ln sin cos sqrt`, and optionally caller-supplied coordinate names.
//! Exponents must fold to an integer constant.

use super::expr::Expr;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| Error::Syntax {
                pos: start,
                msg: format!("malformed number `{text}`"),
            })?;
            out.push((Tok::Num(v), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
            continue;
        }
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => {
                return Err(Error::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        };
        out.push((tok, start));
        i += c.len_utf8();
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    dim: usize,
    names: &'a [&'a str],
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(Error::Syntax {
                pos: self.offset(),
                msg: format!("expected {what}"),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr::Sum(Box::new(lhs), Box::new(rhs));
                }
                Tok::Op('-') => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr::Sum(Box::new(lhs), Box::new(Expr::Neg(Box::new(rhs))));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Expr::Product(Box::new(lhs), Box::new(rhs));
                }
                Tok::Op('/') => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Expr::Quotient(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        let exponent = self.unary()?.fold();
        match exponent {
            Expr::Const(c) if c.fract() == 0.0 && c.abs() <= i32::MAX as f64 => {
                Ok(Expr::Pow(Box::new(base), c as i32))
            }
            _ => Err(Error::Syntax {
                pos: at,
                msg: "exponent must be an integer constant (use sqrt/exp/log otherwise)".into(),
            }),
        }
    }

    fn primary(&mut self) -> Result<Expr> {
        let (tok, at) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => self.identifier(name, at),
            Tok::End => Err(Error::Syntax {
                pos: at,
                msg: "unexpected end of input".into(),
            }),
            other => Err(Error::Syntax {
                pos: at,
                msg: format!("unexpected token {other:?}"),
            }),
        }
    }

    fn identifier(&mut self, name: String, at: usize) -> Result<Expr> {
        if *self.peek() == Tok::LParen {
            let wrap: fn(Box<Expr>) -> Expr = match name.as_str() {
                "exp" => Expr::Exp,
                "log" | "ln" => Expr::Log,
                "sin" => Expr::Sin,
                "cos" => Expr::Cos,
                "sqrt" => Expr::Sqrt,
                _ => return Err(Error::UnknownIdentifier { name, pos: at }),
            };
            self.bump();
            let arg = self.expr()?;
            self.expect(Tok::RParen, "`)` after function argument")?;
            return Ok(wrap(Box::new(arg)));
        }
        if let Some(k) = self.names.iter().position(|n| *n == name) {
            return Ok(Expr::Var(k));
        }
        if let Some(digits) = name.strip_prefix('x') {
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                let index: usize = digits.parse().map_err(|_| Error::UnknownIdentifier {
                    name: name.clone(),
                    pos: at,
                })?;
                if index >= self.dim {
                    return Err(Error::VariableOutOfRange {
                        index,
                        dim: self.dim,
                    });
                }
                return Ok(Expr::Var(index));
            }
        }
        match name.as_str() {
            "pi" => Ok(Expr::Const(std::f64::consts::PI)),
            "e" => Ok(Expr::Const(std::f64::consts::E)),
            _ => Err(Error::UnknownIdentifier { name, pos: at }),
        }
    }
}

/// Parses an expression over `x0..x{chart_dim-1}`.
pub fn parse_expr(source: &str, chart_dim: usize) -> Result<Expr> {
    parse_expr_named(source, chart_dim, &[])
}

/// Like [`parse_expr`], additionally accepting `names[k]` as an alias of `xk`.
pub fn parse_expr_named(source: &str, chart_dim: usize, names: &[&str]) -> Result<Expr> {
    let toks = lex(source)?;
    let mut p = Parser {
        toks,
        pos: 0,
        dim: chart_dim,
        names,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(Error::Syntax {
            pos: p.offset(),
            msg: "trailing input".into(),
        });
    }
    let e = e.fold();
    e.check_dim(chart_dim)?;
    Ok(e)
}
