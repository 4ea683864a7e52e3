//! Expression trees over chart coordinates.

use std::fmt;

use super::jet::Jet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Var(usize),
    Const(f64),
    Sum(Box<Expr>, Box<Expr>),
    Product(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Quotient(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Exp(Box<Expr>),
    Log(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Sqrt(Box<Expr>),
}

impl Expr {
    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        use Expr::*;
        match self {
            Var(i) => Some(*i),
            Const(_) => None,
            Sum(a, b) | Product(a, b) | Quotient(a, b) => match (a.max_var(), b.max_var()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
            Neg(a) | Pow(a, _) | Exp(a) | Log(a) | Sin(a) | Cos(a) | Sqrt(a) => a.max_var(),
        }
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        match self.max_var() {
            Some(i) if i >= dim => Err(Error::VariableOutOfRange { index: i, dim }),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        use Expr::*;
        let v = match self {
            Var(i) => *x
                .get(*i)
                .ok_or(Error::VariableOutOfRange { index: *i, dim: x.len() })?,
            Const(c) => *c,
            Sum(a, b) => a.eval(x)? + b.eval(x)?,
            Product(a, b) => a.eval(x)? * b.eval(x)?,
            Neg(a) => -a.eval(x)?,
            Quotient(a, b) => {
                let d = b.eval(x)?;
                if d == 0.0 {
                    return Err(Error::Domain("division by zero".into()));
                }
                a.eval(x)? / d
            }
            Pow(a, n) => {
                let base = a.eval(x)?;
                if base == 0.0 && *n < 0 {
                    return Err(Error::Domain("negative power of zero".into()));
                }
                base.powi(*n)
            }
            Exp(a) => a.eval(x)?.exp(),
            Log(a) => {
                let v = a.eval(x)?;
                if v <= 0.0 {
                    return Err(Error::Domain(format!("log of non-positive value {v}")));
                }
                v.ln()
            }
            Sin(a) => a.eval(x)?.sin(),
            Cos(a) => a.eval(x)?.cos(),
            Sqrt(a) => {
                let v = a.eval(x)?;
                if v < 0.0 {
                    return Err(Error::Domain(format!("sqrt of negative value {v}")));
                }
                v.sqrt()
            }
        };
        Ok(v)
    }

    /// Taylor jet of the expression at `point`.
    pub fn eval_jet(&self, point: &[f64], order: usize) -> Result<Jet> {
        use Expr::*;
        let nv = point.len();
        let j = match self {
            Var(i) => {
                if *i >= nv {
                    return Err(Error::VariableOutOfRange { index: *i, dim: nv });
                }
                Jet::variable(*i, point[*i], nv, order)
            }
            Const(c) => Jet::constant(*c, nv, order),
            Sum(a, b) => &a.eval_jet(point, order)? + &b.eval_jet(point, order)?,
            Product(a, b) => &a.eval_jet(point, order)? * &b.eval_jet(point, order)?,
            Neg(a) => -&a.eval_jet(point, order)?,
            Quotient(a, b) => a.eval_jet(point, order)?.div(&b.eval_jet(point, order)?)?,
            Pow(a, n) => a.eval_jet(point, order)?.powi(*n)?,
            Exp(a) => a.eval_jet(point, order)?.exp(),
            Log(a) => a.eval_jet(point, order)?.ln()?,
            Sin(a) => a.eval_jet(point, order)?.sin(),
            Cos(a) => a.eval_jet(point, order)?.cos(),
            Sqrt(a) => a.eval_jet(point, order)?.sqrt()?,
        };
        Ok(j)
    }

    /// Symbolic partial derivative with respect to `x_var`, folded.
    pub fn derivative(&self, var: usize) -> Expr {
        use Expr::*;
        let b = |e: Expr| Box::new(e);
        let d = match self {
            Var(i) => Const(if *i == var { 1.0 } else { 0.0 }),
            Const(_) => Const(0.0),
            Sum(a, c) => Sum(b(a.derivative(var)), b(c.derivative(var))),
            Product(a, c) => Sum(
                b(Product(b(a.derivative(var)), c.clone())),
                b(Product(a.clone(), b(c.derivative(var)))),
            ),
            Neg(a) => Neg(b(a.derivative(var))),
            Quotient(a, c) => Quotient(
                b(Sum(
                    b(Product(b(a.derivative(var)), c.clone())),
                    b(Neg(b(Product(a.clone(), b(c.derivative(var)))))),
                )),
                b(Pow(c.clone(), 2)),
            ),
            Pow(_, 0) => Const(0.0),
            Pow(a, n) => Product(
                b(Product(b(Const(*n as f64)), b(Pow(a.clone(), n - 1)))),
                b(a.derivative(var)),
            ),
            Exp(a) => Product(b(self.clone()), b(a.derivative(var))),
            Log(a) => Quotient(b(a.derivative(var)), a.clone()),
            Sin(a) => Product(b(Cos(a.clone())), b(a.derivative(var))),
            Cos(a) => Neg(b(Product(b(Sin(a.clone())), b(a.derivative(var))))),
            Sqrt(a) => Quotient(
                b(a.derivative(var)),
                b(Product(b(Const(2.0)), b(self.clone()))),
            ),
        };
        d.fold()
    }

    /// Folds constant subtrees; leaves anything that would not be finite.
    /// Also drops additive zeros and multiplicative ones.
    pub fn fold(self) -> Expr {
        use Expr::*;
        let folded = match self {
            Sum(a, b) => Sum(Box::new(a.fold()), Box::new(b.fold())),
            Product(a, b) => Product(Box::new(a.fold()), Box::new(b.fold())),
            Quotient(a, b) => Quotient(Box::new(a.fold()), Box::new(b.fold())),
            Neg(a) => Neg(Box::new(a.fold())),
            Pow(a, n) => Pow(Box::new(a.fold()), n),
            Exp(a) => Exp(Box::new(a.fold())),
            Log(a) => Log(Box::new(a.fold())),
            Sin(a) => Sin(Box::new(a.fold())),
            Cos(a) => Cos(Box::new(a.fold())),
            Sqrt(a) => Sqrt(Box::new(a.fold())),
            leaf => leaf,
        };
        let folded = match folded {
            Sum(a, c) if *a == Const(0.0) => *c,
            Sum(a, c) if *c == Const(0.0) => *a,
            Product(a, c) if *a == Const(0.0) || *c == Const(0.0) => Const(0.0),
            Product(a, c) if *a == Const(1.0) => *c,
            Product(a, c) if *c == Const(1.0) => *a,
            Neg(a) if *a == Const(0.0) => Const(0.0),
            Pow(a, 1) => *a,
            // no signed zeros after folding
            Const(c) => Const(c + 0.0),
            other => other,
        };
        if folded.max_var().is_none() && !matches!(folded, Const(_)) {
            if let Ok(v) = folded.eval(&[]) {
                if v.is_finite() {
                    return Const(v + 0.0);
                }
            }
        }
        folded
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Expr::*;
        match self {
            Var(i) => write!(f, "x{i}"),
            Const(c) if c.is_sign_negative() => write!(f, "(-{})", -c),
            Const(c) => write!(f, "{c}"),
            Sum(a, b) => write!(f, "({a} + {b})"),
            Product(a, b) => write!(f, "({a} * {b})"),
            Quotient(a, b) => write!(f, "({a} / {b})"),
            Neg(a) => write!(f, "(-{a})"),
            Pow(a, n) if *n < 0 => write!(f, "({a}^({n}))"),
            Pow(a, n) => write!(f, "({a}^{n})"),
            Exp(a) => write!(f, "exp({a})"),
            Log(a) => write!(f, "log({a})"),
            Sin(a) => write!(f, "sin({a})"),
            Cos(a) => write!(f, "cos({a})"),
            Sqrt(a) => write!(f, "sqrt({a})"),
        }
    }
}
