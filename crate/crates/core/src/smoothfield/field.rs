//! Smooth scalar fields with exact jet evaluation.

use std::fmt;
use std::sync::Arc;

use super::expr::Expr;
use super::jet::{Jet, MAX_ORDER};
use super::parser::parse_expr_named;
use crate::error::{Error, Result};

/// A scalar function with an exact jet rule.
pub trait JetKernel: Send + Sync + fmt::Debug {
    fn num_vars(&self) -> usize;

    /// Jet at `point`; `order` never exceeds [`MAX_ORDER`].
    fn jet(&self, point: &[f64], order: usize) -> Result<Jet>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Constant,
    Expr,
    Builtin,
    Ode,
    Composite,
}

#[derive(Debug)]
enum Node {
    Const(f64),
    Expr(Expr),
    Builtin(Arc<dyn JetKernel>),
    Ode(Arc<dyn JetKernel>),
    Sum(Vec<SmoothField>),
    Product(Vec<SmoothField>),
    Scaled(f64, SmoothField),
    Exp(SmoothField),
    Compose(SmoothField, Vec<SmoothField>),
    Derivative(SmoothField, usize),
}

/// Cheaply clonable handle to a smooth scalar field on `num_vars` variables.
#[derive(Clone)]
pub struct SmoothField {
    node: Arc<Node>,
    num_vars: usize,
}

impl fmt::Debug for SmoothField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.node {
            Node::Const(c) => write!(f, "Const({c})"),
            Node::Expr(e) => write!(f, "Expr({e})"),
            other => write!(f, "{other:?}"),
        }
    }
}

impl SmoothField {
    fn wrap(node: Node, num_vars: usize) -> SmoothField {
        SmoothField {
            node: Arc::new(node),
            num_vars,
        }
    }

    pub fn constant(value: f64, num_vars: usize) -> SmoothField {
        SmoothField::wrap(Node::Const(value), num_vars)
    }

    pub fn zero(num_vars: usize) -> SmoothField {
        SmoothField::constant(0.0, num_vars)
    }

    pub fn coordinate(var: usize, num_vars: usize) -> SmoothField {
        assert!(var < num_vars, "coordinate index out of range");
        SmoothField::wrap(Node::Expr(Expr::Var(var)), num_vars)
    }

    pub fn from_expr(expr: Expr, num_vars: usize) -> Result<SmoothField> {
        expr.check_dim(num_vars)?;
        if let Expr::Const(c) = expr {
            return Ok(SmoothField::constant(c, num_vars));
        }
        Ok(SmoothField::wrap(Node::Expr(expr), num_vars))
    }

    pub fn parse(source: &str, num_vars: usize) -> Result<SmoothField> {
        SmoothField::parse_named(source, num_vars, &[])
    }

    pub fn parse_named(source: &str, num_vars: usize, names: &[&str]) -> Result<SmoothField> {
        SmoothField::from_expr(parse_expr_named(source, num_vars, names)?, num_vars)
    }

    pub fn builtin(kernel: Arc<dyn JetKernel>) -> SmoothField {
        let nv = kernel.num_vars();
        SmoothField::wrap(Node::Builtin(kernel), nv)
    }

    pub fn ode(kernel: Arc<dyn JetKernel>) -> SmoothField {
        let nv = kernel.num_vars();
        SmoothField::wrap(Node::Ode(kernel), nv)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn kind(&self) -> FieldKind {
        match &*self.node {
            Node::Const(_) => FieldKind::Constant,
            Node::Expr(_) => FieldKind::Expr,
            Node::Builtin(_) => FieldKind::Builtin,
            Node::Ode(_) => FieldKind::Ode,
            _ => FieldKind::Composite,
        }
    }

    /// `Some(c)` when the field is the literal constant `c`.
    pub fn as_constant(&self) -> Option<f64> {
        match &*self.node {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_constant() == Some(0.0)
    }

    pub fn sum(terms: Vec<SmoothField>, num_vars: usize) -> SmoothField {
        let mut konst = 0.0;
        let mut rest = Vec::new();
        for t in terms {
            assert_eq!(t.num_vars, num_vars, "sum across different charts");
            match t.as_constant() {
                Some(c) => konst += c,
                None => rest.push(t),
            }
        }
        if konst != 0.0 || rest.is_empty() {
            if rest.is_empty() {
                return SmoothField::constant(konst, num_vars);
            }
            rest.push(SmoothField::constant(konst, num_vars));
        }
        if rest.len() == 1 {
            return rest.pop().unwrap();
        }
        SmoothField::wrap(Node::Sum(rest), num_vars)
    }

    pub fn product(factors: Vec<SmoothField>, num_vars: usize) -> SmoothField {
        let mut konst = 1.0;
        let mut rest = Vec::new();
        for f in factors {
            assert_eq!(f.num_vars, num_vars, "product across different charts");
            match f.as_constant() {
                Some(c) => konst *= c,
                None => rest.push(f),
            }
        }
        if konst == 0.0 || rest.is_empty() {
            return SmoothField::constant(konst, num_vars);
        }
        let core = if rest.len() == 1 {
            rest.pop().unwrap()
        } else {
            SmoothField::wrap(Node::Product(rest), num_vars)
        };
        core.scale(konst)
    }

    pub fn add(&self, other: &SmoothField) -> SmoothField {
        SmoothField::sum(vec![self.clone(), other.clone()], self.num_vars)
    }

    pub fn sub(&self, other: &SmoothField) -> SmoothField {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &SmoothField) -> SmoothField {
        SmoothField::product(vec![self.clone(), other.clone()], self.num_vars)
    }

    pub fn scale(&self, s: f64) -> SmoothField {
        if s == 1.0 {
            return self.clone();
        }
        if s == 0.0 {
            return SmoothField::zero(self.num_vars);
        }
        if let Some(c) = self.as_constant() {
            return SmoothField::constant(c * s, self.num_vars);
        }
        SmoothField::wrap(Node::Scaled(s, self.clone()), self.num_vars)
    }

    pub fn exp(&self) -> SmoothField {
        if let Some(c) = self.as_constant() {
            return SmoothField::constant(c.exp(), self.num_vars);
        }
        SmoothField::wrap(Node::Exp(self.clone()), self.num_vars)
    }

    /// `self ∘ (inner_0, …)`; the result lives on the inner fields' chart.
    pub fn compose(&self, inner: Vec<SmoothField>) -> SmoothField {
        assert_eq!(inner.len(), self.num_vars, "composition arity mismatch");
        assert!(!inner.is_empty(), "composition with empty argument list");
        let nv = inner[0].num_vars;
        assert!(inner.iter().all(|f| f.num_vars == nv));
        if let Some(c) = self.as_constant() {
            return SmoothField::constant(c, nv);
        }
        SmoothField::wrap(Node::Compose(self.clone(), inner), nv)
    }

    /// Embeds a field of one variable as a function of coordinate `var`.
    pub fn lift(&self, var: usize, num_vars: usize) -> SmoothField {
        assert_eq!(self.num_vars, 1, "lift expects a univariate field");
        self.compose(vec![SmoothField::coordinate(var, num_vars)])
    }

    /// `∂ self / ∂ x_var`.
    ///
    /// Expression, sum, product, scaling, exponential and composition nodes
    /// are differentiated symbolically and keep the full jet order; any
    /// other node yields a derivative whose jets stop one order earlier.
    pub fn derivative(&self, var: usize) -> SmoothField {
        assert!(var < self.num_vars);
        let nv = self.num_vars;
        match &*self.node {
            Node::Const(_) => SmoothField::zero(nv),
            Node::Expr(e) => SmoothField::from_expr(e.derivative(var), nv)
                .expect("derivative keeps variable range"),
            Node::Sum(terms) => {
                SmoothField::sum(terms.iter().map(|t| t.derivative(var)).collect(), nv)
            }
            Node::Product(factors) => {
                let mut terms = Vec::with_capacity(factors.len());
                for k in 0..factors.len() {
                    let dk = factors[k].derivative(var);
                    if dk.is_zero() {
                        continue;
                    }
                    let mut fs: Vec<SmoothField> = factors.clone();
                    fs[k] = dk;
                    terms.push(SmoothField::product(fs, nv));
                }
                SmoothField::sum(terms, nv)
            }
            Node::Scaled(s, f) => f.derivative(var).scale(*s),
            Node::Exp(f) => self.mul(&f.derivative(var)),
            Node::Compose(outer, inner) => {
                let terms = inner
                    .iter()
                    .enumerate()
                    .filter_map(|(k, g)| {
                        let dg = g.derivative(var);
                        if dg.is_zero() {
                            return None;
                        }
                        Some(outer.derivative(k).compose(inner.clone()).mul(&dg))
                    })
                    .collect();
                SmoothField::sum(terms, nv)
            }
            _ => SmoothField::wrap(Node::Derivative(self.clone(), var), nv),
        }
    }

    /// Jet at `point` of the given `order` (at most [`MAX_ORDER`]).
    pub fn eval_jet(&self, point: &[f64], order: usize) -> Result<Jet> {
        if order > MAX_ORDER {
            return Err(Error::OrderUnsupported {
                requested: order,
                max: MAX_ORDER,
            });
        }
        if point.len() != self.num_vars {
            return Err(Error::DimensionMismatch(format!(
                "field on {} variables evaluated at a point of length {}",
                self.num_vars,
                point.len()
            )));
        }
        self.jet_inner(point, order)
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        Ok(self.eval_jet(point, 0)?.value())
    }

    fn jet_inner(&self, point: &[f64], order: usize) -> Result<Jet> {
        let nv = self.num_vars;
        match &*self.node {
            Node::Const(c) => Ok(Jet::constant(*c, nv, order)),
            Node::Expr(e) => e.eval_jet(point, order),
            Node::Builtin(k) | Node::Ode(k) => k.jet(point, order),
            Node::Sum(terms) => {
                let mut acc = terms[0].jet_inner(point, order)?;
                for t in &terms[1..] {
                    acc = &acc + &t.jet_inner(point, order)?;
                }
                Ok(acc)
            }
            Node::Product(factors) => {
                let mut acc = factors[0].jet_inner(point, order)?;
                for f in &factors[1..] {
                    acc = &acc * &f.jet_inner(point, order)?;
                }
                Ok(acc)
            }
            Node::Scaled(s, f) => Ok(f.jet_inner(point, order)?.scale(*s)),
            Node::Exp(f) => Ok(f.jet_inner(point, order)?.exp()),
            Node::Compose(outer, inner) => {
                let inner_jets = inner
                    .iter()
                    .map(|f| f.jet_inner(point, order))
                    .collect::<Result<Vec<_>>>()?;
                let at: Vec<f64> = inner_jets.iter().map(Jet::value).collect();
                let outer_jet = outer.jet_inner(&at, order)?;
                Ok(Jet::compose(&outer_jet, &inner_jets))
            }
            Node::Derivative(f, var) => {
                if order + 1 > MAX_ORDER {
                    return Err(Error::OrderUnsupported {
                        requested: order + 1,
                        max: MAX_ORDER,
                    });
                }
                Ok(f.jet_inner(point, order + 1)?.partial(*var))
            }
        }
    }
}
