//! Truncated multivariate Taylor jets.
//!
//! Convention: the coefficient at multi-index `α` is `∂^α f(p) / α!`, so a
//! jet is the Taylor polynomial `Σ c_α δ^α` in the displacement `δ = x − p`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::multi_index::{factorial_of, MultiIndexTable};
use crate::error::{Error, Result};

/// Highest derivative order the engine hands out.
pub const MAX_ORDER: usize = 3;

#[derive(Clone)]
pub struct Jet {
    table: Arc<MultiIndexTable>,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("order", &self.order())
            .field("num_vars", &self.num_vars())
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

/// Flat serialized form: coefficients in graded-lexicographic order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JetRecord {
    pub order: usize,
    pub num_vars: usize,
    pub coeffs: Vec<f64>,
}

impl Jet {
    pub fn zeros(num_vars: usize, order: usize) -> Jet {
        let table = MultiIndexTable::get(num_vars, order);
        let coeffs = vec![0.0; table.len()];
        Jet { table, coeffs }
    }

    pub fn constant(value: f64, num_vars: usize, order: usize) -> Jet {
        let mut j = Jet::zeros(num_vars, order);
        j.coeffs[0] = value;
        j
    }

    /// The coordinate function `x_var` expanded at `value`.
    pub fn variable(var: usize, value: f64, num_vars: usize, order: usize) -> Jet {
        assert!(var < num_vars, "variable index out of range");
        let mut j = Jet::constant(value, num_vars, order);
        if order >= 1 {
            // degree-1 block is e_0, e_1, ... in that order
            j.coeffs[1 + var] = 1.0;
        }
        j
    }

    pub fn from_coeffs(num_vars: usize, order: usize, coeffs: Vec<f64>) -> Result<Jet> {
        let table = MultiIndexTable::get(num_vars, order);
        if coeffs.len() != table.len() {
            return Err(Error::DimensionMismatch(format!(
                "jet of order {order} over {num_vars} variables needs {} coefficients, got {}",
                table.len(),
                coeffs.len()
            )));
        }
        Ok(Jet { table, coeffs })
    }

    pub fn from_record(rec: &JetRecord) -> Result<Jet> {
        Jet::from_coeffs(rec.num_vars, rec.order, rec.coeffs.clone())
    }

    pub fn to_record(&self) -> JetRecord {
        JetRecord {
            order: self.order(),
            num_vars: self.num_vars(),
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn order(&self) -> usize {
        self.table.order()
    }

    pub fn num_vars(&self) -> usize {
        self.table.num_vars()
    }

    pub fn table(&self) -> &MultiIndexTable {
        &self.table
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    /// Taylor coefficient at `alpha`; zero beyond the truncation order.
    pub fn coeff(&self, alpha: &[u8]) -> f64 {
        self.table
            .index_of(alpha)
            .map(|k| self.coeffs[k])
            .unwrap_or(0.0)
    }

    /// Partial derivative `∂^α f(p)`.
    pub fn derivative(&self, alpha: &[u8]) -> f64 {
        self.coeff(alpha) * factorial_of(alpha)
    }

    /// Gradient at the expansion point.
    pub fn gradient(&self) -> Vec<f64> {
        let n = self.num_vars();
        if self.order() == 0 {
            return vec![0.0; n];
        }
        self.coeffs[1..=n].to_vec()
    }

    pub fn truncate(&self, order: usize) -> Jet {
        if order >= self.order() {
            return self.clone();
        }
        let table = MultiIndexTable::get(self.num_vars(), order);
        let coeffs = self.coeffs[..table.len()].to_vec();
        Jet { table, coeffs }
    }

    /// `∂f/∂x_var` as a jet of one order less.
    pub fn partial(&self, var: usize) -> Jet {
        assert!(self.order() >= 1, "cannot differentiate an order-0 jet");
        let mut out = Jet::zeros(self.num_vars(), self.order() - 1);
        let down = self.table.shift_down(var);
        for (k, alpha) in self.table.indices().iter().enumerate() {
            if let Some(b) = down[k] {
                let b = b as usize;
                if b < out.coeffs.len() {
                    out.coeffs[b] += alpha[var] as f64 * self.coeffs[k];
                }
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            table: self.table.clone(),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add_scalar(&self, s: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    fn same_shape(a: &Jet, b: &Jet) -> (Jet, Jet) {
        assert_eq!(
            a.num_vars(),
            b.num_vars(),
            "jet arithmetic across different variable counts"
        );
        let order = a.order().min(b.order());
        (a.truncate(order), b.truncate(order))
    }

    fn mul_jet(&self, other: &Jet) -> Jet {
        let (a, b) = Jet::same_shape(self, other);
        let mut out = vec![0.0; a.coeffs.len()];
        // mirrored terms summed as a pair, so a*b and b*a agree bitwise
        for &(i, j, k) in a.table.products() {
            let (i, j) = (i as usize, j as usize);
            if i < j {
                out[k as usize] += a.coeffs[i] * b.coeffs[j] + a.coeffs[j] * b.coeffs[i];
            } else if i == j {
                out[k as usize] += a.coeffs[i] * b.coeffs[i];
            }
        }
        Jet {
            table: a.table,
            coeffs: out,
        }
    }

    /// Evaluates the univariate series `Σ c_k (self − self(p))^k`.
    ///
    /// `series[k]` must be the k-th Taylor coefficient of the outer function
    /// at `self.value()`.
    pub fn compose_series(&self, series: &[f64]) -> Jet {
        let order = self.order();
        let mut delta = self.clone();
        delta.coeffs[0] = 0.0;
        let top = order.min(series.len().saturating_sub(1));
        let mut acc = Jet::constant(series[top], self.num_vars(), order);
        for k in (0..top).rev() {
            acc = acc.mul_jet(&delta).add_scalar(series[k]);
        }
        acc
    }

    /// Multivariate composition `outer(inner_0, …, inner_{m−1})`.
    ///
    /// `outer` must be expanded at the values of the inner jets.
    pub fn compose(outer: &Jet, inner: &[Jet]) -> Jet {
        assert_eq!(outer.num_vars(), inner.len(), "composition arity mismatch");
        assert!(!inner.is_empty(), "composition with no inner jets");
        let nv = inner[0].num_vars();
        let order = inner.iter().map(|j| j.order()).min().unwrap_or(0);
        let deltas: Vec<Jet> = inner
            .iter()
            .map(|j| {
                let mut d = j.truncate(order);
                d.coeffs[0] = 0.0;
                d
            })
            .collect();
        // powers[i][p] = delta_i^p
        let max_pow = outer.order().min(order);
        let powers: Vec<Vec<Jet>> = deltas
            .iter()
            .map(|d| {
                let mut ps = vec![Jet::constant(1.0, nv, order)];
                for p in 1..=max_pow {
                    let next = ps[p - 1].mul_jet(d);
                    ps.push(next);
                }
                ps
            })
            .collect();
        let mut acc = Jet::zeros(nv, order);
        for (k, alpha) in outer.table.indices().iter().enumerate() {
            let c = outer.coeffs[k];
            if c == 0.0 {
                continue;
            }
            let deg: usize = alpha.iter().map(|&a| a as usize).sum();
            if deg > max_pow {
                continue;
            }
            let mut term = Jet::constant(c, nv, order);
            for (i, &a) in alpha.iter().enumerate() {
                if a > 0 {
                    term = term.mul_jet(&powers[i][a as usize]);
                }
            }
            for (dst, src) in acc.coeffs.iter_mut().zip(&term.coeffs) {
                *dst += src;
            }
        }
        acc
    }

    pub fn recip(&self) -> Result<Jet> {
        let x = self.value();
        if x == 0.0 {
            return Err(Error::Domain("division by zero".into()));
        }
        let series: Vec<f64> = (0..=self.order())
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign / x.powi(k as i32 + 1)
            })
            .collect();
        Ok(self.compose_series(&series))
    }

    pub fn div(&self, other: &Jet) -> Result<Jet> {
        Ok(self * &other.recip()?)
    }

    pub fn powi(&self, n: i32) -> Result<Jet> {
        if n < 0 {
            return self.powi(-n)?.recip();
        }
        let mut result = Jet::constant(1.0, self.num_vars(), self.order());
        let mut base = self.clone();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(result)
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        let series: Vec<f64> = (0..=self.order())
            .map(|k| e / factorial(k))
            .collect();
        self.compose_series(&series)
    }

    pub fn ln(&self) -> Result<Jet> {
        let x = self.value();
        if x <= 0.0 {
            return Err(Error::Domain(format!("log of non-positive value {x}")));
        }
        let mut series = vec![x.ln()];
        for k in 1..=self.order() {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            series.push(sign / (k as f64 * x.powi(k as i32)));
        }
        Ok(self.compose_series(&series))
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cycle = [s, c, -s, -c];
        let series: Vec<f64> = (0..=self.order())
            .map(|k| cycle[k % 4] / factorial(k))
            .collect();
        self.compose_series(&series)
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cycle = [c, -s, -c, s];
        let series: Vec<f64> = (0..=self.order())
            .map(|k| cycle[k % 4] / factorial(k))
            .collect();
        self.compose_series(&series)
    }

    pub fn sqrt(&self) -> Result<Jet> {
        let x = self.value();
        if x < 0.0 || (x == 0.0 && self.order() > 0) {
            return Err(Error::Domain(format!("sqrt at {x}")));
        }
        // generalized binomial coefficients of (x + δ)^{1/2}
        let mut series = Vec::with_capacity(self.order() + 1);
        let mut binom = 1.0;
        for k in 0..=self.order() {
            if k > 0 {
                binom *= (0.5 - (k as f64 - 1.0)) / k as f64;
            }
            series.push(binom * x.powf(0.5 - k as f64));
        }
        Ok(self.compose_series(&series))
    }
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k as u64).product::<u64>() as f64
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        let (mut a, b) = Jet::same_shape(self, rhs);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x += y;
        }
        a
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        let (mut a, b) = Jet::same_shape(self, rhs);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x -= y;
        }
        a
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.mul_jet(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        &self + &rhs
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        &self - &rhs
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        &self * &rhs
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}
