//! Metrics and vector fields on a coordinate chart, the curvature stack, and
//! conformal Killing checks. Everything is evaluated pointwise through jets.
//!
//! Conventions, fixed once for the whole crate:
//!
//! * `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z`
//! * `R_ijkl = g(R(∂_i,∂_j)∂_k, ∂_l)`, so the unit sphere has
//!   `R_ijkl = g_jk g_il − g_ik g_jl`
//! * `Ric_ij = g^{kl} R_kijl`, `s = g^{ij} Ric_ij`
//! * `P = (Ric − s g / (2(d−1))) / (d−2)` and `W = R − P ⊙ g`, with the
//!   Kulkarni–Nomizu product
//!   `(h ⊙ k)_ijkl = h_il k_jk + h_jk k_il − h_ik k_jl − h_jl k_ik`
//!
//! With these, a Brinkmann wave `2 dt dv + xᵀQ(t)x dt² + dx²` has
//! `R(∂_{x_i}, ∂_t, ∂_t, ∂_{x_j}) = −Q_ij`.

mod curvature;
mod killing;
pub mod probes;

pub use curvature::{
    christoffel, conformal_flatness, covariant_derivative, curvature, curvature_without_gradient,
    kulkarni_nomizu, weyl_mixed, CurvatureBundle, FlatnessReport,
};
pub use killing::{
    conformal_killing_check, lie_derivative_metric, weyl_conformal_covariance_check,
    weyl_conformal_covariance_check_with, KillingPoint, KillingReport, KillingTolerances,
    KillingVerdict,
};
pub use probes::ProbeGrid;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::smoothfield::{Jet, SmoothField};

/// Coordinate chart: the dimension is the number of coordinate names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chart {
    names: Vec<String>,
}

impl Chart {
    pub fn new(names: Vec<String>) -> Result<Chart> {
        if names.len() < 3 {
            return Err(Error::Invalid(format!(
                "chart dimension must be at least 3, got {}",
                names.len()
            )));
        }
        for (k, n) in names.iter().enumerate() {
            if n.is_empty() || names[..k].contains(n) {
                return Err(Error::Invalid(format!("bad or repeated coordinate name `{n}`")));
            }
        }
        Ok(Chart { names })
    }

    /// `x0, …, x{dim-1}`.
    pub fn numbered(dim: usize) -> Result<Chart> {
        Chart::new((0..dim).map(|i| format!("x{i}")).collect())
    }

    /// `(t, v, x1, …, xn)`.
    pub fn brinkmann(n: usize) -> Result<Chart> {
        Chart::null_adapted("t", n)
    }

    /// `(u, v, x1, …, xn)`.
    pub fn adapted(n: usize) -> Result<Chart> {
        Chart::null_adapted("u", n)
    }

    fn null_adapted(first: &str, n: usize) -> Result<Chart> {
        let mut names = vec![first.to_string(), "v".to_string()];
        names.extend((1..=n).map(|i| format!("x{i}")));
        Chart::new(names)
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name_refs(&self) -> Vec<&str> {
        self.names.iter().map(String::as_str).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Parses an expression in this chart's coordinates (names, or `xN`).
    pub fn parse(&self, source: &str) -> Result<SmoothField> {
        SmoothField::parse_named(source, self.dim(), &self.name_refs())
    }
}

/// Number of negative and positive eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub negative: usize,
    pub positive: usize,
}

impl Signature {
    pub fn lorentzian(dim: usize) -> Signature {
        Signature {
            negative: 1,
            positive: dim - 1,
        }
    }

    pub fn riemannian(dim: usize) -> Signature {
        Signature {
            negative: 0,
            positive: dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.negative + self.positive
    }
}

/// Relative eigenvalue threshold below which a metric counts as degenerate.
const DEGENERACY: f64 = 1e-12;

/// Signature of a symmetric matrix; `None` if it is numerically degenerate.
pub fn signature_of(m: &DMatrix<f64>) -> Option<Signature> {
    let eig = SymmetricEigen::new(m.clone()).eigenvalues;
    let scale = eig.iter().fold(0.0f64, |a, &l| a.max(l.abs()));
    if scale == 0.0 || eig.iter().any(|l| l.abs() <= DEGENERACY * scale) {
        return None;
    }
    let negative = eig.iter().filter(|&&l| l < 0.0).count();
    Some(Signature {
        negative,
        positive: eig.len() - negative,
    })
}

/// Symmetric metric tensor; only the upper triangle is stored.
#[derive(Debug, Clone)]
pub struct MetricField {
    chart: Chart,
    upper: Vec<SmoothField>,
    signature: Signature,
}

impl MetricField {
    /// `rows[i]` lists `g_ii, g_i(i+1), …, g_i(d−1)`.
    pub fn from_upper(chart: Chart, rows: Vec<Vec<SmoothField>>, signature: Signature) -> Result<MetricField> {
        let d = chart.dim();
        if rows.len() != d || signature.dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "metric on a {d}-dimensional chart needs {d} upper-triangle rows and a matching signature"
            )));
        }
        let mut upper = Vec::with_capacity(d * (d + 1) / 2);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != d - i {
                return Err(Error::DimensionMismatch(format!(
                    "upper-triangle row {i} has {} entries, expected {}",
                    row.len(),
                    d - i
                )));
            }
            for f in row {
                if f.num_vars() != d {
                    return Err(Error::DimensionMismatch(format!(
                        "component on {} variables in a {d}-dimensional chart",
                        f.num_vars()
                    )));
                }
                upper.push(f);
            }
        }
        Ok(MetricField {
            chart,
            upper,
            signature,
        })
    }

    /// Upper-triangle rows of expression strings in the chart's coordinates.
    pub fn from_exprs<S: AsRef<str>>(chart: Chart, rows: &[Vec<S>], signature: Signature) -> Result<MetricField> {
        let fields = rows
            .iter()
            .map(|r| r.iter().map(|s| chart.parse(s.as_ref())).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        MetricField::from_upper(chart, fields, signature)
    }

    /// Full symmetric component matrix; only `g_ij` with `i ≤ j` are read.
    pub fn from_matrix(chart: Chart, comps: &[Vec<SmoothField>], signature: Signature) -> Result<MetricField> {
        let d = chart.dim();
        if comps.len() != d || comps.iter().any(|r| r.len() != d) {
            return Err(Error::DimensionMismatch("metric component matrix must be square".into()));
        }
        let rows = (0..d).map(|i| comps[i][i..].to_vec()).collect();
        MetricField::from_upper(chart, rows, signature)
    }

    /// `2 dx0 dx1 + Σ_{i≥2} dx_i²` on the given chart.
    pub fn minkowski_null(chart: Chart) -> MetricField {
        let d = chart.dim();
        let rows = (0..d)
            .map(|i| {
                (i..d)
                    .map(|j| {
                        let c = match (i, j) {
                            (0, 1) => 1.0,
                            (a, b) if a == b && a >= 2 => 1.0,
                            _ => 0.0,
                        };
                        SmoothField::constant(c, d)
                    })
                    .collect()
            })
            .collect();
        MetricField::from_upper(chart, rows, Signature::lorentzian(d)).expect("consistent by construction")
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn component(&self, i: usize, j: usize) -> &SmoothField {
        &self.upper[upper_index(self.dim(), i, j)]
    }

    /// Components as a full `d × d` array of fields (shared handles).
    pub fn components(&self) -> Vec<Vec<SmoothField>> {
        let d = self.dim();
        (0..d)
            .map(|i| (0..d).map(|j| self.component(i, j).clone()).collect())
            .collect()
    }

    fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "point of length {} on a {}-dimensional chart",
                p.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    pub fn matrix_at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.check_point(p)?;
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in i..d {
                let v = self.component(i, j).eval(p)?;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(m)
    }

    /// Jets of all components, row-major `d × d` (symmetric entries shared).
    pub fn jets_at(&self, p: &[f64], order: usize) -> Result<Vec<Jet>> {
        self.check_point(p)?;
        let d = self.dim();
        let upper = self
            .upper
            .iter()
            .map(|f| f.eval_jet(p, order))
            .collect::<Result<Vec<_>>>()?;
        let mut out = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                out.push(upper[upper_index(d, i, j)].clone());
            }
        }
        Ok(out)
    }

    /// Component matrix after checking invertibility and the declared signature.
    pub fn validated_matrix_at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let m = self.matrix_at(p)?;
        match signature_of(&m) {
            None => Err(Error::SingularMetric { point: p.to_vec() }),
            Some(s) if s != self.signature => Err(Error::Signature {
                point: p.to_vec(),
                expected: (self.signature.negative, self.signature.positive),
                found: (s.negative, s.positive),
            }),
            Some(_) => Ok(m),
        }
    }

    /// `e^σ g`.
    pub fn conformal(&self, sigma: &SmoothField) -> Result<MetricField> {
        if sigma.num_vars() != self.dim() {
            return Err(Error::DimensionMismatch("conformal factor lives on another chart".into()));
        }
        let k = sigma.exp();
        Ok(MetricField {
            chart: self.chart.clone(),
            upper: self.upper.iter().map(|f| k.mul(f)).collect(),
            signature: self.signature,
        })
    }

    /// Adds `h` (same chart) componentwise; the signature is kept.
    pub fn perturbed(&self, i: usize, j: usize, h: &SmoothField) -> MetricField {
        let mut upper = self.upper.clone();
        let k = upper_index(self.dim(), i, j);
        upper[k] = upper[k].add(h);
        MetricField {
            chart: self.chart.clone(),
            upper,
            signature: self.signature,
        }
    }

    /// `φ^* g` for a map `φ` from `chart` into this metric's chart, given by
    /// its component functions on `chart`.
    pub fn pullback(&self, chart: Chart, map: &[SmoothField]) -> Result<MetricField> {
        let d = self.dim();
        let e = chart.dim();
        if map.len() != d || map.iter().any(|f| f.num_vars() != e) {
            return Err(Error::DimensionMismatch(format!(
                "pullback needs {d} component functions on the {e}-dimensional source chart"
            )));
        }
        let comp: Vec<Vec<SmoothField>> = self
            .components()
            .iter()
            .map(|row| row.iter().map(|g| g.compose(map.to_vec())).collect())
            .collect();
        let jac: Vec<Vec<SmoothField>> = map
            .iter()
            .map(|f| (0..e).map(|a| f.derivative(a)).collect())
            .collect();
        let mut rows = Vec::with_capacity(e);
        for a in 0..e {
            let mut row = Vec::with_capacity(e - a);
            for b in a..e {
                let mut terms = Vec::new();
                for i in 0..d {
                    if jac[i][a].is_zero() {
                        continue;
                    }
                    for j in 0..d {
                        if jac[j][b].is_zero() || comp[i][j].is_zero() {
                            continue;
                        }
                        terms.push(SmoothField::product(
                            vec![jac[i][a].clone(), jac[j][b].clone(), comp[i][j].clone()],
                            e,
                        ));
                    }
                }
                row.push(SmoothField::sum(terms, e));
            }
            rows.push(row);
        }
        MetricField::from_upper(chart, rows, self.signature)
    }
}

fn upper_index(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * (2 * dim - i + 1) / 2 + (j - i)
}

/// Vector field `X = X^i ∂_i`.
#[derive(Debug, Clone)]
pub struct VectorField {
    chart: Chart,
    comps: Vec<SmoothField>,
}

impl VectorField {
    pub fn new(chart: Chart, comps: Vec<SmoothField>) -> Result<VectorField> {
        let d = chart.dim();
        if comps.len() != d || comps.iter().any(|c| c.num_vars() != d) {
            return Err(Error::DimensionMismatch(format!(
                "vector field on a {d}-dimensional chart needs {d} components on {d} variables"
            )));
        }
        Ok(VectorField { chart, comps })
    }

    pub fn from_exprs<S: AsRef<str>>(chart: Chart, comps: &[S]) -> Result<VectorField> {
        let fields = comps
            .iter()
            .map(|s| chart.parse(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        VectorField::new(chart, fields)
    }

    /// The coordinate field `∂_i`.
    pub fn coordinate(chart: Chart, i: usize) -> VectorField {
        let d = chart.dim();
        let comps = (0..d)
            .map(|k| SmoothField::constant(if k == i { 1.0 } else { 0.0 }, d))
            .collect();
        VectorField { chart, comps }
    }

    pub fn zero(chart: Chart) -> VectorField {
        let d = chart.dim();
        VectorField {
            comps: vec![SmoothField::zero(d); d],
            chart,
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn components(&self) -> &[SmoothField] {
        &self.comps
    }

    pub fn eval(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.comps.iter().map(|c| c.eval(p)).collect()
    }

    pub fn jets_at(&self, p: &[f64], order: usize) -> Result<Vec<Jet>> {
        self.comps.iter().map(|c| c.eval_jet(p, order)).collect()
    }

    pub fn scale(&self, s: f64) -> VectorField {
        VectorField {
            chart: self.chart.clone(),
            comps: self.comps.iter().map(|c| c.scale(s)).collect(),
        }
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(VectorField {
            chart: self.chart.clone(),
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.add(b)).collect(),
        })
    }

    /// `[X, Y]^k = X^j ∂_j Y^k − Y^j ∂_j X^k`, built symbolically.
    pub fn lie_bracket(&self, other: &VectorField) -> Result<VectorField> {
        check_same_dim(self.dim(), other.dim())?;
        let d = self.dim();
        let comps = (0..d)
            .map(|k| {
                let mut terms = Vec::new();
                for j in 0..d {
                    let a = SmoothField::product(vec![self.comps[j].clone(), other.comps[k].derivative(j)], d);
                    let b = SmoothField::product(vec![other.comps[j].clone(), self.comps[k].derivative(j)], d);
                    terms.push(a);
                    terms.push(b.scale(-1.0));
                }
                SmoothField::sum(terms, d)
            })
            .collect();
        Ok(VectorField {
            chart: self.chart.clone(),
            comps,
        })
    }
}

pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField> {
    x.lie_bracket(y)
}

fn check_same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(format!("charts of dimension {a} and {b}")));
    }
    Ok(())
}
