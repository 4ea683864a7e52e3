//! Plane-wave profiles `Q(t)` and the Brinkmann metric they define.

use std::fmt;
use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::jacobi::JacobiFlow;
use crate::error::{Error, Result};
use crate::geometry::{Chart, MetricField, Signature};
use crate::smoothfield::{Jet, JetKernel, MatrixExpCurve, SmoothField};

const SHAPE_TOL: f64 = 1e-12;

/// Default lower end of the singular family's domain.
pub const DEFAULT_T_MIN: f64 = 0.1;

#[derive(Clone)]
pub enum Profile {
    /// Symmetric matrix of fields of `t` (one variable each).
    Generic(Vec<Vec<SmoothField>>),
    /// `Q(t) = e^{tF} S e^{−tF}`.
    Regular { s: DMatrix<f64>, f: DMatrix<f64> },
    /// `Q(t) = t^{−2} e^{(log t)F} S e^{−(log t)F}` on `t > 0`.
    Singular { s: DMatrix<f64>, f: DMatrix<f64> },
}

impl fmt::Debug for Profile {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Generic(q) => write!(fm, "Generic({q:?})"),
            Profile::Regular { s, f } => write!(fm, "Regular {{ s: {s:?}, f: {f:?} }}"),
            Profile::Singular { s, f } => write!(fm, "Singular {{ s: {s:?}, f: {f:?} }}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Generic,
    Regular,
    Singular,
}

#[derive(Debug)]
struct Inner {
    n: usize,
    profile: Profile,
    domain: (f64, f64),
    t_min: f64,
    /// `e^{sF}` for the homogeneous families.
    curve: Option<MatrixExpCurve>,
    /// Fundamental Jacobi flows keyed by base time; filled once per key.
    flows: Mutex<Vec<(f64, Arc<JacobiFlow>)>>,
}

/// A Brinkmann plane wave `2 dt dv + xᵀQ(t)x dt² + dx²`.
#[derive(Debug, Clone)]
pub struct PlaneWaveSpec {
    inner: Arc<Inner>,
}

fn check_square(m: &DMatrix<f64>, n: usize, what: &str) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "{what} is {}x{}, expected {n}x{n}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

fn symmetric_part_error(m: &DMatrix<f64>, sign: f64) -> f64 {
    (m - m.transpose() * sign).amax()
}

impl PlaneWaveSpec {
    pub fn generic(q: Vec<Vec<SmoothField>>, domain: (f64, f64)) -> Result<PlaneWaveSpec> {
        let n = q.len();
        if n == 0 || q.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("profile must be a non-empty square matrix".into()));
        }
        if q.iter().flatten().any(|f| f.num_vars() != 1) {
            return Err(Error::DimensionMismatch("profile entries must be functions of t alone".into()));
        }
        PlaneWaveSpec::build(n, Profile::Generic(q), domain, DEFAULT_T_MIN)
    }

    /// Generic profile from expressions in `t`.
    pub fn generic_from_exprs<S: AsRef<str>>(q: &[Vec<S>], domain: (f64, f64)) -> Result<PlaneWaveSpec> {
        let fields = q
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| SmoothField::parse_named(s.as_ref(), 1, &["t"]))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        PlaneWaveSpec::generic(fields, domain)
    }

    pub fn regular(s: DMatrix<f64>, f: DMatrix<f64>, domain: (f64, f64)) -> Result<PlaneWaveSpec> {
        let n = s.nrows();
        PlaneWaveSpec::build(n, Profile::Regular { s, f }, domain, DEFAULT_T_MIN)
    }

    pub fn singular(s: DMatrix<f64>, f: DMatrix<f64>, domain: (f64, f64), t_min: f64) -> Result<PlaneWaveSpec> {
        let n = s.nrows();
        PlaneWaveSpec::build(n, Profile::Singular { s, f }, domain, t_min)
    }

    /// `Q ≡ 0` in `n` transverse dimensions.
    pub fn flat(n: usize, domain: (f64, f64)) -> Result<PlaneWaveSpec> {
        PlaneWaveSpec::regular(DMatrix::zeros(n, n), DMatrix::zeros(n, n), domain)
    }

    fn build(n: usize, profile: Profile, domain: (f64, f64), t_min: f64) -> Result<PlaneWaveSpec> {
        if n == 0 {
            return Err(Error::Invalid("transverse dimension must be at least 1".into()));
        }
        if !(domain.0 < domain.1) || !domain.0.is_finite() || !domain.1.is_finite() {
            return Err(Error::Invalid(format!("bad t-domain {domain:?}")));
        }
        let curve = match &profile {
            Profile::Generic(q) => {
                let probe = [0.5 * (domain.0 + domain.1)];
                for i in 0..n {
                    for j in 0..i {
                        let (a, b) = (q[i][j].eval(&probe)?, q[j][i].eval(&probe)?);
                        if (a - b).abs() > SHAPE_TOL * (1.0 + a.abs()) {
                            return Err(Error::Invalid(format!("profile entry ({i},{j}) is not symmetric")));
                        }
                    }
                }
                None
            }
            Profile::Regular { s, f } | Profile::Singular { s, f } => {
                check_square(s, n, "S")?;
                check_square(f, n, "F")?;
                if symmetric_part_error(s, 1.0) > SHAPE_TOL {
                    return Err(Error::Invalid("S must be symmetric".into()));
                }
                if symmetric_part_error(f, -1.0) > SHAPE_TOL {
                    return Err(Error::Invalid("F must be skew".into()));
                }
                Some(MatrixExpCurve::new(f.clone())?)
            }
        };
        if let Profile::Singular { .. } = profile {
            if !(t_min > 0.0) {
                return Err(Error::Domain(format!("singular family needs t_min > 0, got {t_min}")));
            }
            if domain.0 < t_min {
                return Err(Error::Domain(format!(
                    "singular family is defined on t ≥ {t_min}; domain starts at {}",
                    domain.0
                )));
            }
        }
        Ok(PlaneWaveSpec {
            inner: Arc::new(Inner {
                n,
                profile,
                domain,
                t_min,
                curve,
                flows: Mutex::new(Vec::new()),
            }),
        })
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn dim(&self) -> usize {
        self.inner.n + 2
    }

    pub fn domain(&self) -> (f64, f64) {
        self.inner.domain
    }

    pub fn t_min(&self) -> f64 {
        self.inner.t_min
    }

    pub fn profile(&self) -> &Profile {
        &self.inner.profile
    }

    pub fn family(&self) -> Family {
        match self.inner.profile {
            Profile::Generic(_) => Family::Generic,
            Profile::Regular { .. } => Family::Regular,
            Profile::Singular { .. } => Family::Singular,
        }
    }

    /// `F` for the homogeneous families.
    pub fn rotation(&self) -> Option<&DMatrix<f64>> {
        match &self.inner.profile {
            Profile::Regular { f, .. } | Profile::Singular { f, .. } => Some(f),
            Profile::Generic(_) => None,
        }
    }

    /// Base time of the Killing basis: 1 for the singular family, else 0.
    pub fn default_t0(&self) -> f64 {
        match self.family() {
            Family::Singular => 1.0,
            _ => 0.0,
        }
    }

    pub fn with_domain(&self, domain: (f64, f64)) -> Result<PlaneWaveSpec> {
        PlaneWaveSpec::build(self.inner.n, self.inner.profile.clone(), domain, self.inner.t_min)
    }

    /// Fundamental solution of `Y'' = QY` based at `t0`, integrated once
    /// across the domain and cached.
    pub fn jacobi_flow(&self, t0: f64) -> Result<Arc<JacobiFlow>> {
        let mut cache = self.inner.flows.lock().expect("flow cache poisoned");
        if let Some((_, f)) = cache.iter().find(|(t, _)| *t == t0) {
            return Ok(f.clone());
        }
        let flow = Arc::new(JacobiFlow::integrate(self, t0)?);
        cache.push((t0, flow.clone()));
        Ok(flow)
    }

    pub(crate) fn check_time(&self, t: f64) -> Result<()> {
        if let Profile::Singular { .. } = self.inner.profile {
            if t < self.inner.t_min {
                return Err(Error::Domain(format!(
                    "singular plane wave evaluated at t = {t} below t_min = {}",
                    self.inner.t_min
                )));
            }
        }
        Ok(())
    }

    /// Taylor coefficients of `e^{sF} S e^{−sF}` at `s`: `e^{sF} ad_F^k(S) e^{−sF} / k!`.
    fn conj_taylor(&self, s: f64, order: usize) -> Vec<DMatrix<f64>> {
        let (smat, fmat) = match &self.inner.profile {
            Profile::Regular { s, f } | Profile::Singular { s, f } => (s, f),
            Profile::Generic(_) => unreachable!("conjugation curve only exists for homogeneous families"),
        };
        let curve = self.inner.curve.as_ref().expect("homogeneous family has a curve");
        let e = curve.value(s);
        let einv = e.transpose();
        let mut ad = smat.clone();
        let mut out = Vec::with_capacity(order + 1);
        let mut fact = 1.0;
        for k in 0..=order {
            if k > 0 {
                ad = fmat * &ad - &ad * fmat;
                fact *= k as f64;
            }
            out.push(&e * &ad * &einv / fact);
        }
        out
    }

    /// `Q(t)`.
    pub fn q_value(&self, t: f64) -> Result<DMatrix<f64>> {
        self.check_time(t)?;
        let n = self.inner.n;
        Ok(match &self.inner.profile {
            Profile::Generic(q) => {
                let mut m = DMatrix::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        m[(i, j)] = q[i][j].eval(&[t])?;
                    }
                }
                m
            }
            Profile::Regular { .. } => self.conj_taylor(t, 0).remove(0),
            Profile::Singular { .. } => self.conj_taylor(t.ln(), 0).remove(0) / (t * t),
        })
    }

    /// Taylor coefficients `Q^{(k)}(t) / k!` for `k = 0..=order`.
    pub fn q_taylor(&self, t: f64, order: usize) -> Result<Vec<DMatrix<f64>>> {
        self.check_time(t)?;
        let n = self.inner.n;
        match &self.inner.profile {
            Profile::Generic(q) => {
                let mut out = vec![DMatrix::zeros(n, n); order + 1];
                for i in 0..n {
                    for j in 0..n {
                        let jet = q[i][j].eval_jet(&[t], order)?;
                        for (k, m) in out.iter_mut().enumerate() {
                            m[(i, j)] = jet.coeffs()[k];
                        }
                    }
                }
                Ok(out)
            }
            Profile::Regular { .. } => Ok(self.conj_taylor(t, order)),
            Profile::Singular { .. } => {
                let r = self.conj_taylor(t.ln(), order);
                let tj = Jet::variable(0, t, 1, order);
                let log_t = tj.ln()?;
                let inv_sq = tj.powi(-2)?;
                let mut out = vec![DMatrix::zeros(n, n); order + 1];
                for i in 0..n {
                    for j in 0..n {
                        let rij = Jet::from_coeffs(1, order, r.iter().map(|m| m[(i, j)]).collect())?;
                        let qij = &Jet::compose(&rij, &[log_t.clone()]) * &inv_sq;
                        for (k, m) in out.iter_mut().enumerate() {
                            m[(i, j)] = qij.coeffs()[k];
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    /// `Q_ij` as a field of one variable `t`.
    pub fn q_field(&self, i: usize, j: usize) -> SmoothField {
        SmoothField::builtin(Arc::new(QEntry {
            spec: self.clone(),
            i,
            j,
        }))
    }

    /// The Brinkmann metric on `(t, v, x1..xn)`.
    pub fn brinkmann_metric(&self) -> Result<MetricField> {
        let d = self.dim();
        let chart = Chart::brinkmann(self.inner.n)?;
        let h = SmoothField::builtin(Arc::new(BrinkmannH { spec: self.clone() }));
        let mut rows = Vec::with_capacity(d);
        for i in 0..d {
            let row = (i..d)
                .map(|j| match (i, j) {
                    (0, 0) => h.clone(),
                    (0, 1) => SmoothField::constant(1.0, d),
                    (a, b) if a == b && a >= 2 => SmoothField::constant(1.0, d),
                    _ => SmoothField::zero(d),
                })
                .collect();
            rows.push(row);
        }
        MetricField::from_upper(chart, rows, Signature::lorentzian(d))
    }
}

pub fn brinkmann_metric(spec: &PlaneWaveSpec) -> Result<MetricField> {
    spec.brinkmann_metric()
}

#[derive(Debug)]
struct QEntry {
    spec: PlaneWaveSpec,
    i: usize,
    j: usize,
}

impl JetKernel for QEntry {
    fn num_vars(&self) -> usize {
        1
    }

    fn jet(&self, point: &[f64], order: usize) -> Result<Jet> {
        let q = self.spec.q_taylor(point[0], order)?;
        Jet::from_coeffs(1, order, q.iter().map(|m| m[(self.i, self.j)]).collect())
    }
}

/// `H(t, x) = xᵀ Q(t) x` on the full Brinkmann chart.
#[derive(Debug)]
struct BrinkmannH {
    spec: PlaneWaveSpec,
}

impl JetKernel for BrinkmannH {
    fn num_vars(&self) -> usize {
        self.spec.dim()
    }

    fn jet(&self, point: &[f64], order: usize) -> Result<Jet> {
        let d = self.spec.dim();
        let n = self.spec.n();
        let q = self.spec.q_taylor(point[0], order)?;
        let t = [Jet::variable(0, point[0], d, order)];
        let x: Vec<Jet> = (0..n).map(|i| Jet::variable(2 + i, point[2 + i], d, order)).collect();
        let mut acc = Jet::zeros(d, order);
        for i in 0..n {
            for j in i..n {
                let uni = Jet::from_coeffs(1, order, q.iter().map(|m| m[(i, j)]).collect())?;
                let w = if i == j { 1.0 } else { 2.0 };
                let term = &Jet::compose(&uni, &t) * &(&x[i] * &x[j]);
                acc = &acc + &term.scale(w);
            }
        }
        Ok(acc)
    }
}

/// On-disk spec: `{n, family, Q_expr | S, F, domain, t_min}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecFile {
    pub n: usize,
    pub family: Family,
    #[serde(rename = "Q_expr", default, skip_serializing_if = "Option::is_none")]
    pub q_expr: Option<Vec<Vec<String>>>,
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<Vec<f64>>>,
    #[serde(rename = "F", default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_min: Option<f64>,
}

/// Row-major nested lists to a matrix.
pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(Error::DimensionMismatch("ragged matrix rows".into()));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

impl SpecFile {
    pub fn into_spec(self) -> Result<PlaneWaveSpec> {
        let n = self.n;
        let default_domain = match self.family {
            Family::Singular => (0.5, 2.0),
            _ => (-1.0, 1.0),
        };
        let domain = self.domain.map_or(default_domain, |d| (d[0], d[1]));
        let need = |m: Option<Vec<Vec<f64>>>, name: &str| -> Result<DMatrix<f64>> {
            let m = m.ok_or_else(|| Error::Invalid(format!("{name} is required for this family")))?;
            let m = matrix_from_rows(&m)?;
            check_square(&m, n, name)?;
            Ok(m)
        };
        let spec = match self.family {
            Family::Generic => {
                let q = self
                    .q_expr
                    .ok_or_else(|| Error::Invalid("Q_expr is required for the generic family".into()))?;
                if q.len() != n {
                    return Err(Error::DimensionMismatch(format!("Q_expr has {} rows, expected {n}", q.len())));
                }
                PlaneWaveSpec::generic_from_exprs(&q, domain)?
            }
            Family::Regular => PlaneWaveSpec::regular(need(self.s, "S")?, need(self.f, "F")?, domain)?,
            Family::Singular => PlaneWaveSpec::singular(
                need(self.s, "S")?,
                need(self.f, "F")?,
                domain,
                self.t_min.unwrap_or(DEFAULT_T_MIN),
            )?,
        };
        if spec.n() != n {
            return Err(Error::DimensionMismatch(format!("declared n = {n}, profile has {}", spec.n())));
        }
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    #[test]
    fn regular_profile_derivatives_follow_commutators() {
        let s = dmatrix![1.0, 0.2; 0.2, -1.0];
        let f = dmatrix![0.0, 0.7; -0.7, 0.0];
        let spec = PlaneWaveSpec::regular(s, f, (-1.0, 1.0)).unwrap();
        let t = 0.4;
        let c = spec.q_taylor(t, 3).unwrap();
        let h = 1e-4;
        let fd = (spec.q_value(t + h).unwrap() - spec.q_value(t - h).unwrap()) / (2.0 * h);
        assert!((fd - &c[1]).amax() < 1e-7);
        let qf = spec.q_field(0, 1);
        assert!((qf.eval(&[t]).unwrap() - c[0][(0, 1)]).abs() < 1e-15);
    }

    #[test]
    fn singular_profile_matches_closed_form_for_commuting_data() {
        let spec = PlaneWaveSpec::singular(DMatrix::identity(2, 2), DMatrix::zeros(2, 2), (0.5, 2.0), 0.1).unwrap();
        let c = spec.q_taylor(1.5, 3).unwrap();
        // t^{-2}: coefficients t^{-2}, -2 t^{-3}, 3 t^{-4}, -4 t^{-5}
        let t: f64 = 1.5;
        let expect = [t.powi(-2), -2.0 * t.powi(-3), 3.0 * t.powi(-4), -4.0 * t.powi(-5)];
        for k in 0..4 {
            assert!((c[k][(0, 0)] - expect[k]).abs() < 1e-13);
            assert_eq!(c[k][(0, 1)], 0.0);
        }
        assert!(matches!(spec.q_value(0.05), Err(Error::Domain(_))));
        assert!(PlaneWaveSpec::singular(DMatrix::identity(2, 2), DMatrix::zeros(2, 2), (0.0, 1.0), 0.1).is_err());
    }

    #[test]
    fn brinkmann_components() {
        let spec = PlaneWaveSpec::regular(dmatrix![1.0, 0.0; 0.0, -1.0], DMatrix::zeros(2, 2), (-1.0, 1.0)).unwrap();
        let g = spec.brinkmann_metric().unwrap();
        let m = g.matrix_at(&[0.3, 0.0, 2.0, 1.0]).unwrap();
        assert!((m[(0, 0)] - 3.0).abs() < 1e-14);
        assert_eq!(m[(0, 1)], 1.0);
        assert_eq!(m[(2, 2)], 1.0);
        assert_eq!(m[(1, 1)], 0.0);
    }

    #[test]
    fn bad_shapes_rejected() {
        assert!(PlaneWaveSpec::regular(dmatrix![1.0, 1.0; 0.0, 1.0], DMatrix::zeros(2, 2), (-1.0, 1.0)).is_err());
        assert!(PlaneWaveSpec::regular(DMatrix::identity(2, 2), DMatrix::identity(2, 2), (-1.0, 1.0)).is_err());
    }
}
