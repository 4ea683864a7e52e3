//! The Heisenberg Killing algebra of a plane wave and its companions.

use nalgebra::DMatrix;

use super::jacobi::{solve_jacobi, JacobiSolution};
use super::spec::{Family, PlaneWaveSpec};
use crate::error::Result;
use crate::geometry::{Chart, VectorField};
use crate::liealg::LieAlgebra;
use crate::smoothfield::SmoothField;

/// `ξ_u = uᵀ∂_x − (u̇ᵀx) ∂_v` on the Brinkmann chart `(t, v, x)`.
pub fn heisenberg_field(chart: &Chart, sol: &JacobiSolution) -> Result<VectorField> {
    let d = chart.dim();
    let n = d - 2;
    let mut comps = vec![SmoothField::zero(d); d];
    let mut v_terms = Vec::with_capacity(n);
    for i in 0..n {
        comps[2 + i] = sol.position_field(i).lift(0, d);
        v_terms.push(SmoothField::product(
            vec![sol.velocity_field(i).lift(0, d), SmoothField::coordinate(2 + i, d)],
            d,
        ));
    }
    comps[1] = SmoothField::sum(v_terms, d).scale(-1.0);
    VectorField::new(chart.clone(), comps)
}

/// `2v ∂_v + xᵀ∂_x`, with `L_X g = 2g` on every Brinkmann wave.
pub fn homothety_field(chart: &Chart) -> VectorField {
    let d = chart.dim();
    let mut comps = vec![SmoothField::zero(d); d];
    comps[1] = SmoothField::coordinate(1, d).scale(2.0);
    for (i, c) in comps.iter_mut().enumerate().skip(2) {
        *c = SmoothField::coordinate(i, d);
    }
    VectorField::new(chart.clone(), comps).expect("consistent by construction")
}

/// `Σ_i (Fx)_i ∂_{x_i}`.
fn rotation_components(chart: &Chart, f: &DMatrix<f64>) -> Vec<SmoothField> {
    let d = chart.dim();
    let n = d - 2;
    let mut comps = vec![SmoothField::zero(d); d];
    for i in 0..n {
        let terms = (0..n)
            .filter(|&j| f[(i, j)] != 0.0)
            .map(|j| SmoothField::coordinate(2 + j, d).scale(f[(i, j)]))
            .collect();
        comps[2 + i] = SmoothField::sum(terms, d);
    }
    comps
}

/// The transitive Killing field of a homogeneous wave:
/// `∂_t + (Fx)ᵀ∂_x` (regular) or `t∂_t + (Fx)ᵀ∂_x − v∂_v` (singular).
pub fn extra_field(spec: &PlaneWaveSpec, chart: &Chart) -> Option<VectorField> {
    let f = spec.rotation()?;
    let d = chart.dim();
    let mut comps = rotation_components(chart, f);
    match spec.family() {
        Family::Regular => comps[0] = SmoothField::constant(1.0, d),
        Family::Singular => {
            comps[0] = SmoothField::coordinate(0, d);
            comps[1] = SmoothField::coordinate(1, d).scale(-1.0);
        }
        Family::Generic => return None,
    }
    Some(VectorField::new(chart.clone(), comps).expect("consistent by construction"))
}

#[derive(Debug, Clone)]
pub struct KillingBasis {
    pub chart: Chart,
    pub t0: f64,
    /// `∂_v`
    pub xi0: VectorField,
    /// From initial data `(e_i, 0)` then `(0, e_i)` at `t0`.
    pub transverse: Vec<VectorField>,
    pub solutions: Vec<JacobiSolution>,
    pub extra: Option<VectorField>,
    pub homothety: VectorField,
}

impl KillingBasis {
    /// `ξ_0` followed by the transverse fields.
    pub fn heisenberg(&self) -> Vec<VectorField> {
        std::iter::once(self.xi0.clone()).chain(self.transverse.iter().cloned()).collect()
    }

    /// `w_ij = u̇_iᵀu_j − u_iᵀu̇_j` from the initial data; `[ξ_i, ξ_j] = w_ij ∂_v`.
    pub fn wronskian_constants(&self) -> DMatrix<f64> {
        let m = self.solutions.len();
        DMatrix::from_fn(m, m, |i, j| {
            let (a, b) = (&self.solutions[i], &self.solutions[j]);
            let dot = |x: Vec<f64>, y: Vec<f64>| x.iter().zip(&y).map(|(p, q)| p * q).sum::<f64>();
            dot(a.initial_velocity(), b.initial_position()) - dot(a.initial_position(), b.initial_velocity())
        })
    }

    /// Structure constants of `span(ξ_0, ξ_1, …)` read off the Wronskians.
    pub fn heisenberg_algebra(&self) -> Result<LieAlgebra> {
        LieAlgebra::central_extension(&self.wronskian_constants())
    }
}

pub fn killing_basis(spec: &PlaneWaveSpec) -> Result<KillingBasis> {
    killing_basis_at(spec, spec.default_t0())
}

pub fn killing_basis_at(spec: &PlaneWaveSpec, t0: f64) -> Result<KillingBasis> {
    let n = spec.n();
    let chart = Chart::brinkmann(n)?;
    let mut solutions = Vec::with_capacity(2 * n);
    for k in 0..2 * n {
        let mut u0 = vec![0.0; n];
        let mut ud0 = vec![0.0; n];
        if k < n {
            u0[k] = 1.0;
        } else {
            ud0[k - n] = 1.0;
        }
        solutions.push(solve_jacobi(spec, t0, &u0, &ud0)?);
    }
    let transverse = solutions
        .iter()
        .map(|s| heisenberg_field(&chart, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(KillingBasis {
        xi0: VectorField::coordinate(chart.clone(), 1),
        extra: extra_field(spec, &chart),
        homothety: homothety_field(&chart),
        chart,
        t0,
        transverse,
        solutions,
    })
}
