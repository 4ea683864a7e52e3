//! The Jacobi equation `ü = Q(t) u`.
//!
//! One matrix flow `Y'' = QY` with `Y(t0) = [I 0]`, `Y'(t0) = [0 I]` is
//! integrated by classical RK4 on a fixed grid and cached; every solution is
//! `Y(t)·(u0, u̇0)`. Off-grid times take one partial step from the nearest
//! node. Jets in `t` come from the equation itself, never from differencing
//! trajectories.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::spec::PlaneWaveSpec;
use crate::error::{Error, Result};
use crate::smoothfield::{Jet, JetKernel, SmoothField, MAX_ORDER};

pub const STEP: f64 = 1e-3;
pub const RICHARDSON_TOL: f64 = 1e-9;

/// Cached fundamental solution `(Y, Y')` on a grid covering the domain.
#[derive(Debug)]
pub struct JacobiFlow {
    t0: f64,
    nodes: Vec<f64>,
    y: Vec<DMatrix<f64>>,
    yd: Vec<DMatrix<f64>>,
    richardson: f64,
}

fn rk4(
    spec: &PlaneWaveSpec,
    t: f64,
    y: &DMatrix<f64>,
    z: &DMatrix<f64>,
    dt: f64,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let q0 = spec.q_value(t)?;
    let qm = spec.q_value(t + 0.5 * dt)?;
    let q1 = spec.q_value(t + dt)?;
    let k1y = z.clone();
    let k1z = &q0 * y;
    let k2y = z + &k1z * (0.5 * dt);
    let k2z = &qm * (y + &k1y * (0.5 * dt));
    let k3y = z + &k2z * (0.5 * dt);
    let k3z = &qm * (y + &k2y * (0.5 * dt));
    let k4y = z + &k3z * dt;
    let k4z = &q1 * (y + &k3y * dt);
    let ny = y + (&k1y + &k2y * 2.0 + &k3y * 2.0 + &k4y) * (dt / 6.0);
    let nz = z + (&k1z + &k2z * 2.0 + &k3z * 2.0 + &k4z) * (dt / 6.0);
    Ok((ny, nz))
}

type Sweep = (Vec<f64>, Vec<DMatrix<f64>>, Vec<DMatrix<f64>>);

/// Integrates from `t0` to `end` with step `h` (last step shortened).
fn sweep(spec: &PlaneWaveSpec, t0: f64, end: f64, h: f64, y0: &DMatrix<f64>, z0: &DMatrix<f64>) -> Result<Sweep> {
    let dir = if end >= t0 { 1.0 } else { -1.0 };
    let steps = ((end - t0).abs() / h).ceil() as usize;
    let mut ts = vec![t0];
    let mut ys = vec![y0.clone()];
    let mut zs = vec![z0.clone()];
    for k in 0..steps {
        let t = ts[k];
        let next = if k + 1 == steps { end } else { t0 + dir * h * (k + 1) as f64 };
        let (y, z) = rk4(spec, t, &ys[k], &zs[k], next - t)?;
        if !y.iter().chain(z.iter()).all(|v| v.is_finite()) {
            return Err(Error::Ode(format!("non-finite state at t = {next}")));
        }
        ts.push(next);
        ys.push(y);
        zs.push(z);
    }
    Ok((ts, ys, zs))
}

impl JacobiFlow {
    pub(crate) fn integrate(spec: &PlaneWaveSpec, t0: f64) -> Result<JacobiFlow> {
        let (a, b) = spec.domain();
        if !(a <= t0 && t0 <= b) {
            return Err(Error::Ode(format!("base time {t0} outside the domain [{a}, {b}]")));
        }
        let n = spec.n();
        let mut y0 = DMatrix::zeros(n, 2 * n);
        let mut z0 = DMatrix::zeros(n, 2 * n);
        for i in 0..n {
            y0[(i, i)] = 1.0;
            z0[(i, n + i)] = 1.0;
        }
        let (tf, yf, zf) = sweep(spec, t0, b, STEP, &y0, &z0)?;
        let (tb, yb, zb) = sweep(spec, t0, a, STEP, &y0, &z0)?;

        let mut richardson = 0.0f64;
        for (end, y, z) in [(b, yf.last().unwrap(), zf.last().unwrap()), (a, yb.last().unwrap(), zb.last().unwrap())] {
            let (_, yh, zh) = sweep(spec, t0, end, 0.5 * STEP, &y0, &z0)?;
            let scale = y.amax().max(z.amax()).max(1.0);
            let diff = (y - yh.last().unwrap()).amax().max((z - zh.last().unwrap()).amax());
            richardson = richardson.max(diff / scale);
        }
        if richardson > RICHARDSON_TOL {
            return Err(Error::Ode(format!(
                "step-halving disagreement {richardson:e} exceeds {RICHARDSON_TOL:e}"
            )));
        }

        let mut nodes: Vec<f64> = tb.iter().rev().cloned().collect();
        let mut y: Vec<DMatrix<f64>> = yb.into_iter().rev().collect();
        let mut yd: Vec<DMatrix<f64>> = zb.into_iter().rev().collect();
        nodes.extend(tf.into_iter().skip(1));
        y.extend(yf.into_iter().skip(1));
        yd.extend(zf.into_iter().skip(1));
        Ok(JacobiFlow {
            t0,
            nodes,
            y,
            yd,
            richardson,
        })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Relative disagreement between step `h` and `h/2` at the domain ends.
    pub fn richardson_error(&self) -> f64 {
        self.richardson
    }

    pub fn span(&self) -> (f64, f64) {
        (self.nodes[0], *self.nodes.last().unwrap())
    }

    /// `(Y(t), Y'(t))`.
    pub fn state(&self, spec: &PlaneWaveSpec, t: f64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let (lo, hi) = self.span();
        if !(lo <= t && t <= hi) {
            return Err(Error::Domain(format!("t = {t} outside the integrated window [{lo}, {hi}]")));
        }
        let k = self.nodes.partition_point(|&s| s < t);
        let k = if k == self.nodes.len() {
            k - 1
        } else if k > 0 && (t - self.nodes[k - 1]) < (self.nodes[k] - t) {
            k - 1
        } else {
            k
        };
        let dt = t - self.nodes[k];
        if dt == 0.0 {
            return Ok((self.y[k].clone(), self.yd[k].clone()));
        }
        rk4(spec, self.nodes[k], &self.y[k], &self.yd[k], dt)
    }
}

/// A solution of `ü = Qu` with initial data at `t0`.
#[derive(Debug, Clone)]
pub struct JacobiSolution {
    spec: PlaneWaveSpec,
    flow: Arc<JacobiFlow>,
    data: DVector<f64>,
}

pub fn solve_jacobi(spec: &PlaneWaveSpec, t0: f64, u0: &[f64], udot0: &[f64]) -> Result<JacobiSolution> {
    let n = spec.n();
    if u0.len() != n || udot0.len() != n {
        return Err(Error::DimensionMismatch(format!("initial data must have length {n}")));
    }
    let flow = spec.jacobi_flow(t0)?;
    let data = DVector::from_iterator(2 * n, u0.iter().chain(udot0).cloned());
    Ok(JacobiSolution {
        spec: spec.clone(),
        flow,
        data,
    })
}

impl JacobiSolution {
    pub fn t0(&self) -> f64 {
        self.flow.t0
    }

    pub fn n(&self) -> usize {
        self.spec.n()
    }

    pub fn initial_position(&self) -> Vec<f64> {
        self.data.rows(0, self.n()).iter().cloned().collect()
    }

    pub fn initial_velocity(&self) -> Vec<f64> {
        self.data.rows(self.n(), self.n()).iter().cloned().collect()
    }

    /// `(u(t), u̇(t))`.
    pub fn state(&self, t: f64) -> Result<(DVector<f64>, DVector<f64>)> {
        let (y, z) = self.flow.state(&self.spec, t)?;
        Ok((&y * &self.data, &z * &self.data))
    }

    /// Taylor coefficient vectors of `u` (or of `u̇` when `velocity`) at `t`.
    pub fn taylor(&self, t: f64, order: usize, velocity: bool) -> Result<Vec<DVector<f64>>> {
        let (u, ud) = self.state(t)?;
        let q = self.spec.q_taylor(t, order.min(2))?;
        // derivatives d^k u / dt^k for k = 0..=order+1
        let mut der = vec![u.clone(), ud.clone()];
        if order + 1 >= 2 {
            der.push(&q[0] * &u);
        }
        if order + 1 >= 3 {
            der.push(&q[1] * &u + &q[0] * &ud);
        }
        if order + 1 >= 4 {
            // u'''' = Q''u + 2Q'u̇ + Q ü, with Q'' = 2 q[2]
            der.push(&q[2] * &u * 2.0 + &q[1] * &ud * 2.0 + &q[0] * &der[2]);
        }
        let shift = usize::from(velocity);
        let mut fact = 1.0;
        Ok((0..=order)
            .map(|k| {
                if k > 0 {
                    fact *= k as f64;
                }
                &der[k + shift] / fact
            })
            .collect())
    }

    /// `u_i` as a field of `t`.
    pub fn position_field(&self, i: usize) -> SmoothField {
        SmoothField::ode(Arc::new(SolutionEntry {
            sol: self.clone(),
            i,
            velocity: false,
        }))
    }

    /// `u̇_i` as a field of `t`.
    pub fn velocity_field(&self, i: usize) -> SmoothField {
        SmoothField::ode(Arc::new(SolutionEntry {
            sol: self.clone(),
            i,
            velocity: true,
        }))
    }

    /// Largest `|ü − Qu|` relative to `max(1, |u|)` at `ts`, with `ü` from a
    /// step-halving extrapolated central difference of the evaluated `u̇`.
    pub fn ode_residual(&self, ts: &[f64]) -> Result<f64> {
        let delta = 1e-2;
        let (lo, hi) = self.flow.span();
        let mut worst = 0.0f64;
        for &t in ts {
            if t - delta < lo || t + delta > hi {
                continue;
            }
            let diff = |d: f64| -> Result<DVector<f64>> {
                let (_, a) = self.state(t + d)?;
                let (_, b) = self.state(t - d)?;
                Ok((a - b) / (2.0 * d))
            };
            let acc = (diff(0.5 * delta)? * 4.0 - diff(delta)?) / 3.0;
            let (u, _) = self.state(t)?;
            let qu = self.spec.q_value(t)? * &u;
            worst = worst.max((acc - qu).amax() / u.amax().max(1.0));
        }
        Ok(worst)
    }
}

/// `u̇ᵀw − uᵀẇ` at `t`.
pub fn wronskian(a: &JacobiSolution, b: &JacobiSolution, t: f64) -> Result<f64> {
    let (u, ud) = a.state(t)?;
    let (w, wd) = b.state(t)?;
    Ok(ud.dot(&w) - u.dot(&wd))
}

#[derive(Debug)]
struct SolutionEntry {
    sol: JacobiSolution,
    i: usize,
    velocity: bool,
}

impl JetKernel for SolutionEntry {
    fn num_vars(&self) -> usize {
        1
    }

    fn jet(&self, point: &[f64], order: usize) -> Result<Jet> {
        debug_assert!(order <= MAX_ORDER);
        let c = self.sol.taylor(point[0], order, self.velocity)?;
        Jet::from_coeffs(1, order, c.iter().map(|v| v[self.i]).collect())
    }
}
