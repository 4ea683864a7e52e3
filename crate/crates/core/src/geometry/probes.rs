//! Probe grids: `lo,hi,count` per axis, axes separated by `x` or `×`.
//!
//! A grid with one axis per coordinate is a plain tensor grid. A grid with
//! three axes on a chart `(u, v, x1..xn)` moves the whole `x` block along the
//! fixed direction `(1, 1/2, …, 1/n)` scaled by the third axis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, count: usize) -> Axis {
        Axis { lo, hi, count }
    }

    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![0.5 * (self.lo + self.hi)],
            n => (0..n)
                .map(|k| self.lo + (self.hi - self.lo) * k as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeGrid {
    pub axes: Vec<Axis>,
}

impl ProbeGrid {
    pub fn new(axes: Vec<Axis>) -> ProbeGrid {
        ProbeGrid { axes }
    }

    /// 5 × 3 × 3 over `[-1, 1]` in `(u, v, x)`.
    pub fn default_null() -> ProbeGrid {
        ProbeGrid::new(vec![Axis::new(-1.0, 1.0, 5), Axis::new(-1.0, 1.0, 3), Axis::new(-1.0, 1.0, 3)])
    }

    /// Default grid with the first axis replaced by `[lo, hi]`.
    pub fn default_null_on(lo: f64, hi: f64) -> ProbeGrid {
        let mut g = ProbeGrid::default_null();
        g.axes[0].lo = lo;
        g.axes[0].hi = hi;
        g
    }

    pub fn parse(src: &str) -> Result<ProbeGrid> {
        let axes = src
            .split(['x', '×'])
            .map(|part| {
                let f: Vec<&str> = part.split(',').map(str::trim).collect();
                let bad = || Error::Invalid(format!("probe axis `{part}` is not lo,hi,count"));
                if f.len() != 3 {
                    return Err(bad());
                }
                let lo: f64 = f[0].parse().map_err(|_| bad())?;
                let hi: f64 = f[1].parse().map_err(|_| bad())?;
                let count: usize = f[2].parse().map_err(|_| bad())?;
                if count == 0 || !lo.is_finite() || !hi.is_finite() || lo > hi {
                    return Err(bad());
                }
                Ok(Axis::new(lo, hi, count))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ProbeGrid::new(axes))
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid points on a chart of dimension `dim`, first axis slowest.
    pub fn points(&self, dim: usize) -> Result<Vec<Vec<f64>>> {
        let tensor = self.tensor();
        if self.axes.len() == dim {
            return Ok(tensor);
        }
        if self.axes.len() == 3 && dim > 3 {
            return Ok(tensor
                .into_iter()
                .map(|q| {
                    let mut p = vec![q[0], q[1]];
                    p.extend((1..=dim - 2).map(|k| q[2] / k as f64));
                    p
                })
                .collect());
        }
        Err(Error::DimensionMismatch(format!(
            "probe grid with {} axes on a {dim}-dimensional chart",
            self.axes.len()
        )))
    }

    fn tensor(&self) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::new()];
        for axis in &self.axes {
            let vals = axis.values();
            out = out
                .into_iter()
                .flat_map(|p| {
                    vals.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_expand() {
        let g = ProbeGrid::parse("0,1,3x-1,1,2×0.5,0.5,1").unwrap();
        let pts = g.points(3).unwrap();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0], vec![0.0, -1.0, 0.5]);
        assert_eq!(pts[5], vec![1.0, 1.0, 0.5]);
        let wide = ProbeGrid::default_null().points(5).unwrap();
        assert_eq!(wide.len(), 45);
        assert_eq!(wide[44], vec![1.0, 1.0, 1.0, 0.5, 1.0 / 3.0]);
        assert!(ProbeGrid::parse("0,1").is_err());
        assert!(ProbeGrid::default_null().points(2).is_err());
    }
}
