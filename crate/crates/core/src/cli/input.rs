//! Input files: metrics, plane-wave specs, matrices and matrix algebras.
//!
//! Metric file:
//!
//! ```json
//! {"coords": ["u", "v", "x1"], "components": [["0", "1", "0"], ["0", "0"], ["1"]]}
//! ```
//!
//! `components` is either the upper triangle (row `i` has `dim − i`
//! entries) or the full matrix, of which only `i ≤ j` is read. `coords` may
//! be replaced by `"dim": d` for `x0, …`. `signature` is `lorentzian`
//! (default) or `riemannian`. Builtins:
//!
//! * `{"builtin": "minkowski", "n": 2}`: `2 du dv + dx²`
//! * `{"builtin": "rosen", "c_bar": [[…]], "domain": [lo, hi]}`: entries in `u`
//! * `{"builtin": "brinkmann", "spec": {…spec file…}}`

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use ndarray::Array3;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use super::CliError;
use crate::geometry::{Chart, MetricField, ProbeGrid, Signature};
use crate::liealg::{LieAlgebra, MatrixAlgebra, MinkowskiFrame};
use crate::penrose::RosenWave;
use crate::planewave::{matrix_from_rows, PlaneWaveSpec, SpecFile};
use crate::smoothfield::SmoothField;

/// Running digest over every input the command reads, in order.
#[derive(Debug, Default)]
pub struct InputDigest {
    hasher: Sha256,
}

impl InputDigest {
    pub fn add(&mut self, label: &str, bytes: &[u8]) {
        self.hasher.update((label.len() as u64).to_le_bytes());
        self.hasher.update(label.as_bytes());
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(bytes);
    }

    pub fn hex(&self) -> String {
        self.hasher.clone().finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn read(path: &Path, what: &str, digest: &mut InputDigest) -> Result<String, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("reading {what} file {}: {e}", path.display())))?;
    digest.add(what, text.as_bytes());
    Ok(text)
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str, path: &Path) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::input(format!("{what} file {}: {e}", path.display())))
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum SignatureName {
    Lorentzian,
    Riemannian,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Builtin {
    Minkowski,
    Rosen,
    Brinkmann,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetricFile {
    #[serde(default)]
    dim: Option<usize>,
    #[serde(default)]
    coords: Option<Vec<String>>,
    #[serde(default)]
    components: Option<Vec<Vec<String>>>,
    #[serde(default)]
    signature: Option<SignatureName>,
    #[serde(default)]
    builtin: Option<Builtin>,
    #[serde(default)]
    n: Option<usize>,
    #[serde(default)]
    c_bar: Option<Vec<Vec<String>>>,
    #[serde(default)]
    domain: Option<[f64; 2]>,
    #[serde(default)]
    spec: Option<SpecFile>,
}

/// A loaded metric with the probe grid to use when none is given.
pub struct LoadedMetric {
    pub metric: MetricField,
    pub default_grid: ProbeGrid,
    /// Set for the `rosen` builtin.
    pub rosen: Option<RosenWave>,
}

pub fn load_metric(path: &Path, digest: &mut InputDigest) -> Result<LoadedMetric, CliError> {
    let text = read(path, "metric", digest)?;
    let file: MetricFile = parse_json(&text, "metric", path)?;
    let ctx = |e: crate::Error| CliError::input(format!("metric file {}: {e}", path.display()));
    match file.builtin {
        Some(Builtin::Minkowski) => {
            let n = file.n.ok_or_else(|| CliError::input("minkowski builtin needs `n`"))?;
            Ok(LoadedMetric {
                metric: MetricField::minkowski_null(Chart::adapted(n).map_err(ctx)?),
                default_grid: ProbeGrid::default_null(),
                rosen: None,
            })
        }
        Some(Builtin::Rosen) => {
            let rows = file.c_bar.ok_or_else(|| CliError::input("rosen builtin needs `c_bar`"))?;
            let domain = file.domain.map_or((-1.0, 1.0), |d| (d[0], d[1]));
            let wave = RosenWave::from_exprs(&rows, domain).map_err(ctx)?;
            Ok(LoadedMetric {
                metric: wave.metric().map_err(ctx)?,
                default_grid: ProbeGrid::default_null_on(domain.0, domain.1),
                rosen: Some(wave),
            })
        }
        Some(Builtin::Brinkmann) => {
            let spec = file.spec.ok_or_else(|| CliError::input("brinkmann builtin needs `spec`"))?;
            let spec = spec.into_spec().map_err(ctx)?;
            let (lo, hi) = spec.domain();
            Ok(LoadedMetric {
                metric: spec.brinkmann_metric().map_err(ctx)?,
                default_grid: ProbeGrid::default_null_on(lo, hi),
                rosen: None,
            })
        }
        None => {
            let chart = match (file.coords, file.dim) {
                (Some(names), _) => Chart::new(names).map_err(ctx)?,
                (None, Some(d)) => Chart::numbered(d).map_err(ctx)?,
                (None, None) => return Err(CliError::input("metric file needs `coords` or `dim`")),
            };
            let d = chart.dim();
            let rows = file.components.ok_or_else(|| CliError::input("metric file needs `components`"))?;
            let full = rows.len() == d && rows.iter().all(|r| r.len() == d);
            let upper = rows.len() == d && rows.iter().enumerate().all(|(i, r)| r.len() == d - i);
            if !full && !upper {
                return Err(CliError::input(format!(
                    "metric components must be a {d}x{d} matrix or its upper triangle"
                )));
            }
            let mut fields: Vec<Vec<SmoothField>> = Vec::with_capacity(d);
            for (i, row) in rows.iter().enumerate() {
                let offset = if full { 0 } else { i };
                let mut out = Vec::with_capacity(row.len());
                for (k, src) in row.iter().enumerate() {
                    let j = k + offset;
                    let f = chart.parse(src).map_err(|e| {
                        CliError::input(format!(
                            "metric file {}: component g_{}{} `{src}`: {e}",
                            path.display(),
                            chart.names()[i],
                            chart.names()[j]
                        ))
                    })?;
                    out.push(f);
                }
                fields.push(out);
            }
            let signature = match file.signature {
                Some(SignatureName::Riemannian) => Signature::riemannian(d),
                _ => Signature::lorentzian(d),
            };
            let metric = if full {
                MetricField::from_matrix(chart, &fields, signature)
            } else {
                MetricField::from_upper(chart, fields, signature)
            }
            .map_err(ctx)?;
            Ok(LoadedMetric {
                metric,
                default_grid: ProbeGrid::default_null(),
                rosen: None,
            })
        }
    }
}

pub fn load_spec(path: &Path, digest: &mut InputDigest) -> Result<PlaneWaveSpec, CliError> {
    let text = read(path, "spec", digest)?;
    let file: SpecFile = parse_json(&text, "spec", path)?;
    file.into_spec()
        .map_err(|e| CliError::input(format!("spec file {}: {e}", path.display())))
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum MatrixFile {
    Bare(Vec<Vec<f64>>),
    Wrapped { matrix: Vec<Vec<f64>> },
}

pub fn load_matrix(path: &Path, digest: &mut InputDigest) -> Result<DMatrix<f64>, CliError> {
    let text = read(path, "matrix", digest)?;
    let rows = match parse_json::<MatrixFile>(&text, "matrix", path)? {
        MatrixFile::Bare(r) | MatrixFile::Wrapped { matrix: r } => r,
    };
    let m = matrix_from_rows(&rows).map_err(|e| CliError::input(format!("matrix file {}: {e}", path.display())))?;
    if m.nrows() == 0 || m.nrows() != m.ncols() {
        return Err(CliError::input(format!(
            "matrix file {}: expected a non-empty square matrix, got {}x{}",
            path.display(),
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m)
}

/// `{frame_dim, basis: [matrix…]}`, or `{structure: c[i][j][k]}` with
/// `[e_i, e_j] = Σ_k c[i][j][k] e_k` for an abstract algebra.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraFile {
    #[serde(default)]
    frame_dim: Option<usize>,
    #[serde(default)]
    basis: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(default)]
    structure: Option<Vec<Vec<Vec<f64>>>>,
}

pub enum LoadedAlgebra {
    Matrix(MatrixAlgebra),
    Abstract(LieAlgebra),
}

pub fn load_algebra(path: &Path, digest: &mut InputDigest) -> Result<LoadedAlgebra, CliError> {
    let text = read(path, "algebra", digest)?;
    let file: AlgebraFile = parse_json(&text, "algebra", path)?;
    let ctx = |e: crate::Error| CliError::input(format!("algebra file {}: {e}", path.display()));
    match (file.frame_dim, file.basis, file.structure) {
        (Some(d), Some(basis), None) => {
            let frame = MinkowskiFrame::new(d).map_err(ctx)?;
            let mats = basis
                .iter()
                .map(|rows| {
                    let m = matrix_from_rows(rows)?;
                    if m.nrows() != d || m.ncols() != d {
                        return Err(crate::Error::DimensionMismatch(format!(
                            "basis matrix is {}x{}, frame has dimension {d}",
                            m.nrows(),
                            m.ncols()
                        )));
                    }
                    Ok(m)
                })
                .collect::<crate::Result<Vec<_>>>()
                .map_err(ctx)?;
            Ok(LoadedAlgebra::Matrix(MatrixAlgebra::new(frame, mats).map_err(ctx)?))
        }
        (None, None, Some(c)) => {
            let d = c.len();
            if c.iter().any(|r| r.len() != d || r.iter().any(|s| s.len() != d)) {
                return Err(CliError::input(format!(
                    "algebra file {}: structure constants must be {d}x{d}x{d}",
                    path.display()
                )));
            }
            let arr = Array3::from_shape_fn((d, d, d), |(i, j, k)| c[i][j][k]);
            Ok(LoadedAlgebra::Abstract(LieAlgebra::new(arr).map_err(ctx)?))
        }
        _ => Err(CliError::input(format!(
            "algebra file {}: give either `frame_dim` and `basis`, or `structure`",
            path.display()
        ))),
    }
}
