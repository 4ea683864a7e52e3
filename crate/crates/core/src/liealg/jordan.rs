//! Spectral clustering, generalized eigenspaces and the multiplicative Jordan
//! decomposition `B = B_h B_e B_u`.

use nalgebra::{Complex, DMatrix, Schur};
use serde::Serialize;

use crate::error::{Error, Result};

type C64 = Complex<f64>;

/// Tolerance for comparing eigenvalues once clustered (scaled by `max(1, |λ|)`).
pub const CLUSTER_TOL: f64 = 1e-8;
/// Linkage distance for clustering computed eigenvalues. A Jordan block of
/// size k splits by roughly `(ε‖M‖)^{1/k}`, about 1e-5 already for k = 3.
pub const MERGE_TOL: f64 = 1e-4;
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
}

impl Cluster {
    pub fn value(&self) -> C64 {
        C64::new(self.re, self.im)
    }
}

/// Eigenvalues of a real square matrix grouped by single linkage; each
/// cluster is represented by its mean. Sorted by real then imaginary part.
pub fn spectral_clusters(m: &DMatrix<f64>) -> Result<Vec<Cluster>> {
    let eig = eigenvalues(m)?;
    let k = eig.len();
    let mut parent: Vec<usize> = (0..k).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..k {
        for j in (i + 1)..k {
            let scale = eig[i].norm().max(eig[j].norm()).max(1.0);
            if (eig[i] - eig[j]).norm() <= MERGE_TOL * scale {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<(usize, Vec<C64>)> = Vec::new();
    for i in 0..k {
        let r = root(&mut parent, i);
        match groups.iter_mut().find(|(g, _)| *g == r) {
            Some((_, v)) => v.push(eig[i]),
            None => groups.push((r, vec![eig[i]])),
        }
    }
    let mut out: Vec<Cluster> = groups
        .into_iter()
        .map(|(_, v)| {
            let mean = v.iter().fold(C64::new(0.0, 0.0), |a, b| a + b) / v.len() as f64;
            Cluster {
                re: mean.re,
                im: mean.im,
                multiplicity: v.len(),
            }
        })
        .collect();
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(out)
}

/// Schur eigenvalues with an iteration cap. The unshifted QR iteration can
/// stall on matrices with exactly repeated eigenvalues, so a stalled run is
/// retried on `M + sI`.
fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<C64>> {
    let n = m.nrows();
    let scale = m.amax().max(1.0);
    for shift in [0.0, 0.318_309_886, -0.577_215_665, 1.414_213_562] {
        let s = shift * scale;
        let shifted = m + DMatrix::identity(n, n) * s;
        if let Some(schur) = Schur::try_new(shifted, f64::EPSILON, 10_000) {
            return Ok(schur.complex_eigenvalues().iter().map(|z| z - s).collect());
        }
    }
    Err(Error::EigenNoConvergence)
}

/// Columns spanning the generalized eigenspace `ker (M − μ)^j`, with the
/// smallest `j` whose kernel reaches the cluster multiplicity.
fn generalized_eigenspace(m: &DMatrix<C64>, c: &Cluster) -> DMatrix<C64> {
    let n = m.nrows();
    let k = c.multiplicity;
    let shifted = m - DMatrix::<C64>::identity(n, n) * c.value();
    let scale = m.iter().fold(1.0f64, |a, z| a.max(z.norm()));
    let mut p = shifted.clone();
    for j in 1..=k {
        if j > 1 {
            p = &p * &shifted;
        }
        let svd = p.clone().svd(false, true);
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
        let small = order
            .iter()
            .filter(|&&r| svd.singular_values[r] <= CLUSTER_TOL * scale.powi(j as i32))
            .count();
        if small >= k || j == k {
            let vt = svd.v_t.expect("requested");
            let cols: Vec<_> = order[..k].iter().map(|&r| vt.row(r).adjoint()).collect();
            return DMatrix::from_columns(&cols);
        }
    }
    unreachable!("loop returns at j = k")
}

/// Eigenbasis adapted to the clusters and its inverse.
pub(crate) struct SpectralBasis {
    pub clusters: Vec<Cluster>,
    pub v: DMatrix<C64>,
    pub v_inv: DMatrix<C64>,
    pub condition: f64,
}

impl SpectralBasis {
    pub fn new(m: &DMatrix<f64>) -> Result<SpectralBasis> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch("matrix must be square".into()));
        }
        let clusters = spectral_clusters(m)?;
        let mc = m.map(|x| C64::new(x, 0.0));
        let blocks: Vec<DMatrix<C64>> = clusters.iter().map(|c| generalized_eigenspace(&mc, c)).collect();
        let n = m.nrows();
        let mut v = DMatrix::<C64>::zeros(n, n);
        let mut col = 0;
        for b in &blocks {
            v.columns_mut(col, b.ncols()).copy_from(b);
            col += b.ncols();
        }
        let sv = v.clone().svd(false, false).singular_values;
        let smax = sv.max();
        let smin = sv.min();
        let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        if condition > MAX_CONDITION {
            return Err(Error::IllConditioned(condition));
        }
        let v_inv = v.clone().try_inverse().ok_or(Error::IllConditioned(f64::INFINITY))?;
        Ok(SpectralBasis {
            clusters,
            v,
            v_inv,
            condition,
        })
    }

    /// `V diag(f(μ)) V⁻¹`, real part.
    pub fn function(&self, f: impl Fn(C64) -> C64) -> DMatrix<f64> {
        let n = self.v.nrows();
        let mut d = DMatrix::<C64>::zeros(n, n);
        let mut k = 0;
        for c in &self.clusters {
            let val = f(c.value());
            for _ in 0..c.multiplicity {
                d[(k, k)] = val;
                k += 1;
            }
        }
        (&self.v * d * &self.v_inv).map(|z| z.re)
    }

    /// Spectral projector onto the generalized eigenspace of cluster `i`.
    pub fn projector(&self, i: usize) -> DMatrix<C64> {
        let start: usize = self.clusters[..i].iter().map(|c| c.multiplicity).sum();
        let k = self.clusters[i].multiplicity;
        self.v.columns(start, k) * self.v_inv.rows(start, k)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct JordanParts {
    pub b_s: DMatrix<f64>,
    pub b_u: DMatrix<f64>,
    pub b_h: DMatrix<f64>,
    pub b_e: DMatrix<f64>,
    pub clusters: Vec<Cluster>,
    pub condition: f64,
}

impl JordanParts {
    /// `‖B_h B_e B_u − B‖_F / ‖B‖_F`.
    pub fn reconstruction_error(&self, b: &DMatrix<f64>) -> f64 {
        (&self.b_h * &self.b_e * &self.b_u - b).norm() / b.norm()
    }

    /// Largest commutator among the four parts.
    pub fn commutation_defect(&self) -> f64 {
        let parts = [&self.b_s, &self.b_u, &self.b_h, &self.b_e];
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in (i + 1)..4 {
                worst = worst.max((parts[i] * parts[j] - parts[j] * parts[i]).amax());
            }
        }
        worst
    }

    /// `max |(B_u − I)^dim|`.
    pub fn nilpotency_defect(&self) -> f64 {
        let n = self.b_u.nrows();
        let nil = &self.b_u - DMatrix::identity(n, n);
        let mut p = DMatrix::identity(n, n);
        for _ in 0..n {
            p = &p * &nil;
        }
        p.amax()
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.clusters.iter().all(|c| c.im.abs() <= CLUSTER_TOL * c.value().norm().max(1.0) && c.re > 0.0)
    }

    pub fn is_elliptic(&self) -> bool {
        self.clusters.iter().all(|c| (c.value().norm() - 1.0).abs() <= CLUSTER_TOL)
    }

    pub fn is_unipotent(&self) -> bool {
        self.clusters.iter().all(|c| (c.value() - C64::new(1.0, 0.0)).norm() <= CLUSTER_TOL)
    }

    pub fn is_semisimple(&self) -> bool {
        let n = self.b_u.nrows();
        (&self.b_u - DMatrix::identity(n, n)).amax() <= CLUSTER_TOL
    }
}

/// `B = B_s B_u` with `B_s` semisimple and `B_u` unipotent, and
/// `B_s = B_h B_e` with real positive and unit-modulus spectra.
pub fn jordan_decompose(b: &DMatrix<f64>) -> Result<JordanParts> {
    let basis = SpectralBasis::new(b)?;
    let n = b.nrows();
    if basis.clusters.iter().any(|c| c.value().norm() <= CLUSTER_TOL * b.amax().max(1.0)) {
        return Err(Error::SingularMatrix);
    }
    let (b_s, b_u) = if basis.clusters.iter().all(|c| c.multiplicity == 1) {
        (b.clone(), DMatrix::identity(n, n))
    } else {
        let b_s = basis.function(|z| z);
        let inv = b_s.clone().try_inverse().ok_or(Error::SingularMatrix)?;
        let b_u = inv * b;
        (b_s, b_u)
    };
    let b_h = basis.function(|z| C64::new(z.norm(), 0.0));
    let b_e = basis.function(|z| z / z.norm());
    Ok(JordanParts {
        b_s,
        b_u,
        b_h,
        b_e,
        clusters: basis.clusters,
        condition: basis.condition,
    })
}
