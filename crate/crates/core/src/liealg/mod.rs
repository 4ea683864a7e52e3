//! Matrix Lie algebras in `co(1, n+1)`: the grading by `ad_A`, Jordan
//! decompositions, eigenspace decompositions under derivations, and
//! invariant null lines.

mod algebra;
mod frame;
mod graded;
mod jordan;
mod nulllines;

pub use algebra::{LieAlgebra, MatrixAlgebra};
pub use frame::MinkowskiFrame;
pub use graded::{
    eigenspace_decompose, eigenspace_decompose_element, grade_so, sigma_b_spectrum, Component, GradedDecomposition,
    SigmaBranch, SigmaSpectrum, SoGrading, GRADING_TOL,
};
pub use jordan::{jordan_decompose, spectral_clusters, Cluster, JordanParts, CLUSTER_TOL, MAX_CONDITION, MERGE_TOL};
pub use nulllines::{invariance_defect, invariant_null_lines, NULL_TOL};
