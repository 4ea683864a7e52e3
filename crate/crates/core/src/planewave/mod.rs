//! Plane waves in Brinkmann form, their Killing algebras from the Jacobi
//! equation, and the numeric plane-wave predicate.

mod jacobi;
mod killing;
mod spec;
mod verify;

pub use jacobi::{solve_jacobi, wronskian, JacobiFlow, JacobiSolution, RICHARDSON_TOL, STEP};
pub use killing::{extra_field, heisenberg_field, homothety_field, killing_basis, killing_basis_at, KillingBasis};
pub use spec::{brinkmann_metric, matrix_from_rows, Family, PlaneWaveSpec, Profile, SpecFile, DEFAULT_T_MIN};
pub use verify::{
    check_prop_pwkilling, perp_frame, verify_plane_wave, verify_plane_wave_tol, HypothesisReport, PlaneWaveVerdict,
    PropReport, Stage, BRACKET_TOL, FLAT_TOL, PLANE_WAVE_TOL,
};
