//! Penrose limits along the central geodesic of adapted coordinates, their
//! conformal invariance, and the two limits of a plane wave.

mod adapted;
mod conformal;
mod dichotomy;
mod rosen;

pub use adapted::{validate_adapted, AdaptedMetric, GEODESIC_TOL, SHAPE_TOL};
pub use conformal::{penrose_of_conformal, ConformalChange, ConformalLimit, ConformalReport, CONFORMAL_TOL, INVERSE_TOL};
pub use dichotomy::{
    plane_wave_limit_dichotomy, xi_adapted_metric, Dichotomy, DichotomyReport, FLAT_LIMIT_TOL, SELF_LIMIT_TOL,
};
pub use rosen::{
    brinkmann_to_rosen, brinkmann_to_rosen_on, default_ladder, penrose_limit, rescale_convergence, RescaleRow,
    RescaleTable, RosenConversion, RosenWave, CONJUGATE_DET, RATIO_BOUND,
};
