//! Exact derivatives of smooth functions through truncated Taylor jets,
//! plus the textual expression format used by input files.

mod expr;
mod field;
mod jet;
mod matexp;
mod multi_index;
mod parser;

pub use expr::Expr;
pub use field::{FieldKind, JetKernel, SmoothField};
pub use jet::{Jet, JetRecord, MAX_ORDER};
pub use matexp::{matrix_exp_curve, MatrixExpCurve};
pub use multi_index::{simplex_size, MultiIndexTable};
pub use parser::{parse_expr, parse_expr_named};

use crate::error::Result;

/// Jet of `field` at `point`; coefficient `α` is `∂^α f / α!`.
pub fn eval_jet(field: &SmoothField, point: &[f64], order: usize) -> Result<Jet> {
    field.eval_jet(point, order)
}
