//! Normal-form operator algebras: differential, q-difference, quantum torus.

mod loglaurent;
mod normal;
mod torus;

pub use loglaurent::{act_func, apply_normal, apply_op, binomial_to_power, LogAction, LogLaurent};
pub(crate) use loglaurent::{nil_preimage, nil_series_inverse, poly_in_nil, vec_add_into};
pub use normal::{
    left_div_by_p, op_log1p, rational_roots, zero_mode_log1p, zero_mode_log1p_poles, zero_mode_series, NormalOp, OpSeries,
};
pub use torus::{TorusCoeff, TorusElem, VAR_A, VAR_B, VAR_LAMBDA, VAR_Q};

use crate::exact::{DiffVar, QVar};

pub type DiffOp = NormalOp<DiffVar>;
pub type QDiffOp = NormalOp<QVar>;
pub type DiffOpSeries = OpSeries<DiffVar>;
pub type QDiffOpSeries = OpSeries<QVar>;
