//! Finite-dimensional representations in characteristic `p` and at roots of
//! unity, with exact traces and determinants.

mod prep;
mod qrep;
mod verify;

pub use prep::{extension_degree, rho_p_point, rho_p_symbolic, PRep, PSym};
pub use qrep::{rho_n_point, rho_n_symbolic, Loc, QRep, QSym};
pub use verify::{
    check_rnr1, classify, lemma_suite, verify_det_thm22, verify_q_det, verify_q_trace, verify_trace_thm21,
    CaseResult, LemmaReport, Mode, Status, VerifyReport,
};

use thiserror::Error;

use crate::exact::ExactError;
use crate::solver::SolverError;

#[derive(Debug, Error)]
pub enum RepError {
    #[error("singular value for {0}")]
    Singular(&'static str),
    #[error("coefficient does not reduce modulo {0}")]
    BadReduction(u64),
    #[error("level {0} is out of range: a denominator vanishes modulo Phi_n")]
    OutOfRangeLevel(u64),
    #[error("symbolic dimension {0} exceeds the cap {1}; use random mode")]
    SymbolicCap(u64, u64),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}
