//! Exact determinants of modular representations of deformed differential
//! and q-difference operators, the monodromy polynomials attached to their
//! formal solutions, and the coefficient experiments built on top of them.

pub mod exact;
pub mod experiments;
pub mod job;
pub mod opalg;
pub mod oplang;
pub mod repmat;
pub mod shiftcalc;
pub mod solver;
pub mod torus;
