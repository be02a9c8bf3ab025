//! Exact matrix machinery for CR symbols of 2-nondegenerate hypersurface type:
//! canonical forms, the intersection algebra, reduced modified symbols and a
//! Tanaka prolongation engine.

pub mod exact_linalg;
pub mod canonical_forms;
pub mod intersection_algebra;
pub mod symbol_algebra;
pub mod reduced_symbol;
pub mod tanaka_prolongation;
pub mod catalog;
pub mod verify;
pub mod report;
