//! Approximate lattices in nilpotent Lie groups from cut-and-project schemes
//! over real quadratic fields, with exact verification tooling.

pub mod cutproject;
pub mod exactfield;
pub mod freenilp;
pub mod liealg;
pub mod linalg;
pub mod nilgroup;
pub mod verify;
