//! Exact Hochschild and cyclic homology of square-zero extensions relative to
//! the ideal, computed through small models and checked against the
//! normalized bar complex.

pub mod algebra;
pub mod bar;
pub mod blocks;
pub mod error;
pub mod harmonic;
pub mod linalg;
pub mod perturb;
pub mod report;
pub mod retract;
pub mod small;
pub mod suites;
pub mod word;

pub use error::{Error, Result};
