//! Query complexity of partial Boolean functions.
//!
//! Exact combinatorial measures, decision-tree depth, polynomial degree via
//! linear programming, completions of partial functions, and the
//! perturbation-finding reduction chain. See [`boolfn`] for the bit and sign
//! conventions used throughout.

pub mod boolfn;
pub mod completion;
pub mod error;
pub mod formats;
pub mod lp;
pub mod measures;
pub mod par;
pub mod perturbation;
pub mod polynomials;
pub mod slice;
pub mod symmetric;
pub mod verify;

pub use boolfn::{
    flip, make_slice, make_symmetric, random_partial, Block, Input, PartialAssignment, PartialFunction, Value,
};
pub use error::{Error, Result};
pub use par::Exec;
