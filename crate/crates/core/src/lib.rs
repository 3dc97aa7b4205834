//! Poisson structures on quiver path algebras.
//!
//! Noncommutative bivectors live in the necklace space of the doubled quiver
//! and carry a Schouten bracket. They map to ordinary polyvector fields on
//! representation spaces, can be contracted along arrows, and in small cases
//! their symplectic leaves can be probed numerically.

pub mod cli;
pub mod coeff;
pub mod contraction;
pub mod error;
pub mod expr;
pub mod leaves;
pub mod matrix;
pub mod necklace;
pub mod path_algebra;
pub mod poly;
pub mod quiver;
pub mod representation;
pub mod yang_baxter;

pub use error::{Error, Result};
pub use path_algebra::{FreeElement, Word};
pub use quiver::{DimensionVector, Letter, Quiver};
