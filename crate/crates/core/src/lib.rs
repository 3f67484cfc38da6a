//! Computational group theory for central extensions, lifting invariants,
//! Hurwitz component counts and random nilpotent group models.

pub mod arith;
pub mod cohomology;
pub mod error;
pub mod group;
pub mod hurwitz;
pub mod linalg;
pub mod models;
pub mod nilpotent;

pub use error::{CllError, Result};
