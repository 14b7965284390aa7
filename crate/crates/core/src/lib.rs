//! Numerical laboratory for frequently hypercyclic sequences of
//! composition operators `f ↦ f ∘ φ_n` on planar domains.

pub mod approx;
pub mod density;
pub mod error;
pub mod geometry;
pub mod maps;
pub mod orbit;
pub mod pipeline;
pub mod runaway;

pub use error::{Error, Result};

pub type Complex = num_complex::Complex64;
