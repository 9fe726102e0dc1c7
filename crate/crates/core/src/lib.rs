//! Counting and spectral tools for congruence covers of compact arithmetic
//! quotients of products of hyperbolic planes.

pub mod bounds;
pub mod config;
pub mod congruence_groups;
pub mod counting;
pub mod criteria;
pub mod enumeration;
pub mod error;
pub mod harmonic;
pub mod hyperbolic;
pub mod number_field;
pub mod quadrature;
pub mod quaternion;
pub mod runner;

pub use error::{Error, Result};
