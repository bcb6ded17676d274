//! Numerical checks of the Morse index theorem along geodesics.

pub mod exec;
pub mod geometry;
pub mod indexform;
pub mod jacobi;
pub mod sampling;
pub mod spectral;
pub mod suite;

pub use exec::Execution;
