//! Statevector simulation and training harness for quantum mixture-of-experts
//! classifiers.
//!
//! The crate is organized around the stages of the model pipeline:
//!
//! - [`qsim`] — dense statevector simulation: gates, circuits, Pauli-Z readout
//! - [`circuits`] — builders for the encoding, routing, expert, aggregation and
//!   baseline blocks
//! - [`grad`] — parameter-shift gradients with a finite-difference oracle
//! - [`model`] — forward pass, softmax cross-entropy, Adam, training loops
//! - [`data`] — IDX ingestion, 8x8 box resampling, benchmark selection,
//!   synthetic blobs
//! - [`checkpoint`] — plain-text parameter checkpoints

pub mod checkpoint;
pub mod circuits;
pub mod data;
pub mod error;
pub mod grad;
pub mod model;
pub mod qsim;

pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
