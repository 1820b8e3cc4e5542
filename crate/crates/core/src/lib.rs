//! Laminate approximation of vector fields with measure derivatives.
//!
//! The crate builds explicit staircase laminates whose derivatives are
//! rank-one (or symmetric rank-one) jump measures, and measures their total
//! variation exactly under the Frobenius, Schatten-1 and symmetric
//! Schatten-1 norms. Modules:
//!
//! - [`linalg`], [`norms`]: small dense matrices, spectra, SVD, matrix norms.
//! - [`rank_one`]: tensor products and additive rank-one decompositions.
//! - [`envelope`]: randomized dual/primal bounds for the convex envelopes.
//! - [`geometry`]: simplicial meshes, hyperplane slices, face partitions.
//! - [`laminate`]: staircase fields and their variation on simplices.
//! - [`pipeline`]: end-to-end convergence experiments driven by the CLI.

pub mod error;
pub mod linalg;
pub mod norms;
pub mod rank_one;
pub mod sampling;
pub mod envelope;
pub mod geometry;
pub mod laminate;
pub mod pipeline;

pub use error::{Error, Result};
pub use linalg::{Matrix, SymMatrix};
pub use norms::NormKind;
pub use laminate::Mode;
