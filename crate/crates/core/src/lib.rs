//! Riemannian geometry of Hermitian positive-definite matrices under the
//! affine-invariant metric, with gradient-descent applications: steering a
//! parametrised matrix system toward a target, and Karcher means of
//! Toeplitz HPD matrices.

// Guards are written `!(x <= limit)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod geometry;
pub mod matrix;
pub mod natural;

pub use error::{Error, Result};
pub mod control;
pub mod karcher;
pub mod system;
pub mod trajectory;
