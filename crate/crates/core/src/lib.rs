//! Exact computations with finite-dimensional quiver representations:
//! Hom and Ext¹, approximations by additive subcategories, extension and
//! filtration categories, and certificate checking.

pub mod approx;
pub mod cert;
pub mod counterex;
pub mod error;
pub mod extfilt;
pub mod field;
pub mod matrix;
pub mod quiver;
pub mod rep;
pub mod scenario;

pub use error::{Error, Result};
pub use field::{FieldSpec, Scalar};
pub use matrix::Matrix;
pub use quiver::{Arrow, Quiver};
pub use rep::{Rep, RepMorphism};
