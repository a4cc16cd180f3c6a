//! Verification engine for nearly pseudo-Kähler geometry: pointwise tensor
//! algebra, three-form normal forms, curvature identities, homogeneous models
//! and submersion/twistor constructions.

pub mod catalog;
pub mod curvature;
pub mod error;
pub mod frame;
pub mod homogeneous;
pub mod linalg;
pub mod report;
pub mod scalar;
pub mod serial;
pub mod submersion;
pub mod tensor;
pub mod threeform;

pub use error::{Error, Result};
