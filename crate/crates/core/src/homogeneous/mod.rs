//! Reductive homogeneous spaces: Levi-Civita operator, curvature at the
//! origin and derivatives of invariant tensors, all chart-free.

mod engine;
mod model;

pub use engine::*;
pub use model::HomogeneousModel;
