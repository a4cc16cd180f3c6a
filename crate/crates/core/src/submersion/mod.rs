//! Horizontal/vertical splittings of homogeneous points: O'Neill tensors,
//! canonical variation, the fiber flip of the complex structure and the
//! codimension-two structure of the flipped point.

mod codim2;
mod split;
mod twistor;

pub use codim2::*;
pub use split::{
    assembled_variation, assembled_variation_check, kahler_submersion_conditions, oneill_checks, variation_checks,
    OneillTensors, SubmersionSplit,
};
pub use twistor::*;
