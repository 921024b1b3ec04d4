//! Fully dynamic minimum / maximum spanning forest.

mod ett;
mod msf;

pub use ett::EulerForest;
pub use msf::{ForestDelta, ForestMode, MsfInstance};
