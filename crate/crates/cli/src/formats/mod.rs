//! File formats for images, disparity maps, and ground truth.

pub mod pfm;
pub mod pgm;
pub mod png16;
