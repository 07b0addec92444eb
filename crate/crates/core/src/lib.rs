//! Mesh-prior stereo disparity engine.
//!
//! Computes dense disparity from a rectified stereo pair in two passes:
//! a sparse pass census-matches distinctive pixels into support points
//! (ambiguity-tested, redundancy- and consistency-filtered), and a dense
//! pass matches every pixel against a small candidate set derived from
//! those supports, via per-cell disparity masks and a plane prior
//! rasterized from the Delaunay mesh of the support set. The narrow
//! candidate sets make the dense pass both fast and regularized.
//!
//! Two executors compute the same pipeline: [`pipeline::run_batch`] runs
//! whole-frame stages in sequence, and the [`stream`] module runs the
//! pixel-local stages as step-clocked dataflow with line buffers, rings,
//! and delay lines, the way a hardware implementation would. Both produce
//! bitwise identical artifacts at every stage tap; the streaming executor
//! additionally reports step counts matched by a closed-form cycle model.
//!
//! The crate is `no_std` (with `alloc`) so the engine can move onto
//! embedded targets; IO, file formats, and the CLI live in the companion
//! crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod census;
pub mod dense;
pub mod error;
pub mod filter;
pub mod image;
pub mod metric;
pub mod pipeline;
pub mod prior;
pub mod sparse;
pub mod stream;
pub mod synth;

pub use error::{Error, Result};
pub use image::{DisparityMap, GrayImage, GroundTruth};
pub use pipeline::{
    run_pipeline, ExecutorKind, NoopObserver, PipelineArtifacts, PipelineConfig,
    PipelineObserver, Stage,
};
pub use sparse::SupportPoint;
