//! Streaming dataflow executor.
//!
//! Reimplements the pipeline's pixel-parallelizable stages as step-clocked
//! dataflow: census transforms over line buffers, the support and dense
//! matchers over descriptor rings and winner banks, and the redundancy
//! filter in-stream. The whole-frame stages in between (consistency
//! through prior rasterization, plus the median) run through the exact
//! functions the batch executor uses. For any input and configuration the
//! two executors produce bitwise identical artifacts at every tap, while
//! [`exec::StreamStats`] exposes the step counts and buffer occupancy the
//! hardware-oriented [`cycle::cycle_model`] predicts.

pub mod buffer;
pub mod census;
pub mod cycle;
pub mod dense;
pub mod exec;
pub mod sparse;

pub use cycle::{cycle_model, PipelineSchedule, StageModel, StreamStage};
pub use exec::{run_streaming, GroupStats, StreamStats};
