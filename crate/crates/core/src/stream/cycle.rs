//! Closed-form step model of the streaming executor.
//!
//! Every dataflow stage consumes and produces one slot per step at steady
//! state, so a stage is characterized by its fill latency alone and a
//! group's step count is `pixels + sum(fill latencies)`. The model must
//! agree exactly with the counts [`super::exec::run_streaming`] measures;
//! the tests drive both and compare.

use alloc::vec::Vec;

use crate::pipeline::PipelineConfig;

/// Dataflow stages of the streaming executor, in clock order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamStage {
    SupportCensus,
    SupportMatch,
    Redundancy,
    DenseCensus,
    DenseMatch,
}

/// Step behavior of one dataflow stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageModel {
    pub stage: StreamStage,
    /// Steps from the stage's first input to its first output.
    pub fill_latency_steps: u64,
    /// Steps the stage needs per frame at steady state (one per pixel,
    /// independent of the disparity range and the window).
    pub steps_per_frame: u64,
}

/// Per-frame schedule of the streaming executor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineSchedule {
    pub stages: Vec<StageModel>,
    /// Steps of the frontend group: pixels plus its stages' fills.
    pub frontend_steps: u64,
    /// Steps of the dense group: pixels plus its stages' fills.
    pub dense_steps: u64,
    /// Dataflow steps per frame.
    pub total_steps: u64,
}

impl PipelineSchedule {
    pub fn stage(&self, stage: StreamStage) -> &StageModel {
        self.stages
            .iter()
            .find(|m| m.stage == stage)
            .expect("every dataflow stage is modeled")
    }
}

/// Predicts the step counts of the streaming executor for a frame size
/// and configuration.
pub fn cycle_model(width: usize, height: usize, cfg: &PipelineConfig) -> PipelineSchedule {
    let pixels = (width as u64) * (height as u64);
    let depth = cfg.pipeline_depth as u64;
    let d = cfg.sparse.disparity_range as u64;
    let census_fill = |window: usize| {
        let r = (window / 2) as u64;
        r * width as u64 + r + depth
    };
    let lr_fill = |lr: bool| if lr { d - 1 } else { 0 } + depth;
    let stages = alloc::vec![
        StageModel {
            stage: StreamStage::SupportCensus,
            fill_latency_steps: census_fill(cfg.sparse.window),
            steps_per_frame: pixels,
        },
        StageModel {
            stage: StreamStage::SupportMatch,
            fill_latency_steps: lr_fill(cfg.sparse.lr_check),
            steps_per_frame: pixels,
        },
        StageModel {
            stage: StreamStage::Redundancy,
            fill_latency_steps: depth,
            steps_per_frame: pixels,
        },
        StageModel {
            stage: StreamStage::DenseCensus,
            fill_latency_steps: census_fill(cfg.dense.window),
            steps_per_frame: pixels,
        },
        StageModel {
            stage: StreamStage::DenseMatch,
            fill_latency_steps: lr_fill(cfg.dense.lr_check),
            steps_per_frame: pixels,
        },
    ];
    let frontend_steps = pixels
        + stages[0].fill_latency_steps
        + stages[1].fill_latency_steps
        + stages[2].fill_latency_steps;
    let dense_steps = pixels + stages[3].fill_latency_steps + stages[4].fill_latency_steps;
    PipelineSchedule {
        stages,
        frontend_steps,
        dense_steps,
        total_steps: frontend_steps + dense_steps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::NoopObserver;
    use crate::stream::exec::run_streaming;
    use crate::synth::shifted_pair;

    #[test]
    fn model_matches_measured_steps_exactly() {
        let mut cfg = PipelineConfig::default();
        cfg.sparse.disparity_range = 32;
        cfg.dense.disparity_range = 32;
        for (w, h, lr, depth) in [
            (64usize, 32usize, false, 0usize),
            (57, 41, true, 0),
            (48, 30, true, 4),
            (80, 25, false, 2),
        ] {
            cfg.sparse.lr_check = lr;
            cfg.dense.lr_check = lr;
            cfg.pipeline_depth = depth;
            let (l, r) = shifted_pair(w, h, 3, 11);
            let (_, stats) = run_streaming(&l, &r, &cfg, &mut NoopObserver).unwrap();
            let model = cycle_model(w, h, &cfg);
            assert_eq!(model.frontend_steps, stats.frontend.steps, "{w}x{h} lr={lr} depth={depth}");
            assert_eq!(model.dense_steps, stats.dense.steps);
            assert_eq!(model.total_steps, stats.total_steps);
            assert_eq!(
                model.stage(StreamStage::SupportCensus).fill_latency_steps
                    + model.stage(StreamStage::SupportMatch).fill_latency_steps
                    + model.stage(StreamStage::Redundancy).fill_latency_steps,
                stats.frontend.fill_latency
            );
            assert_eq!(
                model.stage(StreamStage::DenseCensus).fill_latency_steps
                    + model.stage(StreamStage::DenseMatch).fill_latency_steps,
                stats.dense.fill_latency
            );
        }
    }

    #[test]
    fn steps_per_frame_do_not_depend_on_range_or_window() {
        let mut a = PipelineConfig::default();
        let mut b = PipelineConfig::default();
        b.sparse.disparity_range = 256;
        b.dense.disparity_range = 256;
        b.sparse.window = 13;
        b.dense.window = 3;
        let ma = cycle_model(640, 480, &a);
        let mb = cycle_model(640, 480, &b);
        for (sa, sb) in ma.stages.iter().zip(&mb.stages) {
            assert_eq!(sa.steps_per_frame, sb.steps_per_frame);
            assert_eq!(sa.steps_per_frame, 640 * 480u64);
        }
        // Fills change, throughput does not.
        a.sparse.lr_check = true;
        let mc = cycle_model(640, 480, &a);
        assert!(mc.stage(StreamStage::SupportMatch).fill_latency_steps > 0);
        assert_eq!(mc.stage(StreamStage::SupportMatch).steps_per_frame, 640 * 480u64);
    }

    #[test]
    fn total_steps_scale_with_resolution() {
        let cfg = PipelineConfig::default();
        let big = cycle_model(1242, 375, &cfg);
        let small = cycle_model(640, 480, &cfg);
        let measured = big.total_steps as f64 / small.total_steps as f64;
        let pixels = (1242.0 * 375.0) / (640.0 * 480.0);
        let deviation = (measured / pixels - 1.0).abs();
        assert!(deviation < 0.01, "deviation {deviation}");
    }
}
