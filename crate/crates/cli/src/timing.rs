//! Wall-clock timing of pipeline stages through the observer hooks.

use std::time::{Duration, Instant};

use meshstereo_core::{PipelineObserver, Stage};

/// Every stage in execution order; also the display order of reports.
pub const ALL_STAGES: [Stage; 11] = [
    Stage::SupportCensus,
    Stage::SupportMatch,
    Stage::Redundancy,
    Stage::Consistency,
    Stage::Downsample,
    Stage::GridVectors,
    Stage::MeshBuild,
    Stage::PriorRaster,
    Stage::DenseCensus,
    Stage::DenseMatch,
    Stage::Median,
];

pub fn stage_name(stage: Stage) -> &'static str {
    match stage {
        Stage::SupportCensus => "support_census",
        Stage::SupportMatch => "support_match",
        Stage::Redundancy => "redundancy",
        Stage::Consistency => "consistency",
        Stage::Downsample => "downsample",
        Stage::GridVectors => "grid_vectors",
        Stage::MeshBuild => "mesh_build",
        Stage::PriorRaster => "prior_raster",
        Stage::DenseCensus => "dense_census",
        Stage::DenseMatch => "dense_match",
        Stage::Median => "median",
    }
}

fn index(stage: Stage) -> usize {
    ALL_STAGES.iter().position(|&s| s == stage).unwrap()
}

/// Accumulates time between `stage_begin` and `stage_end` per stage,
/// across as many pipeline runs as it observes.
#[derive(Default)]
pub struct StageTimer {
    open: Vec<(Stage, Instant)>,
    accum: [Duration; 11],
}

impl StageTimer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Accumulated time for one stage.
    pub fn stage_total(&self, stage: Stage) -> Duration {
        self.accum[index(stage)]
    }

    /// Sum over all stages.
    pub fn total(&self) -> Duration {
        self.accum.iter().sum()
    }

    /// `(name, milliseconds)` per stage in execution order.
    pub fn stage_millis(&self) -> Vec<(&'static str, f64)> {
        ALL_STAGES
            .iter()
            .map(|&s| (stage_name(s), self.stage_total(s).as_secs_f64() * 1e3))
            .collect()
    }
}

impl PipelineObserver for StageTimer {
    fn stage_begin(&mut self, stage: Stage) {
        self.open.push((stage, Instant::now()));
    }

    fn stage_end(&mut self, stage: Stage) {
        let (begun, at) = self.open.pop().expect("stage_end without stage_begin");
        debug_assert_eq!(begun, stage);
        self.accum[index(stage)] += at.elapsed();
    }
}
