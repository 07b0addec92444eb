//! End-to-end disparity pipeline.
//!
//! Stage order is fixed and shared by both executors:
//!
//! 1. support census on both views
//! 2. sparse support matching with the ambiguity test
//! 3. backwards redundancy filtering (in-stream)
//! 4. consistency filtering (whole-frame)
//! 5. support downsampling
//! 6. grid vector construction
//! 7. mesh triangulation and prior rasterization
//! 8. dense census on both views
//! 9. prior-restricted dense matching
//! 10. median post-filter
//!
//! The batch executor runs each stage to completion over plain arrays.
//! The streaming executor (see [`crate::stream`]) runs stages 1-3 and
//! 8-9 as pixel-per-step dataflow with line buffers and delay lines, and
//! stages 4-7 and 10 as whole-frame passes between the two groups. Both
//! must produce bitwise identical artifacts at every tap; the batch form
//! is the reference.

use alloc::vec::Vec;

use crate::census::{census_transform, CensusConfig, CensusField};
use crate::dense::{dense_match, median_filter, DenseConfig, MeshPriorCandidates};
use crate::error::{Error, Result};
use crate::filter::{consistency_filter, redundancy_filter_backwards, FilterConfig};
use crate::image::{DisparityMap, GrayImage};
use crate::prior::delaunay::{triangulate, Mesh};
use crate::prior::grid::{build_grid_vectors, GridConfig, GridVectorField};
use crate::prior::raster::{rasterize_prior, PlanePriorMatrix};
use crate::sparse::{downsample_support, match_support, SparseConfig, SupportPoint};

/// Which executor computes the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExecutorKind {
    #[default]
    Batch,
    Streaming,
}

/// Pipeline stages, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    SupportCensus,
    SupportMatch,
    Redundancy,
    Consistency,
    Downsample,
    GridVectors,
    MeshBuild,
    PriorRaster,
    DenseCensus,
    DenseMatch,
    Median,
}

/// Receives stage begin/end callbacks; use it for timing or tracing.
pub trait PipelineObserver {
    fn stage_begin(&mut self, _stage: Stage) {}
    fn stage_end(&mut self, _stage: Stage) {}
}

/// Observer that does nothing.
pub struct NoopObserver;

impl PipelineObserver for NoopObserver {}

/// Full pipeline configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineConfig {
    pub sparse: SparseConfig,
    pub filter: FilterConfig,
    pub grid: GridConfig,
    pub dense: DenseConfig,
    pub executor: ExecutorKind,
    /// Frames processed concurrently by the streaming executor (1 or 2).
    pub frames_in_flight: u8,
    /// Extra register stages modeled on every streaming stage.
    pub pipeline_depth: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            sparse: SparseConfig::default(),
            filter: FilterConfig::default(),
            grid: GridConfig::default(),
            dense: DenseConfig::default(),
            executor: ExecutorKind::Batch,
            frames_in_flight: 1,
            pipeline_depth: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sparse.disparity_range != self.dense.disparity_range {
            return Err(Error::InvalidConfig(
                "sparse and dense stages must search the same disparity range",
            ));
        }
        if !(1..=2).contains(&self.frames_in_flight) {
            return Err(Error::InvalidConfig("frames_in_flight must be 1 or 2"));
        }
        Ok(())
    }
}

/// Every intermediate the pipeline produces, for inspection and for
/// executor equivalence checks. `mesh` and `prior` are `None` when the
/// support set cannot be triangulated; dense matching then falls back to
/// grid-vector candidates alone.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineArtifacts {
    pub census_support_left: CensusField,
    pub census_support_right: CensusField,
    /// Support stream after matching and redundancy filtering.
    pub support_matched: Vec<SupportPoint>,
    /// Final support set: consistency-filtered and downsampled.
    pub support: Vec<SupportPoint>,
    pub grid: GridVectorField,
    pub mesh: Option<Mesh>,
    pub prior: Option<PlanePriorMatrix>,
    pub census_dense_left: CensusField,
    pub census_dense_right: CensusField,
    /// Dense map before the median filter.
    pub dense_raw: DisparityMap,
    /// Final disparity map.
    pub map: DisparityMap,
}

/// Runs the pipeline with the executor named in the configuration.
pub fn run_pipeline(
    left: &GrayImage,
    right: &GrayImage,
    cfg: &PipelineConfig,
    observer: &mut impl PipelineObserver,
) -> Result<PipelineArtifacts> {
    match cfg.executor {
        ExecutorKind::Batch => run_batch(left, right, cfg, observer),
        ExecutorKind::Streaming => {
            crate::stream::run_streaming(left, right, cfg, observer).map(|(a, _)| a)
        }
    }
}

/// Whole-frame reference executor.
pub fn run_batch(
    left: &GrayImage,
    right: &GrayImage,
    cfg: &PipelineConfig,
    observer: &mut impl PipelineObserver,
) -> Result<PipelineArtifacts> {
    cfg.validate()?;
    let support_cfg = CensusConfig::new(cfg.sparse.window)?;

    observer.stage_begin(Stage::SupportCensus);
    let census_support_left = census_transform(left, support_cfg)?;
    let census_support_right = census_transform(right, support_cfg)?;
    observer.stage_end(Stage::SupportCensus);

    observer.stage_begin(Stage::SupportMatch);
    let raw = match_support(&census_support_left, &census_support_right, &cfg.sparse)?;
    observer.stage_end(Stage::SupportMatch);

    observer.stage_begin(Stage::Redundancy);
    let support_matched = redundancy_filter_backwards(&raw, &cfg.filter);
    observer.stage_end(Stage::Redundancy);

    let mid = run_sequential_stages(left.width(), left.height(), &support_matched, cfg, observer)?;

    let dense_cfg = CensusConfig::new(cfg.dense.window)?;
    observer.stage_begin(Stage::DenseCensus);
    let census_dense_left = census_transform(left, dense_cfg)?;
    let census_dense_right = census_transform(right, dense_cfg)?;
    observer.stage_end(Stage::DenseCensus);

    observer.stage_begin(Stage::DenseMatch);
    let provider = MeshPriorCandidates {
        grid: &mid.grid,
        prior: mid.prior.as_ref(),
    };
    let dense_raw = dense_match(&census_dense_left, &census_dense_right, &provider, &cfg.dense)?;
    observer.stage_end(Stage::DenseMatch);

    observer.stage_begin(Stage::Median);
    let map = median_filter(&dense_raw, cfg.dense.median_radius);
    observer.stage_end(Stage::Median);

    Ok(PipelineArtifacts {
        census_support_left,
        census_support_right,
        support_matched,
        support: mid.support,
        grid: mid.grid,
        mesh: mid.mesh,
        prior: mid.prior,
        census_dense_left,
        census_dense_right,
        dense_raw,
        map,
    })
}

/// Output of the whole-frame stages between the two dataflow groups.
pub(crate) struct SequentialStages {
    pub support: Vec<SupportPoint>,
    pub grid: GridVectorField,
    pub mesh: Option<Mesh>,
    pub prior: Option<PlanePriorMatrix>,
}

/// Runs stages 4-7 (consistency, downsample, grid vectors, mesh, prior).
/// Shared verbatim by both executors so the sequential stages cannot
/// diverge.
pub(crate) fn run_sequential_stages(
    width: usize,
    height: usize,
    support_matched: &[SupportPoint],
    cfg: &PipelineConfig,
    observer: &mut impl PipelineObserver,
) -> Result<SequentialStages> {
    observer.stage_begin(Stage::Consistency);
    let consistent = consistency_filter(support_matched, &cfg.filter);
    observer.stage_end(Stage::Consistency);

    observer.stage_begin(Stage::Downsample);
    let support = downsample_support(&consistent, cfg.sparse.downsample);
    observer.stage_end(Stage::Downsample);

    observer.stage_begin(Stage::GridVectors);
    let grid = build_grid_vectors(&support, width, height, cfg.sparse.disparity_range, &cfg.grid)?;
    observer.stage_end(Stage::GridVectors);

    observer.stage_begin(Stage::MeshBuild);
    let mesh = match triangulate(&support) {
        Ok(mesh) => Some(mesh),
        Err(Error::DegenerateInput) => None,
        Err(e) => return Err(e),
    };
    observer.stage_end(Stage::MeshBuild);

    observer.stage_begin(Stage::PriorRaster);
    let prior = mesh.as_ref().map(|m| rasterize_prior(m, width, height));
    observer.stage_end(Stage::PriorRaster);

    Ok(SequentialStages {
        support,
        grid,
        mesh,
        prior,
    })
}
