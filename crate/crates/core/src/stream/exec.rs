//! Streaming executor: two dataflow groups bridged by whole-frame stages.
//!
//! The frontend group clocks both support census stages, the support
//! matcher, and the redundancy filter one pixel per step. The sequential
//! middle (consistency, downsample, grid vectors, mesh, prior) then runs
//! via the same functions the batch executor calls. The dense group clocks
//! the dense census stages and the candidate-restricted matcher, and the
//! median post-filter closes the frame. Artifacts are bitwise identical to
//! the batch executor at every tap; [`StreamStats`] reports the measured
//! step counts that [`super::cycle::cycle_model`] predicts.
//!
//! Observer protocol: a fused dataflow group's time is attributed to its
//! leading census stage; the other fused stages still emit zero-width
//! begin/end pairs so both executors report the same stage sequence. With
//! two frames in flight only the first frame reports.

use alloc::vec::Vec;

use crate::census::{CensusConfig, CensusField};
use crate::dense::{median_filter, MeshPriorCandidates};
use crate::error::{Error, Result};
use crate::filter::RedundancyFilter;
use crate::image::{DisparityMap, GrayImage};
use crate::pipeline::{
    run_sequential_stages, NoopObserver, PipelineArtifacts, PipelineConfig, PipelineObserver,
    SequentialStages, Stage,
};
use crate::sparse::SupportPoint;
use crate::stream::buffer::DelayLine;
use crate::stream::census::StreamCensus;
use crate::stream::dense::StreamDense;
use crate::stream::sparse::{StreamSparse, SupportSlot};

/// Step accounting for one dataflow group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupStats {
    /// Steps the group ran: one per pixel plus the fill latency.
    pub steps: u64,
    /// Steps from the first pixel in to the first slot out.
    pub fill_latency: u64,
    /// Output slots produced; one per pixel when the group is healthy.
    pub items_out: u64,
    /// Whether slots left on consecutive steps once the first emerged.
    pub one_item_per_step: bool,
    /// Largest number of live image rows buffered at any step.
    pub peak_line_rows: usize,
    /// Row capacity of each line buffer bank (twice the census window).
    pub line_rows_cap: usize,
}

/// Step accounting for one streamed frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamStats {
    pub frontend: GroupStats,
    pub dense: GroupStats,
    /// Dataflow steps for the whole frame. The whole-frame middle stages
    /// run between the groups and take no steps.
    pub total_steps: u64,
}

/// Runs the streaming executor over one stereo pair.
///
/// With `frames_in_flight == 2` a second copy of the frame advances in
/// lockstep, modeling back-to-back frames in the pipeline; its artifacts
/// are checked against the first copy and dropped.
pub fn run_streaming(
    left: &GrayImage,
    right: &GrayImage,
    cfg: &PipelineConfig,
    observer: &mut impl PipelineObserver,
) -> Result<(PipelineArtifacts, StreamStats)> {
    cfg.validate()?;
    if left.width() != right.width() || left.height() != right.height() {
        return Err(Error::ShapeError("left and right images must match in size"));
    }
    if cfg.frames_in_flight == 2 {
        let mut first = FrameMachine::new(left, right, cfg)?;
        let mut second = FrameMachine::new(left, right, cfg)?;
        let mut noop = NoopObserver;
        while !(first.done() && second.done()) {
            if !first.done() {
                first.advance(observer)?;
            }
            if !second.done() {
                second.advance(&mut noop)?;
            }
        }
        let (artifacts, stats) = first.finish();
        let (check, _) = second.finish();
        debug_assert!(artifacts == check, "frames in flight diverged");
        Ok((artifacts, stats))
    } else {
        let mut frame = FrameMachine::new(left, right, cfg)?;
        while !frame.done() {
            frame.advance(observer)?;
        }
        Ok(frame.finish())
    }
}

/// Redundancy filtering as a fixed-latency slot stage.
struct StreamRedundancy {
    filter: RedundancyFilter,
    delay: DelayLine<Option<SupportSlot>>,
}

impl StreamRedundancy {
    fn new(cfg: &PipelineConfig, width: usize) -> StreamRedundancy {
        StreamRedundancy {
            filter: RedundancyFilter::new(cfg.filter, width),
            delay: DelayLine::new(cfg.pipeline_depth),
        }
    }

    fn step(&mut self, input: Option<SupportSlot>) -> Option<SupportSlot> {
        let core = input.map(|slot| slot.filter(|&p| self.filter.push(p)));
        self.delay.push(core).flatten()
    }
}

/// Tracks when slots leave a group.
#[derive(Default)]
struct SlotTracker {
    first: Option<u64>,
    last: u64,
    count: u64,
}

impl SlotTracker {
    fn record(&mut self, t: u64) {
        if self.first.is_none() {
            self.first = Some(t);
        }
        self.last = t;
        self.count += 1;
    }

    fn contiguous(&self) -> bool {
        match self.first {
            Some(f) => self.last - f + 1 == self.count,
            None => false,
        }
    }
}

#[derive(PartialEq, Eq, Clone, Copy)]
enum Phase {
    Frontend,
    Middle,
    Dense,
    Done,
}

/// One frame advancing through the streaming pipeline.
struct FrameMachine<'a> {
    left: &'a GrayImage,
    right: &'a GrayImage,
    cfg: &'a PipelineConfig,
    width: usize,
    pixels: u64,
    phase: Phase,

    cen_l: StreamCensus,
    cen_r: StreamCensus,
    sparse: StreamSparse,
    red: StreamRedundancy,
    census_support_left: CensusField,
    census_support_right: CensusField,
    support_matched: Vec<SupportPoint>,
    t_front: u64,
    front_steps: u64,
    front_fill: u64,
    front_track: SlotTracker,
    front_peak_rows: usize,

    mid: Option<SequentialStages>,

    den_l: StreamCensus,
    den_r: StreamCensus,
    dense: StreamDense,
    census_dense_left: CensusField,
    census_dense_right: CensusField,
    dense_raw: DisparityMap,
    t_dense: u64,
    dense_steps: u64,
    dense_fill: u64,
    dense_track: SlotTracker,
    dense_peak_rows: usize,

    map: Option<DisparityMap>,
}

impl<'a> FrameMachine<'a> {
    fn new(left: &'a GrayImage, right: &'a GrayImage, cfg: &'a PipelineConfig) -> Result<FrameMachine<'a>> {
        let (width, height) = (left.width(), left.height());
        let pixels = (width * height) as u64;
        let depth = cfg.pipeline_depth;
        let support_census = CensusConfig::new(cfg.sparse.window)?;
        let dense_census = CensusConfig::new(cfg.dense.window)?;
        let cen_l = StreamCensus::new(width, height, support_census, depth)?;
        let cen_r = StreamCensus::new(width, height, support_census, depth)?;
        let sparse = StreamSparse::new(width, height, &cfg.sparse, depth)?;
        let den_l = StreamCensus::new(width, height, dense_census, depth)?;
        let den_r = StreamCensus::new(width, height, dense_census, depth)?;
        let dense = StreamDense::new(width, height, &cfg.dense, depth)?;
        let front_fill = cen_l.fill_latency(depth) + sparse.fill_latency(depth) + depth as u64;
        let dense_fill = den_l.fill_latency(depth) + dense.fill_latency(depth);
        Ok(FrameMachine {
            left,
            right,
            cfg,
            width,
            pixels,
            phase: Phase::Frontend,
            cen_l,
            cen_r,
            sparse,
            red: StreamRedundancy::new(cfg, width),
            census_support_left: CensusField::new_zeroed(width, height, cfg.sparse.window),
            census_support_right: CensusField::new_zeroed(width, height, cfg.sparse.window),
            support_matched: Vec::new(),
            t_front: 0,
            front_steps: pixels + front_fill,
            front_fill,
            front_track: SlotTracker::default(),
            front_peak_rows: 0,
            mid: None,
            den_l,
            den_r,
            dense,
            census_dense_left: CensusField::new_zeroed(width, height, cfg.dense.window),
            census_dense_right: CensusField::new_zeroed(width, height, cfg.dense.window),
            dense_raw: DisparityMap::new_invalid(width, height),
            t_dense: 0,
            dense_steps: pixels + dense_fill,
            dense_fill,
            dense_track: SlotTracker::default(),
            dense_peak_rows: 0,
            map: None,
        })
    }

    fn done(&self) -> bool {
        self.phase == Phase::Done
    }

    /// One step of the current dataflow group, or the whole sequential
    /// middle when the frame sits between groups.
    fn advance(&mut self, observer: &mut impl PipelineObserver) -> Result<()> {
        match self.phase {
            Phase::Frontend => {
                self.step_frontend(observer);
                Ok(())
            }
            Phase::Middle => self.run_middle(observer),
            Phase::Dense => {
                self.step_dense(observer);
                Ok(())
            }
            Phase::Done => Ok(()),
        }
    }

    fn step_frontend(&mut self, observer: &mut impl PipelineObserver) {
        let t = self.t_front;
        if t == 0 {
            observer.stage_begin(Stage::SupportCensus);
        }
        self.t_front += 1;
        let i = t as usize;
        let sl = self.cen_l.step(self.left.pixels().get(i).copied());
        let sr = self.cen_r.step(self.right.pixels().get(i).copied());
        self.front_peak_rows = self
            .front_peak_rows
            .max(self.cen_l.rows_live())
            .max(self.cen_r.rows_live());
        let paired = match (sl, sr) {
            (Some((p, a)), Some((q, b))) => {
                debug_assert_eq!(p, q, "census stages fell out of lockstep");
                self.census_support_left.set(p % self.width, p / self.width, a);
                self.census_support_right.set(p % self.width, p / self.width, b);
                Some((p, a, b))
            }
            (None, None) => None,
            _ => unreachable!("census stages share fill latency"),
        };
        let slot = self.sparse.step(paired);
        if let Some(slot) = self.red.step(slot) {
            self.front_track.record(t);
            if let Some(point) = slot {
                self.support_matched.push(point);
            }
        }
        if self.t_front == self.front_steps {
            debug_assert_eq!(self.front_track.count, self.pixels);
            debug_assert_eq!(self.front_track.first, Some(self.front_fill));
            observer.stage_end(Stage::SupportCensus);
            observer.stage_begin(Stage::SupportMatch);
            observer.stage_end(Stage::SupportMatch);
            observer.stage_begin(Stage::Redundancy);
            observer.stage_end(Stage::Redundancy);
            self.phase = Phase::Middle;
        }
    }

    fn run_middle(&mut self, observer: &mut impl PipelineObserver) -> Result<()> {
        let mid = run_sequential_stages(
            self.census_support_left.width(),
            self.census_support_left.height(),
            &self.support_matched,
            self.cfg,
            observer,
        )?;
        self.mid = Some(mid);
        self.phase = Phase::Dense;
        Ok(())
    }

    fn step_dense(&mut self, observer: &mut impl PipelineObserver) {
        let t = self.t_dense;
        if t == 0 {
            observer.stage_begin(Stage::DenseCensus);
        }
        self.t_dense += 1;
        let i = t as usize;
        let sl = self.den_l.step(self.left.pixels().get(i).copied());
        let sr = self.den_r.step(self.right.pixels().get(i).copied());
        self.dense_peak_rows = self
            .dense_peak_rows
            .max(self.den_l.rows_live())
            .max(self.den_r.rows_live());
        let paired = match (sl, sr) {
            (Some((p, a)), Some((q, b))) => {
                debug_assert_eq!(p, q, "census stages fell out of lockstep");
                self.census_dense_left.set(p % self.width, p / self.width, a);
                self.census_dense_right.set(p % self.width, p / self.width, b);
                Some((p, a, b))
            }
            (None, None) => None,
            _ => unreachable!("census stages share fill latency"),
        };
        let mid = self.mid.as_ref().expect("middle ran before the dense group");
        let provider = MeshPriorCandidates {
            grid: &mid.grid,
            prior: mid.prior.as_ref(),
        };
        if let Some((p, choice)) = self.dense.step(&provider, paired) {
            self.dense_track.record(t);
            if let Some(d) = choice {
                self.dense_raw.set(p % self.width, p / self.width, d);
            }
        }
        if self.t_dense == self.dense_steps {
            debug_assert_eq!(self.dense_track.count, self.pixels);
            debug_assert_eq!(self.dense_track.first, Some(self.dense_fill));
            observer.stage_end(Stage::DenseCensus);
            observer.stage_begin(Stage::DenseMatch);
            observer.stage_end(Stage::DenseMatch);
            observer.stage_begin(Stage::Median);
            self.map = Some(median_filter(&self.dense_raw, self.cfg.dense.median_radius));
            observer.stage_end(Stage::Median);
            self.phase = Phase::Done;
        }
    }

    fn finish(self) -> (PipelineArtifacts, StreamStats) {
        debug_assert!(self.done());
        let stats = StreamStats {
            frontend: GroupStats {
                steps: self.front_steps,
                fill_latency: self.front_fill,
                items_out: self.front_track.count,
                one_item_per_step: self.front_track.contiguous(),
                peak_line_rows: self.front_peak_rows,
                line_rows_cap: self.cen_l.rows_capacity(),
            },
            dense: GroupStats {
                steps: self.dense_steps,
                fill_latency: self.dense_fill,
                items_out: self.dense_track.count,
                one_item_per_step: self.dense_track.contiguous(),
                peak_line_rows: self.dense_peak_rows,
                line_rows_cap: self.den_l.rows_capacity(),
            },
            total_steps: self.front_steps + self.dense_steps,
        };
        let mid = self.mid.expect("finished frame has middle artifacts");
        let artifacts = PipelineArtifacts {
            census_support_left: self.census_support_left,
            census_support_right: self.census_support_right,
            support_matched: self.support_matched,
            support: mid.support,
            grid: mid.grid,
            mesh: mid.mesh,
            prior: mid.prior,
            census_dense_left: self.census_dense_left,
            census_dense_right: self.census_dense_right,
            dense_raw: self.dense_raw,
            map: self.map.expect("finished frame has a disparity map"),
        };
        (artifacts, stats)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::run_batch;
    use crate::synth::shifted_pair;

    #[test]
    fn streaming_equals_batch_on_default_config() {
        let (l, r) = shifted_pair(96, 40, 8, 21);
        let cfg = PipelineConfig::default();
        let batch = run_batch(&l, &r, &cfg, &mut NoopObserver).unwrap();
        let (streamed, stats) = run_streaming(&l, &r, &cfg, &mut NoopObserver).unwrap();
        assert!(streamed == batch);
        assert_eq!(stats.frontend.items_out, 96 * 40u64);
        assert!(stats.frontend.one_item_per_step);
        assert!(stats.dense.one_item_per_step);
        assert_eq!(stats.total_steps, stats.frontend.steps + stats.dense.steps);
    }

    #[test]
    fn two_frames_in_flight_match_one() {
        let (l, r) = shifted_pair(80, 30, 5, 3);
        let mut cfg = PipelineConfig::default();
        cfg.sparse.disparity_range = 32;
        cfg.dense.disparity_range = 32;
        cfg.executor = crate::pipeline::ExecutorKind::Streaming;
        let (one, stats_one) = run_streaming(&l, &r, &cfg, &mut NoopObserver).unwrap();
        cfg.frames_in_flight = 2;
        let (two, stats_two) = run_streaming(&l, &r, &cfg, &mut NoopObserver).unwrap();
        assert!(one == two);
        assert_eq!(stats_one, stats_two);
    }

    #[test]
    fn fill_latencies_include_depth_on_every_stage() {
        let (l, r) = shifted_pair(64, 24, 4, 9);
        let mut cfg = PipelineConfig::default();
        cfg.sparse.disparity_range = 16;
        cfg.dense.disparity_range = 16;
        let (_, base) = run_streaming(&l, &r, &cfg, &mut NoopObserver).unwrap();
        cfg.pipeline_depth = 3;
        let (_, deep) = run_streaming(&l, &r, &cfg, &mut NoopObserver).unwrap();
        // Three frontend stages and two dense-group stages, three extra
        // registers each.
        assert_eq!(deep.frontend.fill_latency, base.frontend.fill_latency + 9);
        assert_eq!(deep.dense.fill_latency, base.dense.fill_latency + 6);
        assert_eq!(
            deep.total_steps,
            base.total_steps + 15,
        );
    }

    #[test]
    fn line_buffers_stay_within_capacity() {
        let (l, r) = shifted_pair(50, 40, 3, 5);
        let cfg = PipelineConfig::default();
        let (_, stats) = run_streaming(&l, &r, &cfg, &mut NoopObserver).unwrap();
        assert!(stats.frontend.peak_line_rows <= stats.frontend.line_rows_cap);
        assert_eq!(stats.frontend.line_rows_cap, 2 * cfg.sparse.window);
        assert_eq!(stats.frontend.peak_line_rows, 2 * cfg.sparse.window);
        assert_eq!(stats.dense.line_rows_cap, 2 * cfg.dense.window);
    }

    #[test]
    fn mismatched_image_sizes_are_rejected() {
        let (l, _) = shifted_pair(40, 30, 3, 1);
        let (r, _) = shifted_pair(42, 30, 3, 1);
        assert!(matches!(
            run_streaming(&l, &r, &PipelineConfig::default(), &mut NoopObserver),
            Err(Error::ShapeError(_))
        ));
    }
}
