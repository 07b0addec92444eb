//! Report writers: CSV for `eval` and `sweep`, JSON for `bench`.

use meshstereo_core::stream::{PipelineSchedule, StreamStage, StreamStats};
use serde_json::{json, Value};

use crate::timing::StageTimer;

/// Per-image evaluation result against ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub name: String,
    /// Bad-pixel % over pixels valid in both estimate and ground truth.
    pub bad_pct: f64,
    /// Bad-pixel % over all ground-truth pixels (missing estimates count
    /// as bad).
    pub bad_pct_all: f64,
    /// Estimate coverage % of ground-truth pixels.
    pub density_pct: f64,
    pub compared: usize,
}

pub fn eval_csv(rows: &[EvalRow]) -> String {
    let mut out = String::from("image,bad_pct,bad_pct_all,density_pct,compared\n");
    for r in rows {
        out.push_str(&format!(
            "{},{:.4},{:.4},{:.4},{}\n",
            r.name, r.bad_pct, r.bad_pct_all, r.density_pct, r.compared
        ));
    }
    out
}

/// One configuration of a parameter sweep, averaged over the dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sparse_window: usize,
    pub dense_window: usize,
    pub downsample: u32,
    pub error_pct: f64,
    pub density_pct: f64,
    pub ms_per_frame: f64,
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out =
        String::from("sparse_window,dense_window,downsample,error_pct,density_pct,ms_per_frame\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{:.4},{:.4},{:.3}\n",
            r.sparse_window, r.dense_window, r.downsample, r.error_pct, r.density_pct,
            r.ms_per_frame
        ));
    }
    out
}

fn stream_stage_name(stage: StreamStage) -> &'static str {
    match stage {
        StreamStage::SupportCensus => "support_census",
        StreamStage::SupportMatch => "support_match",
        StreamStage::Redundancy => "redundancy",
        StreamStage::DenseCensus => "dense_census",
        StreamStage::DenseMatch => "dense_match",
    }
}

fn schedule_json(schedule: &PipelineSchedule) -> Value {
    json!({
        "frontend_steps": schedule.frontend_steps,
        "dense_steps": schedule.dense_steps,
        "total_steps": schedule.total_steps,
        "stages": schedule
            .stages
            .iter()
            .map(|m| {
                json!({
                    "stage": stream_stage_name(m.stage),
                    "fill_latency_steps": m.fill_latency_steps,
                    "steps_per_frame": m.steps_per_frame,
                })
            })
            .collect::<Vec<_>>(),
    })
}

/// Benchmark report. `stream` carries the measured step counts and the
/// analytic schedule when the streaming executor ran.
#[allow(clippy::too_many_arguments)]
pub fn bench_json(
    width: usize,
    height: usize,
    executor: &str,
    frames_in_flight: u8,
    iterations: usize,
    warmup: usize,
    timer: &StageTimer,
    stream: Option<(&StreamStats, &PipelineSchedule)>,
) -> Value {
    let iters = iterations.max(1) as f64;
    let stage_ms: serde_json::Map<String, Value> = timer
        .stage_millis()
        .into_iter()
        .map(|(name, ms)| (name.to_string(), json!(ms / iters)))
        .collect();
    let total_ms = timer.total().as_secs_f64() * 1e3 / iters;
    let mut report = json!({
        "image": { "width": width, "height": height },
        "executor": executor,
        "frames_in_flight": frames_in_flight,
        "iterations": iterations,
        "warmup": warmup,
        "stage_ms": stage_ms,
        "total_ms_per_frame": total_ms,
        "fps": if total_ms > 0.0 { 1e3 / total_ms } else { 0.0 },
    });
    if let Some((stats, schedule)) = stream {
        report["stream"] = json!({
            "measured": {
                "frontend_steps": stats.frontend.steps,
                "frontend_fill_latency": stats.frontend.fill_latency,
                "dense_steps": stats.dense.steps,
                "dense_fill_latency": stats.dense.fill_latency,
                "total_steps": stats.total_steps,
            },
            "model": schedule_json(schedule),
            "model_matches": stats.total_steps == schedule.total_steps
                && stats.frontend.steps == schedule.frontend_steps
                && stats.dense.steps == schedule.dense_steps,
        });
    }
    report
}
