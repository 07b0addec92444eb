//! Flat key=value configuration files for the pipeline.
//!
//! Blank lines and lines starting with `#` are ignored. Every key has a
//! default, so an empty file is a valid config. Unknown keys are errors:
//! a typo must not silently fall back to a default.
//!
//! | key                   | default | meaning                                        |
//! |-----------------------|---------|------------------------------------------------|
//! | sparse_window         | 9       | support census window (odd, 3..=13)            |
//! | dense_window          | 5       | dense census window (odd, 3..=13)              |
//! | disparity_range       | 64      | candidates d in 0..range (max 256)             |
//! | lr_check              | false   | left-right check on support matches            |
//! | lr_check_dense        | false   | left-right check on dense matches              |
//! | downsample            | 1       | support thinning: keep 1/N (1,2,4,8,16,32)     |
//! | grid_size             | 20      | grid vector cell size in pixels                |
//! | neighbor_pooling      | true    | pool grid masks over the 3x3 cell neighborhood |
//! | median_radius         | 1       | post-filter radius (0 disables)                |
//! | consistency_radius    | 10      | neighbor search radius for the support filter  |
//! | consistency_tolerance | 5       | max disparity gap to count as agreeing         |
//! | min_consistent        | 2       | agreeing neighbors required to keep a point    |
//! | redundancy_radius     | 5       | backwards window for the redundancy filter     |
//! | redundancy_tolerance  | 1       | disparity gap treated as redundant             |
//! | executor              | batch   | `batch` or `stream`                            |
//! | frames_in_flight      | 1       | streaming executor frame overlap (1 or 2)      |
//! | pipeline_depth        | 0       | extra register stages in the streaming model   |

use std::path::Path;

use meshstereo_core::sparse::Downsample;
use meshstereo_core::{ExecutorKind, PipelineConfig};

use crate::error::{CliError, Result};

/// Maps a thinning denominator (keep 1/N of the support grid) onto the
/// pipeline's decimation setting.
pub fn downsample_from_denominator(n: u32) -> Option<Downsample> {
    match n {
        1 => Some(Downsample::Full),
        2 => Some(Downsample::Half),
        4 => Some(Downsample::Quarter),
        8 => Some(Downsample::Eighth),
        16 => Some(Downsample::Sixteenth),
        32 => Some(Downsample::ThirtySecond),
        _ => None,
    }
}

/// Applies one `key=value` assignment to the config.
fn apply(cfg: &mut PipelineConfig, key: &str, value: &str, line: usize) -> Result<()> {
    let usage = |msg: String| CliError::Usage(format!("config line {line}: {msg}"));
    macro_rules! parse {
        ($ty:ty) => {
            value
                .parse::<$ty>()
                .map_err(|_| usage(format!("bad value {value:?} for {key}")))?
        };
    }
    let parse_bool = || -> Result<bool> {
        match value {
            "true" | "1" | "on" => Ok(true),
            "false" | "0" | "off" => Ok(false),
            _ => Err(usage(format!("bad value {value:?} for {key} (want true/false)"))),
        }
    };
    match key {
        "sparse_window" => cfg.sparse.window = parse!(usize),
        "dense_window" => cfg.dense.window = parse!(usize),
        "disparity_range" => {
            let range = parse!(u16);
            cfg.sparse.disparity_range = range;
            cfg.dense.disparity_range = range;
        }
        "lr_check" => cfg.sparse.lr_check = parse_bool()?,
        "lr_check_dense" => cfg.dense.lr_check = parse_bool()?,
        "downsample" => {
            cfg.sparse.downsample = value
                .parse::<u32>()
                .ok()
                .and_then(downsample_from_denominator)
                .ok_or_else(|| {
                    usage(format!(
                        "bad value {value:?} for downsample (want 1, 2, 4, 8, 16, or 32)"
                    ))
                })?
        }
        "grid_size" => cfg.grid.cell_size = parse!(u32),
        "neighbor_pooling" => cfg.grid.neighbor_pooling = parse_bool()?,
        "median_radius" => cfg.dense.median_radius = parse!(usize),
        "consistency_radius" => cfg.filter.consistency_radius = parse!(u32),
        "consistency_tolerance" => cfg.filter.consistency_tolerance = parse!(u16),
        "min_consistent" => cfg.filter.min_consistent = parse!(usize),
        "redundancy_radius" => cfg.filter.redundancy_radius = parse!(u32),
        "redundancy_tolerance" => cfg.filter.redundancy_tolerance = parse!(u16),
        "executor" => {
            cfg.executor = match value {
                "batch" => ExecutorKind::Batch,
                "stream" => ExecutorKind::Streaming,
                _ => return Err(usage(format!("unknown executor {value:?}"))),
            }
        }
        "frames_in_flight" => cfg.frames_in_flight = parse!(u8),
        "pipeline_depth" => cfg.pipeline_depth = parse!(usize),
        _ => return Err(usage(format!("unknown key {key:?}"))),
    }
    Ok(())
}

pub fn parse_config(text: &str) -> Result<PipelineConfig> {
    let mut cfg = PipelineConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let stripped = raw.trim();
        if stripped.is_empty() || stripped.starts_with('#') {
            continue;
        }
        let (key, value) = stripped.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {line}: expected key=value, got {stripped:?}"))
        })?;
        apply(&mut cfg, key.trim(), value.trim(), line)?;
    }
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<PipelineConfig> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    parse_config(&text)
}
