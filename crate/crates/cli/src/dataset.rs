//! Dataset discovery for the `eval` and `sweep` commands.
//!
//! Two directory layouts are recognized:
//!
//! * `image_2/` + `image_3/` (the KITTI arrangement, left and right), with
//!   ground truth autodetected in `disp_noc_0/` when present;
//! * `left/` + `right/`.
//!
//! Images are 8-bit PGM and pairs are matched by file name. Ground truth
//! is a 16-bit PNG named after the image stem. An explicit `--gt` directory
//! overrides autodetection.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetPair {
    /// Image stem, e.g. `000003_10`.
    pub name: String,
    pub left: PathBuf,
    pub right: PathBuf,
    pub gt: Option<PathBuf>,
}

fn pgm_stems(dir: &Path) -> Result<BTreeMap<String, PathBuf>> {
    let mut out = BTreeMap::new();
    let entries =
        std::fs::read_dir(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
    for entry in entries {
        let path = entry.map_err(|e| CliError::Io(dir.to_path_buf(), e))?.path();
        if path.extension().and_then(|e| e.to_str()) == Some("pgm") {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                out.insert(stem.to_string(), path);
            }
        }
    }
    Ok(out)
}

/// Finds all left/right pairs under `dataset`, sorted by name.
pub fn discover_pairs(dataset: &Path, gt_override: Option<&Path>) -> Result<Vec<DatasetPair>> {
    let kitti = (dataset.join("image_2"), dataset.join("image_3"));
    let plain = (dataset.join("left"), dataset.join("right"));
    let (left_dir, right_dir, auto_gt) = if kitti.0.is_dir() && kitti.1.is_dir() {
        let gt = dataset.join("disp_noc_0");
        (kitti.0, kitti.1, gt.is_dir().then_some(gt))
    } else if plain.0.is_dir() && plain.1.is_dir() {
        (plain.0, plain.1, None)
    } else {
        return Err(CliError::Usage(format!(
            "dataset {} must contain image_2/ and image_3/, or left/ and right/",
            dataset.display()
        )));
    };
    let gt_dir = gt_override.map(Path::to_path_buf).or(auto_gt);

    let lefts = pgm_stems(&left_dir)?;
    let rights = pgm_stems(&right_dir)?;
    let pairs: Vec<DatasetPair> = lefts
        .into_iter()
        .filter_map(|(name, left)| {
            let right = rights.get(&name)?.clone();
            let gt = gt_dir
                .as_deref()
                .map(|d| d.join(format!("{name}.png")))
                .filter(|p| p.is_file());
            Some(DatasetPair { name, left, right, gt })
        })
        .collect();
    if pairs.is_empty() {
        return Err(CliError::Usage(format!(
            "no left/right PGM pairs found under {}",
            dataset.display()
        )));
    }
    Ok(pairs)
}
