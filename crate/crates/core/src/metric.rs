//! Disparity error metrics.
//!
//! A pixel counts as bad when the estimate misses the ground truth by at
//! least 3 disparities AND by at least 5 percent of the true value; both
//! conditions must hold, so large disparities tolerate proportionally
//! larger absolute error. Rates are reported two ways: over the pixels
//! where both estimate and ground truth are valid (with the density
//! alongside), and over all ground-truth pixels with missing estimates
//! counted as bad.

use crate::error::{Error, Result};
use crate::image::{DisparityMap, GroundTruth};

/// Absolute error threshold for a bad pixel.
pub const BAD_ABS: f64 = 3.0;
/// Relative error threshold for a bad pixel.
pub const BAD_REL: f64 = 0.05;

/// Counts behind the bad-pixel rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BadPixelStats {
    /// Pixels where both the estimate and the ground truth are valid.
    pub compared: usize,
    /// Bad pixels among `compared`.
    pub bad: usize,
    /// Pixels where the ground truth is valid.
    pub gt_valid: usize,
}

impl BadPixelStats {
    /// Bad-pixel rate over the jointly valid pixels.
    pub fn error_rate(&self) -> f64 {
        if self.compared == 0 {
            0.0
        } else {
            self.bad as f64 / self.compared as f64
        }
    }

    /// Bad-pixel rate over all ground-truth pixels; estimates missing
    /// there count as bad.
    pub fn error_rate_all(&self) -> f64 {
        if self.gt_valid == 0 {
            0.0
        } else {
            (self.bad + self.gt_valid - self.compared) as f64 / self.gt_valid as f64
        }
    }

    /// Fraction of ground-truth pixels carrying a valid estimate.
    pub fn density(&self) -> f64 {
        if self.gt_valid == 0 {
            0.0
        } else {
            self.compared as f64 / self.gt_valid as f64
        }
    }
}

/// Whether an estimate is bad against a true disparity.
#[inline]
pub fn is_bad_pixel(estimate: f64, truth: f64) -> bool {
    let err = (estimate - truth).abs();
    err >= BAD_ABS && err >= BAD_REL * truth
}

/// Scores an estimated map against fixed-point ground truth.
pub fn kitti_error(estimate: &DisparityMap, gt: &GroundTruth) -> Result<BadPixelStats> {
    if estimate.width() != gt.width() || estimate.height() != gt.height() {
        return Err(Error::ShapeError("estimate and ground truth shapes differ"));
    }
    let mut stats = BadPixelStats::default();
    for v in 0..gt.height() {
        for u in 0..gt.width() {
            let Some(truth) = gt.disparity(u, v) else {
                continue;
            };
            stats.gt_valid += 1;
            if !estimate.is_valid(u, v) {
                continue;
            }
            stats.compared += 1;
            if is_bad_pixel(estimate.at(u, v) as f64, truth) {
                stats.bad += 1;
            }
        }
    }
    Ok(stats)
}
