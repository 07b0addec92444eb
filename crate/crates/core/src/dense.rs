//! Dense disparity matching under a candidate prior.
//!
//! For every census-valid left pixel the matcher evaluates the Hamming
//! cost against the right descriptor at each candidate disparity and
//! keeps the argmin, smaller disparity on ties. Candidates come from a
//! [`CandidateProvider`]; the mesh-prior provider narrows the search to
//! the grid cell mask plus the rasterized plane neighborhood, which is
//! where the speed and the regularization of the method come from.

use alloc::vec::Vec;

use crate::census::{hamming, CensusField};
use crate::error::{Error, Result};
use crate::image::DisparityMap;
use crate::prior::candidate_set;
use crate::prior::grid::{DisparityMask, GridVectorField};
use crate::prior::raster::PlanePriorMatrix;
use crate::sparse::validate_disparity_range;

/// Supplies the disparity candidates to evaluate at a pixel.
pub trait CandidateProvider {
    fn candidates(&self, u: usize, v: usize) -> DisparityMask;
}

/// Exhaustive search over `[0, range)`.
pub struct FullRange(pub u16);

impl CandidateProvider for FullRange {
    fn candidates(&self, _u: usize, _v: usize) -> DisparityMask {
        DisparityMask::full_range(self.0)
    }
}

/// Grid-vector candidates, refined by the mesh prior where it covers.
pub struct MeshPriorCandidates<'a> {
    pub grid: &'a GridVectorField,
    pub prior: Option<&'a PlanePriorMatrix>,
}

impl CandidateProvider for MeshPriorCandidates<'_> {
    fn candidates(&self, u: usize, v: usize) -> DisparityMask {
        candidate_set(u, v, self.grid, self.prior)
    }
}

/// Dense matching configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DenseConfig {
    /// Census window for the dense pass.
    pub window: usize,
    /// Number of disparities searched, `d` in `[0, disparity_range)`.
    pub disparity_range: u16,
    /// Reject pixels whose right-to-left winner disagrees.
    pub lr_check: bool,
    /// Median filter half-width; `0` disables the filter.
    pub median_radius: usize,
}

impl Default for DenseConfig {
    fn default() -> Self {
        DenseConfig {
            window: 5,
            disparity_range: 64,
            lr_check: false,
            median_radius: 1,
        }
    }
}

fn check_fields(left: &CensusField, right: &CensusField, cfg: &DenseConfig) -> Result<()> {
    if left.width() != right.width() || left.height() != right.height() {
        return Err(Error::ShapeError("left and right census fields must match"));
    }
    if left.window() != right.window() {
        return Err(Error::ShapeError("census windows must match across views"));
    }
    if left.window() != cfg.window {
        return Err(Error::ShapeError("census window differs from the configuration"));
    }
    validate_disparity_range(cfg.disparity_range)?;
    Ok(())
}

/// Computes the dense disparity map.
///
/// A pixel gets [`DisparityMap::INVALID`] when it is census-invalid, no
/// candidate keeps the right window in bounds, or the left-right check
/// rejects the winner.
pub fn dense_match(
    left: &CensusField,
    right: &CensusField,
    provider: &impl CandidateProvider,
    cfg: &DenseConfig,
) -> Result<DisparityMap> {
    check_fields(left, right, cfg)?;
    let (width, height) = (left.width(), left.height());
    let r = left.radius();
    let mut map = DisparityMap::new_invalid(width, height);
    let right_winners = if cfg.lr_check {
        right_to_left_winners(left, right, provider)
    } else {
        Vec::new()
    };
    for v in 0..height {
        for u in 0..width {
            if !left.is_valid(u, v) {
                continue;
            }
            let Some((d, _)) = best_candidate(left, right, provider, u, v, r) else {
                continue;
            };
            if cfg.lr_check {
                let ur = u - d as usize;
                if right_winners[v * width + ur] != Some(d) {
                    continue;
                }
            }
            map.set(u, v, d);
        }
    }
    Ok(map)
}

/// Argmin of the Hamming cost over in-bounds candidates at a left pixel;
/// ties take the smaller disparity.
#[inline]
fn best_candidate(
    left: &CensusField,
    right: &CensusField,
    provider: &impl CandidateProvider,
    u: usize,
    v: usize,
    r: usize,
) -> Option<(u16, u32)> {
    let desc = left.at(u, v);
    let mut best: Option<(u16, u32)> = None;
    for d in provider.candidates(u, v).iter() {
        if d as usize + r > u {
            break;
        }
        let cost = hamming(desc, right.at(u - d as usize, v));
        if best.map_or(true, |(_, c)| cost < c) {
            best = Some((d, cost));
        }
    }
    best
}

/// For every right pixel, the disparity whose left pixel would claim it
/// with the lowest cost, searching each left pixel's own candidate set.
fn right_to_left_winners(
    left: &CensusField,
    right: &CensusField,
    provider: &impl CandidateProvider,
) -> Vec<Option<u16>> {
    let (width, height) = (left.width(), left.height());
    let r = left.radius();
    let mut winners: Vec<Option<(u16, u32)>> = alloc::vec![None; width * height];
    for v in 0..height {
        for ul in 0..width {
            if !left.is_valid(ul, v) {
                continue;
            }
            let desc = left.at(ul, v);
            for d in provider.candidates(ul, v).iter() {
                if d as usize + r > ul {
                    break;
                }
                let ur = ul - d as usize;
                let cost = hamming(desc, right.at(ur, v));
                let slot = &mut winners[v * width + ur];
                // Left pixels arrive in ascending u, hence ascending d for
                // a fixed right pixel: strict improvement keeps the
                // smallest disparity on ties.
                if slot.map_or(true, |(_, c)| cost < c) {
                    *slot = Some((d, cost));
                }
            }
        }
    }
    winners.into_iter().map(|w| w.map(|(d, _)| d)).collect()
}

/// Replaces each valid pixel with the lower median of the valid values in
/// the `(2r+1)` square window around it, clipped at the borders. The
/// center value always participates, so the result is always defined for
/// valid pixels; invalid pixels stay invalid.
pub fn median_filter(map: &DisparityMap, radius: usize) -> DisparityMap {
    if radius == 0 {
        return map.clone();
    }
    let (width, height) = (map.width(), map.height());
    let mut out = DisparityMap::new_invalid(width, height);
    let mut window: Vec<u16> = Vec::with_capacity((2 * radius + 1) * (2 * radius + 1));
    for v in 0..height {
        for u in 0..width {
            if !map.is_valid(u, v) {
                continue;
            }
            window.clear();
            for wv in v.saturating_sub(radius)..=(v + radius).min(height - 1) {
                for wu in u.saturating_sub(radius)..=(u + radius).min(width - 1) {
                    if map.is_valid(wu, wv) {
                        window.push(map.at(wu, wv));
                    }
                }
            }
            window.sort_unstable();
            out.set(u, v, window[(window.len() - 1) / 2]);
        }
    }
    out
}
