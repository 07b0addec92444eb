//! Slanted-plane disparity prior.
//!
//! Filtered support points feed two structures: coarse per-cell candidate
//! masks ([`grid`]) and a triangulated mesh whose faces are rasterized
//! into a per-pixel planar prior ([`delaunay`], [`raster`]).
//! [`candidate_set`] combines both into the disparity candidates the dense
//! matcher is allowed to evaluate at a pixel.

pub mod delaunay;
pub mod grid;
pub mod raster;

use grid::{DisparityMask, GridVectorField};
use raster::{round_prior, PlanePriorMatrix};

/// Candidate disparities for dense matching at pixel `(u, v)`.
///
/// Starts from the grid cell's mask; where the mesh prior covers the
/// pixel, the rounded prior and its two neighbors are added (clipped to
/// the disparity range). An empty result falls back to the full range so
/// a pixel is never left without candidates.
pub fn candidate_set(
    u: usize,
    v: usize,
    grid: &GridVectorField,
    prior: Option<&PlanePriorMatrix>,
) -> DisparityMask {
    let mut mask = *grid.mask_at(u, v);
    if let Some(value) = prior.and_then(|m| m.prior(u, v)) {
        let top = grid.disparity_range() - 1;
        let mid = round_prior(value).min(top);
        for d in mid.saturating_sub(1)..=(mid + 1).min(top) {
            mask.set(d);
        }
    }
    if mask.is_empty() {
        mask = DisparityMask::full_range(grid.disparity_range());
    }
    mask
}
