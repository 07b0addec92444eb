//! Sparse support-point matching.
//!
//! Every census-valid pixel of the left image is matched against the right
//! image over the full disparity range. A pixel becomes a support point only
//! when its best cost beats a shift-sum fraction of the runner-up cost taken
//! over disparities away from the winner, which keeps ambiguous and
//! textureless pixels out of the support set.

use alloc::vec::Vec;

use crate::census::{hamming, CensusField};
use crate::error::{Error, Result};

/// Upper bound on the disparity range (mask words and 16-bit PNG export
/// both assume `d <= 255`).
pub const MAX_DISPARITY_RANGE: u16 = 256;

/// A matched support point: left pixel `(u, v)` with disparity `d`, i.e.
/// the corresponding right pixel is `(u - d, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SupportPoint {
    pub u: u32,
    pub v: u32,
    pub d: u16,
}

/// Support-point decimation applied after filtering; `1/s^2` of a full grid
/// survives, realized as strides over `u` and `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Downsample {
    Full,
    Half,
    Quarter,
    Eighth,
    Sixteenth,
    ThirtySecond,
}

impl Downsample {
    /// Keep a point iff `u % s_u == 0 && v % s_v == 0`.
    ///
    /// Square fractions use equal strides; the in-between fractions double
    /// the horizontal stride: 1/2 -> (2,1), 1/8 -> (4,2), 1/32 -> (8,4).
    pub fn strides(self) -> (u32, u32) {
        match self {
            Downsample::Full => (1, 1),
            Downsample::Half => (2, 1),
            Downsample::Quarter => (2, 2),
            Downsample::Eighth => (4, 2),
            Downsample::Sixteenth => (4, 4),
            Downsample::ThirtySecond => (8, 4),
        }
    }

    /// Denominator of the kept fraction (1, 2, 4, 8, 16, 32).
    pub fn denominator(self) -> u32 {
        let (su, sv) = self.strides();
        su * sv
    }

    pub fn from_denominator(den: u32) -> Option<Self> {
        Some(match den {
            1 => Downsample::Full,
            2 => Downsample::Half,
            4 => Downsample::Quarter,
            8 => Downsample::Eighth,
            16 => Downsample::Sixteenth,
            32 => Downsample::ThirtySecond,
            _ => return None,
        })
    }
}

impl Default for Downsample {
    fn default() -> Self {
        Downsample::Full
    }
}

/// Support matching configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SparseConfig {
    /// Census window used for support matching.
    pub window: usize,
    /// Number of disparity hypotheses `D`; candidates are `0..D`.
    pub disparity_range: u16,
    /// Require the right-to-left winner at `(u - d, v)` to be `d`.
    pub lr_check: bool,
    /// Decimation applied to the filtered support set.
    pub downsample: Downsample,
}

impl Default for SparseConfig {
    fn default() -> Self {
        SparseConfig {
            window: 9,
            disparity_range: 64,
            lr_check: false,
            downsample: Downsample::Full,
        }
    }
}

/// Winner and runner-up costs of one pixel's disparity scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AmbiguityScores {
    /// Disparity of the minimum cost (ties resolve to the smaller `d`).
    pub d_best: u16,
    /// Minimum cost.
    pub m1: u32,
    /// Minimum cost over disparities `d` with `|d - d_best| > 1`.
    pub m2: u32,
}

impl AmbiguityScores {
    /// Scans a cost vector indexed by disparity. Returns `None` when fewer
    /// than two disparities were evaluable or when every other disparity is
    /// adjacent to the winner (no `m2` exists).
    pub fn evaluate(costs: &[u32]) -> Option<AmbiguityScores> {
        if costs.len() < 2 {
            return None;
        }
        let mut d_best = 0usize;
        let mut m1 = costs[0];
        for (d, &c) in costs.iter().enumerate().skip(1) {
            if c < m1 {
                m1 = c;
                d_best = d;
            }
        }
        let mut m2 = u32::MAX;
        let mut have_m2 = false;
        for (d, &c) in costs.iter().enumerate() {
            if d + 1 < d_best || d > d_best + 1 {
                have_m2 = true;
                if c < m2 {
                    m2 = c;
                }
            }
        }
        if !have_m2 {
            return None;
        }
        Some(AmbiguityScores {
            d_best: d_best as u16,
            m1,
            m2,
        })
    }

    /// The shift-sum acceptance rule. The all-zero case (perfectly flat
    /// cost surface) is rejected outright.
    pub fn accepted(&self) -> bool {
        if self.m1 == 0 && self.m2 == 0 {
            return false;
        }
        self.m1 <= shift_sum_threshold(self.m2)
    }
}

/// Shift-sum approximation of `0.90625 * m2`, computed exactly as an adder
/// tree of right shifts: `m2/2 + m2/4 + m2/8 + m2/32`, each term floored.
///
/// The result is never above `0.90625 * m2` and never more than `3.09375`
/// below it (worst case at `m2 = 31 mod 32`); at multiples of 32 it is
/// exact: `shift_sum_threshold(32 k) == 29 k`.
#[inline]
pub fn shift_sum_threshold(m2: u32) -> u32 {
    (m2 >> 1) + (m2 >> 2) + (m2 >> 3) + (m2 >> 5)
}

fn check_fields(left: &CensusField, right: &CensusField, window: usize) -> Result<()> {
    if left.width() != right.width() || left.height() != right.height() {
        return Err(Error::ShapeError("census fields differ in dimensions"));
    }
    if left.window() != right.window() {
        return Err(Error::ShapeError("census fields differ in window size"));
    }
    if left.window() != window {
        return Err(Error::ShapeError(
            "census fields were built with a different window than configured",
        ));
    }
    Ok(())
}

pub(crate) fn validate_disparity_range(d: u16) -> Result<()> {
    if d < 2 || d > MAX_DISPARITY_RANGE {
        return Err(Error::InvalidConfig("disparity range must be in 2..=256"));
    }
    Ok(())
}

/// Right-to-left winner at right pixel `(ur, v)`: the disparity `d'`
/// minimizing the cost against left pixels `(ur + d', v)`, ties to the
/// smaller `d'`. `None` if no left pixel is reachable.
pub(crate) fn right_winner(
    left: &CensusField,
    right: &CensusField,
    ur: usize,
    v: usize,
    disparity_range: u16,
) -> Option<u16> {
    let r = left.radius();
    let width = left.width();
    if ur < r || ur + r >= width {
        return None;
    }
    let dp_max = (disparity_range as usize - 1).min(width - 1 - r - ur);
    let base = right.at(ur, v);
    let mut best = (u32::MAX, 0u16);
    for dp in 0..=dp_max {
        let c = hamming(base, left.at(ur + dp, v));
        if c < best.0 {
            best = (c, dp as u16);
        }
    }
    Some(best.1)
}

/// Matches support points over every census-valid left pixel.
///
/// For pixel `(u, v)` the evaluable disparities are `0..=min(D-1, u - r)`
/// (the right window must fit). Points are emitted in row-major order, at
/// most one per pixel, and every emitted point satisfies `d < D` and
/// `u - d >= r`.
pub fn match_support(
    left: &CensusField,
    right: &CensusField,
    cfg: &SparseConfig,
) -> Result<Vec<SupportPoint>> {
    check_fields(left, right, cfg.window)?;
    validate_disparity_range(cfg.disparity_range)?;
    let r = left.radius();
    let width = left.width();
    let height = left.height();
    let d_cap = cfg.disparity_range as usize - 1;
    let mut points = Vec::new();
    let mut costs: Vec<u32> = Vec::with_capacity(d_cap + 1);
    for v in r..height - r {
        for u in r..width - r {
            let d_max = d_cap.min(u - r);
            costs.clear();
            let base = left.at(u, v);
            for d in 0..=d_max {
                costs.push(hamming(base, right.at(u - d, v)));
            }
            let scores = match AmbiguityScores::evaluate(&costs) {
                Some(s) => s,
                None => continue,
            };
            if !scores.accepted() {
                continue;
            }
            if cfg.lr_check {
                let ur = u - scores.d_best as usize;
                if right_winner(left, right, ur, v, cfg.disparity_range) != Some(scores.d_best) {
                    continue;
                }
            }
            points.push(SupportPoint {
                u: u as u32,
                v: v as u32,
                d: scores.d_best,
            });
        }
    }
    Ok(points)
}

/// Stride-based decimation; order is preserved.
pub fn downsample_support(points: &[SupportPoint], ds: Downsample) -> Vec<SupportPoint> {
    let (su, sv) = ds.strides();
    points
        .iter()
        .copied()
        .filter(|p| p.u % su == 0 && p.v % sv == 0)
        .collect()
}
