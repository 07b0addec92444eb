//! Disparity grid vectors.
//!
//! The image is tiled into square cells. Every support point deposits a
//! small disparity neighborhood `{d-1, d, d+1}` into its own cell's bit
//! mask and, when pooling is enabled, into the eight surrounding cells.
//! Dense matching later restricts its search at a pixel to the mask of the
//! cell containing it, so the masks act as a cheap, conservative prior
//! that survives even where no mesh can be built.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::sparse::{validate_disparity_range, SupportPoint, MAX_DISPARITY_RANGE};

/// Words in a [`DisparityMask`]; covers [`MAX_DISPARITY_RANGE`] bits.
pub const MASK_WORDS: usize = (MAX_DISPARITY_RANGE as usize) / 64;

/// Bit set over candidate disparities; bit `d` marks disparity `d`.
#[derive(Clone, Copy, PartialEq, Eq, Default)]
pub struct DisparityMask([u64; MASK_WORDS]);

impl DisparityMask {
    pub const EMPTY: DisparityMask = DisparityMask([0; MASK_WORDS]);

    /// Mask holding every disparity in `[0, range)`.
    pub fn full_range(range: u16) -> DisparityMask {
        debug_assert!(range <= MAX_DISPARITY_RANGE);
        let mut mask = DisparityMask::EMPTY;
        for w in 0..MASK_WORDS {
            let lo = (w * 64) as u16;
            mask.0[w] = match range.saturating_sub(lo) {
                0 => 0,
                n if n >= 64 => u64::MAX,
                n => (1u64 << n) - 1,
            };
        }
        mask
    }

    #[inline]
    pub fn set(&mut self, d: u16) {
        debug_assert!(d < MAX_DISPARITY_RANGE);
        self.0[(d / 64) as usize] |= 1u64 << (d % 64);
    }

    #[inline]
    pub fn contains(&self, d: u16) -> bool {
        d < MAX_DISPARITY_RANGE && self.0[(d / 64) as usize] >> (d % 64) & 1 == 1
    }

    pub fn union_with(&mut self, other: &DisparityMask) {
        for (a, b) in self.0.iter_mut().zip(other.0.iter()) {
            *a |= b;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    /// Raw words, lowest disparities in word 0 bit 0.
    pub fn words(&self) -> &[u64; MASK_WORDS] {
        &self.0
    }

    /// Iterates set disparities in ascending order.
    pub fn iter(&self) -> MaskIter {
        MaskIter {
            words: self.0,
            word: 0,
        }
    }
}

impl core::fmt::Debug for DisparityMask {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "DisparityMask({:016x}{:016x}{:016x}{:016x})",
            self.0[3], self.0[2], self.0[1], self.0[0]
        )
    }
}

pub struct MaskIter {
    words: [u64; MASK_WORDS],
    word: usize,
}

impl Iterator for MaskIter {
    type Item = u16;

    fn next(&mut self) -> Option<u16> {
        while self.word < MASK_WORDS {
            let bits = self.words[self.word];
            if bits != 0 {
                let tz = bits.trailing_zeros();
                self.words[self.word] = bits & (bits - 1);
                return Some((self.word * 64) as u16 + tz as u16);
            }
            self.word += 1;
        }
        None
    }
}

/// Grid vector configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridConfig {
    /// Cell edge length in pixels.
    pub cell_size: u32,
    /// Deposit each point's neighborhood into the surrounding cells too.
    pub neighbor_pooling: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            cell_size: 20,
            neighbor_pooling: true,
        }
    }
}

/// Per-cell candidate disparity masks over the tiled image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridVectorField {
    cells_x: usize,
    cells_y: usize,
    cell_size: u32,
    disparity_range: u16,
    masks: Vec<DisparityMask>,
}

impl GridVectorField {
    pub fn cells_x(&self) -> usize {
        self.cells_x
    }

    pub fn cells_y(&self) -> usize {
        self.cells_y
    }

    pub fn cell_size(&self) -> u32 {
        self.cell_size
    }

    pub fn disparity_range(&self) -> u16 {
        self.disparity_range
    }

    /// Cell coordinates of pixel `(u, v)`.
    #[inline]
    pub fn cell_of(&self, u: usize, v: usize) -> (usize, usize) {
        let cell = self.cell_size as usize;
        let cx = (u / cell).min(self.cells_x - 1);
        let cy = (v / cell).min(self.cells_y - 1);
        (cx, cy)
    }

    pub fn cell(&self, cx: usize, cy: usize) -> &DisparityMask {
        &self.masks[cy * self.cells_x + cx]
    }

    /// Mask of the cell containing pixel `(u, v)`.
    #[inline]
    pub fn mask_at(&self, u: usize, v: usize) -> &DisparityMask {
        let (cx, cy) = self.cell_of(u, v);
        self.cell(cx, cy)
    }
}

/// Builds the per-cell masks from a support point set.
pub fn build_grid_vectors(
    points: &[SupportPoint],
    width: usize,
    height: usize,
    disparity_range: u16,
    cfg: &GridConfig,
) -> Result<GridVectorField> {
    if width == 0 || height == 0 {
        return Err(Error::ShapeError("grid needs a nonempty image"));
    }
    if cfg.cell_size == 0 {
        return Err(Error::InvalidConfig("grid cell size must be positive"));
    }
    validate_disparity_range(disparity_range)?;
    let cell = cfg.cell_size as usize;
    let cells_x = width.div_ceil(cell);
    let cells_y = height.div_ceil(cell);
    let mut field = GridVectorField {
        cells_x,
        cells_y,
        cell_size: cfg.cell_size,
        disparity_range,
        masks: vec![DisparityMask::EMPTY; cells_x * cells_y],
    };
    for p in points {
        debug_assert!(p.d < disparity_range);
        let mut add = DisparityMask::EMPTY;
        for d in p.d.saturating_sub(1)..=(p.d + 1).min(disparity_range - 1) {
            add.set(d);
        }
        let (cx, cy) = field.cell_of(p.u as usize, p.v as usize);
        let reach = usize::from(cfg.neighbor_pooling);
        for ny in cy.saturating_sub(reach)..=(cy + reach).min(cells_y - 1) {
            for nx in cx.saturating_sub(reach)..=(cx + reach).min(cells_x - 1) {
                field.masks[ny * cells_x + nx].union_with(&add);
            }
        }
    }
    Ok(field)
}
