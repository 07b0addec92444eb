//! Row-major pixel containers shared by every pipeline stage.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// 8-bit grayscale image, row-major, index `v * width + u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidConfig("image dimensions must be nonzero"));
        }
        if data.len() != width * height {
            return Err(Error::ShapeError("pixel buffer length != width * height"));
        }
        Ok(GrayImage {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for v in 0..height {
            for u in 0..width {
                data.push(f(u, v));
            }
        }
        GrayImage {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn at(&self, u: usize, v: usize) -> u8 {
        debug_assert!(u < self.width && v < self.height);
        self.data[v * self.width + u]
    }

    #[inline]
    pub fn row(&self, v: usize) -> &[u8] {
        &self.data[v * self.width..(v + 1) * self.width]
    }

    pub fn pixels(&self) -> &[u8] {
        &self.data
    }
}

/// Integer disparity map. `INVALID` marks pixels with no estimate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisparityMap {
    width: usize,
    height: usize,
    data: Vec<u16>,
}

impl DisparityMap {
    /// Sentinel for pixels without a disparity estimate.
    pub const INVALID: u16 = u16::MAX;

    pub fn new_invalid(width: usize, height: usize) -> Self {
        DisparityMap {
            width,
            height,
            data: vec![Self::INVALID; width * height],
        }
    }

    pub fn from_raw(width: usize, height: usize, data: Vec<u16>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::ShapeError("disparity buffer length != width * height"));
        }
        Ok(DisparityMap {
            width,
            height,
            data,
        })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn at(&self, u: usize, v: usize) -> u16 {
        self.data[v * self.width + u]
    }

    #[inline]
    pub fn is_valid(&self, u: usize, v: usize) -> bool {
        self.at(u, v) != Self::INVALID
    }

    #[inline]
    pub fn set(&mut self, u: usize, v: usize, d: u16) {
        self.data[v * self.width + u] = d;
    }

    pub fn values(&self) -> &[u16] {
        &self.data
    }

    /// Number of pixels carrying a valid estimate.
    pub fn valid_count(&self) -> usize {
        self.data.iter().filter(|&&d| d != Self::INVALID).count()
    }
}

/// Ground-truth disparities in 1/256 px fixed point; raw value 0 means the
/// pixel has no ground truth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    width: usize,
    height: usize,
    data: Vec<u16>,
}

impl GroundTruth {
    pub fn new(width: usize, height: usize, data: Vec<u16>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::ShapeError("ground-truth buffer length != width * height"));
        }
        Ok(GroundTruth {
            width,
            height,
            data,
        })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn raw(&self, u: usize, v: usize) -> u16 {
        self.data[v * self.width + u]
    }

    /// Disparity in pixels, or `None` where no ground truth exists.
    #[inline]
    pub fn disparity(&self, u: usize, v: usize) -> Option<f64> {
        match self.raw(u, v) {
            0 => None,
            raw => Some(raw as f64 / 256.0),
        }
    }

    pub fn raw_values(&self) -> &[u16] {
        &self.data
    }
}
