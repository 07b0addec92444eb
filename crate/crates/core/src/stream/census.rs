//! Streaming census stage: one pixel in per step, one descriptor slot out
//! per step after a fixed fill latency.
//!
//! The stage never sees the frame; it keeps a [`LineBufferBank`] of the
//! trailing rows plus a `window x window` register window. When the window's
//! bottom-right corner sits at raster step `t`, its center sits at raster
//! position `t - radius * width - radius`, so descriptors leave in raster
//! order with fill latency `radius * width + radius + depth` (`depth` extra
//! register stages are configurable). Border centers, including the
//! wrap-around positions where the window spans two rows, emit the all-zeros
//! descriptor, matching the whole-frame transform.

use alloc::vec::Vec;

use crate::census::{CensusConfig, Descriptor};
use crate::error::{Error, Result};
use crate::stream::buffer::{DelayLine, LineBufferBank, WindowBuffer};

/// One census output: raster position and its descriptor.
pub type CensusSlot = (usize, Descriptor);

pub struct StreamCensus {
    width: usize,
    height: usize,
    window: usize,
    radius: usize,
    bank: LineBufferBank,
    win: WindowBuffer,
    col: Vec<u8>,
    delay: DelayLine<Option<CensusSlot>>,
    t: u64,
}

impl StreamCensus {
    pub fn new(width: usize, height: usize, cfg: CensusConfig, depth: usize) -> Result<StreamCensus> {
        let window = cfg.window;
        if width < window || height < window {
            return Err(Error::InputTooSmall {
                width,
                height,
                window,
            });
        }
        Ok(StreamCensus {
            width,
            height,
            window,
            radius: window / 2,
            bank: LineBufferBank::new(width, window),
            win: WindowBuffer::new(window),
            col: Vec::with_capacity(window),
            delay: DelayLine::new(depth),
            t: 0,
        })
    }

    /// Steps after the first pixel until the first slot emerges.
    pub fn fill_latency(&self, depth: usize) -> u64 {
        (self.radius * self.width + self.radius + depth) as u64
    }

    pub fn rows_live(&self) -> usize {
        self.bank.rows_live()
    }

    pub fn rows_capacity(&self) -> usize {
        self.bank.rows_capacity()
    }

    /// Advances one step. `input` must be the next raster pixel while the
    /// frame lasts and `None` during drain steps.
    pub fn step(&mut self, input: Option<u8>) -> Option<CensusSlot> {
        let t = self.t;
        self.t += 1;
        let pixels = (self.width * self.height) as u64;
        if let Some(px) = input {
            debug_assert!(t < pixels, "pixel pushed after the frame ended");
            let u = (t % self.width as u64) as usize;
            self.bank.push(u, px);
            self.bank.read_column(u, self.window, &mut self.col);
            self.win.push_column(&self.col);
        } else {
            debug_assert!(t >= pixels, "missing pixel mid-frame");
        }
        let core_latency = (self.radius * self.width + self.radius) as u64;
        let slot = if t >= core_latency && t - core_latency < pixels {
            let p = (t - core_latency) as usize;
            let (u, v) = (p % self.width, p / self.width);
            let r = self.radius;
            let desc = if u >= r && u + r < self.width && v >= r && v + r < self.height {
                self.window_descriptor()
            } else {
                Descriptor::ZERO
            };
            Some((p, desc))
        } else {
            None
        };
        self.delay.push(slot).flatten()
    }

    /// Descriptor of the window currently held in the register file, with
    /// the same neighbor order and bit layout as the whole-frame transform.
    fn window_descriptor(&self) -> Descriptor {
        let w = self.window;
        let r = self.radius;
        let center = self.win.at(r, r);
        let bits = w * w - 1;
        let mut desc = Descriptor::ZERO;
        let mut k = 0;
        for wv in 0..w {
            for wu in 0..w {
                if wv == r && wu == r {
                    continue;
                }
                if self.win.at(wu, wv) < center {
                    desc.set_bit(bits - 1 - k);
                }
                k += 1;
            }
        }
        desc
    }
}
