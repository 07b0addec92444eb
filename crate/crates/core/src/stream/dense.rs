//! Streaming dense matcher: paired dense-census slots in raster order, one
//! disparity decision slot out per pixel.
//!
//! Mirrors the streaming support matcher but searches each pixel's own
//! candidate mask instead of the full range: the ring of the last `D` right
//! descriptors serves cost lookups, and the optional left-right check runs
//! over two row-parity winner banks that each arriving left pixel updates
//! across its candidate set, reproducing the whole-frame right-to-left
//! winner scan. Decisions then wait `D - 1` steps so their bank entries are
//! final before the gate reads them.

use alloc::vec;
use alloc::vec::Vec;

use crate::census::{hamming, Descriptor};
use crate::dense::{CandidateProvider, DenseConfig};
use crate::error::{Error, Result};
use crate::sparse::validate_disparity_range;
use crate::stream::buffer::DelayLine;
use crate::stream::sparse::PairSlot;

/// Decision for one raster position: `(position, disparity)`, disparity
/// `None` where the pixel stays invalid.
pub type DenseSlot = (usize, Option<u16>);

pub struct StreamDense {
    width: usize,
    height: usize,
    radius: usize,
    disparity_range: usize,
    lr_check: bool,
    ring: Vec<Descriptor>,
    banks: [Vec<Option<(u32, u16)>>; 2],
    pending: DelayLine<Option<DenseSlot>>,
    delay: DelayLine<Option<DenseSlot>>,
}

impl StreamDense {
    pub fn new(width: usize, height: usize, cfg: &DenseConfig, depth: usize) -> Result<StreamDense> {
        validate_disparity_range(cfg.disparity_range)?;
        if width < cfg.window || height < cfg.window {
            return Err(Error::InputTooSmall {
                width,
                height,
                window: cfg.window,
            });
        }
        let d = cfg.disparity_range as usize;
        if cfg.lr_check && width < d {
            return Err(Error::InvalidConfig(
                "streaming left-right check needs width >= disparity_range",
            ));
        }
        let bank = if cfg.lr_check { vec![None; width] } else { Vec::new() };
        Ok(StreamDense {
            width,
            height,
            radius: cfg.window / 2,
            disparity_range: d,
            lr_check: cfg.lr_check,
            ring: vec![Descriptor::ZERO; d],
            banks: [bank.clone(), bank],
            pending: DelayLine::new(if cfg.lr_check { d - 1 } else { 0 }),
            delay: DelayLine::new(depth),
        })
    }

    /// Steps from a pair arriving to its decision slot leaving.
    pub fn fill_latency(&self, depth: usize) -> u64 {
        (if self.lr_check { self.disparity_range - 1 } else { 0 } + depth) as u64
    }

    /// Advances one step. The provider must hand out the same masks the
    /// whole-frame matcher saw; it is passed per step so the caller can
    /// keep the grid and prior it borrows beside this stage.
    pub fn step(
        &mut self,
        provider: &impl CandidateProvider,
        input: Option<PairSlot>,
    ) -> Option<DenseSlot> {
        let core: Option<DenseSlot> = input.map(|(p, dl, dr)| (p, self.decide(provider, p, dl, dr)));
        let popped = self.pending.push(core).flatten();
        let gated = popped.map(|(p, choice)| {
            let choice = choice.filter(|&d| {
                if !self.lr_check {
                    return true;
                }
                let (u, v) = (p % self.width, p / self.width);
                let ur = u - d as usize;
                self.banks[v & 1][ur].map(|(_, dw)| dw) == Some(d)
            });
            (p, choice)
        });
        self.delay.push(gated).flatten()
    }

    fn decide(
        &mut self,
        provider: &impl CandidateProvider,
        p: usize,
        dl: Descriptor,
        dr: Descriptor,
    ) -> Option<u16> {
        let (u, v) = (p % self.width, p / self.width);
        if self.lr_check && u == 0 {
            self.banks[v & 1].fill(None);
        }
        self.ring[u % self.disparity_range] = dr;
        let r = self.radius;
        if u < r || u + r >= self.width || v < r || v + r >= self.height {
            return None;
        }
        let mut best: Option<(u16, u32)> = None;
        for d in provider.candidates(u, v).iter() {
            if d as usize + r > u {
                break;
            }
            let cost = hamming(dl, self.ring[(u - d as usize) % self.disparity_range]);
            if best.map_or(true, |(_, c)| cost < c) {
                best = Some((d, cost));
            }
            if self.lr_check {
                let slot = &mut self.banks[v & 1][u - d as usize];
                if slot.map_or(true, |(c, _)| cost < c) {
                    *slot = Some((cost, d));
                }
            }
        }
        best.map(|(d, _)| d)
    }
}
