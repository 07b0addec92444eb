//! Streaming support matcher: consumes paired census slots in raster order
//! and emits one support decision slot per pixel.
//!
//! The right descriptors of the current row live in a ring of the last `D`
//! slots, so cost lookups for `d` in `0..=min(D-1, u - r)` never leave the
//! ring. Without the left-right check a decision leaves the same step its
//! pixel arrives. With it, decisions wait `D - 1` steps in a pending line
//! while two row-parity winner banks fill incrementally: each arriving left
//! descriptor updates the bank entry of every right pixel it can match, in
//! ascending-disparity order with strict improvement, which reproduces the
//! whole-frame right-to-left winner scan exactly. By the time a decision
//! pops, every left pixel that could update its bank entry has arrived.

use alloc::vec;
use alloc::vec::Vec;

use crate::census::{hamming, Descriptor};
use crate::error::{Error, Result};
use crate::sparse::{validate_disparity_range, AmbiguityScores, SparseConfig, SupportPoint};
use crate::stream::buffer::DelayLine;

/// Census pair for one raster position: `(position, left, right)`.
pub type PairSlot = (usize, Descriptor, Descriptor);

/// Decision for one raster position; `None` where no support point exists.
pub type SupportSlot = Option<SupportPoint>;

pub struct StreamSparse {
    width: usize,
    height: usize,
    radius: usize,
    disparity_range: usize,
    lr_check: bool,
    ring: Vec<Descriptor>,
    /// Best `(cost, d)` per right column, one bank per row parity.
    banks: [Vec<Option<(u32, u16)>>; 2],
    costs: Vec<u32>,
    pending: DelayLine<Option<SupportSlot>>,
    delay: DelayLine<Option<SupportSlot>>,
}

impl StreamSparse {
    pub fn new(width: usize, height: usize, cfg: &SparseConfig, depth: usize) -> Result<StreamSparse> {
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
        Ok(StreamSparse {
            width,
            height,
            radius: cfg.window / 2,
            disparity_range: d,
            lr_check: cfg.lr_check,
            ring: vec![Descriptor::ZERO; d],
            banks: [bank.clone(), bank],
            costs: Vec::with_capacity(d),
            pending: DelayLine::new(if cfg.lr_check { d - 1 } else { 0 }),
            delay: DelayLine::new(depth),
        })
    }

    /// Steps from a pair arriving to its decision slot leaving.
    pub fn fill_latency(&self, depth: usize) -> u64 {
        (if self.lr_check { self.disparity_range - 1 } else { 0 } + depth) as u64
    }

    pub fn step(&mut self, input: Option<PairSlot>) -> Option<SupportSlot> {
        let core: Option<SupportSlot> = input.map(|(p, dl, dr)| self.decide(p, dl, dr));
        let popped = self.pending.push(core).flatten();
        let gated = popped.map(|slot| match slot {
            Some(p) if self.lr_check => {
                let ur = (p.u - p.d as u32) as usize;
                let winner = self.banks[p.v as usize & 1][ur].map(|(_, d)| d);
                if winner == Some(p.d) {
                    Some(p)
                } else {
                    None
                }
            }
            other => other,
        });
        self.delay.push(gated).flatten()
    }

    fn decide(&mut self, p: usize, dl: Descriptor, dr: Descriptor) -> SupportSlot {
        let (u, v) = (p % self.width, p / self.width);
        if self.lr_check && u == 0 {
            self.banks[v & 1].fill(None);
        }
        self.ring[u % self.disparity_range] = dr;
        let r = self.radius;
        if u < r || u + r >= self.width || v < r || v + r >= self.height {
            return None;
        }
        let d_max = (self.disparity_range - 1).min(u - r);
        self.costs.clear();
        for d in 0..=d_max {
            let c = hamming(dl, self.ring[(u - d) % self.disparity_range]);
            self.costs.push(c);
            if self.lr_check {
                let slot = &mut self.banks[v & 1][u - d];
                if slot.map_or(true, |(bc, _)| c < bc) {
                    *slot = Some((c, d as u16));
                }
            }
        }
        let scores = AmbiguityScores::evaluate(&self.costs)?;
        if !scores.accepted() {
            return None;
        }
        Some(SupportPoint {
            u: u as u32,
            v: v as u32,
            d: scores.d_best,
        })
    }
}
