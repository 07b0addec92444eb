//! Census transform and Hamming-distance descriptors.
//!
//! Every pixel whose window fits inside the image is described by the
//! comparison pattern of its neighborhood: bit = 1 where the neighbor is
//! strictly darker than the center. Matching costs are Hamming distances
//! between descriptors, which makes the cost function invariant under any
//! strictly increasing remapping of intensities.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::image::GrayImage;

/// Smallest supported window edge.
pub const MIN_WINDOW: usize = 3;
/// Largest supported window edge (13x13 - 1 = 168 descriptor bits).
pub const MAX_WINDOW: usize = 13;
/// Storage words per descriptor; 3 x 64 bits covers the largest window.
pub const DESCRIPTOR_WORDS: usize = 3;

/// Census window configuration. The window edge must be odd and within
/// [`MIN_WINDOW`, `MAX_WINDOW`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusConfig {
    pub window: usize,
}

impl CensusConfig {
    pub fn new(window: usize) -> Result<Self> {
        if window < MIN_WINDOW || window > MAX_WINDOW || window % 2 == 0 {
            return Err(Error::InvalidConfig(
                "census window must be odd and within 3..=13",
            ));
        }
        Ok(CensusConfig { window })
    }
}

impl Default for CensusConfig {
    fn default() -> Self {
        CensusConfig { window: 9 }
    }
}

/// Packed census descriptor of up to 168 comparison bits.
///
/// Neighbors are enumerated in row-major window order, center excluded.
/// The first neighbor occupies the most significant bit of the
/// `window^2 - 1`-bit value; for a 3x3 window the descriptor therefore
/// fits the low byte of `words()[0]` with the top-left comparison at bit 7.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Descriptor([u64; DESCRIPTOR_WORDS]);

impl Descriptor {
    pub const ZERO: Descriptor = Descriptor([0; DESCRIPTOR_WORDS]);

    #[inline]
    pub fn words(&self) -> &[u64; DESCRIPTOR_WORDS] {
        &self.0
    }

    #[inline]
    pub(crate) fn set_bit(&mut self, bit: usize) {
        self.0[bit / 64] |= 1u64 << (bit % 64);
    }

    #[inline]
    pub fn bit(&self, bit: usize) -> bool {
        self.0[bit / 64] >> (bit % 64) & 1 == 1
    }

    /// Number of set bits.
    #[inline]
    pub fn count_ones(&self) -> u32 {
        self.0[0].count_ones() + self.0[1].count_ones() + self.0[2].count_ones()
    }
}

impl fmt::Debug for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Descriptor({:016x}{:016x}{:016x})",
            self.0[2], self.0[1], self.0[0]
        )
    }
}

/// Hamming distance between two descriptors.
#[inline]
pub fn hamming(a: Descriptor, b: Descriptor) -> u32 {
    (a.0[0] ^ b.0[0]).count_ones()
        + (a.0[1] ^ b.0[1]).count_ones()
        + (a.0[2] ^ b.0[2]).count_ones()
}

/// Per-pixel census descriptors for one image.
///
/// Pixels closer than `window / 2` to any border carry the all-zeros
/// descriptor and are reported invalid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusField {
    width: usize,
    height: usize,
    window: usize,
    descriptors: Vec<Descriptor>,
}

impl CensusField {
    pub(crate) fn new_zeroed(width: usize, height: usize, window: usize) -> Self {
        CensusField {
            width,
            height,
            window,
            descriptors: vec![Descriptor::ZERO; width * height],
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
    pub fn window(&self) -> usize {
        self.window
    }

    /// Half window edge; valid pixels keep this distance from every border.
    #[inline]
    pub fn radius(&self) -> usize {
        self.window / 2
    }

    /// Descriptor bits per pixel (`window^2 - 1`).
    #[inline]
    pub fn bits(&self) -> usize {
        self.window * self.window - 1
    }

    #[inline]
    pub fn is_valid(&self, u: usize, v: usize) -> bool {
        let r = self.radius();
        u >= r && u + r < self.width && v >= r && v + r < self.height
    }

    #[inline]
    pub fn at(&self, u: usize, v: usize) -> Descriptor {
        self.descriptors[v * self.width + u]
    }

    #[inline]
    pub(crate) fn set(&mut self, u: usize, v: usize, d: Descriptor) {
        self.descriptors[v * self.width + u] = d;
    }

    pub fn descriptors(&self) -> &[Descriptor] {
        &self.descriptors
    }
}

/// Computes the census descriptor field of `img`.
///
/// For each valid center pixel the neighbors are visited in row-major
/// window order; a bit is set where `neighbor < center` (strictly).
/// Returns [`Error::InputTooSmall`] when the window does not fit.
pub fn census_transform(img: &GrayImage, cfg: CensusConfig) -> Result<CensusField> {
    let w = cfg.window;
    if img.width() < w || img.height() < w {
        return Err(Error::InputTooSmall {
            width: img.width(),
            height: img.height(),
            window: w,
        });
    }
    let r = w / 2;
    let bits = w * w - 1;
    let mut field = CensusField::new_zeroed(img.width(), img.height(), w);
    for v in r..img.height() - r {
        for u in r..img.width() - r {
            let center = img.at(u, v);
            let mut desc = Descriptor::ZERO;
            let mut k = 0;
            for wv in v - r..=v + r {
                let row = img.row(wv);
                for wu in u - r..=u + r {
                    if wv == v && wu == u {
                        continue;
                    }
                    if row[wu] < center {
                        desc.set_bit(bits - 1 - k);
                    }
                    k += 1;
                }
            }
            field.set(u, v, desc);
        }
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_image(width: usize, height: usize, seed: u64) -> GrayImage {
        let mut rng = StdRng::seed_from_u64(seed);
        GrayImage::from_fn(width, height, |_, _| rng.random())
    }

    /// Independent recomputation: collect comparison bits into a vector in
    /// window row-major order, then fold into words most-significant-first.
    fn oracle_descriptor(img: &GrayImage, u: usize, v: usize, w: usize) -> Descriptor {
        let r = w / 2;
        let center = img.at(u, v);
        let mut bits_list = alloc::vec::Vec::new();
        for dv in 0..w {
            for du in 0..w {
                if dv == r && du == r {
                    continue;
                }
                bits_list.push(img.at(u - r + du, v - r + dv) < center);
            }
        }
        let n = bits_list.len();
        let mut d = Descriptor::ZERO;
        for (k, &set) in bits_list.iter().enumerate() {
            if set {
                d.set_bit(n - 1 - k);
            }
        }
        d
    }

    #[test]
    fn window_bounds_enforced() {
        assert!(CensusConfig::new(3).is_ok());
        assert!(CensusConfig::new(13).is_ok());
        assert!(CensusConfig::new(1).is_err());
        assert!(CensusConfig::new(8).is_err());
        assert!(CensusConfig::new(15).is_err());
    }

    #[test]
    fn constant_image_gives_zero_descriptors() {
        let img = GrayImage::from_fn(8, 8, |_, _| 97);
        let field = census_transform(&img, CensusConfig { window: 3 }).unwrap();
        for v in 0..8 {
            for u in 0..8 {
                assert_eq!(field.at(u, v), Descriptor::ZERO);
            }
        }
    }

    #[test]
    fn three_by_three_example() {
        // Center 5 with neighbors 1,2,3,4,6,7,8,9 in row-major order:
        // the four darker neighbors come first, so the descriptor byte is
        // 0b1111_0000.
        let img = GrayImage::new(3, 3, vec![1, 2, 3, 4, 5, 6, 7, 8, 9]).unwrap();
        let field = census_transform(&img, CensusConfig { window: 3 }).unwrap();
        assert_eq!(field.at(1, 1).words()[0], 0b1111_0000);
        assert_eq!(field.bits(), 8);
        // Only the center pixel is valid in a 3x3 image.
        let valid: usize = (0..3)
            .flat_map(|v| (0..3).map(move |u| (u, v)))
            .filter(|&(u, v)| field.is_valid(u, v))
            .count();
        assert_eq!(valid, 1);
        assert!(field.is_valid(1, 1));
    }

    #[test]
    fn too_small_image_is_rejected() {
        let img = GrayImage::from_fn(4, 9, |u, v| (u * v) as u8);
        let err = census_transform(&img, CensusConfig { window: 5 }).unwrap_err();
        assert_eq!(
            err,
            Error::InputTooSmall {
                width: 4,
                height: 9,
                window: 5
            }
        );
    }

    #[test]
    fn matches_naive_recomputation() {
        let img = random_image(64, 64, 11);
        for &w in &[3usize, 9, 13] {
            let field = census_transform(&img, CensusConfig { window: w }).unwrap();
            let r = w / 2;
            for v in 0..64 {
                for u in 0..64 {
                    if field.is_valid(u, v) {
                        assert_eq!(field.at(u, v), oracle_descriptor(&img, u, v, w));
                    } else {
                        assert_eq!(field.at(u, v), Descriptor::ZERO);
                        assert!(u < r || u + r >= 64 || v < r || v + r >= 64);
                    }
                }
            }
        }
    }

    #[test]
    fn shift_covariance() {
        // A horizontally shifted copy produces the same descriptors at the
        // shifted positions.
        let base = random_image(64, 32, 7);
        let shift = 5usize;
        let shifted = GrayImage::from_fn(64, 32, |u, v| {
            if u >= shift {
                base.at(u - shift, v)
            } else {
                base.at(u, v).wrapping_mul(31).wrapping_add(17)
            }
        });
        let w = 9;
        let r = w / 2;
        let fa = census_transform(&base, CensusConfig { window: w }).unwrap();
        let fb = census_transform(&shifted, CensusConfig { window: w }).unwrap();
        for v in r..32 - r {
            for u in shift + r..64 - r {
                assert_eq!(fb.at(u, v), fa.at(u - shift, v));
            }
        }
    }

    #[test]
    fn invariant_under_monotone_intensity_maps() {
        // Any strictly increasing intensity remapping preserves all the
        // strict comparisons, hence the descriptors.
        let mut rng = StdRng::seed_from_u64(23);
        // Strictly increasing lookup table from [0,128) into [0,256).
        let mut lut = [0u8; 128];
        let mut next = 0u16;
        for (i, slot) in lut.iter_mut().enumerate() {
            next += 1 + rng.random_range(0..2) as u16;
            next = next.min(128 + i as u16); // keep strictly increasing and in range
            *slot = next as u8;
        }
        for i in 1..128 {
            assert!(lut[i] > lut[i - 1]);
        }
        let img = GrayImage::from_fn(48, 40, |u, v| {
            (u.wrapping_mul(37) ^ v.wrapping_mul(101) ^ (u * v)) as u8 & 0x7f
        });
        let mapped = GrayImage::from_fn(48, 40, |u, v| lut[img.at(u, v) as usize]);
        let cfg = CensusConfig { window: 7 };
        assert_eq!(
            census_transform(&img, cfg).unwrap(),
            census_transform(&mapped, cfg).unwrap()
        );
    }

    #[test]
    fn hamming_examples() {
        let img = random_image(16, 16, 3);
        let field = census_transform(&img, CensusConfig { window: 5 }).unwrap();
        let d = field.at(8, 8);
        assert_eq!(hamming(d, d), 0);
        // Complement within the 24 descriptor bits differs everywhere.
        let mut inv = Descriptor::ZERO;
        for b in 0..24 {
            if !d.bit(b) {
                inv.set_bit(b);
            }
        }
        assert_eq!(hamming(d, inv), 24);
    }

    proptest! {
        #[test]
        fn hamming_is_a_metric(a in any::<[u64; 3]>(), b in any::<[u64; 3]>(), c in any::<[u64; 3]>()) {
            let (da, db, dc) = (Descriptor(a), Descriptor(b), Descriptor(c));
            prop_assert_eq!(hamming(da, da), 0);
            prop_assert_eq!(hamming(da, db), hamming(db, da));
            prop_assert!(hamming(da, dc) <= hamming(da, db) + hamming(db, dc));
            if a != b {
                prop_assert!(hamming(da, db) > 0);
            }
        }
    }
}
