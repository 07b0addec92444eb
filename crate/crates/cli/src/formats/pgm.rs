//! Binary PGM (P5) reader and writer, 8-bit only.
//!
//! The header is `P5`, then width, height, and maxval as ASCII decimals
//! separated by whitespace, with `#` comments allowed between tokens,
//! then a single whitespace byte and `width * height` raw pixel bytes.

use std::fs;
use std::path::Path;

use meshstereo_core::{DisparityMap, GrayImage};

use crate::error::{CliError, Result};

pub fn load_pgm(path: &Path) -> Result<GrayImage> {
    let bytes = fs::read(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    let fail = |msg: &str| CliError::Format(path.to_path_buf(), msg.to_string());
    let mut cur = Cursor { bytes: &bytes, pos: 0 };
    if cur.take(2) != Some(b"P5".as_slice()) {
        return Err(fail("not a binary PGM (missing P5 magic)"));
    }
    let width = cur.token().ok_or_else(|| fail("truncated header"))?;
    let height = cur.token().ok_or_else(|| fail("truncated header"))?;
    let maxval = cur.token().ok_or_else(|| fail("truncated header"))?;
    let width: usize = width.parse().map_err(|_| fail("width is not a number"))?;
    let height: usize = height.parse().map_err(|_| fail("height is not a number"))?;
    let maxval: u32 = maxval.parse().map_err(|_| fail("maxval is not a number"))?;
    if maxval == 0 || maxval > 255 {
        return Err(fail("unsupported maxval (only 8-bit PGM is supported)"));
    }
    // Exactly one whitespace byte separates the header from the payload.
    match cur.bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(fail("missing whitespace before pixel data")),
    }
    let data = cur
        .take(width.checked_mul(height).ok_or_else(|| fail("image dimensions overflow"))?)
        .ok_or_else(|| fail("truncated pixel data"))?
        .to_vec();
    GrayImage::new(width, height, data).map_err(CliError::Core)
}

pub fn save_pgm(path: &Path, img: &GrayImage) -> Result<()> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    fs::write(path, out).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

/// Writes a disparity map as an 8-bit PGM scaled to the display range:
/// `round(d * 255 / (range - 1))`, invalid pixels as 0.
pub fn save_disparity_pgm8(path: &Path, map: &DisparityMap, disparity_range: u16) -> Result<()> {
    let den = u32::from(disparity_range.max(2)) - 1;
    let mut out = format!("P5\n{} {}\n255\n", map.width(), map.height()).into_bytes();
    out.extend(map.values().iter().map(|&d| {
        if d == DisparityMap::INVALID {
            0u8
        } else {
            ((u32::from(d) * 255 + den / 2) / den).min(255) as u8
        }
    }));
    fs::write(path, out).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        let s = self.bytes.get(self.pos..self.pos + n)?;
        self.pos += n;
        Some(s)
    }

    /// Next whitespace-delimited ASCII token, skipping `#` comments.
    fn token(&mut self) -> Option<String> {
        loop {
            match self.bytes.get(self.pos) {
                Some(b) if b.is_ascii_whitespace() => self.pos += 1,
                Some(b'#') => {
                    while !matches!(self.bytes.get(self.pos), None | Some(b'\n')) {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = self.pos;
        while matches!(self.bytes.get(self.pos), Some(b) if !b.is_ascii_whitespace()) {
            self.pos += 1;
        }
        if self.pos == start {
            return None;
        }
        String::from_utf8(self.bytes[start..self.pos].to_vec()).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn reads_the_documented_example() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("a.pgm");
        std::fs::write(&path, b"P5 2 2 255\n\x00\x01\x02\x03").unwrap();
        let img = load_pgm(&path).unwrap();
        assert_eq!((img.width(), img.height()), (2, 2));
        assert_eq!(img.pixels(), &[0, 1, 2, 3]);
    }

    #[test]
    fn comments_and_mixed_whitespace_parse() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("c.pgm");
        std::fs::write(&path, b"P5\n# made by hand\n 3\t1 # w h\n255\n\x09\x0a\x0b").unwrap();
        let img = load_pgm(&path).unwrap();
        assert_eq!((img.width(), img.height()), (3, 1));
        assert_eq!(img.pixels(), &[9, 10, 11]);
    }

    #[test]
    fn sixteen_bit_maxval_is_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("deep.pgm");
        std::fs::write(&path, b"P5 1 1 65535\n\x00\x00").unwrap();
        let err = load_pgm(&path).unwrap_err();
        assert!(matches!(err, CliError::Format(_, ref m) if m.contains("maxval")));
    }

    #[test]
    fn empty_and_truncated_files_are_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("empty.pgm");
        std::fs::write(&path, b"").unwrap();
        assert!(matches!(load_pgm(&path).unwrap_err(), CliError::Format(..)));
        std::fs::write(&path, b"P5 4 4 255\n\x00\x01").unwrap();
        let err = load_pgm(&path).unwrap_err();
        assert!(matches!(err, CliError::Format(_, ref m) if m.contains("truncated")));
    }

    #[test]
    fn save_then_load_is_identity_on_pixels() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("round.pgm");
        let img = GrayImage::from_fn(13, 7, |u, v| (u * 19 + v * 31) as u8);
        save_pgm(&path, &img).unwrap();
        let back = load_pgm(&path).unwrap();
        assert_eq!(back.pixels(), img.pixels());
        assert_eq!((back.width(), back.height()), (13, 7));
    }

    #[test]
    fn scaled_disparity_example() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("d.pgm");
        let mut map = DisparityMap::new_invalid(2, 1);
        map.set(0, 0, 10);
        save_disparity_pgm8(&path, &map, 64).unwrap();
        let img = load_pgm(&path).unwrap();
        assert_eq!(img.at(0, 0), 40);
        assert_eq!(img.at(1, 0), 0);
    }
}
