//! Single-channel PFM files. The header scale is written as -1.0, which by
//! convention marks the payload as little-endian 32-bit floats, and rows are
//! stored bottom-up. Pixels with no value are written as -1.0.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use meshstereo_core::prior::raster::PlanePriorMatrix;
use meshstereo_core::DisparityMap;

use crate::error::{CliError, Result};

fn write_pfm(path: &Path, width: usize, height: usize, rows_top_down: &[f32]) -> Result<()> {
    debug_assert_eq!(rows_top_down.len(), width * height);
    let file = File::create(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    let mut out = BufWriter::new(file);
    let io_err = |e| CliError::Io(path.to_path_buf(), e);
    write!(out, "Pf\n{width} {height}\n-1.0\n").map_err(io_err)?;
    for v in (0..height).rev() {
        let row = &rows_top_down[v * width..(v + 1) * width];
        let mut bytes = Vec::with_capacity(width * 4);
        for &x in row {
            bytes.extend_from_slice(&x.to_le_bytes());
        }
        out.write_all(&bytes).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

pub fn save_disparity_pfm(path: &Path, map: &DisparityMap) -> Result<()> {
    let rows: Vec<f32> = map
        .values()
        .iter()
        .map(|&d| if d == DisparityMap::INVALID { -1.0 } else { f32::from(d) })
        .collect();
    write_pfm(path, map.width(), map.height(), &rows)
}

pub fn save_prior_pfm(path: &Path, prior: &PlanePriorMatrix) -> Result<()> {
    let (width, height) = (prior.width(), prior.height());
    let mut rows = Vec::with_capacity(width * height);
    for v in 0..height {
        for u in 0..width {
            rows.push(prior.prior(u, v).map_or(-1.0, |p| p as f32));
        }
    }
    write_pfm(path, width, height, &rows)
}

/// Reads a little-endian grayscale PFM back into top-down row-major floats.
pub fn load_pfm(path: &Path) -> Result<(usize, usize, Vec<f32>)> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    let bad = |m: &str| CliError::Format(path.to_path_buf(), m.to_string());
    let mut pos = 0usize;
    let mut token = || -> Result<String> {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        let tok = String::from_utf8_lossy(&bytes[start..pos]).into_owned();
        // Exactly one whitespace byte separates tokens and payload.
        if pos < bytes.len() {
            pos += 1;
        }
        Ok(tok)
    };
    if token()? != "Pf" {
        return Err(bad("not a grayscale PFM (expected Pf magic)"));
    }
    let width: usize = token()?.parse().map_err(|_| bad("bad width"))?;
    let height: usize = token()?.parse().map_err(|_| bad("bad height"))?;
    let scale: f32 = token()?.parse().map_err(|_| bad("bad scale"))?;
    if scale >= 0.0 {
        return Err(bad("big-endian PFM is not supported"));
    }
    let payload = &bytes[pos..];
    if payload.len() != width * height * 4 {
        return Err(bad("payload size does not match dimensions"));
    }
    let mut rows = vec![0.0f32; width * height];
    for v in 0..height {
        let src = &payload[(height - 1 - v) * width * 4..][..width * 4];
        for (u, c) in src.chunks_exact(4).enumerate() {
            rows[v * width + u] = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
        }
    }
    Ok((width, height, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn round_trip_disparity_map() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("d.pfm");
        let mut map = DisparityMap::new_invalid(3, 2);
        map.set(0, 0, 5);
        map.set(2, 1, 31);
        save_disparity_pfm(&path, &map).unwrap();
        let (w, h, rows) = load_pfm(&path).unwrap();
        assert_eq!((w, h), (3, 2));
        assert_eq!(rows, vec![5.0, -1.0, -1.0, -1.0, -1.0, 31.0]);
    }

    #[test]
    fn rows_are_stored_bottom_up() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("flip.pfm");
        let map = DisparityMap::from_raw(2, 2, vec![1, 2, 3, 4]).unwrap();
        save_disparity_pfm(&path, &map).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let header_len = b"Pf\n2 2\n-1.0\n".len();
        let first = f32::from_le_bytes(bytes[header_len..header_len + 4].try_into().unwrap());
        // The file starts with the bottom image row.
        assert_eq!(first, 3.0);
    }

    #[test]
    fn positive_scale_is_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("be.pfm");
        std::fs::write(&path, b"Pf\n1 1\n1.0\n\x00\x00\x80\x3f").unwrap();
        assert!(matches!(load_pfm(&path).unwrap_err(), CliError::Format(..)));
    }
}
