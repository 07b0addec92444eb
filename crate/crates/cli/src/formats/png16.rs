//! 16-bit grayscale PNG disparity files with the fixed-point convention
//! used by the KITTI benchmark: stored value = disparity * 256, value 0 =
//! no data. Written maps mark invalid pixels as 0, so a true disparity of
//! zero is indistinguishable from a missing pixel in this format.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use meshstereo_core::{DisparityMap, GroundTruth};

use crate::error::{CliError, Result};

pub fn load_gt_png16(path: &Path) -> Result<GroundTruth> {
    let file = File::open(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    let mut decoder = png::Decoder::new(BufReader::new(file));
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder
        .read_info()
        .map_err(|e| CliError::Format(path.to_path_buf(), e.to_string()))?;
    let mut buf = vec![
        0u8;
        reader
            .output_buffer_size()
            .ok_or_else(|| CliError::Format(path.to_path_buf(), "image too large".into()))?
    ];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| CliError::Format(path.to_path_buf(), e.to_string()))?;
    if info.color_type != png::ColorType::Grayscale {
        return Err(CliError::Format(
            path.to_path_buf(),
            format!("expected single-channel PNG, got {:?}", info.color_type),
        ));
    }
    if info.bit_depth != png::BitDepth::Sixteen {
        return Err(CliError::Format(
            path.to_path_buf(),
            format!("expected 16-bit PNG, got {:?}", info.bit_depth),
        ));
    }
    let (width, height) = (info.width as usize, info.height as usize);
    let bytes = &buf[..info.buffer_size()];
    // PNG stores 16-bit samples big-endian.
    let data: Vec<u16> = bytes
        .chunks_exact(2)
        .map(|c| u16::from_be_bytes([c[0], c[1]]))
        .collect();
    GroundTruth::new(width, height, data).map_err(CliError::Core)
}

pub fn save_disparity_png16(path: &Path, map: &DisparityMap) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    let mut encoder = png::Encoder::new(
        BufWriter::new(file),
        map.width() as u32,
        map.height() as u32,
    );
    encoder.set_color(png::ColorType::Grayscale);
    encoder.set_depth(png::BitDepth::Sixteen);
    let mut writer = encoder
        .write_header()
        .map_err(|e| CliError::Format(path.to_path_buf(), e.to_string()))?;
    let mut bytes = Vec::with_capacity(map.values().len() * 2);
    for &d in map.values() {
        let raw: u16 = if d == DisparityMap::INVALID {
            0
        } else {
            (u32::from(d) * 256).min(u32::from(u16::MAX)) as u16
        };
        bytes.extend_from_slice(&raw.to_be_bytes());
    }
    writer
        .write_image_data(&bytes)
        .map_err(|e| CliError::Format(path.to_path_buf(), e.to_string()))
}
