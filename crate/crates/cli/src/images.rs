//! Image loading and saving: PGM natively, other formats through `image`.

use std::path::Path;

use anyhow::Context;
use tiksplit::imaging::{quantize, read_pgm, write_pgm, Image};

use crate::error::{CliError, CliResult};

fn is_pgm(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"))
}

/// Loads a grayscale image on the `[0, 1]` scale. Colour inputs are reduced
/// with the luminance weights 0.299, 0.587, 0.114.
pub fn load(path: &Path) -> CliResult<Image> {
    if is_pgm(path) {
        return read_pgm(path)
            .with_context(|| format!("reading {}", path.display()))
            .map_err(CliError::io);
    }
    let decoded = image::open(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(CliError::io)?;
    let rgb = decoded.to_rgb32f();
    let (w, h) = rgb.dimensions();
    let pixels = rgb
        .pixels()
        .map(|p| (0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]) as f64)
        .collect();
    Image::new(h as usize, w as usize, pixels)
        .with_context(|| format!("decoding {}", path.display()))
        .map_err(CliError::io)
}

/// Saves as 8-bit grayscale; PGM for a `.pgm` extension, otherwise by extension.
pub fn save(img: &Image, path: &Path) -> CliResult {
    if is_pgm(path) {
        return write_pgm(path, img)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(CliError::io);
    }
    let bytes: Vec<u8> = img.pixels().iter().map(|&v| quantize(v)).collect();
    let buf = image::GrayImage::from_raw(img.width() as u32, img.height() as u32, bytes)
        .expect("buffer matches dimensions");
    buf.save(path)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(CliError::io)
}

/// The image as it reads back after an 8-bit save.
pub fn requantize(img: &Image) -> Image {
    Image::from_fn(img.height(), img.width(), |r, c| {
        f64::from(quantize(img.get(r, c))) / 255.0
    })
    .expect("quantized pixels are finite")
}
