//! Binary 8-bit PGM (`P5`).

use std::path::Path;

use super::Image;
use crate::error::{Error, Result};

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&b| b != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Image(format!("PGM header: missing or invalid {what}")))
    }
}

/// 8-bit value of a `[0, 1]` intensity: clamp, scale by 255, round half up.
pub fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8
}

pub fn decode_pgm(bytes: &[u8]) -> Result<Image> {
    if !bytes.starts_with(b"P5") {
        return Err(Error::Image("not a binary PGM (expected P5 magic)".into()));
    }
    let mut h = Header { bytes, pos: 2 };
    let width = h.number("width")?;
    let height = h.number("height")?;
    let maxval = h.number("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::Image(format!(
            "PGM maxval {maxval} unsupported (need 1..=255)"
        )));
    }
    if !bytes.get(h.pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(Error::Image(
            "PGM header must end with one whitespace byte".into(),
        ));
    }
    let data = &bytes[h.pos + 1..];
    let n = width * height;
    if data.len() < n {
        return Err(Error::Image(format!(
            "PGM raster truncated: expected {n} bytes, found {}",
            data.len()
        )));
    }
    let scale = maxval as f64;
    Image::new(
        height,
        width,
        data[..n].iter().map(|&b| f64::from(b) / scale).collect(),
    )
}

pub fn encode_pgm(img: &Image) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.pixels().iter().map(|&v| quantize(v)));
    out
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<Image> {
    decode_pgm(&std::fs::read(path)?)
}

pub fn write_pgm(path: impl AsRef<Path>, img: &Image) -> Result<()> {
    std::fs::write(path, encode_pgm(img))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantization_rounds_half_up() {
        assert_eq!(quantize(0.0), 0);
        assert_eq!(quantize(1.0), 255);
        assert_eq!(quantize(-0.3), 0);
        assert_eq!(quantize(1.7), 255);
        assert_eq!(quantize(0.5), 128);
        assert_eq!(quantize(2.5 / 255.0), 3);
        assert_eq!(quantize(2.49 / 255.0), 2);
    }

    #[test]
    fn every_level_round_trips() {
        for b in 0..=255u8 {
            assert_eq!(quantize(f64::from(b) / 255.0), b);
        }
    }

    #[test]
    fn header_with_comments() {
        let mut bytes = b"P5\n# made by hand\n3 2 # dims\n255\n".to_vec();
        bytes.extend([0, 51, 102, 153, 204, 255]);
        let img = decode_pgm(&bytes).unwrap();
        assert_eq!((img.height(), img.width()), (2, 3));
        assert!((img.get(1, 0) - 0.6).abs() < 1e-15);
        assert_eq!(decode_pgm(&encode_pgm(&img)).unwrap(), img);
    }

    #[test]
    fn small_maxval_is_rescaled() {
        let bytes = b"P5 2 1 15\n\x00\x0f".to_vec();
        let img = decode_pgm(&bytes).unwrap();
        assert_eq!(img.pixels(), &[0.0, 1.0]);
    }

    #[test]
    fn malformed_input() {
        assert!(decode_pgm(b"P2 1 1 255\n0").is_err());
        assert!(decode_pgm(b"P5 2 2 255\n\x00").is_err());
        assert!(decode_pgm(b"P5 2 2 65535\n").is_err());
        assert!(decode_pgm(b"P5 x 2 255\n").is_err());
    }
}
