//! Image model for wavelet-domain deblurring: Gaussian blur with reflexive
//! boundaries, orthonormal Haar transform, PGM I/O and PSNR.

mod blur;
mod deblur;
mod haar;
mod metrics;
mod pgm;
mod phantom;
mod psf;

use std::sync::OnceLock;

use crate::error::{check_dims, invalid, Error, Result};
use crate::vector::Vector;

pub use blur::{convolve_neumann, convolve_neumann_adjoint, NeumannBlur};
pub use deblur::{
    compose_deblur_operator, Algorithm, DeblurOptions, DeblurProblem, DeblurRun, DEFAULT_LEVELS,
};
pub use haar::{haar_dwt, haar_idwt};
pub use metrics::{mse, psnr};
pub use pgm::{decode_pgm, encode_pgm, quantize, read_pgm, write_pgm};
pub use phantom::phantom;
pub use psf::{gaussian_psf, GaussianPsf};

/// Grayscale image, row-major, nominally on the `[0, 1]` scale.
///
/// Intermediate results (blurred data with noise, unclamped
/// reconstructions) may leave `[0, 1]`; only finiteness is enforced.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    height: usize,
    width: usize,
    pixels: Vec<f64>,
}

impl Image {
    pub fn new(height: usize, width: usize, pixels: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::Image(format!(
                "image dimensions must be positive, got {height}x{width}"
            )));
        }
        check_dims(height * width, pixels.len())?;
        if let Some((index, &value)) = pixels.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self {
            height,
            width,
            pixels,
        })
    }

    pub fn constant(height: usize, width: usize, value: f64) -> Result<Self> {
        Self::new(height, width, vec![value; height * width])
    }

    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut pixels = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                pixels.push(f(r, c));
            }
        }
        Self::new(height, width, pixels)
    }

    pub fn from_vector(height: usize, width: usize, v: &Vector) -> Result<Self> {
        Self::new(height, width, v.as_slice().to_vec())
    }

    pub fn to_vector(&self) -> Vector {
        Vector::from_vec(self.pixels.clone())
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dims(&self) -> ImageDims {
        ImageDims::new(self.height, self.width)
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.pixels[r * self.width + c]
    }

    pub fn clamped(&self) -> Image {
        Image {
            pixels: self.pixels.iter().map(|v| v.clamp(0.0, 1.0)).collect(),
            ..*self
        }
    }

    /// Pixels of row `r`.
    pub fn row(&self, r: usize) -> &[f64] {
        &self.pixels[r * self.width..(r + 1) * self.width]
    }
}

/// Height and width of an image.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ImageDims {
    pub height: usize,
    pub width: usize,
}

impl ImageDims {
    pub fn new(height: usize, width: usize) -> Self {
        Self { height, width }
    }

    pub fn len(&self) -> usize {
        self.height * self.width
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Rejects dimensions not divisible by `2^levels`.
    pub fn check_levels(&self, levels: usize) -> Result<()> {
        let block = 1usize
            .checked_shl(levels as u32)
            .ok_or_else(|| invalid(format!("too many wavelet levels: {levels}")))?;
        if self.height == 0
            || self.width == 0
            || !self.height.is_multiple_of(block)
            || !self.width.is_multiple_of(block)
        {
            return Err(Error::Image(format!(
                "{}x{} image: both dimensions must be divisible by 2^{levels} = {block}",
                self.height, self.width
            )));
        }
        Ok(())
    }
}

/// Worker threads for row-parallel image kernels, from `TIKSPLIT_THREADS`
/// (default 1). Results do not depend on the count.
pub fn threads() -> usize {
    static THREADS: OnceLock<usize> = OnceLock::new();
    *THREADS.get_or_init(|| {
        std::env::var("TIKSPLIT_THREADS")
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .filter(|&n| n >= 1)
            .unwrap_or(1)
    })
}

/// Fills `out` (rows of length `width`) by calling `f(row_index, row)`,
/// splitting the rows across [`threads`] workers.
pub(crate) fn for_each_row(out: &mut [f64], width: usize, f: impl Fn(usize, &mut [f64]) + Sync) {
    let rows = out.len() / width;
    let workers = threads().min(rows).max(1);
    if workers == 1 {
        for (r, row) in out.chunks_mut(width).enumerate() {
            f(r, row);
        }
        return;
    }
    let per = rows.div_ceil(workers);
    std::thread::scope(|s| {
        for (chunk_index, chunk) in out.chunks_mut(per * width).enumerate() {
            let f = &f;
            s.spawn(move || {
                for (k, row) in chunk.chunks_mut(width).enumerate() {
                    f(chunk_index * per + k, row);
                }
            });
        }
    });
}

pub(crate) fn transpose(data: &[f64], height: usize, width: usize) -> Vec<f64> {
    let mut out = vec![0.0; data.len()];
    for r in 0..height {
        for c in 0..width {
            out[c * height + r] = data[r * width + c];
        }
    }
    out
}
