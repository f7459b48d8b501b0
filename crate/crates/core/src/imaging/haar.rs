use std::f64::consts::FRAC_1_SQRT_2 as S;

use super::{Image, ImageDims};
use crate::error::{check_dims, Result};
use crate::vector::Vector;

// Each level filters rows, then columns, of the current top-left band and
// stores the result in Mallat layout: [[LL, LH], [HL, HH]].

fn forward_level(data: &mut [f64], width: usize, h: usize, w: usize, buf: &mut Vec<f64>) {
    let (hh, hw) = (h / 2, w / 2);
    for r in 0..h {
        let row = &mut data[r * width..r * width + w];
        buf.clear();
        buf.extend_from_slice(row);
        for j in 0..hw {
            let (a, b) = (buf[2 * j], buf[2 * j + 1]);
            row[j] = (a + b) * S;
            row[hw + j] = (a - b) * S;
        }
    }
    for c in 0..w {
        buf.clear();
        buf.extend((0..h).map(|r| data[r * width + c]));
        for i in 0..hh {
            let (a, b) = (buf[2 * i], buf[2 * i + 1]);
            data[i * width + c] = (a + b) * S;
            data[(hh + i) * width + c] = (a - b) * S;
        }
    }
}

fn inverse_level(data: &mut [f64], width: usize, h: usize, w: usize, buf: &mut Vec<f64>) {
    let (hh, hw) = (h / 2, w / 2);
    for c in 0..w {
        buf.clear();
        buf.extend((0..h).map(|r| data[r * width + c]));
        for i in 0..hh {
            let (lo, hi) = (buf[i], buf[hh + i]);
            data[2 * i * width + c] = (lo + hi) * S;
            data[(2 * i + 1) * width + c] = (lo - hi) * S;
        }
    }
    for r in 0..h {
        let row = &mut data[r * width..r * width + w];
        buf.clear();
        buf.extend_from_slice(row);
        for j in 0..hw {
            let (lo, hi) = (buf[j], buf[hw + j]);
            row[2 * j] = (lo + hi) * S;
            row[2 * j + 1] = (lo - hi) * S;
        }
    }
}

pub(crate) fn dwt_slice(data: &[f64], dims: ImageDims, levels: usize) -> Vec<f64> {
    let mut out = data.to_vec();
    let mut buf = Vec::with_capacity(dims.height.max(dims.width));
    let (mut h, mut w) = (dims.height, dims.width);
    for _ in 0..levels {
        forward_level(&mut out, dims.width, h, w, &mut buf);
        h /= 2;
        w /= 2;
    }
    out
}

pub(crate) fn idwt_slice(data: &[f64], dims: ImageDims, levels: usize) -> Vec<f64> {
    let mut out = data.to_vec();
    let mut buf = Vec::with_capacity(dims.height.max(dims.width));
    for level in (0..levels).rev() {
        inverse_level(
            &mut out,
            dims.width,
            dims.height >> level,
            dims.width >> level,
            &mut buf,
        );
    }
    out
}

/// Orthonormal 2-D Haar analysis with `levels` stages, returned as the
/// row-major Mallat coefficient array.
pub fn haar_dwt(img: &Image, levels: usize) -> Result<Vector> {
    img.dims().check_levels(levels)?;
    Ok(Vector::from_vec(dwt_slice(img.pixels(), img.dims(), levels)))
}

/// Inverse (and adjoint) of [`haar_dwt`].
pub fn haar_idwt(coeffs: &Vector, dims: ImageDims, levels: usize) -> Result<Image> {
    dims.check_levels(levels)?;
    check_dims(coeffs.dim(), dims.len())?;
    Image::new(
        dims.height,
        dims.width,
        idwt_slice(coeffs.as_slice(), dims, levels),
    )
}
