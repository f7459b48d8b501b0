use super::Image;
use crate::error::{check_dims, Result};

/// Mean squared pixel difference.
pub fn mse(reference: &Image, test: &Image) -> Result<f64> {
    check_dims(reference.height(), test.height())?;
    check_dims(reference.width(), test.width())?;
    let sum: f64 = reference
        .pixels()
        .iter()
        .zip(test.pixels())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(sum / reference.len() as f64)
}

/// Peak signal-to-noise ratio in decibels with peak 1 on the `[0, 1]`
/// scale; `+∞` for identical images.
pub fn psnr(reference: &Image, test: &Image) -> Result<f64> {
    let m = mse(reference, test)?;
    Ok(if m == 0.0 {
        f64::INFINITY
    } else {
        -10.0 * m.log10()
    })
}
