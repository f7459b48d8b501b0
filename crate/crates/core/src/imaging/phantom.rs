use super::Image;
use crate::error::Result;

/// Deterministic synthetic test scene: a smooth background, flat shapes with
/// sharp edges and a patch of fine stripes. Coordinates are scaled to the
/// image so every size shows the same scene.
pub fn phantom(height: usize, width: usize) -> Result<Image> {
    let (hf, wf) = (height as f64, width as f64);
    Image::from_fn(height, width, |r, c| {
        let y = (r as f64 + 0.5) / hf;
        let x = (c as f64 + 0.5) / wf;
        let mut v = 0.25 + 0.2 * x + 0.1 * y;
        if (x - 0.33).powi(2) + (y - 0.35).powi(2) < 0.04 {
            v = 0.85;
        }
        if (0.55..0.9).contains(&x) && (0.15..0.45).contains(&y) {
            v = 0.1;
        }
        if (0.6..0.85).contains(&x) && (0.6..0.9).contains(&y) {
            v = 0.5 + 0.4 * (x * wf * std::f64::consts::FRAC_PI_2).sin().signum();
        }
        if (x - 0.25).abs() + (y - 0.75).abs() < 0.15 {
            v = 0.65 - 0.3 * y;
        }
        v.clamp(0.0, 1.0)
    })
}
