use std::fmt::Write as _;

use crate::error::{invalid, Error, Result};

/// Normalized, separable Gaussian point-spread function on a centred odd
/// grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianPsf {
    size: usize,
    sigma: f64,
    /// Normalized 1-D profile; the 2-D weights are its outer product.
    profile: Vec<f64>,
}

/// Gaussian PSF with weights `∝ exp(−(i² + j²)/(2σ²))`, `i, j ∈ [−r, r]`,
/// summing to one. `sigma = +∞` gives the flat kernel.
pub fn gaussian_psf(size: usize, sigma: f64) -> Result<GaussianPsf> {
    if size == 0 || size.is_multiple_of(2) {
        return Err(invalid(format!("PSF size must be odd and positive, got {size}")));
    }
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(invalid(format!("PSF sigma must be positive, got {sigma}")));
    }
    let r = (size / 2) as f64;
    let raw: Vec<f64> = (0..size)
        .map(|k| {
            let i = k as f64 - r;
            (-(i * i) / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let total: f64 = raw.iter().sum();
    Ok(GaussianPsf {
        size,
        sigma,
        profile: raw.iter().map(|v| v / total).collect(),
    })
}

impl GaussianPsf {
    /// The 1×1 identity kernel.
    pub fn identity() -> Self {
        gaussian_psf(1, 1.0).expect("1x1 kernel is valid")
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn radius(&self) -> usize {
        self.size / 2
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn profile(&self) -> &[f64] {
        &self.profile
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.profile[i] * self.profile[j]
    }

    /// Row-major `size × size` weights.
    pub fn weights(&self) -> Vec<f64> {
        let mut w = Vec::with_capacity(self.size * self.size);
        for i in 0..self.size {
            for j in 0..self.size {
                w.push(self.weight(i, j));
            }
        }
        w
    }

    /// `"size sigma"` header followed by one row of weights per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.size, self.sigma);
        for i in 0..self.size {
            let row: Vec<String> = (0..self.size)
                .map(|j| format!("{:.17e}", self.weight(i, j)))
                .collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    /// Parses [`to_text`](Self::to_text) output. The weights must agree with
    /// the Gaussian named by the header to within `1e−12`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let size: usize = tokens
            .next()
            .ok_or_else(|| Error::Parse("missing PSF size".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad PSF size: {e}")))?;
        let sigma: f64 = tokens
            .next()
            .ok_or_else(|| Error::Parse("missing PSF sigma".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad PSF sigma: {e}")))?;
        let psf = gaussian_psf(size, sigma)?;
        let weights = tokens
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad weight {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if weights.len() != size * size {
            return Err(Error::Parse(format!(
                "expected {} weights, found {}",
                size * size,
                weights.len()
            )));
        }
        let worst = weights
            .iter()
            .zip(psf.weights())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if worst > 1e-12 {
            return Err(Error::Parse(format!(
                "weights differ from gaussian({size}, {sigma}) by {worst:e}"
            )));
        }
        Ok(psf)
    }
}
