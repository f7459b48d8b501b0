use std::sync::Arc;

use super::{for_each_row, transpose, GaussianPsf, Image, ImageDims};
use crate::error::{check_dims, Error, Result};
use crate::operators::LinearOperator;
use crate::vector::Vector;

/// Half-sample symmetric reflection: `−k ↦ k − 1`, `n − 1 + k ↦ n − k`.
fn reflect(index: isize, n: usize) -> usize {
    let n = n as isize;
    let r = if index < 0 {
        -index - 1
    } else if index >= n {
        2 * n - 1 - index
    } else {
        index
    };
    debug_assert!((0..n).contains(&r));
    r as usize
}

/// Gather table: entry `[i * size + k]` is the source index for output `i`
/// and tap `k`.
fn axis_table(n: usize, size: usize) -> Vec<usize> {
    let radius = (size / 2) as isize;
    let mut table = Vec::with_capacity(n * size);
    for i in 0..n as isize {
        for k in 0..size as isize {
            table.push(reflect(i + k - radius, n));
        }
    }
    table
}

/// 2-D correlation with a Gaussian PSF under reflexive (Neumann) boundary
/// conditions, as a separable row pass followed by a column pass.
#[derive(Clone, Debug)]
pub struct NeumannBlur {
    psf: GaussianPsf,
    dims: ImageDims,
    row_table: Arc<Vec<usize>>,
    col_table: Arc<Vec<usize>>,
}

impl NeumannBlur {
    pub fn new(psf: GaussianPsf, dims: ImageDims) -> Result<Self> {
        if psf.size() > dims.height.min(dims.width) {
            return Err(Error::Image(format!(
                "{0}x{0} kernel does not fit a {1}x{2} image",
                psf.size(),
                dims.height,
                dims.width
            )));
        }
        let size = psf.size();
        Ok(Self {
            row_table: Arc::new(axis_table(dims.width, size)),
            col_table: Arc::new(axis_table(dims.height, size)),
            psf,
            dims,
        })
    }

    pub fn psf(&self) -> &GaussianPsf {
        &self.psf
    }

    pub fn dims(&self) -> ImageDims {
        self.dims
    }

    fn gather_rows(&self, data: &[f64], width: usize, table: &[usize]) -> Vec<f64> {
        let p = self.psf.profile();
        let size = p.len();
        let mut out = vec![0.0; data.len()];
        for_each_row(&mut out, width, |r, row| {
            let src = &data[r * width..(r + 1) * width];
            for (c, o) in row.iter_mut().enumerate() {
                let taps = &table[c * size..(c + 1) * size];
                *o = taps.iter().zip(p).map(|(&j, w)| w * src[j]).sum();
            }
        });
        out
    }

    fn scatter_rows(&self, data: &[f64], width: usize, table: &[usize]) -> Vec<f64> {
        let p = self.psf.profile();
        let size = p.len();
        let mut out = vec![0.0; data.len()];
        for_each_row(&mut out, width, |r, row| {
            let src = &data[r * width..(r + 1) * width];
            for (c, &v) in src.iter().enumerate() {
                let taps = &table[c * size..(c + 1) * size];
                for (&j, w) in taps.iter().zip(p) {
                    row[j] += w * v;
                }
            }
        });
        out
    }

    pub fn apply_slice(&self, data: &[f64]) -> Vec<f64> {
        let ImageDims { height, width } = self.dims;
        let rows = self.gather_rows(data, width, &self.row_table);
        let cols = self.gather_rows(&transpose(&rows, height, width), height, &self.col_table);
        transpose(&cols, width, height)
    }

    pub fn adjoint_slice(&self, data: &[f64]) -> Vec<f64> {
        let ImageDims { height, width } = self.dims;
        let cols = self.scatter_rows(&transpose(data, height, width), height, &self.col_table);
        self.scatter_rows(&transpose(&cols, width, height), width, &self.row_table)
    }

    pub fn apply(&self, img: &Image) -> Result<Image> {
        self.check(img)?;
        Image::new(self.dims.height, self.dims.width, self.apply_slice(img.pixels()))
    }

    pub fn adjoint(&self, img: &Image) -> Result<Image> {
        self.check(img)?;
        Image::new(
            self.dims.height,
            self.dims.width,
            self.adjoint_slice(img.pixels()),
        )
    }

    fn check(&self, img: &Image) -> Result<()> {
        check_dims(img.height(), self.dims.height)?;
        check_dims(img.width(), self.dims.width)
    }

    /// The blur acting on row-major pixel vectors.
    pub fn to_operator(&self) -> LinearOperator {
        let n = self.dims.len();
        let (fwd, bwd) = (self.clone(), self.clone());
        LinearOperator::new(
            n,
            n,
            move |x| Vector::from_vec(fwd.apply_slice(x.as_slice())),
            move |y| Vector::from_vec(bwd.adjoint_slice(y.as_slice())),
        )
    }

    /// Dense `n × n` matrix (row-major) of the 1-D blur along rows
    /// (`vertical = false`, `n = width`) or columns (`n = height`).
    pub fn axis_matrix(&self, vertical: bool) -> Vec<f64> {
        let (n, table) = if vertical {
            (self.dims.height, &self.col_table)
        } else {
            (self.dims.width, &self.row_table)
        };
        let p = self.psf.profile();
        let size = p.len();
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for (k, w) in p.iter().enumerate() {
                m[i * n + table[i * size + k]] += w;
            }
        }
        m
    }
}

/// Blurs `img` with `psf` under reflexive boundary conditions.
pub fn convolve_neumann(psf: &GaussianPsf, img: &Image) -> Result<Image> {
    NeumannBlur::new(psf.clone(), img.dims())?.apply(img)
}

/// Adjoint of [`convolve_neumann`]; equal to it for the symmetric Gaussian.
pub fn convolve_neumann_adjoint(psf: &GaussianPsf, img: &Image) -> Result<Image> {
    NeumannBlur::new(psf.clone(), img.dims())?.adjoint(img)
}
