//! Dense real vectors and product-space vectors.

use std::ops::{Add, Index, Mul, Neg, Sub};

use crate::error::{check_dims, Error, Result};

/// A point of a finite-dimensional real Hilbert space.
///
/// Construction through [`Vector::new`] rejects empty input and non-finite
/// entries. Arithmetic on already-valid vectors is unchecked.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidParameter("vector must have dim >= 1".into()));
        }
        if let Some((index, &value)) = entries.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self(entries))
    }

    pub fn from_slice(entries: &[f64]) -> Result<Self> {
        Self::new(entries.to_vec())
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize) -> f64) -> Self {
        Self((0..dim).map(f).collect())
    }

    pub(crate) fn from_vec(entries: Vec<f64>) -> Self {
        Self(entries)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    /// Inner product. Panics on dimension mismatch.
    pub fn dot(&self, other: &Vector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dot: dimension mismatch");
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_l1(&self) -> f64 {
        self.0.iter().map(|v| v.abs()).sum()
    }

    pub fn distance(&self, other: &Vector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "distance: dimension mismatch");
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, a: f64) -> Vector {
        self.map(|v| a * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Vector {
        Vector(self.0.iter().map(|&v| f(v)).collect())
    }

    /// Componentwise combination. Panics on dimension mismatch.
    pub fn zip_map(&self, other: &Vector, f: impl Fn(f64, f64) -> f64) -> Vector {
        assert_eq!(self.dim(), other.dim(), "zip_map: dimension mismatch");
        Vector(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect())
    }

    /// `a * self + b * other`.
    pub fn lincomb(&self, a: f64, other: &Vector, b: f64) -> Vector {
        self.zip_map(other, |x, y| a * x + b * y)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &Vector {
    type Output = Vector;
    fn mul(self, rhs: f64) -> Vector {
        self.scale(rhs)
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        self.scale(-1.0)
    }
}

/// Returns `a * x + y`.
pub fn axpy(a: f64, x: &Vector, y: &Vector) -> Result<Vector> {
    check_dims(x.dim(), y.dim())?;
    Ok(x.lincomb(a, y, 1.0))
}

/// Euclidean norm.
pub fn norm(x: &Vector) -> f64 {
    x.norm()
}

/// A point of the product space `H x Ω_1 x ... x Ω_m`.
///
/// Block 0 is the primal component; blocks `1..` are the dual components.
/// Block dimensions are fixed at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductVector {
    blocks: Vec<Vector>,
}

impl ProductVector {
    pub fn new(blocks: Vec<Vector>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidParameter(
                "product vector needs at least one block".into(),
            ));
        }
        Ok(Self { blocks })
    }

    pub fn zeros(dims: &[usize]) -> Result<Self> {
        Self::new(dims.iter().map(|&d| Vector::zeros(d)).collect())
    }

    pub fn from_parts(primal: Vector, duals: Vec<Vector>) -> Self {
        let mut blocks = Vec::with_capacity(duals.len() + 1);
        blocks.push(primal);
        blocks.extend(duals);
        Self { blocks }
    }

    pub fn primal(&self) -> &Vector {
        &self.blocks[0]
    }

    pub fn duals(&self) -> &[Vector] {
        &self.blocks[1..]
    }

    pub fn dual(&self, i: usize) -> &Vector {
        &self.blocks[i + 1]
    }

    pub fn blocks(&self) -> &[Vector] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<Vector> {
        self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(Vector::dim).collect()
    }

    pub fn dot(&self, other: &ProductVector) -> f64 {
        assert_eq!(self.dims(), other.dims(), "product dot: block layout mismatch");
        self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.dot(b)).sum()
    }

    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(Vector::norm_sq).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &ProductVector) -> f64 {
        assert_eq!(
            self.dims(),
            other.dims(),
            "product distance: block layout mismatch"
        );
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| {
                let d = a.distance(b);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, a: f64) -> ProductVector {
        ProductVector {
            blocks: self.blocks.iter().map(|b| b.scale(a)).collect(),
        }
    }

    pub fn lincomb(&self, a: f64, other: &ProductVector, b: f64) -> ProductVector {
        assert_eq!(
            self.dims(),
            other.dims(),
            "product lincomb: block layout mismatch"
        );
        ProductVector {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(x, y)| x.lincomb(a, y, b))
                .collect(),
        }
    }
}
