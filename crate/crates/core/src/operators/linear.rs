//! Linear operators with adjoints, a dense adapter and norm estimation.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{diagnostics::random_vector_with, MapRule};
use crate::error::{check_dims, invalid, Error, Result};
use crate::vector::Vector;

pub const DEFAULT_POWER_ITERS: usize = 100;
pub const DEFAULT_POWER_SEED: u64 = 42;
/// Power iteration underestimates; step-size checks use the estimate scaled
/// by this factor.
pub const NORM_SAFETY_FACTOR: f64 = 1.01;

#[derive(Clone)]
pub struct LinearOperator {
    in_dim: usize,
    out_dim: usize,
    apply: MapRule,
    adjoint: MapRule,
}

impl fmt::Debug for LinearOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinearOperator({} -> {})", self.in_dim, self.out_dim)
    }
}

impl LinearOperator {
    pub fn new(
        in_dim: usize,
        out_dim: usize,
        apply: impl Fn(&Vector) -> Vector + Send + Sync + 'static,
        adjoint: impl Fn(&Vector) -> Vector + Send + Sync + 'static,
    ) -> Self {
        assert!(
            in_dim > 0 && out_dim > 0,
            "linear operator dimensions must be positive"
        );
        Self {
            in_dim,
            out_dim,
            apply: Arc::new(apply),
            adjoint: Arc::new(adjoint),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(dim, dim, Vector::clone, Vector::clone)
    }

    pub fn scaled_identity(dim: usize, s: f64) -> Self {
        Self::new(dim, dim, move |x| x.scale(s), move |x| x.scale(s))
    }

    pub fn zero(in_dim: usize, out_dim: usize) -> Self {
        Self::new(
            in_dim,
            out_dim,
            move |_| Vector::zeros(out_dim),
            move |_| Vector::zeros(in_dim),
        )
    }

    pub fn from_dense(m: DenseMatrix) -> Self {
        let m = Arc::new(m);
        let mt = m.clone();
        Self::new(m.cols, m.rows, move |x| m.matvec(x), move |y| mt.tmatvec(y))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &LinearOperator) -> Result<Self> {
        check_dims(inner.out_dim, self.in_dim)?;
        let (outer_a, inner_a) = (self.apply.clone(), inner.apply.clone());
        let (outer_t, inner_t) = (self.adjoint.clone(), inner.adjoint.clone());
        Ok(Self::new(
            inner.in_dim,
            self.out_dim,
            move |x| outer_a(&inner_a(x)),
            move |y| inner_t(&outer_t(y)),
        ))
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        debug_assert_eq!(x.dim(), self.in_dim);
        (self.apply)(x)
    }

    pub fn adjoint(&self, y: &Vector) -> Vector {
        debug_assert_eq!(y.dim(), self.out_dim);
        (self.adjoint)(y)
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    /// Materializes the operator column by column.
    pub fn to_dense(&self) -> DenseMatrix {
        let mut data = vec![0.0; self.out_dim * self.in_dim];
        for j in 0..self.in_dim {
            let mut e = Vector::zeros(self.in_dim);
            e.as_mut_slice()[j] = 1.0;
            let col = self.apply(&e);
            for i in 0..self.out_dim {
                data[i * self.in_dim + j] = col[i];
            }
        }
        DenseMatrix {
            rows: self.out_dim,
            cols: self.in_dim,
            data,
        }
    }
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(invalid("matrix dimensions must be positive"));
        }
        check_dims(rows * cols, data.len())?;
        if let Some((index, &value)) = data.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        let n = d.len();
        let mut data = vec![0.0; n * n];
        for (i, &v) in d.iter().enumerate() {
            data[i * n + i] = v;
        }
        Self::new(n, n, data)
    }

    /// Parses `"rows cols"` followed by `rows*cols` whitespace-separated
    /// reals in row-major order.
    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let mut dim = |what: &str| -> Result<usize> {
            tokens
                .next()
                .ok_or_else(|| Error::Parse(format!("missing {what}")))?
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("bad {what}: {e}")))
        };
        let rows = dim("row count")?;
        let cols = dim("column count")?;
        let data = tokens
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad entry {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if data.len() != rows * cols {
            return Err(Error::Parse(format!(
                "expected {} entries for a {rows}x{cols} matrix, found {}",
                rows * cols,
                data.len()
            )));
        }
        Self::new(rows, cols, data)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn matvec(&self, x: &Vector) -> Vector {
        assert_eq!(x.dim(), self.cols, "matvec: dimension mismatch");
        Vector::from_fn(self.rows, |r| {
            self.row(r).iter().zip(x.iter()).map(|(a, b)| a * b).sum()
        })
    }

    pub fn tmatvec(&self, y: &Vector) -> Vector {
        assert_eq!(y.dim(), self.rows, "tmatvec: dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for r in 0..self.rows {
            let yr = y[r];
            for (o, a) in out.iter_mut().zip(self.row(r)) {
                *o += a * yr;
            }
        }
        Vector::from_vec(out)
    }
}

/// Power iteration on `LᵀL` from a seeded random start; returns the square
/// root of the final Rayleigh quotient. The Rayleigh quotient never exceeds
/// the top eigenvalue, so the result underestimates `‖L‖` (up to rounding).
pub fn estimate_operator_norm(l: &LinearOperator, iters: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = random_vector_with(&mut rng, l.in_dim(), 1.0);
    let nx = x.norm();
    if nx == 0.0 {
        return 0.0;
    }
    x = x.scale(1.0 / nx);
    let mut estimate = 0.0;
    for _ in 0..iters.max(1) {
        let lx = l.apply(&x);
        // ‖x‖ = 1, so the Rayleigh quotient of LᵀL is ‖Lx‖².
        estimate = lx.norm();
        let next = l.adjoint(&lx);
        let nn = next.norm();
        if nn == 0.0 || !nn.is_finite() {
            return if nn == 0.0 { 0.0 } else { estimate };
        }
        x = next.scale(1.0 / nn);
    }
    estimate.max(l.apply(&x).norm())
}

/// Norm estimate with default iteration count and seed, inflated by
/// [`NORM_SAFETY_FACTOR`].
pub fn safe_norm_bound(l: &LinearOperator) -> f64 {
    NORM_SAFETY_FACTOR * estimate_operator_norm(l, DEFAULT_POWER_ITERS, DEFAULT_POWER_SEED)
}

/// `Lᵀ(Lx − b)`, the gradient of `½‖Lx − b‖²`.
pub fn least_squares_gradient(l: &LinearOperator, b: &Vector, x: &Vector) -> Result<Vector> {
    check_dims(x.dim(), l.in_dim())?;
    check_dims(b.dim(), l.out_dim())?;
    let r = &l.apply(x) - b;
    Ok(l.adjoint(&r))
}
