//! Independent reference solutions shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use tiksplit::operators::LinearOperator;
use tiksplit::Vector;

pub fn v(x: &[f64]) -> Vector {
    Vector::from_slice(x).unwrap()
}

/// Minimizer of `f` over the grid `lo, lo + step, …, hi`.
pub fn grid_argmin_1d(f: impl Fn(f64) -> f64, lo: f64, hi: f64, step: f64) -> f64 {
    let count = ((hi - lo) / step).round() as usize;
    let mut best = (f64::INFINITY, lo);
    for k in 0..=count {
        let x = lo + k as f64 * step;
        let fx = f(x);
        if fx < best.0 {
            best = (fx, x);
        }
    }
    best.1
}

/// Grid minimizer of `f` on `[lo, hi]³`, first at `coarse` spacing over the
/// whole cube, then at `fine` spacing within two coarse cells of the best
/// coarse point.
pub fn grid_argmin_3d(f: impl Fn([f64; 3]) -> f64, lo: f64, hi: f64, coarse: f64, fine: f64) -> [f64; 3] {
    let search = |center: Option<[f64; 3]>, step: f64| {
        let (lows, n) = match center {
            None => ([lo; 3], ((hi - lo) / step).round() as usize),
            Some(c) => {
                let half = 2.0 * coarse;
                (
                    c.map(|ci| (ci - half).max(lo)),
                    (2.0 * half / step).round() as usize,
                )
            }
        };
        let mut best = (f64::INFINITY, [0.0; 3]);
        for i in 0..=n {
            for j in 0..=n {
                for k in 0..=n {
                    let p = [
                        (lows[0] + i as f64 * step).min(hi),
                        (lows[1] + j as f64 * step).min(hi),
                        (lows[2] + k as f64 * step).min(hi),
                    ];
                    let fp = f(p);
                    if fp < best.0 {
                        best = (fp, p);
                    }
                }
            }
        }
        best.1
    };
    let rough = search(None, coarse);
    search(Some(rough), fine)
}

/// Rows of a difference operator as index pairs `(i, j)` meaning `x_j − x_i`.
pub type Differences = Vec<(usize, usize)>;

pub fn chain_differences(n: usize) -> Differences {
    (0..n - 1).map(|i| (i, i + 1)).collect()
}

/// Horizontal then vertical forward differences of an `h × w` grid.
pub fn grid_differences(h: usize, w: usize) -> Differences {
    let mut d = Vec::new();
    for r in 0..h {
        for c in 0..w - 1 {
            d.push((r * w + c, r * w + c + 1));
        }
    }
    for r in 0..h - 1 {
        for c in 0..w {
            d.push((r * w + c, (r + 1) * w + c));
        }
    }
    d
}

pub fn difference_matrix(n: usize, d: &Differences) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(d.len(), n);
    for (row, &(i, j)) in d.iter().enumerate() {
        m[(row, i)] = -1.0;
        m[(row, j)] = 1.0;
    }
    m
}

pub fn difference_operator(n: usize, d: &Differences) -> LinearOperator {
    let fwd = d.clone();
    let back = d.clone();
    LinearOperator::new(
        n,
        d.len(),
        move |x| Vector::from_fn(fwd.len(), |r| x[fwd[r].1] - x[fwd[r].0]),
        move |y| {
            let mut out = vec![0.0; n];
            for (r, &(i, j)) in back.iter().enumerate() {
                out[i] -= y[r];
                out[j] += y[r];
            }
            Vector::new(out).unwrap()
        },
    )
}

/// `½‖x − b‖² + λ‖Dx‖₁`.
pub fn tv_objective(b: &[f64], lambda: f64, d: &Differences, x: &[f64]) -> f64 {
    let fit: f64 = x.iter().zip(b).map(|(p, q)| 0.5 * (p - q) * (p - q)).sum();
    let tv: f64 = d.iter().map(|&(i, j)| (x[j] - x[i]).abs()).sum();
    fit + lambda * tv
}

/// Exact minimizer of `½‖x − b‖² + λ‖Dx‖₁` by enumerating every sign pattern
/// `s ∈ {−1, 0, 1}^m` of `Dx`. For a fixed pattern the problem is the
/// equality-constrained least squares
/// `min ½‖x − b‖² + λ⟨Dᵀs, x⟩` s.t. `(Dx)_i = 0` where `s_i = 0`,
/// solved by projecting `b − λDᵀs` onto the null space of the active rows.
/// The true minimizer is the candidate with the smallest objective.
pub fn tv_sign_oracle(b: &[f64], lambda: f64, d: &Differences) -> Vec<f64> {
    let n = b.len();
    let m = d.len();
    let full = difference_matrix(n, d);
    let bv = DVector::from_column_slice(b);
    let mut best = (f64::INFINITY, vec![0.0; n]);
    let mut signs = vec![-1i8; m];
    loop {
        let s = DVector::from_iterator(m, signs.iter().map(|&s| s as f64));
        let target = &bv - lambda * full.transpose() * s;
        let zero_rows: Vec<usize> = (0..m).filter(|&r| signs[r] == 0).collect();
        let x = if zero_rows.is_empty() {
            target
        } else {
            let dz = full.select_rows(zero_rows.iter());
            let pinv = dz.clone().pseudo_inverse(1e-12).unwrap();
            &target - pinv * (&dz * &target)
        };
        let cand: Vec<f64> = x.iter().copied().collect();
        let val = tv_objective(b, lambda, d, &cand);
        if val < best.0 {
            best = (val, cand);
        }
        // next pattern in base 3
        let mut k = 0;
        while k < m && signs[k] == 1 {
            signs[k] = -1;
            k += 1;
        }
        if k == m {
            break;
        }
        signs[k] += 1;
    }
    best.1
}

/// Column-by-column dense matrix of a linear operator.
pub fn dense(op: &LinearOperator) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(op.out_dim(), op.in_dim());
    for j in 0..op.in_dim() {
        let mut e = Vector::zeros(op.in_dim()).into_vec();
        e[j] = 1.0;
        let col = op.apply(&Vector::new(e).unwrap());
        for i in 0..op.out_dim() {
            m[(i, j)] = col[i];
        }
    }
    m
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
}
