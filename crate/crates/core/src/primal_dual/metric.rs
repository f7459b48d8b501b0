//! Step-size certification for the product-space metrics.
//!
//! Forward–backward metric `V` and Douglas–Rachford metric `W` act on
//! `(x, v₁, …, v_m)` as
//!
//! ```text
//! V(x, v) = (x/τ − Σ Lᵢ*vᵢ,        vᵢ/σᵢ − Lᵢx)
//! W(x, v) = (x/τ − ½ Σ Lᵢ*vᵢ,      vᵢ/σᵢ − ½ Lᵢx)
//! ```
//!
//! and the skew part is `ξ(x, v) = (Σ Lᵢ*vᵢ, −Lᵢx)`. These dense forms are
//! used only by property tests; the solvers never apply them.

use super::{DualLink, PrimalDualProblem};
use crate::error::{Error, Result};
use crate::vector::ProductVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    ForwardBackward,
    DouglasRachford,
}

impl Scheme {
    /// Coupling `τΣσᵢ‖Lᵢ‖²` must stay below this.
    pub fn coupling_limit(self) -> f64 {
        match self {
            Scheme::ForwardBackward => 1.0,
            Scheme::DouglasRachford => 4.0,
        }
    }

    fn off_diagonal(self) -> f64 {
        match self {
            Scheme::ForwardBackward => 1.0,
            Scheme::DouglasRachford => 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricReport {
    pub scheme: Scheme,
    /// Strong-positivity constant of the metric; `≤ 0` when the coupling
    /// condition fails.
    pub rho: f64,
    /// `τΣσᵢ‖Lᵢ‖²` with the norms used for the check.
    pub coupling: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub passed: bool,
    pub message: String,
}

impl MetricReport {
    /// The condition that failed, as an error; `Ok` when the report passed.
    pub fn into_result(self) -> Result<Self> {
        if self.passed {
            return Ok(self);
        }
        let condition = if self.coupling >= self.scheme.coupling_limit() {
            match self.scheme {
                Scheme::ForwardBackward => "tau * sum(sigma_i * |L_i|^2) < 1",
                Scheme::DouglasRachford => "tau * sum(sigma_i * |L_i|^2) < 4",
            }
        } else {
            "2 * rho * min(beta1, beta2) >= 1"
        };
        Err(Error::Condition {
            condition,
            detail: self.message,
        })
    }

    /// Averagedness constant scaling `θ_n` in the schedule check.
    pub fn relaxation_factor(&self) -> f64 {
        match self.scheme {
            Scheme::DouglasRachford => 0.5,
            Scheme::ForwardBackward => {
                let br = self.beta1 * self.rho;
                if br.is_infinite() {
                    0.5
                } else {
                    2.0 * br / (4.0 * br - 1.0)
                }
            }
        }
    }
}

/// Computes `ρ` by the scheme's formula and checks the scheme's step-size
/// conditions.
///
/// Forward–backward: `ρ = min(1/τ, 1/σᵢ)(1 − √c)` with `c = τΣσᵢ‖Lᵢ‖² < 1`
/// and `2ρ·min(β₁, β₂) ≥ 1`. Douglas–Rachford: `ρ = min(1/τ, 1/σᵢ)(1 − ½√c)`
/// with `c < 4`.
pub fn build_product_metric(problem: &impl PrimalDualProblem) -> MetricReport {
    let scheme = problem.scheme();
    let tau = problem.tau();
    let links = problem.links();
    let coupling = tau
        * links
            .iter()
            .map(|l| {
                let n = l.norm_bound();
                l.sigma * n * n
            })
            .sum::<f64>();
    let min_inv = links.iter().map(|l| 1.0 / l.sigma).fold(1.0 / tau, f64::min);
    let rho = min_inv * (1.0 - scheme.off_diagonal() * coupling.sqrt());
    let (beta1, beta2) = problem.cocoercivity();
    let limit = scheme.coupling_limit();
    let (passed, message) = if coupling >= limit {
        (
            false,
            format!("{scheme}: coupling tau*sum(sigma*|L|^2) = {coupling:.6} must be < {limit}"),
        )
    } else if scheme == Scheme::ForwardBackward && 2.0 * rho * beta1.min(beta2) < 1.0 {
        (
            false,
            format!(
                "{scheme}: 2*rho*min(beta1, beta2) = {:.6} < 1 with rho = {rho:.6}, beta1 = {beta1:.6}, beta2 = {beta2:.6}",
                2.0 * rho * beta1.min(beta2)
            ),
        )
    } else {
        (
            true,
            format!("{scheme}: rho = {rho:.6}, coupling = {coupling:.6}, beta1 = {beta1}, beta2 = {beta2}"),
        )
    };
    MetricReport {
        scheme,
        rho,
        coupling,
        beta1,
        beta2,
        passed,
        message,
    }
}

fn apply_metric(scale: f64, tau: f64, links: &[DualLink], z: &ProductVector) -> ProductVector {
    let x = z.primal();
    let mut primal = x.scale(1.0 / tau);
    for (link, v) in links.iter().zip(z.duals()) {
        primal = primal.lincomb(1.0, &link.op.adjoint(v), -scale);
    }
    let duals = links
        .iter()
        .zip(z.duals())
        .map(|(link, v)| v.lincomb(1.0 / link.sigma, &link.op.apply(x), -scale))
        .collect();
    ProductVector::from_parts(primal, duals)
}

/// `V(x, v)` of the forward–backward scheme.
pub fn apply_fb_metric(tau: f64, links: &[DualLink], z: &ProductVector) -> ProductVector {
    apply_metric(1.0, tau, links, z)
}

/// `W(x, v)` of the Douglas–Rachford scheme.
pub fn apply_dr_metric(tau: f64, links: &[DualLink], z: &ProductVector) -> ProductVector {
    apply_metric(0.5, tau, links, z)
}

/// `ξ(x, v) = (Σ Lᵢ*vᵢ, −Lᵢx)`.
pub fn apply_skew(links: &[DualLink], z: &ProductVector) -> ProductVector {
    let x = z.primal();
    let mut primal = crate::vector::Vector::zeros(x.dim());
    for (link, v) in links.iter().zip(z.duals()) {
        primal = &primal + &link.op.adjoint(v);
    }
    let duals = links.iter().map(|link| link.op.apply(x).scale(-1.0)).collect();
    ProductVector::from_parts(primal, duals)
}
