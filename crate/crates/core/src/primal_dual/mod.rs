//! Primal–dual splitting for inclusions with linear compositions and
//! parallel sums,
//!
//! ```text
//! 0 ∈ Ax + Σᵢ Lᵢ*((Pᵢ □ Qᵢ)(Lᵢx)) + Cx,
//! ```
//!
//! run in the product space `ℋ × Ω₁ × … × Ω_m` with Tikhonov damping. The
//! forward–backward scheme couples two such systems; the Douglas–Rachford
//! scheme handles one system with every operator taken by its resolvent.
//!
//! The product-space metrics are never formed. The iterations are written
//! componentwise and [`metric`] only certifies the step sizes.

mod dr;
mod fb;
pub mod metric;

use std::fmt;

use crate::error::{check_dims, invalid, Result};
use crate::operators::{safe_norm_bound, LinearOperator};
use crate::vector::ProductVector;

pub use dr::{pd_dr_prox_solve, pd_dr_solve, DrBlock, DrPrimalDualProblem, DrProxBlock, PdDrOutcome};
pub use fb::{
    pd_fb_prox_solve, pd_fb_solve, FbDual, FbPrimalDualProblem, FbProxDual, FbProxProblem, FbProxSystem,
    FbSystem,
};
pub use metric::{build_product_metric, MetricReport, Scheme};

/// One linear coupling `Lᵢ: ℋ → Ωᵢ` with its dual step `σᵢ`.
#[derive(Clone, Debug)]
pub struct DualLink {
    pub op: LinearOperator,
    pub sigma: f64,
    norm: Option<f64>,
}

impl DualLink {
    pub fn new(op: LinearOperator, sigma: f64) -> Self {
        Self {
            op,
            sigma,
            norm: None,
        }
    }

    /// Declares `‖L‖` exactly, bypassing the power-iteration estimate and its
    /// safety margin.
    pub fn with_norm(mut self, norm: f64) -> Self {
        self.norm = Some(norm);
        self
    }

    /// The value of `‖L‖` used in step-size checks.
    pub fn norm_bound(&self) -> f64 {
        self.norm.unwrap_or_else(|| safe_norm_bound(&self.op))
    }

    fn validate(&self, index: usize) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(invalid(format!(
                "sigma_{index} must be positive, got {}",
                self.sigma
            )));
        }
        if let Some(n) = self.norm {
            if !(n >= 0.0 && n.is_finite()) {
                return Err(invalid(format!(
                    "declared norm of L_{index} must be >= 0, got {n}"
                )));
            }
        }
        Ok(())
    }
}

/// Data shared by both schemes and consumed by [`build_product_metric`].
pub trait PrimalDualProblem {
    fn scheme(&self) -> Scheme;
    fn tau(&self) -> f64;
    fn links(&self) -> &[DualLink];
    /// `(β₁, β₂)`; `+∞` when every contributing operator is zero.
    fn cocoercivity(&self) -> (f64, f64) {
        (f64::INFINITY, f64::INFINITY)
    }
}

fn validate_links(tau: f64, links: &[DualLink]) -> Result<()> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(invalid(format!("tau must be positive, got {tau}")));
    }
    if links.is_empty() {
        return Err(invalid("at least one dual block is required"));
    }
    let dim = links[0].op.in_dim();
    for (i, link) in links.iter().enumerate() {
        link.validate(i + 1)?;
        check_dims(link.op.in_dim(), dim)?;
    }
    Ok(())
}

fn validate_init(links: &[DualLink], init: &ProductVector) -> Result<()> {
    check_dims(init.num_blocks(), links.len() + 1)?;
    check_dims(init.primal().dim(), links[0].op.in_dim())?;
    for (link, v) in links.iter().zip(init.duals()) {
        check_dims(v.dim(), link.op.out_dim())?;
    }
    Ok(())
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::ForwardBackward => "forward-backward",
            Scheme::DouglasRachford => "douglas-rachford",
        })
    }
}
