//! The operator roles every algorithm composes.
//!
//! All operators are supplied as rules rather than matrices so structured
//! operators (convolutions, wavelet transforms) are never materialized.
//! Resolvents and proximal maps are trusted to be exact.

mod diagnostics;
mod linear;
mod prox;

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::vector::Vector;

pub use diagnostics::{
    adjoint_mismatch, cocoercivity_violation, firm_nonexpansiveness_violation, linearity_mismatch,
    nonexpansiveness_violation, random_vector,
};
pub use linear::{
    estimate_operator_norm, least_squares_gradient, safe_norm_bound, DenseMatrix, LinearOperator,
    DEFAULT_POWER_ITERS, DEFAULT_POWER_SEED, NORM_SAFETY_FACTOR,
};
pub use prox::{
    conjugate_prox, prox_indicator_box, prox_scaled_identity, reflected_resolvent, soft_threshold,
};

pub type ResolventRule = Arc<dyn Fn(f64, &Vector) -> Vector + Send + Sync>;
pub type MapRule = Arc<dyn Fn(&Vector) -> Vector + Send + Sync>;
pub type ValueRule = Arc<dyn Fn(&Vector) -> f64 + Send + Sync>;

/// A maximally monotone operator `A`, known through its resolvent
/// `J_{γA} = (Id + γA)^{-1}`.
#[derive(Clone)]
pub struct MonotoneOperator {
    resolvent: ResolventRule,
}

impl fmt::Debug for MonotoneOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("MonotoneOperator")
    }
}

impl MonotoneOperator {
    /// `rule(γ, x)` must return `J_{γA}(x)`.
    pub fn from_resolvent(rule: impl Fn(f64, &Vector) -> Vector + Send + Sync + 'static) -> Self {
        Self {
            resolvent: Arc::new(rule),
        }
    }

    pub fn resolvent(&self, gamma: f64, x: &Vector) -> Vector {
        (self.resolvent)(gamma, x)
    }

    /// `2 J_{γA}(x) − x`.
    pub fn reflected(&self, gamma: f64, x: &Vector) -> Vector {
        reflected_resolvent(self, gamma, x)
    }

    /// The zero operator; its resolvent is the identity.
    pub fn zero() -> Self {
        Self::from_resolvent(|_, x| x.clone())
    }

    /// `A = κ·Id`.
    pub fn scaled_identity(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(invalid(format!("kappa must be positive, got {kappa}")));
        }
        Ok(Self::from_resolvent(move |gamma, x| {
            prox_scaled_identity(kappa, gamma, x)
        }))
    }

    /// Normal cone of a closed convex set given by its projection. The
    /// resolvent is the projection for every step size.
    pub fn normal_cone(projection: impl Fn(&Vector) -> Vector + Send + Sync + 'static) -> Self {
        Self::from_resolvent(move |_, x| projection(x))
    }

    /// The inverse operator `A^{-1}`, via `J_{γA^{-1}}(x) = x − γ J_{A/γ}(x/γ)`.
    pub fn inverse(&self) -> Self {
        let inner = self.resolvent.clone();
        Self::from_resolvent(move |gamma, x| {
            let scaled = x.scale(1.0 / gamma);
            let j = inner(1.0 / gamma, &scaled);
            x.lincomb(1.0, &j, -gamma)
        })
    }
}

/// A single-valued `β`-cocoercive operator:
/// `⟨x−y, Tx−Ty⟩ ≥ β‖Tx−Ty‖²`.
///
/// `beta = +∞` is admitted only for the zero operator.
#[derive(Clone)]
pub struct CocoerciveOperator {
    apply: MapRule,
    beta: f64,
    zero: bool,
}

impl fmt::Debug for CocoerciveOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CocoerciveOperator")
            .field("beta", &self.beta)
            .field("zero", &self.zero)
            .finish()
    }
}

impl CocoerciveOperator {
    pub fn new(beta: f64, apply: impl Fn(&Vector) -> Vector + Send + Sync + 'static) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(invalid(format!(
                "cocoercivity constant must be positive and finite, got {beta}"
            )));
        }
        Ok(Self {
            apply: Arc::new(apply),
            beta,
            zero: false,
        })
    }

    /// The zero operator, cocoercive for every constant (`beta = +∞`).
    pub fn zero() -> Self {
        Self {
            apply: Arc::new(|x: &Vector| Vector::zeros(x.dim())),
            beta: f64::INFINITY,
            zero: true,
        }
    }

    /// `x ↦ scale·(x − c)`, the gradient of `(scale/2)‖x − c‖²`;
    /// `1/scale`-cocoercive.
    pub fn shifted_identity(scale: f64, center: Vector) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid(format!("scale must be positive, got {scale}")));
        }
        Self::new(1.0 / scale, move |x| x.zip_map(&center, |a, c| scale * (a - c)))
    }

    /// `x ↦ scale·Lᵀ(Lx − b)`, the gradient of `(scale/2)‖Lx − b‖²`.
    ///
    /// `norm_bound` must bound `‖L‖` from above; the constant is
    /// `1/(scale·norm_bound²)` by Baillon–Haddad.
    pub fn least_squares(op: LinearOperator, b: Vector, scale: f64, norm_bound: f64) -> Result<Self> {
        crate::error::check_dims(op.out_dim(), b.dim())?;
        if !(scale > 0.0 && norm_bound > 0.0) {
            return Err(invalid("least-squares scale and norm bound must be positive"));
        }
        let beta = 1.0 / (scale * norm_bound * norm_bound);
        Self::new(beta, move |x| {
            let r = &op.apply(x) - &b;
            op.adjoint(&r).scale(scale)
        })
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        (self.apply)(x)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }
}

/// A proper convex lower-semicontinuous function known through its proximal
/// map, optionally with the function value for objective logging.
#[derive(Clone)]
pub struct Proximable {
    prox: ResolventRule,
    value: Option<ValueRule>,
}

impl fmt::Debug for Proximable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Proximable")
            .field("has_value", &self.value.is_some())
            .finish()
    }
}

impl Proximable {
    /// `rule(γ, x)` must return `prox_{γf}(x)`.
    pub fn new(rule: impl Fn(f64, &Vector) -> Vector + Send + Sync + 'static) -> Self {
        Self {
            prox: Arc::new(rule),
            value: None,
        }
    }

    pub fn with_value(mut self, value: impl Fn(&Vector) -> f64 + Send + Sync + 'static) -> Self {
        self.value = Some(Arc::new(value));
        self
    }

    pub fn prox(&self, gamma: f64, x: &Vector) -> Vector {
        (self.prox)(gamma, x)
    }

    pub fn value(&self, x: &Vector) -> Option<f64> {
        self.value.as_ref().map(|f| f(x))
    }

    pub fn has_value(&self) -> bool {
        self.value.is_some()
    }

    /// `prox_{σf*}(x)` by Moreau decomposition.
    pub fn conjugate_prox(&self, sigma: f64, x: &Vector) -> Vector {
        conjugate_prox(self, sigma, x)
    }

    /// The subdifferential `∂f`, whose resolvent is this prox.
    pub fn subdifferential(&self) -> MonotoneOperator {
        MonotoneOperator {
            resolvent: self.prox.clone(),
        }
    }

    /// `f = 0`.
    pub fn zero() -> Self {
        Self::new(|_, x| x.clone()).with_value(|_| 0.0)
    }

    /// `f = λ‖·‖₁`.
    pub fn l1(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(invalid(format!("lambda must be >= 0, got {lambda}")));
        }
        Ok(Self::new(move |gamma, x| soft_threshold(gamma, lambda, x))
            .with_value(move |x| lambda * x.norm_l1()))
    }

    /// `f = (weight/2)‖· − center‖²`.
    pub fn squared_distance(center: Vector, weight: f64) -> Result<Self> {
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(invalid(format!("weight must be positive, got {weight}")));
        }
        let c2 = center.clone();
        Ok(Self::new(move |gamma, x| {
            let gw = gamma * weight;
            x.zip_map(&center, |a, c| (a + gw * c) / (1.0 + gw))
        })
        .with_value(move |x| 0.5 * weight * x.distance(&c2).powi(2)))
    }

    /// Indicator of the box `[lo, hi]`.
    pub fn box_indicator(lo: Vector, hi: Vector) -> Result<Self> {
        prox::validate_box(&lo, &hi)?;
        let (l2, h2) = (lo.clone(), hi.clone());
        Ok(
            Self::new(move |_, x| prox::clamp_box(&lo, &hi, x)).with_value(move |x| {
                let inside = x
                    .iter()
                    .zip(l2.iter().zip(h2.iter()))
                    .all(|(v, (l, h))| v >= l && v <= h);
                if inside {
                    0.0
                } else {
                    f64::INFINITY
                }
            }),
        )
    }

    /// Indicator of the nonnegative orthant.
    pub fn nonnegative() -> Self {
        Self::new(|_, x| x.map(|v| v.max(0.0))).with_value(|x| {
            if x.iter().all(|&v| v >= 0.0) {
                0.0
            } else {
                f64::INFINITY
            }
        })
    }

    /// Indicator of the singleton `{c}`.
    pub fn point_indicator(c: Vector) -> Self {
        let c2 = c.clone();
        Self::new(move |_, _| c.clone()).with_value(move |x| if *x == c2 { 0.0 } else { f64::INFINITY })
    }

    /// Indicator of the hyperplane `{x : ⟨a, x⟩ = b}`.
    pub fn hyperplane_indicator(a: Vector, b: f64) -> Result<Self> {
        let aa = a.norm_sq();
        if aa == 0.0 {
            return Err(invalid("hyperplane normal must be nonzero"));
        }
        let a2 = a.clone();
        Ok(Self::new(move |_, x| {
            let shift = (a.dot(x) - b) / aa;
            x.lincomb(1.0, &a, -shift)
        })
        .with_value(move |x| {
            if (a2.dot(x) - b).abs() <= 1e-12 * (1.0 + b.abs()) {
                0.0
            } else {
                f64::INFINITY
            }
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        Vector::from_slice(x).unwrap()
    }

    #[test]
    fn inverse_resolvent_of_scaled_identity() {
        // (κ Id)^{-1} = (1/κ) Id, so J_{γA^{-1}}(x) = x / (1 + γ/κ).
        let a = MonotoneOperator::scaled_identity(2.0).unwrap();
        let got = a.inverse().resolvent(3.0, &v(&[5.0, -1.0]));
        let want = v(&[5.0, -1.0]).scale(1.0 / (1.0 + 1.5));
        assert!(got.distance(&want) < 1e-14);
    }

    #[test]
    fn inverse_of_zero_is_projection_onto_origin() {
        let got = MonotoneOperator::zero()
            .inverse()
            .resolvent(0.7, &v(&[3.0, -2.0]));
        assert!(got.norm() < 1e-15);
    }

    #[test]
    fn cocoercive_rejects_bad_constants() {
        assert!(CocoerciveOperator::new(0.0, |x| x.clone()).is_err());
        assert!(CocoerciveOperator::new(f64::INFINITY, |x| x.clone()).is_err());
        let z = CocoerciveOperator::zero();
        assert!(z.is_zero() && z.beta().is_infinite());
        assert_eq!(z.apply(&v(&[1.0, 2.0])), v(&[0.0, 0.0]));
    }

    #[test]
    fn catalog_prox_values() {
        let sq = Proximable::squared_distance(v(&[1.0, 1.0]), 2.0).unwrap();
        // argmin ‖y−1‖² + ‖y−x‖²/(2γ) with γ = 0.5: (x + 2γ)/(1+2γ)
        let p = sq.prox(0.5, &v(&[3.0, 0.0]));
        assert!(p.distance(&v(&[2.0, 0.5])) < 1e-15);
        assert_eq!(sq.value(&v(&[2.0, 1.0])), Some(1.0));

        let hp = Proximable::hyperplane_indicator(v(&[1.0, 1.0]), 1.0).unwrap();
        let p = hp.prox(1.0, &v(&[2.0, 2.0]));
        assert!(p.distance(&v(&[0.5, 0.5])) < 1e-15);
        assert_eq!(hp.value(&p), Some(0.0));

        let nn = Proximable::nonnegative();
        assert_eq!(nn.prox(1.0, &v(&[-1.0, 2.0])), v(&[0.0, 2.0]));
        assert_eq!(nn.value(&v(&[-1.0, 2.0])), Some(f64::INFINITY));

        let pt = Proximable::point_indicator(v(&[4.0]));
        assert_eq!(pt.prox(9.0, &v(&[-2.0])), v(&[4.0]));
    }

    #[test]
    fn least_squares_operator_matches_gradient() {
        let l = LinearOperator::from_dense(DenseMatrix::new(1, 2, vec![1.0, 1.0]).unwrap());
        let g = CocoerciveOperator::least_squares(l, v(&[2.0]), 2.0, 2f64.sqrt()).unwrap();
        assert!((g.beta() - 0.25).abs() < 1e-15);
        assert_eq!(g.apply(&v(&[0.0, 0.0])), v(&[-4.0, -4.0]));
    }
}
