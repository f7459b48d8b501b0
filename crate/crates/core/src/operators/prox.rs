//! Closed-form resolvents and proximal maps.

use super::{MonotoneOperator, Proximable};
use crate::error::{check_dims, invalid, Result};
use crate::vector::Vector;

/// `R_{γA}(x) = 2 J_{γA}(x) − x`.
pub fn reflected_resolvent(a: &MonotoneOperator, gamma: f64, x: &Vector) -> Vector {
    a.resolvent(gamma, x).lincomb(2.0, x, -1.0)
}

/// `prox_{γλ‖·‖₁}(x)`: componentwise `sign(x)·max(|x| − γλ, 0)`.
pub fn soft_threshold(gamma: f64, lambda: f64, x: &Vector) -> Vector {
    let t = gamma * lambda;
    x.map(|v| v.signum() * (v.abs() - t).max(0.0))
}

/// Resolvent of `κ·Id`: `x / (1 + γκ)`.
pub fn prox_scaled_identity(kappa: f64, gamma: f64, x: &Vector) -> Vector {
    x.scale(1.0 / (1.0 + gamma * kappa))
}

/// Projection onto `[lo, hi]`; independent of `gamma`.
pub fn prox_indicator_box(lo: &Vector, hi: &Vector, _gamma: f64, x: &Vector) -> Result<Vector> {
    validate_box(lo, hi)?;
    check_dims(lo.dim(), x.dim())?;
    Ok(clamp_box(lo, hi, x))
}

/// `prox_{σf*}(x) = x − σ·prox_{f/σ}(x/σ)`.
pub fn conjugate_prox(f: &Proximable, sigma: f64, x: &Vector) -> Vector {
    let inner = f.prox(1.0 / sigma, &x.scale(1.0 / sigma));
    x.lincomb(1.0, &inner, -sigma)
}

pub(super) fn validate_box(lo: &Vector, hi: &Vector) -> Result<()> {
    check_dims(lo.dim(), hi.dim())?;
    if let Some(i) = (0..lo.dim()).find(|&i| lo[i] > hi[i]) {
        return Err(invalid(format!(
            "box bounds inverted at component {i}: lo = {} > hi = {}",
            lo[i], hi[i]
        )));
    }
    Ok(())
}

pub(super) fn clamp_box(lo: &Vector, hi: &Vector, x: &Vector) -> Vector {
    Vector::from_fn(x.dim(), |i| x[i].clamp(lo[i], hi[i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::firm_nonexpansiveness_violation;

    fn v(x: &[f64]) -> Vector {
        Vector::from_slice(x).unwrap()
    }

    #[test]
    fn reflected_resolvent_examples() {
        let x = v(&[1.5, -2.0]);
        assert_eq!(reflected_resolvent(&MonotoneOperator::zero(), 1.0, &x), x);
        let id = MonotoneOperator::scaled_identity(1.0).unwrap();
        assert_eq!(reflected_resolvent(&id, 1.0, &x), v(&[0.0, 0.0]));
        let origin = MonotoneOperator::normal_cone(|x| Vector::zeros(x.dim()));
        assert_eq!(reflected_resolvent(&origin, 3.0, &x), v(&[-1.5, 2.0]));
    }

    #[test]
    fn soft_threshold_examples() {
        assert_eq!(
            soft_threshold(1.0, 1.0, &v(&[2.0, -0.5, 0.0])),
            v(&[1.0, 0.0, 0.0])
        );
        let x = v(&[0.3, -7.0]);
        assert_eq!(soft_threshold(4.0, 0.0, &x), x);
        assert_eq!(soft_threshold(0.5, 1.0, &v(&[3.0, -3.0])), v(&[2.5, -2.5]));
    }

    #[test]
    fn scaled_identity_examples() {
        assert_eq!(prox_scaled_identity(1.0, 1.0, &v(&[2.0, 4.0])), v(&[1.0, 2.0]));
        let x = v(&[3.0, 1.0]);
        assert!(prox_scaled_identity(5.0, 1e-14, &x).distance(&x) < 1e-12);
        assert_eq!(prox_scaled_identity(3.0, 1.0, &v(&[8.0])), v(&[2.0]));
    }

    #[test]
    fn box_examples() {
        let lo = v(&[0.0, 0.0]);
        let hi = v(&[1.0, 1.0]);
        assert_eq!(
            prox_indicator_box(&lo, &hi, 1.0, &v(&[2.0, -1.0])).unwrap(),
            v(&[1.0, 0.0])
        );
        let inside = v(&[0.25, 0.75]);
        assert_eq!(prox_indicator_box(&lo, &hi, 1.0, &inside).unwrap(), inside);
        assert_eq!(
            prox_indicator_box(&v(&[0.0]), &v(&[0.0]), 5.0, &v(&[-3.0])).unwrap(),
            v(&[0.0])
        );
    }

    #[test]
    fn box_rejects_inverted_bounds() {
        let err = prox_indicator_box(&v(&[1.0, 0.0]), &v(&[0.0, 1.0]), 1.0, &v(&[0.0, 0.0]));
        assert!(err.unwrap_err().to_string().contains("component 0"));
    }

    #[test]
    fn conjugate_of_l1_is_linf_ball_projection() {
        // Independent route: f = λ‖·‖₁ has f* = indicator of the ℓ∞ ball of
        // radius λ, so prox_{σf*} is the clamp to [−λ, λ] for any σ.
        let lambda = 0.7;
        let f = Proximable::l1(lambda).unwrap();
        let x = v(&[2.0, -0.3, -5.0, 0.69, 0.71]);
        for sigma in [0.1, 1.0, 10.0] {
            let got = conjugate_prox(&f, sigma, &x);
            let want = x.map(|t| t.clamp(-lambda, lambda));
            assert!(got.distance(&want) < 1e-12, "sigma = {sigma}: {got:?}");
        }
    }

    #[test]
    fn conjugate_of_zero_is_origin() {
        let x = v(&[1.0, -4.0]);
        assert!(conjugate_prox(&Proximable::zero(), 2.5, &x).norm() < 1e-15);
    }

    #[test]
    fn moreau_identity_unit_sigma() {
        let f = Proximable::l1(0.4).unwrap();
        let x = v(&[1.0, -0.2, 0.5]);
        let sum = &f.prox(1.0, &x) + &conjugate_prox(&f, 1.0, &x);
        assert!(sum.distance(&x) < 1e-15);
    }

    #[test]
    fn catalog_proxes_are_firmly_nonexpansive() {
        let catalog = [
            Proximable::l1(0.3).unwrap(),
            Proximable::zero(),
            Proximable::nonnegative(),
            Proximable::squared_distance(Vector::from_fn(5, |i| i as f64), 3.0).unwrap(),
            Proximable::box_indicator(Vector::zeros(5), Vector::from_fn(5, |_| 1.0)).unwrap(),
            Proximable::hyperplane_indicator(Vector::from_fn(5, |i| 1.0 + i as f64), 2.0).unwrap(),
        ];
        for (k, f) in catalog.iter().enumerate() {
            for gamma in [0.1, 1.0, 10.0] {
                let worst = firm_nonexpansiveness_violation(|x| f.prox(gamma, x), 5, 100, 7 + k as u64, 3.0);
                assert!(worst <= 1e-9, "prox {k} gamma {gamma}: {worst}");
                let worst = firm_nonexpansiveness_violation(|x| f.conjugate_prox(gamma, x), 5, 100, 11, 3.0);
                assert!(worst <= 1e-9, "conj prox {k} gamma {gamma}: {worst}");
            }
        }
    }
}
