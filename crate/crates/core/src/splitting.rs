//! Tikhonov-damped forward–backward and Douglas–Rachford splitting.

use crate::error::{invalid, Error, Result};
use crate::fixed_point::run_damped;
use crate::operators::{CocoerciveOperator, MonotoneOperator, Proximable};
use crate::schedule::TikhonovSchedule;
use crate::trace::{ObjectiveFn, Recorder, SolveTrace, SolverConfig};
use crate::vector::Vector;

/// `0 ∈ Ax + Bx` with `A` handled by its resolvent and the cocoercive `B` by
/// a forward step of size `gamma`.
#[derive(Clone, Debug)]
pub struct InclusionPair {
    pub a: MonotoneOperator,
    pub b: CocoerciveOperator,
    pub gamma: f64,
}

impl InclusionPair {
    pub fn new(a: MonotoneOperator, b: CocoerciveOperator, gamma: f64) -> Self {
        Self { a, b, gamma }
    }

    /// `J_{γA}(x − γBx)`.
    pub fn forward_backward(&self, x: &Vector) -> Vector {
        let fwd = x.lincomb(1.0, &self.b.apply(x), -self.gamma);
        self.a.resolvent(self.gamma, &fwd)
    }

    /// `2β/(4β − γ)`, the averagedness constant of the forward–backward map;
    /// `1/2` when `B = 0`.
    pub fn averaging_factor(&self) -> f64 {
        averaging_factor(self.b.beta(), self.gamma)
    }
}

fn averaging_factor(beta: f64, gamma: f64) -> f64 {
    if beta.is_infinite() {
        0.5
    } else {
        2.0 * beta / (4.0 * beta - gamma)
    }
}

fn check_step(gamma: f64, beta: f64, closed: bool, which: usize) -> Result<()> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(invalid(format!("gamma_{which} must be positive, got {gamma}")));
    }
    let ok = if closed {
        gamma <= 2.0 * beta
    } else {
        gamma < 2.0 * beta
    };
    if ok {
        return Ok(());
    }
    Err(Error::Condition {
        condition: if closed {
            "gamma <= 2*beta"
        } else {
            "gamma < 2*beta"
        },
        detail: format!("pair {which}: gamma = {gamma}, 2*beta = {}", 2.0 * beta),
    })
}

/// `y_{n+1} = T₂[(1 − θ_n) e_n y_n + θ_n T₁(e_n y_n)]` with
/// `Tᵢ = J_{γᵢAᵢ}(Id − γᵢBᵢ)`.
///
/// Requires `γᵢ < 2βᵢ` and `0 < (2β₁/(4β₁ − γ₁))θ_n < 1`. The limit is the
/// minimal-norm common zero of `A₁ + B₁` and `A₂ + B₂`.
pub fn fb_tikhonov(
    p1: &InclusionPair,
    p2: &InclusionPair,
    y1: &Vector,
    sched: &TikhonovSchedule,
    cfg: &SolverConfig,
) -> Result<(Vector, SolveTrace)> {
    check_step(p1.gamma, p1.b.beta(), false, 1)?;
    check_step(p2.gamma, p2.b.beta(), false, 2)?;
    cfg.validate()?;
    sched.check(cfg.max_iters, p1.averaging_factor())?;
    run_damped(
        y1,
        sched,
        cfg,
        |e, theta, y| {
            let ey = y.scale(e);
            let t1 = p1.forward_backward(&ey);
            p2.forward_backward(&ey.lincomb(1.0 - theta, &t1, theta))
        },
        |y| {
            vec![
                ("fb_gap_1", y.distance(&p1.forward_backward(y))),
                ("fb_gap_2", y.distance(&p2.forward_backward(y))),
            ]
        },
    )
}

/// Smooth-plus-nonsmooth term `f + g` entering [`fb_tikhonov_prox`]: `f` is
/// handled by its prox and `g` by its gradient.
#[derive(Clone, Debug)]
pub struct CompositeTerm {
    pub f: Proximable,
    pub grad_g: CocoerciveOperator,
    pub gamma: f64,
}

impl CompositeTerm {
    pub fn new(f: Proximable, grad_g: CocoerciveOperator, gamma: f64) -> Self {
        Self { f, grad_g, gamma }
    }

    fn as_pair(&self) -> InclusionPair {
        InclusionPair::new(self.f.subdifferential(), self.grad_g.clone(), self.gamma)
    }
}

/// Forward–backward for `argmin(f₁ + g₁) ∩ argmin(f₂ + g₂)`, converging to
/// the common minimizer of least norm.
///
/// The step may reach the boundary `γᵢ = 2βᵢ`.
pub fn fb_tikhonov_prox(
    t1: &CompositeTerm,
    t2: &CompositeTerm,
    y1: &Vector,
    sched: &TikhonovSchedule,
    cfg: &SolverConfig,
) -> Result<(Vector, SolveTrace)> {
    check_step(t1.gamma, t1.grad_g.beta(), true, 1)?;
    check_step(t2.gamma, t2.grad_g.beta(), true, 2)?;
    cfg.validate()?;
    let (p1, p2) = (t1.as_pair(), t2.as_pair());
    sched.check(cfg.max_iters, p1.averaging_factor())?;
    run_damped(
        y1,
        sched,
        cfg,
        |e, theta, y| {
            let ey = y.scale(e);
            let a = p1.forward_backward(&ey);
            p2.forward_backward(&ey.lincomb(1.0 - theta, &a, theta))
        },
        |y| {
            vec![
                ("fb_gap_1", y.distance(&p1.forward_backward(y))),
                ("fb_gap_2", y.distance(&p2.forward_backward(y))),
            ]
        },
    )
}

/// `0 ∈ Ax + Bx` with both operators handled by resolvents of step `gamma`.
#[derive(Clone, Debug)]
pub struct DrPair {
    pub a: MonotoneOperator,
    pub b: MonotoneOperator,
    pub gamma: f64,
}

impl DrPair {
    pub fn new(a: MonotoneOperator, b: MonotoneOperator, gamma: f64) -> Self {
        Self { a, b, gamma }
    }
}

/// Final state of a Douglas–Rachford run. `y = J_{γB}(x)` and
/// `z = J_{γA}(2y − x)` are the shadow points of the returned `x`; they
/// approximate a zero of `A + B`.
#[derive(Clone, Debug)]
pub struct DrOutcome {
    pub x: Vector,
    pub y: Vector,
    pub z: Vector,
    pub trace: SolveTrace,
}

/// Damped Douglas–Rachford:
///
/// ```text
/// y_n     = J_{γB}(e_n x_n)
/// z_n     = J_{γA}(2y_n − e_n x_n)
/// u_n     = e_n x_n + θ_n(z_n − y_n)
/// x_{n+1} = R_{γA} R_{γB} u_n
/// ```
///
/// with `θ_n ∈ (0, 2)`. `x_n` tends to the least-norm fixed point `x̄` of
/// `R_{γA}R_{γB}`; `y_n` and `z_n` tend to `J_{γB}(x̄)`, a zero of `A + B`.
/// The trace residual is `‖x_{n+1} − x_n‖`; `‖y_n − z_n‖` is logged as
/// `shadow_gap` and probes see `y_n`.
pub fn dr_tikhonov(
    p: &DrPair,
    x1: &Vector,
    sched: &TikhonovSchedule,
    cfg: &SolverConfig,
) -> Result<DrOutcome> {
    dr_loop(p, x1, sched, cfg, None)
}

/// [`dr_tikhonov`] with `A = ∂f`, `B = ∂g`. When both functions carry values
/// the trace objective is `f(y_n) + g(y_n)`.
pub fn dr_tikhonov_prox(
    f: &Proximable,
    g: &Proximable,
    gamma: f64,
    x1: &Vector,
    sched: &TikhonovSchedule,
    cfg: &SolverConfig,
) -> Result<DrOutcome> {
    let pair = DrPair::new(f.subdifferential(), g.subdifferential(), gamma);
    let objective: ObjectiveFn<'_> = if f.has_value() && g.has_value() {
        Some(Box::new(move |y: &Vector| {
            f.value(y).unwrap_or(f64::NAN) + g.value(y).unwrap_or(f64::NAN)
        }))
    } else {
        None
    };
    dr_loop(&pair, x1, sched, cfg, objective)
}

fn dr_loop<'a>(
    p: &DrPair,
    x1: &Vector,
    sched: &TikhonovSchedule,
    cfg: &'a SolverConfig,
    objective: ObjectiveFn<'a>,
) -> Result<DrOutcome> {
    if !(p.gamma > 0.0 && p.gamma.is_finite()) {
        return Err(invalid(format!("gamma must be positive, got {}", p.gamma)));
    }
    cfg.validate()?;
    sched.check(cfg.max_iters, 0.5)?;
    let gamma = p.gamma;
    let mut rec = Recorder::new(cfg)?.with_default_objective(objective);
    let mut x = x1.clone();
    for n in 1..=rec.max_iters() {
        let (e, theta) = (sched.e(n), sched.theta(n));
        let ex = x.scale(e);
        let y = p.b.resolvent(gamma, &ex);
        let z = p.a.resolvent(gamma, &y.lincomb(2.0, &ex, -1.0));
        let u = &ex + &(&z - &y).scale(theta);
        let next = p.a.reflected(gamma, &p.b.reflected(gamma, &u));
        let residual = next.distance(&x);
        x = next;
        let gap = y.distance(&z);
        if rec.record(n, residual, &y, || vec![("shadow_gap", gap)]) {
            break;
        }
    }
    // Report the shadows of the returned iterate itself rather than of its
    // damped copy, which lags by a factor e_n.
    let y = p.b.resolvent(gamma, &x);
    let z = p.a.resolvent(gamma, &y.lincomb(2.0, &x, -1.0));
    Ok(DrOutcome {
        x,
        y,
        z,
        trace: rec.finish(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::nonexpansiveness_violation;
    use crate::schedule::default_schedule;

    fn v(x: &[f64]) -> Vector {
        Vector::from_slice(x).unwrap()
    }

    fn fb_sched() -> TikhonovSchedule {
        default_schedule(0.9, 1.0).unwrap()
    }

    fn dr_sched() -> TikhonovSchedule {
        default_schedule(1.8, 2.0).unwrap()
    }

    fn line_x_axis() -> MonotoneOperator {
        MonotoneOperator::normal_cone(|x| v(&[x[0], 0.0]))
    }

    fn line_diagonal() -> MonotoneOperator {
        MonotoneOperator::normal_cone(|x| {
            let m = 0.5 * (x[0] + x[1]);
            v(&[m, m])
        })
    }

    #[test]
    fn fb_quadratic_reaches_center() {
        let c = v(&[0.5, -2.0]);
        let pair = InclusionPair::new(
            MonotoneOperator::zero(),
            CocoerciveOperator::shifted_identity(1.0, c.clone()).unwrap(),
            1.0,
        );
        let cfg = SolverConfig::new(3_000_000, 1e-13).unwrap();
        let (y, _) = fb_tikhonov(&pair, &pair, &v(&[0.0, 0.0]), &fb_sched(), &cfg).unwrap();
        assert!(y.distance(&c) < 1e-6, "{y:?}");
    }

    #[test]
    fn fb_lasso_scalar() {
        // min (x−1)² + 0.5|x| has minimizer 0.75.
        let pair = InclusionPair::new(
            Proximable::l1(0.5).unwrap().subdifferential(),
            CocoerciveOperator::shifted_identity(2.0, v(&[1.0])).unwrap(),
            0.5,
        );
        let cfg = SolverConfig::new(200_000, 1e-12).unwrap();
        let (y, _) = fb_tikhonov(&pair, &pair, &v(&[0.0]), &fb_sched(), &cfg).unwrap();
        assert!((y[0] - 0.75).abs() < 1e-4, "{y:?}");
    }

    #[test]
    fn fb_projected_gradient_on_box() {
        let lo = v(&[0.0, 0.0]);
        let hi = v(&[1.0, 1.0]);
        let pair = InclusionPair::new(
            Proximable::box_indicator(lo, hi).unwrap().subdifferential(),
            CocoerciveOperator::shifted_identity(1.0, v(&[2.0, 0.5])).unwrap(),
            1.0,
        );
        let cfg = SolverConfig::new(1_000_000, 1e-12).unwrap();
        let (y, trace) = fb_tikhonov(&pair, &pair, &v(&[0.0, 0.0]), &fb_sched(), &cfg).unwrap();
        assert!(y.distance(&v(&[1.0, 0.5])) < 1e-5, "{y:?}");
        assert!(trace.converged);
        let gap = y.distance(&pair.forward_backward(&y));
        assert!(gap <= 10.0 * cfg.residual_tol.max(1e-9), "gap {gap}");
    }

    #[test]
    fn fb_rejects_long_steps() {
        let pair = InclusionPair::new(
            MonotoneOperator::zero(),
            CocoerciveOperator::shifted_identity(1.0, v(&[0.0])).unwrap(),
            2.0,
        );
        let cfg = SolverConfig::new(10, 0.0).unwrap();
        let err = fb_tikhonov(&pair, &pair, &v(&[1.0]), &fb_sched(), &cfg).unwrap_err();
        assert!(err.to_string().contains("gamma < 2*beta"), "{err}");
        let term = CompositeTerm::new(
            Proximable::zero(),
            CocoerciveOperator::shifted_identity(1.0, v(&[0.0])).unwrap(),
            2.0,
        );
        assert!(fb_tikhonov_prox(&term, &term, &v(&[1.0]), &fb_sched(), &cfg).is_ok());
        let term = CompositeTerm {
            gamma: 2.0 + 1e-12,
            ..term
        };
        let err = fb_tikhonov_prox(&term, &term, &v(&[1.0]), &fb_sched(), &cfg).unwrap_err();
        assert!(err.to_string().contains("gamma <= 2*beta"), "{err}");
    }

    #[test]
    fn fb_relaxation_bound_uses_averaging_factor() {
        // γ = 1.9, β = 1: factor 2/2.1, so θ = 1 still passes but θ = 1.06
        // would not.
        let pair = InclusionPair::new(
            MonotoneOperator::zero(),
            CocoerciveOperator::shifted_identity(1.0, v(&[0.0])).unwrap(),
            1.9,
        );
        let cfg = SolverConfig::new(5, 0.0).unwrap();
        assert!(fb_tikhonov(&pair, &pair, &v(&[1.0]), &fb_sched(), &cfg).is_ok());
        assert!(fb_tikhonov(
            &pair,
            &pair,
            &v(&[1.0]),
            &default_schedule(1.0, 1.0).unwrap(),
            &cfg
        )
        .is_ok());
        let too_big = default_schedule(1.06, 2.0).unwrap();
        assert!(fb_tikhonov(&pair, &pair, &v(&[1.0]), &too_big, &cfg).is_err());
    }

    #[test]
    fn fb_prox_examples() {
        let cfg = SolverConfig::new(1_000_000, 1e-12).unwrap();
        let b = v(&[-1.0, 2.0]);
        let term = CompositeTerm::new(
            Proximable::nonnegative(),
            CocoerciveOperator::shifted_identity(1.0, b).unwrap(),
            1.0,
        );
        let (y, _) = fb_tikhonov_prox(&term, &term, &v(&[0.0, 0.0]), &fb_sched(), &cfg).unwrap();
        assert!(y.distance(&v(&[0.0, 2.0])) < 1e-5, "{y:?}");
    }

    #[test]
    fn fb_map_is_nonexpansive_below_step_limit() {
        let pair = InclusionPair::new(
            Proximable::l1(0.3).unwrap().subdifferential(),
            CocoerciveOperator::shifted_identity(4.0, v(&[1.0, -1.0, 0.5])).unwrap(),
            0.49,
        );
        let worst = nonexpansiveness_violation(|x| pair.forward_backward(x), 3, 100, 11, 2.0);
        assert!(worst <= 1e-9, "{worst}");
    }

    #[test]
    fn dr_zero_operators_telescope() {
        let pair = DrPair::new(MonotoneOperator::zero(), MonotoneOperator::zero(), 1.0);
        let cfg = SolverConfig::new(99, 0.0).unwrap();
        let out = dr_tikhonov(&pair, &v(&[1.0, 2.0]), &dr_sched(), &cfg).unwrap();
        assert!(out.x.distance(&v(&[0.01, 0.02])) < 1e-14, "{:?}", out.x);
        assert!(out.y.distance(&out.z) < 1e-15);
    }

    #[test]
    fn dr_two_lines() {
        let pair = DrPair::new(line_x_axis(), line_diagonal(), 1.0);
        let cfg = SolverConfig::new(200_000, 1e-9).unwrap();
        let out = dr_tikhonov(&pair, &v(&[3.0, -1.0]), &dr_sched(), &cfg).unwrap();
        assert!(out.y.norm() < 1e-5 && out.z.norm() < 1e-5, "{out:?}");
        assert!(out.y.distance(&out.z) <= 10.0 * cfg.residual_tol);
    }

    #[test]
    fn dr_prox_soft_threshold_shadow() {
        let f = Proximable::l1(1.0).unwrap();
        let g = Proximable::squared_distance(v(&[2.0, 0.1]), 1.0).unwrap();
        let cfg = SolverConfig::new(500_000, 1e-12).unwrap();
        let out = dr_tikhonov_prox(&f, &g, 1.0, &v(&[0.0, 0.0]), &dr_sched(), &cfg).unwrap();
        assert!(out.y.distance(&v(&[1.0, 0.0])) < 1e-4, "{:?}", out.y);
        let want = 1.0 + 0.5 * (1.0 + 0.01);
        let obj = f.value(&out.y).unwrap() + g.value(&out.y).unwrap();
        assert!((obj - want).abs() < 1e-6, "{obj}");
        // Trace rows are taken at the damped shadow, which lags slightly.
        let logged = out.trace.last().unwrap().objective.unwrap();
        assert!((logged - want).abs() < 5e-2, "{logged}");
    }

    #[test]
    fn dr_prox_examples() {
        let cfg = SolverConfig::new(500_000, 1e-12).unwrap();
        let l1 = Proximable::l1(1.0).unwrap();
        let out = dr_tikhonov_prox(&l1, &l1, 1.0, &v(&[3.0, -1.0]), &dr_sched(), &cfg).unwrap();
        assert!(out.y.norm() < 1e-6);

        let f = Proximable::box_indicator(v(&[0.0]), v(&[1.0])).unwrap();
        let g = Proximable::squared_distance(v(&[2.0]), 1.0).unwrap();
        let out = dr_tikhonov_prox(&f, &g, 1.0, &v(&[0.0]), &dr_sched(), &cfg).unwrap();
        assert!((out.y[0] - 1.0).abs() < 1e-5, "{:?}", out.y);
    }

    #[test]
    fn dr_basis_pursuit() {
        let f = Proximable::hyperplane_indicator(v(&[1.0, 1.0]), 1.0).unwrap();
        let g = Proximable::l1(1.0).unwrap();
        let cfg = SolverConfig::new(1_000_000, 1e-13).unwrap();
        let out = dr_tikhonov_prox(&f, &g, 1.0, &v(&[0.0, 0.0]), &dr_sched(), &cfg).unwrap();
        // z is the shadow through the constraint, so it is feasible by
        // construction; y approaches it at the Tikhonov rate.
        let z = &out.z;
        assert!((z[0] + z[1] - 1.0).abs() < 1e-6, "{z:?}");
        assert!(z.norm_l1() <= 1.0 + 1e-4, "{z:?}");
        assert!(out.y.distance(z) < 1e-5, "{:?}", out.y);
    }

    #[test]
    fn dr_rejects_theta_two() {
        let pair = DrPair::new(MonotoneOperator::zero(), MonotoneOperator::zero(), 1.0);
        let cfg = SolverConfig::new(3, 0.0).unwrap();
        let two = default_schedule(2.0, 2.0).unwrap();
        assert!(dr_tikhonov(&pair, &v(&[1.0]), &two, &cfg).is_err());
        let bad = DrPair { gamma: 0.0, ..pair };
        assert!(dr_tikhonov(&bad, &v(&[1.0]), &dr_sched(), &cfg).is_err());
    }
}
