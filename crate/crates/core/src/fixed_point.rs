//! Tikhonov-damped common-fixed-point iterations.
//!
//! Every scheme here multiplies the iterate by `e_n < 1` before applying the
//! maps. With `e_n → 1` slowly enough this selects the fixed point of
//! smallest norm instead of whichever one the undamped iteration happens to
//! reach.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::operators::{MapRule, MonotoneOperator};
use crate::schedule::TikhonovSchedule;
use crate::trace::{Recorder, SolveTrace, SolverConfig};
use crate::vector::Vector;

/// A map `T` with `‖T(x) − T(y)‖ ≤ ‖x − y‖`. The property is the caller's
/// promise; [`crate::operators::nonexpansiveness_violation`] can sample it.
#[derive(Clone)]
pub struct NonexpansiveMap {
    apply: MapRule,
}

impl fmt::Debug for NonexpansiveMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("NonexpansiveMap")
    }
}

impl NonexpansiveMap {
    pub fn new(f: impl Fn(&Vector) -> Vector + Send + Sync + 'static) -> Self {
        Self { apply: Arc::new(f) }
    }

    pub fn identity() -> Self {
        Self::new(Vector::clone)
    }

    /// `J_{γA}`, which is firmly nonexpansive.
    pub fn resolvent(op: MonotoneOperator, gamma: f64) -> Self {
        Self::new(move |x| op.resolvent(gamma, x))
    }

    /// `2J_{γA} − Id`.
    pub fn reflected(op: MonotoneOperator, gamma: f64) -> Self {
        Self::new(move |x| op.reflected(gamma, x))
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        (self.apply)(x)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &NonexpansiveMap) -> Self {
        let (outer, inner) = (self.apply.clone(), inner.apply.clone());
        Self::new(move |x| outer(&inner(x)))
    }

    /// `(1 − α)Id + α·self`.
    pub fn relaxed(&self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(invalid(format!(
                "relaxation alpha must lie in (0, 1], got {alpha}"
            )));
        }
        let f = self.apply.clone();
        Ok(Self::new(move |x| x.lincomb(1.0 - alpha, &f(x), alpha)))
    }

    /// The same map in coordinates centred at `anchor`: `z ↦ T(z + a) − a`.
    /// Its fixed points are those of `T` shifted by `−a`.
    pub fn shifted(&self, anchor: &Vector) -> Self {
        let f = self.apply.clone();
        let a = anchor.clone();
        Self::new(move |z| &f(&(z + &a)) - &a)
    }
}

/// Runs `y_{n+1} = step(n, e_n, θ_n, y_n)` with the shared stopping rule.
pub(crate) fn run_damped(
    y1: &Vector,
    sched: &TikhonovSchedule,
    cfg: &SolverConfig,
    mut step: impl FnMut(f64, f64, &Vector) -> Vector,
    aux: impl Fn(&Vector) -> Vec<(&'static str, f64)>,
) -> Result<(Vector, SolveTrace)> {
    let mut rec = Recorder::new(cfg)?;
    let mut y = y1.clone();
    for n in 1..=rec.max_iters() {
        let next = step(sched.e(n), sched.theta(n), &y);
        let residual = next.distance(&y);
        y = next;
        if rec.record(n, residual, &y, || aux(&y)) {
            break;
        }
    }
    Ok((y, rec.finish()))
}

fn fixed_point_gaps(s: &NonexpansiveMap, t: &NonexpansiveMap, y: &Vector) -> Vec<(&'static str, f64)> {
    vec![
        ("s_gap", y.distance(&s.apply(y))),
        ("t_gap", y.distance(&t.apply(y))),
    ]
}

/// `y_{n+1} = S[(1 − θ_n) e_n y_n + θ_n T(e_n y_n)]`.
///
/// Requires `0 < θ_n < 1` for every queried index. The limit is the
/// minimal-norm point of `Fix(S) ∩ Fix(T)` when that set is nonempty.
pub fn tikhonov_normal_s(
    s: &NonexpansiveMap,
    t: &NonexpansiveMap,
    y1: &Vector,
    sched: &TikhonovSchedule,
    cfg: &SolverConfig,
) -> Result<(Vector, SolveTrace)> {
    cfg.validate()?;
    sched.check(cfg.max_iters, 1.0)?;
    run_damped(
        y1,
        sched,
        cfg,
        |e, theta, y| {
            let ey = y.scale(e);
            s.apply(&ey.lincomb(1.0 - theta, &t.apply(&ey), theta))
        },
        |y| fixed_point_gaps(s, t, y),
    )
}

/// [`tikhonov_normal_s`] centred at `anchor`, converging to the point of
/// `Fix(S) ∩ Fix(T)` nearest `anchor`.
pub fn tikhonov_normal_s_anchored(
    s: &NonexpansiveMap,
    t: &NonexpansiveMap,
    anchor: &Vector,
    y1: &Vector,
    sched: &TikhonovSchedule,
    cfg: &SolverConfig,
) -> Result<(Vector, SolveTrace)> {
    crate::error::check_dims(anchor.dim(), y1.dim())?;
    let mut shifted_cfg = cfg.clone();
    if let Some(probe) = cfg.probe.clone() {
        let a = anchor.clone();
        shifted_cfg.probe = Some(Arc::new(move |z: &Vector| probe(&(z + &a))));
    }
    let (z, trace) = tikhonov_normal_s(
        &s.shifted(anchor),
        &t.shifted(anchor),
        &(y1 - anchor),
        sched,
        &shifted_cfg,
    )?;
    Ok((&z + anchor, trace))
}

/// `y_{n+1} = R₂[e_n y_n + θ_n(R₁(e_n y_n) − e_n y_n)]` for an
/// `α₁`-averaged `R₁` and nonexpansive `R₂`.
///
/// Requires `0 < α₁θ_n < 1`, which lets `θ_n` exceed 1.
pub fn tikhonov_averaged(
    r1: &NonexpansiveMap,
    alpha1: f64,
    r2: &NonexpansiveMap,
    y1: &Vector,
    sched: &TikhonovSchedule,
    cfg: &SolverConfig,
) -> Result<(Vector, SolveTrace)> {
    if !(alpha1 > 0.0 && alpha1 < 1.0) {
        return Err(invalid(format!("alpha1 must lie in (0, 1), got {alpha1}")));
    }
    cfg.validate()?;
    sched.check(cfg.max_iters, alpha1)?;
    run_damped(
        y1,
        sched,
        cfg,
        |e, theta, y| {
            let ey = y.scale(e);
            let r = r1.apply(&ey);
            r2.apply(&ey.lincomb(1.0 - theta, &r, theta))
        },
        |y| fixed_point_gaps(r2, r1, y),
    )
}

/// The damped Mann iteration `x_{n+1} = e_n x_n + θ_n(T(e_n x_n) − e_n x_n)`
/// with `θ_n ∈ (0, 1]`, kept as a comparison baseline.
pub fn mann_tikhonov_baseline(
    t: &NonexpansiveMap,
    x1: &Vector,
    sched: &TikhonovSchedule,
    cfg: &SolverConfig,
) -> Result<(Vector, SolveTrace)> {
    cfg.validate()?;
    sched.check_closed(cfg.max_iters, 1.0)?;
    run_damped(
        x1,
        sched,
        cfg,
        |e, theta, x| {
            let ex = x.scale(e);
            let tx = t.apply(&ex);
            ex.lincomb(1.0 - theta, &tx, theta)
        },
        |x| vec![("t_gap", x.distance(&t.apply(x)))],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::schedule::default_schedule;

    fn v(x: &[f64]) -> Vector {
        Vector::from_slice(x).unwrap()
    }

    fn halfspace() -> NonexpansiveMap {
        NonexpansiveMap::new(|x| {
            let mut y = x.clone();
            y.as_mut_slice()[0] = x[0].max(1.0);
            y
        })
    }

    #[test]
    fn identity_collapses_to_telescoping_product() {
        let sched = default_schedule(0.9, 1.0).unwrap();
        let cfg = SolverConfig::new(50, 0.0).unwrap();
        let id = NonexpansiveMap::identity();
        let (y, trace) = tikhonov_normal_s(&id, &id, &v(&[1.0, 0.0]), &sched, &cfg).unwrap();
        assert!((y[0] - 1.0 / 51.0).abs() < 1e-15);
        assert_eq!(trace.iterations, 50);
        let (y, _) = mann_tikhonov_baseline(&id, &v(&[1.0, 0.0]), &sched, &cfg).unwrap();
        assert!((y[0] - 1.0 / 51.0).abs() < 1e-15);
        let (y, _) = tikhonov_averaged(&id, 0.3, &id, &v(&[1.0, 0.0]), &sched, &cfg).unwrap();
        assert!((y[0] - 1.0 / 51.0).abs() < 1e-15);
    }

    #[test]
    fn two_lines_meet_at_origin() {
        let s = NonexpansiveMap::new(|x| v(&[x[0], 0.0]));
        let t = NonexpansiveMap::new(|x| {
            let m = 0.5 * (x[0] + x[1]);
            v(&[m, m])
        });
        let sched = default_schedule(0.9, 1.0).unwrap();
        let cfg = SolverConfig::new(20_000, 0.0).unwrap();
        let (y, _) = tikhonov_normal_s(&s, &t, &v(&[3.0, -2.0]), &sched, &cfg).unwrap();
        assert!(y.norm() < 1e-4, "{y:?}");
    }

    #[test]
    fn halfspace_min_norm_point() {
        let sched = default_schedule(0.9, 1.0).unwrap();
        let cfg = SolverConfig::new(20_000, 0.0).unwrap();
        let p = halfspace();
        let (y, _) = tikhonov_normal_s(&p, &p, &v(&[5.0, 5.0]), &sched, &cfg).unwrap();
        assert!(y.distance(&v(&[1.0, 0.0])) < 1e-3, "{y:?}");
        let (x, _) = mann_tikhonov_baseline(&p, &v(&[5.0, 5.0]), &sched, &cfg).unwrap();
        assert!(x.distance(&v(&[1.0, 0.0])) < 1e-3, "{x:?}");
        let avg = p.relaxed(0.5).unwrap();
        let (z, _) = tikhonov_averaged(&avg, 0.5, &avg, &v(&[5.0, 5.0]), &sched, &cfg).unwrap();
        assert!(z.distance(&v(&[1.0, 0.0])) < 1e-3, "{z:?}");
    }

    #[test]
    fn averaged_forward_backward_of_quadratic() {
        // x ↦ x − γ(x − c) with γ = 1 is the constant map c; use γ = 0.5 so
        // the map is ½-averaged with unique fixed point c.
        let c = v(&[0.3, -0.7]);
        let c2 = c.clone();
        let fb = NonexpansiveMap::new(move |x| x.lincomb(0.5, &c2, 0.5));
        let sched = default_schedule(1.5, 2.0).unwrap();
        let cfg = SolverConfig::new(2_000_000, 1e-13).unwrap();
        let (y, _) = tikhonov_averaged(
            &fb,
            0.5,
            &NonexpansiveMap::identity(),
            &v(&[4.0, 4.0]),
            &sched,
            &cfg,
        )
        .unwrap();
        assert!(y.distance(&c) < 1e-6, "{y:?}");
    }

    #[test]
    fn anchored_selects_nearest_point() {
        let p = halfspace();
        let sched = default_schedule(0.9, 1.0).unwrap();
        let cfg = SolverConfig::new(20_000, 0.0).unwrap();
        let (y, _) =
            tikhonov_normal_s_anchored(&p, &p, &v(&[-3.0, 2.0]), &v(&[5.0, 5.0]), &sched, &cfg).unwrap();
        assert!(y.distance(&v(&[1.0, 2.0])) < 1e-3, "{y:?}");
    }

    #[test]
    fn schedule_violations_are_rejected() {
        let id = NonexpansiveMap::identity();
        let cfg = SolverConfig::new(10, 0.0).unwrap();
        let full = default_schedule(1.0, 1.0).unwrap();
        let err = tikhonov_normal_s(&id, &id, &v(&[1.0]), &full, &cfg).unwrap_err();
        assert!(matches!(err, Error::Schedule { n: 1, .. }), "{err}");
        assert!(mann_tikhonov_baseline(&id, &v(&[1.0]), &full, &cfg).is_ok());
        let dr = default_schedule(1.8, 2.0).unwrap();
        assert!(tikhonov_averaged(&id, 0.6, &id, &v(&[1.0]), &dr, &cfg).is_err());
        assert!(tikhonov_averaged(&id, 0.5, &id, &v(&[1.0]), &dr, &cfg).is_ok());
        assert!(tikhonov_averaged(&id, 1.0, &id, &v(&[1.0]), &dr, &cfg).is_err());
    }

    #[test]
    fn trace_logs_fixed_point_gaps() {
        let p = halfspace();
        let sched = default_schedule(0.9, 1.0).unwrap();
        let cfg = SolverConfig::new(100, 0.0).unwrap().with_trace_every(10);
        let (_, trace) = tikhonov_normal_s(&p, &p, &v(&[5.0, 5.0]), &sched, &cfg).unwrap();
        assert_eq!(trace.rows.len(), 10);
        assert!(trace
            .rows
            .iter()
            .all(|r| r.aux("s_gap").is_some() && r.aux("t_gap").is_some()));
    }
}
