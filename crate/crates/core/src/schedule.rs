//! Tikhonov damping and relaxation sequences `e_n`, `θ_n`.
//!
//! Schedules are rules of the iteration index, so runs of any length need no
//! storage. The asymptotic requirements on the sequences (`e_n → 1`,
//! `Σ(1 − e_n) = ∞`, bounded variation of both sequences) cannot be decided
//! for an arbitrary rule; they are the caller's obligation. What *can* be
//! checked is done by [`TikhonovSchedule::check`]: pointwise ranges for every
//! index a solve will query, plus the accumulated variation over that horizon.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};

pub type Rule = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// Pointwise checks stop here even for longer runs.
pub const CHECK_HORIZON_CAP: usize = 10_000_000;

#[derive(Clone)]
pub struct TikhonovSchedule {
    e: Rule,
    theta: Rule,
    theta_upper_bound: f64,
}

impl fmt::Debug for TikhonovSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TikhonovSchedule")
            .field("e_1", &(self.e)(1))
            .field("theta_1", &(self.theta)(1))
            .field("theta_upper_bound", &self.theta_upper_bound)
            .finish()
    }
}

/// Summary of a successful schedule check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScheduleReport {
    pub horizon: usize,
    /// `Σ_{n=2}^{horizon} |e_n − e_{n−1}|`
    pub e_variation: f64,
    /// `Σ_{n=2}^{horizon} |θ_n − θ_{n−1}|`
    pub theta_variation: f64,
    /// Smallest and largest `factor · θ_n` seen.
    pub scaled_theta_range: (f64, f64),
}

impl TikhonovSchedule {
    pub fn new(
        e: impl Fn(usize) -> f64 + Send + Sync + 'static,
        theta: impl Fn(usize) -> f64 + Send + Sync + 'static,
        theta_upper_bound: f64,
    ) -> Result<Self> {
        if !(theta_upper_bound > 0.0 && theta_upper_bound.is_finite()) {
            return Err(invalid(format!(
                "theta_upper_bound must be positive and finite, got {theta_upper_bound}"
            )));
        }
        Ok(Self {
            e: Arc::new(e),
            theta: Arc::new(theta),
            theta_upper_bound,
        })
    }

    pub fn e(&self, n: usize) -> f64 {
        (self.e)(n)
    }

    pub fn theta(&self, n: usize) -> f64 {
        (self.theta)(n)
    }

    pub fn theta_upper_bound(&self) -> f64 {
        self.theta_upper_bound
    }

    /// Checks `0 < e_n < 1`, `0 < θ_n ≤ theta_upper_bound` and
    /// `0 < factor·θ_n < 1` for `n = 1..=horizon`.
    ///
    /// `factor` is the averagedness constant of the scheme being run (1 for
    /// the plain two-map iteration, `2β/(4β−γ)` for forward–backward, `1/2`
    /// for Douglas–Rachford).
    pub fn check(&self, horizon: usize, factor: f64) -> Result<ScheduleReport> {
        self.check_bounds(horizon, factor, false)
    }

    /// As [`check`](Self::check) but admits `factor·θ_n = 1`.
    pub fn check_closed(&self, horizon: usize, factor: f64) -> Result<ScheduleReport> {
        self.check_bounds(horizon, factor, true)
    }

    fn check_bounds(&self, horizon: usize, factor: f64, closed: bool) -> Result<ScheduleReport> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(invalid(format!(
                "averaging factor must be positive, got {factor}"
            )));
        }
        let horizon = horizon.clamp(1, CHECK_HORIZON_CAP);
        let mut e_var = 0.0;
        let mut theta_var = 0.0;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut prev: Option<(f64, f64)> = None;
        for n in 1..=horizon {
            let e = self.e(n);
            let theta = self.theta(n);
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::Schedule {
                    n,
                    reason: format!("e_n = {e} outside (0, 1)"),
                });
            }
            if !(theta > 0.0 && theta <= self.theta_upper_bound) {
                return Err(Error::Schedule {
                    n,
                    reason: format!("theta_n = {theta} outside (0, {}]", self.theta_upper_bound),
                });
            }
            let scaled = factor * theta;
            let above = if closed { scaled > 1.0 } else { scaled >= 1.0 };
            if above {
                let bracket = if closed { "]" } else { ")" };
                return Err(Error::Schedule {
                    n,
                    reason: format!(
                        "averaged relaxation {factor} * theta_n = {scaled} outside (0, 1{bracket}"
                    ),
                });
            }
            lo = lo.min(scaled);
            hi = hi.max(scaled);
            if let Some((pe, pt)) = prev {
                e_var += (e - pe).abs();
                theta_var += (theta - pt).abs();
            }
            prev = Some((e, theta));
        }
        log::debug!("schedule checked to n = {horizon}: Σ|Δe| = {e_var:.3e}, Σ|Δθ| = {theta_var:.3e}");
        Ok(ScheduleReport {
            horizon,
            e_variation: e_var,
            theta_variation: theta_var,
            scaled_theta_range: (lo, hi),
        })
    }
}

/// `e_n = 1 − 1/(n+1)` and constant `θ_n = theta_const`.
pub fn default_schedule(theta_const: f64, theta_upper_bound: f64) -> Result<TikhonovSchedule> {
    if !(theta_const > 0.0 && theta_const <= theta_upper_bound) {
        return Err(invalid(format!(
            "theta_const = {theta_const} outside (0, {theta_upper_bound}]"
        )));
    }
    TikhonovSchedule::new(
        |n| 1.0 - 1.0 / (n as f64 + 1.0),
        move |_| theta_const,
        theta_upper_bound,
    )
}
