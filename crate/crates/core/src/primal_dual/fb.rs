//! Forward–backward primal–dual scheme for two coupled systems.

use super::metric::{build_product_metric, MetricReport, Scheme};
use super::{validate_init, validate_links, DualLink, PrimalDualProblem};
use crate::error::{check_dims, Result};
use crate::operators::{CocoerciveOperator, MonotoneOperator, Proximable};
use crate::schedule::TikhonovSchedule;
use crate::trace::{Recorder, SolveTrace, SolverConfig};
use crate::vector::{ProductVector, Vector};

/// Dual data of one block: the set-valued `P` (used through the resolvent of
/// `P⁻¹`) and the single-valued, cocoercive `Q⁻¹`.
///
/// The cocoercivity constant of `q_inv` is the strong-monotonicity constant
/// of `Q`, which the caller asserts.
#[derive(Clone, Debug)]
pub struct FbDual {
    pub p: MonotoneOperator,
    pub q_inv: CocoerciveOperator,
}

impl FbDual {
    pub fn new(p: MonotoneOperator, q_inv: CocoerciveOperator) -> Self {
        Self { p, q_inv }
    }
}

/// `0 ∈ Ax + Σ Lᵢ*((Pᵢ □ Qᵢ)(Lᵢx)) + Cx`.
#[derive(Clone, Debug)]
pub struct FbSystem {
    pub a: MonotoneOperator,
    pub c: CocoerciveOperator,
    pub duals: Vec<FbDual>,
}

impl FbSystem {
    pub fn new(a: MonotoneOperator, c: CocoerciveOperator, duals: Vec<FbDual>) -> Self {
        Self { a, c, duals }
    }

    fn beta(&self) -> f64 {
        self.duals
            .iter()
            .map(|d| d.q_inv.beta())
            .fold(self.c.beta(), f64::min)
    }

    fn zero_constants(&self) -> usize {
        usize::from(self.c.is_zero()) + self.duals.iter().filter(|d| d.q_inv.is_zero()).count()
    }
}

/// Two systems sharing the couplings `Lᵢ` and steps `τ`, `σᵢ`. The second
/// system (operators `B`, `D`, `Rᵢ`, `Sᵢ`) defaults to the first.
#[derive(Clone, Debug)]
pub struct FbPrimalDualProblem {
    pub tau: f64,
    pub links: Vec<DualLink>,
    pub first: FbSystem,
    pub second: Option<FbSystem>,
}

impl FbPrimalDualProblem {
    pub fn new(tau: f64, links: Vec<DualLink>, first: FbSystem) -> Self {
        Self {
            tau,
            links,
            first,
            second: None,
        }
    }

    pub fn with_second(mut self, second: FbSystem) -> Self {
        self.second = Some(second);
        self
    }

    pub fn second_system(&self) -> &FbSystem {
        self.second.as_ref().unwrap_or(&self.first)
    }

    pub fn metric_report(&self) -> MetricReport {
        build_product_metric(self)
    }

    fn validate(&self) -> Result<()> {
        validate_links(self.tau, &self.links)?;
        check_dims(self.first.duals.len(), self.links.len())?;
        check_dims(self.second_system().duals.len(), self.links.len())?;
        Ok(())
    }
}

impl PrimalDualProblem for FbPrimalDualProblem {
    fn scheme(&self) -> Scheme {
        Scheme::ForwardBackward
    }

    fn tau(&self) -> f64 {
        self.tau
    }

    fn links(&self) -> &[DualLink] {
        &self.links
    }

    fn cocoercivity(&self) -> (f64, f64) {
        (self.first.beta(), self.second_system().beta())
    }
}

/// Damped forward–backward primal–dual iteration on `(y, v₁, …, v_m)`:
///
/// ```text
/// p     = J_{τA}[e y − τ(Σ Lᵢ*(e vᵢ) + C(e y))]
/// u     = e y + θ(p − e y)
/// qᵢ    = J_{σᵢPᵢ⁻¹}[e vᵢ + σᵢ(Lᵢ(2p − e y) − Qᵢ⁻¹(e vᵢ))]
/// uᵢ    = e vᵢ + θ(qᵢ − e vᵢ)
/// y'    = J_{τB}[u − τ(Σ Lᵢ*uᵢ + D u)]
/// vᵢ'   = J_{σᵢRᵢ⁻¹}[uᵢ + σᵢ(Lᵢ(2y' − u) − Sᵢ⁻¹uᵢ)]
/// ```
///
/// The step sizes must satisfy `τΣσᵢ‖Lᵢ‖² < 1` and `2ρ·min(β₁, β₂) ≥ 1`;
/// violations are rejected before iterating. Probes see `y`.
pub fn pd_fb_solve(
    prob: &FbPrimalDualProblem,
    init: &ProductVector,
    sched: &TikhonovSchedule,
    cfg: &SolverConfig,
) -> Result<(ProductVector, SolveTrace)> {
    prob.validate()?;
    validate_init(&prob.links, init)?;
    cfg.validate()?;
    let report = prob.metric_report().into_result()?;
    sched.check(cfg.max_iters, report.relaxation_factor())?;
    let zeros = prob.first.zero_constants() + prob.second_system().zero_constants();
    if zeros > 0 {
        log::warn!(
            "{zeros} forward operator(s) are zero; their constants are treated as +inf and the \
             strong-monotonicity hypotheses cannot be checked"
        );
    }
    log::debug!("{}", report.message);

    let tau = prob.tau;
    let links = &prob.links;
    let (s1, s2) = (&prob.first, prob.second_system());
    let p_inv: Vec<MonotoneOperator> = s1.duals.iter().map(|d| d.p.inverse()).collect();
    let r_inv: Vec<MonotoneOperator> = s2.duals.iter().map(|d| d.p.inverse()).collect();

    let mut rec = Recorder::new(cfg)?;
    let mut blocks = init.clone();
    for n in 1..=rec.max_iters() {
        let (e, theta) = (sched.e(n), sched.theta(n));
        let ey = blocks.primal().scale(e);
        let ev: Vec<Vector> = blocks.duals().iter().map(|v| v.scale(e)).collect();

        let p_arg = &ey - &(&sum_adjoints(links, &ev, ey.dim()) + &s1.c.apply(&ey)).scale(tau);
        let p = s1.a.resolvent(tau, &p_arg);
        let u = ey.lincomb(1.0 - theta, &p, theta);
        let extrap = p.lincomb(2.0, &ey, -1.0);
        let ui: Vec<Vector> = links
            .iter()
            .zip(&ev)
            .enumerate()
            .map(|(i, (link, evi))| {
                let dir = &link.op.apply(&extrap) - &s1.duals[i].q_inv.apply(evi);
                let q = p_inv[i].resolvent(link.sigma, &evi.lincomb(1.0, &dir, link.sigma));
                evi.lincomb(1.0 - theta, &q, theta)
            })
            .collect();

        let y_arg = &u - &(&sum_adjoints(links, &ui, u.dim()) + &s2.c.apply(&u)).scale(tau);
        let y = s2.a.resolvent(tau, &y_arg);
        let extrap = y.lincomb(2.0, &u, -1.0);
        let v: Vec<Vector> = links
            .iter()
            .zip(&ui)
            .enumerate()
            .map(|(i, (link, uii))| {
                let dir = &link.op.apply(&extrap) - &s2.duals[i].q_inv.apply(uii);
                r_inv[i].resolvent(link.sigma, &uii.lincomb(1.0, &dir, link.sigma))
            })
            .collect();

        let next = ProductVector::from_parts(y, v);
        let residual = next.distance(&blocks);
        blocks = next;
        if rec.record(n, residual, blocks.primal(), Vec::new) {
            break;
        }
    }
    Ok((blocks, rec.finish()))
}

pub(super) fn sum_adjoints(links: &[DualLink], duals: &[Vector], dim: usize) -> Vector {
    let mut acc = Vector::zeros(dim);
    for (link, v) in links.iter().zip(duals) {
        acc = &acc + &link.op.adjoint(v);
    }
    acc
}

/// One dual block of the minimization form: `gᵢ` by its prox and the
/// gradient of `lᵢ*`. `None` stands for `lᵢ = ι_{0}`, whose conjugate has
/// zero gradient, leaving `gᵢ ∘ Lᵢ` without smoothing.
#[derive(Clone, Debug)]
pub struct FbProxDual {
    pub g: Proximable,
    pub l_conj_grad: Option<CocoerciveOperator>,
}

impl FbProxDual {
    pub fn new(g: Proximable) -> Self {
        Self { g, l_conj_grad: None }
    }

    pub fn with_smoothing(mut self, l_conj_grad: CocoerciveOperator) -> Self {
        self.l_conj_grad = Some(l_conj_grad);
        self
    }
}

/// `min f(x) + Σ (gᵢ □ lᵢ)(Lᵢx) + h(x)`.
#[derive(Clone, Debug)]
pub struct FbProxSystem {
    pub f: Proximable,
    pub grad_h: CocoerciveOperator,
    pub duals: Vec<FbProxDual>,
}

impl FbProxSystem {
    pub fn new(f: Proximable, grad_h: CocoerciveOperator, duals: Vec<FbProxDual>) -> Self {
        Self { f, grad_h, duals }
    }

    fn to_system(&self) -> FbSystem {
        FbSystem::new(
            self.f.subdifferential(),
            self.grad_h.clone(),
            self.duals
                .iter()
                .map(|d| {
                    FbDual::new(
                        d.g.subdifferential(),
                        d.l_conj_grad.clone().unwrap_or_else(CocoerciveOperator::zero),
                    )
                })
                .collect(),
        )
    }
}

#[derive(Clone, Debug)]
pub struct FbProxProblem {
    pub tau: f64,
    pub links: Vec<DualLink>,
    pub first: FbProxSystem,
    pub second: Option<FbProxSystem>,
}

impl FbProxProblem {
    pub fn new(tau: f64, links: Vec<DualLink>, first: FbProxSystem) -> Self {
        Self {
            tau,
            links,
            first,
            second: None,
        }
    }

    pub fn with_second(mut self, second: FbProxSystem) -> Self {
        self.second = Some(second);
        self
    }

    /// The equivalent operator problem: `A = ∂f`, `C = ∇h`, `Pᵢ = ∂gᵢ`,
    /// `Qᵢ⁻¹ = ∇lᵢ*`.
    pub fn to_operator_problem(&self) -> FbPrimalDualProblem {
        let mut prob = FbPrimalDualProblem::new(self.tau, self.links.clone(), self.first.to_system());
        if let Some(second) = &self.second {
            prob = prob.with_second(second.to_system());
        }
        prob
    }
}

/// [`pd_fb_solve`] for the minimization form. The dual resolvents become
/// `prox_{σᵢgᵢ*}`, evaluated by Moreau decomposition.
pub fn pd_fb_prox_solve(
    prob: &FbProxProblem,
    init: &ProductVector,
    sched: &TikhonovSchedule,
    cfg: &SolverConfig,
) -> Result<(ProductVector, SolveTrace)> {
    pd_fb_solve(&prob.to_operator_problem(), init, sched, cfg)
}
