//! Douglas–Rachford primal–dual scheme.

use super::fb::sum_adjoints;
use super::metric::{build_product_metric, MetricReport, Scheme};
use super::{validate_init, validate_links, DualLink, PrimalDualProblem};
use crate::error::Result;
use crate::operators::{MonotoneOperator, Proximable};
use crate::schedule::TikhonovSchedule;
use crate::trace::{ObjectiveFn, Recorder, SolveTrace, SolverConfig};
use crate::vector::{ProductVector, Vector};

/// One dual block `Lᵢ`, `Pᵢ`, `Qᵢ`. Both operators enter through the
/// resolvents of their inverses. Without `Q`, `Qᵢ⁻¹ = 0` and `Pᵢ □ Qᵢ = Pᵢ`.
#[derive(Clone, Debug)]
pub struct DrBlock {
    pub link: DualLink,
    p_inv: MonotoneOperator,
    q_inv: Option<MonotoneOperator>,
}

impl DrBlock {
    pub fn new(link: DualLink, p: &MonotoneOperator) -> Self {
        Self {
            link,
            p_inv: p.inverse(),
            q_inv: None,
        }
    }

    pub fn with_q(mut self, q: &MonotoneOperator) -> Self {
        self.q_inv = Some(q.inverse());
        self
    }

    /// Block given directly by the operators `Pᵢ⁻¹` and `Qᵢ⁻¹`.
    pub fn from_inverses(link: DualLink, p_inv: MonotoneOperator, q_inv: Option<MonotoneOperator>) -> Self {
        Self { link, p_inv, q_inv }
    }

    fn p_step(&self, x: &Vector) -> Vector {
        self.p_inv.resolvent(self.link.sigma, x)
    }

    fn q_step(&self, x: Vector) -> Vector {
        match &self.q_inv {
            Some(q) => q.resolvent(self.link.sigma, &x),
            None => x,
        }
    }
}

/// `0 ∈ Ax + Σ Lᵢ*((Pᵢ □ Qᵢ)(Lᵢx))`.
#[derive(Clone, Debug)]
pub struct DrPrimalDualProblem {
    pub tau: f64,
    pub a: MonotoneOperator,
    pub blocks: Vec<DrBlock>,
    links: Vec<DualLink>,
}

impl DrPrimalDualProblem {
    pub fn new(tau: f64, a: MonotoneOperator, blocks: Vec<DrBlock>) -> Self {
        let links = blocks.iter().map(|b| b.link.clone()).collect();
        Self {
            tau,
            a,
            blocks,
            links,
        }
    }

    pub fn metric_report(&self) -> MetricReport {
        build_product_metric(self)
    }

    /// Shadow point of an iterate `(x, v)`:
    /// `p₁ = J_{τA}(x − (τ/2)Σ Lᵢ*vᵢ)`,
    /// `p₂ᵢ = J_{σᵢPᵢ⁻¹}(vᵢ + (σᵢ/2)Lᵢ(2p₁ − x))`.
    /// At a limit of the iteration it is a primal–dual solution.
    pub fn shadow(&self, z: &ProductVector) -> ProductVector {
        let x = z.primal();
        let half = 0.5 * self.tau;
        let p1 = self.a.resolvent(
            self.tau,
            &x.lincomb(1.0, &sum_adjoints(&self.links, z.duals(), x.dim()), -half),
        );
        let w1 = p1.lincomb(2.0, x, -1.0);
        let p2 = self
            .blocks
            .iter()
            .zip(z.duals())
            .map(|(b, v)| b.p_step(&v.lincomb(1.0, &b.link.op.apply(&w1), 0.5 * b.link.sigma)))
            .collect();
        ProductVector::from_parts(p1, p2)
    }
}

impl PrimalDualProblem for DrPrimalDualProblem {
    fn scheme(&self) -> Scheme {
        Scheme::DouglasRachford
    }

    fn tau(&self) -> f64 {
        self.tau
    }

    fn links(&self) -> &[DualLink] {
        &self.links
    }
}

#[derive(Clone, Debug)]
pub struct PdDrOutcome {
    /// Final `(x, v₁, …, v_m)`.
    pub iterate: ProductVector,
    /// Shadow of the final iterate; approximates a primal–dual solution.
    pub shadow: ProductVector,
    pub trace: SolveTrace,
}

/// Damped Douglas–Rachford primal–dual iteration. With `e = e_n`, `θ = θ_n`
/// and `h = τ/2`, `kᵢ = σᵢ/2`:
///
/// ```text
/// p₁  = J_{τA}(e x − h Σ Lᵢ*(e vᵢ))          w₁  = 2p₁ − e x
/// p₂ᵢ = J_{σᵢPᵢ⁻¹}(e vᵢ + kᵢ Lᵢw₁)            w₂ᵢ = 2p₂ᵢ − e vᵢ
/// z₁  = w₁ − h Σ Lᵢ*w₂ᵢ                       u₁  = e x + θ(z₁ − p₁)
/// z₂ᵢ = J_{σᵢQᵢ⁻¹}(w₂ᵢ + kᵢ Lᵢ(2z₁ − w₁))      u₂ᵢ = e vᵢ + θ(z₂ᵢ − p₂ᵢ)
/// q₁  = J_{τA}(u₁ − h Σ Lᵢ*u₂ᵢ)               s₁  = 2q₁ − u₁
/// q₂ᵢ = J_{σᵢPᵢ⁻¹}(u₂ᵢ + kᵢ Lᵢs₁)             s₂ᵢ = 2q₂ᵢ − u₂ᵢ
/// d₁  = s₁ − h Σ Lᵢ*s₂ᵢ                       x'  = 2d₁ − s₁
/// d₂ᵢ = J_{σᵢQᵢ⁻¹}(s₂ᵢ + kᵢ Lᵢx')             vᵢ' = 2d₂ᵢ − s₂ᵢ
/// ```
///
/// Requires `τΣσᵢ‖Lᵢ‖² < 4` and `θ_n ∈ (0, 2)`. Probes see `p₁`.
pub fn pd_dr_solve(
    prob: &DrPrimalDualProblem,
    init: &ProductVector,
    sched: &TikhonovSchedule,
    cfg: &SolverConfig,
) -> Result<PdDrOutcome> {
    pd_dr_loop(prob, init, sched, cfg, None)
}

fn pd_dr_loop<'a>(
    prob: &DrPrimalDualProblem,
    init: &ProductVector,
    sched: &TikhonovSchedule,
    cfg: &'a SolverConfig,
    objective: ObjectiveFn<'a>,
) -> Result<PdDrOutcome> {
    validate_links(prob.tau, &prob.links)?;
    validate_init(&prob.links, init)?;
    cfg.validate()?;
    let report = prob.metric_report().into_result()?;
    sched.check(cfg.max_iters, report.relaxation_factor())?;
    log::debug!("{}", report.message);

    let tau = prob.tau;
    let h = 0.5 * tau;
    let links = &prob.links;
    let blocks = &prob.blocks;
    let half_l = |i: usize, x: &Vector| -> Vector { links[i].op.apply(x).scale(0.5 * links[i].sigma) };

    let mut rec = Recorder::new(cfg)?.with_default_objective(objective);
    let mut state = init.clone();
    for n in 1..=rec.max_iters() {
        let (e, theta) = (sched.e(n), sched.theta(n));
        let ex = state.primal().scale(e);
        let ev: Vec<Vector> = state.duals().iter().map(|v| v.scale(e)).collect();
        let dim = ex.dim();

        let p1 = prob
            .a
            .resolvent(tau, &ex.lincomb(1.0, &sum_adjoints(links, &ev, dim), -h));
        let w1 = p1.lincomb(2.0, &ex, -1.0);
        let p2: Vec<Vector> = (0..blocks.len())
            .map(|i| blocks[i].p_step(&(&ev[i] + &half_l(i, &w1))))
            .collect();
        let w2: Vec<Vector> = p2.iter().zip(&ev).map(|(p, v)| p.lincomb(2.0, v, -1.0)).collect();
        let z1 = w1.lincomb(1.0, &sum_adjoints(links, &w2, dim), -h);
        let u1 = &ex + &(&z1 - &p1).scale(theta);
        let reflect = z1.lincomb(2.0, &w1, -1.0);
        let u2: Vec<Vector> = (0..blocks.len())
            .map(|i| {
                let z2 = blocks[i].q_step(&w2[i] + &half_l(i, &reflect));
                &ev[i] + &(&z2 - &p2[i]).scale(theta)
            })
            .collect();

        let q1 = prob
            .a
            .resolvent(tau, &u1.lincomb(1.0, &sum_adjoints(links, &u2, dim), -h));
        let s1 = q1.lincomb(2.0, &u1, -1.0);
        let s2: Vec<Vector> = (0..blocks.len())
            .map(|i| {
                let q2 = blocks[i].p_step(&(&u2[i] + &half_l(i, &s1)));
                q2.lincomb(2.0, &u2[i], -1.0)
            })
            .collect();
        let d1 = s1.lincomb(1.0, &sum_adjoints(links, &s2, dim), -h);
        let x = d1.lincomb(2.0, &s1, -1.0);
        let v: Vec<Vector> = (0..blocks.len())
            .map(|i| {
                let d2 = blocks[i].q_step(&s2[i] + &half_l(i, &x));
                d2.lincomb(2.0, &s2[i], -1.0)
            })
            .collect();

        let next = ProductVector::from_parts(x, v);
        let residual = next.distance(&state);
        state = next;
        if rec.record(n, residual, &p1, Vec::new) {
            break;
        }
    }
    let shadow = prob.shadow(&state);
    Ok(PdDrOutcome {
        iterate: state,
        shadow,
        trace: rec.finish(),
    })
}

/// Dual block of the minimization form `(gᵢ □ lᵢ)(Lᵢx)`; `l = None` means
/// `lᵢ = ι_{0}`, i.e. the block is plain `gᵢ(Lᵢx)`.
#[derive(Clone, Debug)]
pub struct DrProxBlock {
    pub link: DualLink,
    pub g: Proximable,
    pub l: Option<Proximable>,
}

impl DrProxBlock {
    pub fn new(link: DualLink, g: Proximable) -> Self {
        Self { link, g, l: None }
    }

    pub fn with_l(mut self, l: Proximable) -> Self {
        self.l = Some(l);
        self
    }

    fn to_block(&self) -> DrBlock {
        let g = self.g.clone();
        let p_inv = MonotoneOperator::from_resolvent(move |s, x| g.conjugate_prox(s, x));
        let q_inv = self
            .l
            .clone()
            .map(|l| MonotoneOperator::from_resolvent(move |s, x| l.conjugate_prox(s, x)));
        DrBlock::from_inverses(self.link.clone(), p_inv, q_inv)
    }
}

/// Douglas–Rachford primal–dual solve of `min f(x) + Σ (gᵢ □ lᵢ)(Lᵢx)`.
///
/// The dual resolvents are `prox_{σᵢgᵢ*}` and `prox_{σᵢlᵢ*}` by Moreau
/// decomposition. When `f` and every `gᵢ` carry values and no block is
/// smoothed, the trace objective is `f(p₁) + Σ gᵢ(Lᵢp₁)`.
pub fn pd_dr_prox_solve(
    f: &Proximable,
    blocks: &[DrProxBlock],
    tau: f64,
    init: &ProductVector,
    sched: &TikhonovSchedule,
    cfg: &SolverConfig,
) -> Result<PdDrOutcome> {
    let prob = DrPrimalDualProblem::new(
        tau,
        f.subdifferential(),
        blocks.iter().map(DrProxBlock::to_block).collect(),
    );
    let valued = f.has_value() && blocks.iter().all(|b| b.g.has_value() && b.l.is_none());
    let objective: ObjectiveFn<'_> = if valued {
        Some(Box::new(move |x: &Vector| {
            f.value(x).unwrap_or(f64::NAN)
                + blocks
                    .iter()
                    .map(|b| b.g.value(&b.link.op.apply(x)).unwrap_or(f64::NAN))
                    .sum::<f64>()
        }))
    } else {
        None
    };
    pd_dr_loop(&prob, init, sched, cfg, objective)
}
