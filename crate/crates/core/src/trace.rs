//! Solver configuration and per-iteration traces.

use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use crate::error::{invalid, Result};
use crate::vector::Vector;

/// Optional metrics evaluated on the current primal iterate when a trace row
/// is written.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ProbeValues {
    pub objective: Option<f64>,
    pub psnr: Option<f64>,
}

pub type Probe = Arc<dyn Fn(&Vector) -> ProbeValues + Send + Sync>;

#[derive(Clone)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Stop once `‖y_{n+1} − y_n‖ ≤ residual_tol`.
    pub residual_tol: f64,
    pub trace_every: usize,
    pub probe: Option<Probe>,
}

impl fmt::Debug for SolverConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SolverConfig")
            .field("max_iters", &self.max_iters)
            .field("residual_tol", &self.residual_tol)
            .field("trace_every", &self.trace_every)
            .field("probe", &self.probe.is_some())
            .finish()
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 1000,
            residual_tol: 0.0,
            trace_every: 1,
            probe: None,
        }
    }
}

impl SolverConfig {
    pub fn new(max_iters: usize, residual_tol: f64) -> Result<Self> {
        let cfg = Self {
            max_iters,
            residual_tol,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_trace_every(mut self, every: usize) -> Self {
        self.trace_every = every;
        self
    }

    pub fn with_probe(mut self, probe: impl Fn(&Vector) -> ProbeValues + Send + Sync + 'static) -> Self {
        self.probe = Some(Arc::new(probe));
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(invalid("max_iters must be >= 1"));
        }
        if self.residual_tol.is_nan() || self.residual_tol < 0.0 {
            return Err(invalid(format!(
                "residual_tol must be >= 0, got {}",
                self.residual_tol
            )));
        }
        if self.trace_every == 0 {
            return Err(invalid("trace_every must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    /// Number of completed iterations.
    pub n: usize,
    pub residual: f64,
    pub objective: Option<f64>,
    pub psnr: Option<f64>,
    pub elapsed_ms: f64,
    /// Scheme-specific secondary columns, e.g. the Douglas–Rachford shadow gap.
    pub aux: Vec<(&'static str, f64)>,
}

impl TraceRow {
    pub fn aux(&self, name: &str) -> Option<f64> {
        self.aux.iter().find(|(k, _)| *k == name).map(|&(_, v)| v)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveTrace {
    pub rows: Vec<TraceRow>,
    pub iterations: usize,
    /// True when the residual test stopped the run before `max_iters`
    /// (or exactly at it).
    pub converged: bool,
}

impl SolveTrace {
    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    pub fn final_residual(&self) -> Option<f64> {
        self.last().map(|r| r.residual)
    }

    pub fn residuals(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.residual).collect()
    }
}

/// Objective used for trace rows when the probe supplies none.
pub(crate) type ObjectiveFn<'a> = Option<Box<dyn Fn(&Vector) -> f64 + 'a>>;

/// Shared bookkeeping for every iteration loop: stopping rule, trace cadence,
/// probe evaluation and timing.
pub(crate) struct Recorder<'a> {
    cfg: &'a SolverConfig,
    default_objective: ObjectiveFn<'a>,
    start: Instant,
    trace: SolveTrace,
}

impl<'a> Recorder<'a> {
    pub(crate) fn new(cfg: &'a SolverConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            default_objective: None,
            start: Instant::now(),
            trace: SolveTrace::default(),
        })
    }

    pub(crate) fn with_default_objective(mut self, f: ObjectiveFn<'a>) -> Self {
        self.default_objective = f;
        self
    }

    pub(crate) fn max_iters(&self) -> usize {
        self.cfg.max_iters
    }

    /// Whether iteration `n` will produce a trace row if it is not the last.
    pub(crate) fn due(&self, n: usize) -> bool {
        n.is_multiple_of(self.cfg.trace_every)
    }

    /// Records iteration `n` (1-based count of completed updates). Returns
    /// true when the loop should stop.
    pub(crate) fn record(
        &mut self,
        n: usize,
        residual: f64,
        primal: &Vector,
        aux: impl FnOnce() -> Vec<(&'static str, f64)>,
    ) -> bool {
        let converged = residual <= self.cfg.residual_tol;
        let last = converged || n >= self.cfg.max_iters;
        if last || self.due(n) {
            let mut values = match &self.cfg.probe {
                Some(p) => p(primal),
                None => ProbeValues::default(),
            };
            if values.objective.is_none() {
                values.objective = self.default_objective.as_ref().map(|f| f(primal));
            }
            self.trace.rows.push(TraceRow {
                n,
                residual,
                objective: values.objective,
                psnr: values.psnr,
                elapsed_ms: self.start.elapsed().as_secs_f64() * 1e3,
                aux: aux(),
            });
        }
        if last {
            self.trace.iterations = n;
            self.trace.converged = converged;
        }
        last
    }

    pub(crate) fn finish(self) -> SolveTrace {
        self.trace
    }
}
