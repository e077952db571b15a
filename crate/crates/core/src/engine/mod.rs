//! Iteration variants and the run loop.

mod step;
mod trace;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use step::{
    step_aggregated, step_momentum, step_prox, step_subgradient, step_variant_a, step_variant_b,
    step_variant_c, GradientWindow, Step, Stepper, VariantStepper,
};
pub use trace::{CycleSnapshot, OracleLog, StopReason, Trace, TraceMetadata, TraceRow};

use crate::error::{Error, Result};
use crate::model::point::Point;
use crate::model::problem::Problem;
use crate::schedule::{Ordering, OrderingKind, StepsizeSchedule};

/// Slack added to the target value before the stopping test.
pub const TARGET_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Prox on `f_i` over `X`, then projected subgradient step on `h_i`.
    #[serde(alias = "A")]
    ProxThenSubgrad,
    /// Prox on `f_i` over the whole space, then projected subgradient step.
    #[serde(alias = "B")]
    ProxFreeThenSubgrad,
    /// Unprojected subgradient step on `h_i`, then prox on `f_i` over `X`.
    #[serde(alias = "C")]
    SubgradThenProx,
    /// Projected subgradient step on `F_i`.
    SubgradOnly,
    /// Prox on `F_i` over `X`.
    ProxOnly,
    /// Incremental gradient with a heavy-ball term; needs `beta`.
    GradMomentum,
    /// Incremental aggregated gradient over a window of `m` gradients.
    AggregatedGrad,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::ProxThenSubgrad => "prox_then_subgrad",
            Variant::ProxFreeThenSubgrad => "prox_free_then_subgrad",
            Variant::SubgradThenProx => "subgrad_then_prox",
            Variant::SubgradOnly => "subgrad_only",
            Variant::ProxOnly => "prox_only",
            Variant::GradMomentum => "grad_momentum",
            Variant::AggregatedGrad => "aggregated_grad",
        }
    }
}

/// Limits are combined with OR; at least one of the iteration caps is
/// required.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Limits {
    pub max_iters: Option<usize>,
    pub max_cycles: Option<usize>,
    pub target_value: Option<f64>,
}

impl Limits {
    pub fn iters(n: usize) -> Self {
        Limits {
            max_iters: Some(n),
            ..Default::default()
        }
    }

    fn cap(&self, m: usize) -> Result<usize> {
        let by_cycles = self.max_cycles.map(|c| c.saturating_mul(m));
        match (self.max_iters, by_cycles) {
            (None, None) => Err(Error::Config("limits need max_iters or max_cycles".into())),
            (a, b) => Ok(a.unwrap_or(usize::MAX).min(b.unwrap_or(usize::MAX))),
        }
    }
}

/// Which rows a trace keeps.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowDetail {
    /// A row for every iteration.
    #[default]
    All,
    /// Only rows where the objective was evaluated.
    Evaluated,
}

/// Everything needed to replay a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub variant: Variant,
    /// Momentum coefficient, used only by [`Variant::GradMomentum`].
    #[serde(default)]
    pub beta: f64,
    pub ordering: OrderingKind,
    #[serde(default)]
    pub seed: u64,
    pub stepsize: StepsizeSchedule,
    pub limits: Limits,
    /// Evaluate `F` every this many iterations; defaults to `m`.
    #[serde(default)]
    pub eval_stride: Option<usize>,
    #[serde(default)]
    pub rows: RowDetail,
    /// Record per-row wall time. Off by default so traces are reproducible
    /// byte for byte.
    #[serde(default)]
    pub timing: bool,
    /// Keep cycle snapshots and step ratios for diagnostics.
    #[serde(default)]
    pub instrument: bool,
}

impl RunConfig {
    pub fn new(variant: Variant, ordering: OrderingKind, stepsize: StepsizeSchedule, limits: Limits) -> Self {
        RunConfig {
            variant,
            beta: 0.0,
            ordering,
            seed: 0,
            stepsize,
            limits,
            eval_stride: None,
            rows: RowDetail::All,
            timing: false,
            instrument: false,
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn eval_stride(mut self, stride: usize) -> Self {
        self.eval_stride = Some(stride);
        self
    }

    pub fn rows(mut self, rows: RowDetail) -> Self {
        self.rows = rows;
        self
    }

    pub fn instrument(mut self, on: bool) -> Self {
        self.instrument = on;
        self
    }
}

/// Runs one of the built-in variants from `x0` (the origin if absent).
pub fn run(problem: &Problem, config: &RunConfig, x0: Option<&Point>) -> Result<Trace> {
    step::check_variant(
        config.variant,
        config.beta,
        problem,
        config.ordering == OrderingKind::Cyclic,
    )?;
    let mut stepper = VariantStepper::new(config.variant, config.beta, problem.m());
    run_with(problem, &mut stepper, config, x0)
}

/// The run loop, driving any [`Stepper`]. `config.variant` is recorded but
/// the stepper decides what each iteration does.
pub fn run_with(problem: &Problem, stepper: &mut dyn Stepper, config: &RunConfig, x0: Option<&Point>) -> Result<Trace> {
    let m = problem.m();
    let cap = config.limits.cap(m)?;
    let stride = config.eval_stride.unwrap_or(m);
    if stride == 0 {
        return Err(Error::Config("eval_stride must be positive".into()));
    }
    config.stepsize.validate()?;
    let mut ordering = Ordering::new(config.ordering, m, config.seed)?;

    let start = match x0 {
        Some(p) => {
            crate::error::check_dim(problem.dim(), p.dim()).map_err(|e| Error::Config(format!("x0: {e}")))?;
            p.clone()
        }
        None => Point::zeros(problem.dim()),
    };
    let set = problem.constraint().clone();
    let mut x = set.project(&start);

    let clock = config.timing.then(Instant::now);
    let mut trace = Trace {
        metadata: TraceMetadata {
            method: stepper.method(),
            m,
            dim: problem.dim(),
            config: config.clone(),
        },
        rows: Vec::new(),
        best_value: f64::INFINITY,
        best_k: 0,
        best_point: x.clone(),
        final_point: x.clone(),
        iterations: 0,
        stop_reason: None,
        oracle_log: OracleLog::default(),
        cycles: Vec::new(),
        step_ratios: Vec::new(),
    };

    let mut k = 0usize;
    loop {
        let mut stop = if k >= cap {
            Some(if config.limits.max_iters == Some(cap) {
                StopReason::MaxIters
            } else {
                StopReason::MaxCycles
            })
        } else {
            None
        };
        let evaluate = k % stride == 0 || stop.is_some();
        let mut row = TraceRow {
            k,
            i_k: None,
            alpha_k: None,
            value: None,
            dist_opt: None,
            wall_ms: clock.map(|c| c.elapsed().as_secs_f64() * 1e3),
        };
        if evaluate {
            let v = problem.value(&x)?;
            if !v.is_finite() {
                return Err(abort(trace, Error::NonFinite { iteration: k }));
            }
            row.value = Some(v);
            row.dist_opt = problem.dist_to_optimum(&x);
            if v < trace.best_value {
                trace.best_value = v;
                trace.best_k = k;
                trace.best_point = x.clone();
            }
            if let Some(t) = config.limits.target_value {
                if trace.best_value <= t + TARGET_SLACK {
                    stop = Some(StopReason::Target);
                }
            }
        }
        if config.instrument && k % m == 0 && stop.is_none() {
            instrument_cycle_start(problem, &x, k, config.stepsize.at(k, m), &mut trace)?;
        }
        if let Some(reason) = stop {
            trace.stop_reason = Some(reason);
            trace.rows.push(row);
            break;
        }

        let i = ordering.next_index();
        let alpha = config.stepsize.at(k, m);
        let step = match stepper.step(problem, i, &x, alpha, &mut trace.oracle_log) {
            Ok(s) => s,
            Err(e) => {
                row.i_k = Some(i);
                row.alpha_k = Some(alpha);
                trace.rows.push(row);
                trace.iterations = k;
                trace.final_point = x;
                return Err(abort(trace, e));
            }
        };
        if !step.x.is_finite() {
            trace.rows.push(row);
            return Err(abort(trace, Error::NonFinite { iteration: k + 1 }));
        }
        if config.instrument {
            trace.step_ratios.push(step.x.distance(&x) / step.alpha);
        }
        row.i_k = Some(i);
        row.alpha_k = Some(step.alpha);
        if config.rows == RowDetail::All || row.value.is_some() {
            trace.rows.push(row);
        }
        x = step.x;
        k += 1;
    }
    trace.iterations = k;
    trace.final_point = x;
    Ok(trace)
}

fn abort(mut trace: Trace, source: Error) -> Error {
    trace.stop_reason = None;
    Error::Aborted {
        trace: Box::new(trace),
        source: Box::new(source),
    }
}

/// Logs every component's subgradient norms at a cycle start and keeps a
/// snapshot of the iterate.
fn instrument_cycle_start(problem: &Problem, x: &Point, k: usize, alpha: f64, trace: &mut Trace) -> Result<()> {
    for c in problem.components() {
        trace.oracle_log.record(c.prox_part.subgradient(x).norm());
        trace.oracle_log.record(c.subgrad_part.subgradient(x).norm());
    }
    trace.cycles.push(CycleSnapshot {
        k,
        x: x.clone(),
        value: problem.value(x)?,
        alpha,
    });
    Ok(())
}
