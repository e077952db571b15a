//! Single iterations of every variant.
//!
//! Zero parts are skipped rather than evaluated, so that dropping `f_i` or
//! `h_i` turns a combined step into exactly the same floating-point
//! operations as the corresponding pure subgradient or pure proximal step.

use std::collections::VecDeque;

use super::trace::OracleLog;
use super::Variant;
use crate::error::{Error, Result};
use crate::model::function::{NumericProx, ProxFunction, Sum};
use crate::model::point::Point;
use crate::model::problem::{ComponentPair, Problem};
use crate::model::set::{ConstraintSet, WholeSpace};

/// Output of one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    /// Intermediate point, for the two-stage variants.
    pub z: Option<Point>,
    pub x: Point,
    /// Stepsize actually applied (differs from the schedule only for the
    /// aggregated method's cold start).
    pub alpha: f64,
}

/// Anything the run loop can drive: given `x_k`, the component index and
/// the stepsize, produce `x_{k+1}`.
pub trait Stepper {
    fn method(&self) -> String;

    fn step(&mut self, problem: &Problem, i: usize, x: &Point, alpha: f64, log: &mut OracleLog) -> Result<Step>;
}

fn recovered(from: &Point, to: &Point, alpha: f64) -> f64 {
    from.distance(to) / alpha
}

/// Prox over `X`, then projected subgradient step on `h` at `z`.
pub fn step_variant_a(
    x: &Point,
    comp: &ComponentPair,
    set: &dyn ConstraintSet,
    alpha: f64,
    tol: f64,
) -> Result<(Point, Point)> {
    variant_a_logged(x, comp, set, alpha, tol, &mut OracleLog::default())
}

/// Prox over the whole space, then projected subgradient step on `h` at `z`.
pub fn step_variant_b(
    x: &Point,
    comp: &ComponentPair,
    set: &dyn ConstraintSet,
    alpha: f64,
    tol: f64,
) -> Result<(Point, Point)> {
    variant_b_logged(x, comp, set, alpha, tol, &mut OracleLog::default())
}

/// Unprojected subgradient step on `h`, then prox over `X`.
pub fn step_variant_c(
    x: &Point,
    comp: &ComponentPair,
    set: &dyn ConstraintSet,
    alpha: f64,
    tol: f64,
) -> Result<(Point, Point)> {
    variant_c_logged(x, comp, set, alpha, tol, &mut OracleLog::default())
}

/// Projected subgradient step on `F_i = f_i + h_i`.
pub fn step_subgradient(x: &Point, comp: &ComponentPair, set: &dyn ConstraintSet, alpha: f64) -> Point {
    subgradient_logged(x, comp, set, alpha, &mut OracleLog::default())
}

/// Prox of `F_i = f_i + h_i` over `X`.
pub fn step_prox(x: &Point, comp: &ComponentPair, set: &dyn ConstraintSet, alpha: f64, tol: f64) -> Result<Point> {
    prox_logged(x, comp, set, alpha, tol, &mut OracleLog::default())
}

fn variant_a_logged(
    x: &Point,
    comp: &ComponentPair,
    set: &dyn ConstraintSet,
    alpha: f64,
    tol: f64,
    log: &mut OracleLog,
) -> Result<(Point, Point)> {
    let z = if comp.prox_part.is_zero() {
        x.clone()
    } else {
        let z = comp.prox_part.prox(x, alpha, set, tol)?;
        log.record(recovered(x, &z, alpha));
        z
    };
    // z is already in X; projecting it again could move it by an ulp
    let next = if comp.subgrad_part.is_zero() {
        z.clone()
    } else {
        subgrad_then_project(&z, comp, set, alpha, log)
    };
    Ok((z, next))
}

fn variant_b_logged(
    x: &Point,
    comp: &ComponentPair,
    set: &dyn ConstraintSet,
    alpha: f64,
    tol: f64,
    log: &mut OracleLog,
) -> Result<(Point, Point)> {
    let z = if comp.prox_part.is_zero() {
        x.clone()
    } else {
        let z = comp.prox_part.prox(x, alpha, &WholeSpace, tol)?;
        log.record(recovered(x, &z, alpha));
        z
    };
    let next = subgrad_then_project(&z, comp, set, alpha, log);
    Ok((z, next))
}

fn subgrad_then_project(z: &Point, comp: &ComponentPair, set: &dyn ConstraintSet, alpha: f64, log: &mut OracleLog) -> Point {
    if comp.subgrad_part.is_zero() {
        return set.project(z);
    }
    let g = comp.subgrad_part.subgradient(z);
    log.record(g.norm());
    set.project(&z.step(alpha, &g))
}

fn variant_c_logged(
    x: &Point,
    comp: &ComponentPair,
    set: &dyn ConstraintSet,
    alpha: f64,
    tol: f64,
    log: &mut OracleLog,
) -> Result<(Point, Point)> {
    let z = if comp.subgrad_part.is_zero() {
        x.clone()
    } else {
        let g = comp.subgrad_part.subgradient(x);
        log.record(g.norm());
        x.step(alpha, &g)
    };
    let next = if comp.prox_part.is_zero() {
        set.project(&z)
    } else {
        let next = comp.prox_part.prox(&z, alpha, set, tol)?;
        log.record(recovered(&z, &next, alpha));
        next
    };
    Ok((z, next))
}

fn component_gradient(x: &Point, comp: &ComponentPair, log: &mut OracleLog) -> Point {
    let f_zero = comp.prox_part.is_zero();
    let h_zero = comp.subgrad_part.is_zero();
    match (f_zero, h_zero) {
        (true, true) => Point::zeros(x.dim()),
        (true, false) => {
            let g = comp.subgrad_part.subgradient(x);
            log.record(g.norm());
            g
        }
        (false, true) => {
            let g = comp.prox_part.subgradient(x);
            log.record(g.norm());
            g
        }
        (false, false) => {
            let gf = comp.prox_part.subgradient(x);
            let gh = comp.subgrad_part.subgradient(x);
            log.record(gf.norm());
            log.record(gh.norm());
            gf.add(&gh)
        }
    }
}

fn subgradient_logged(x: &Point, comp: &ComponentPair, set: &dyn ConstraintSet, alpha: f64, log: &mut OracleLog) -> Point {
    let g = component_gradient(x, comp, log);
    set.project(&x.step(alpha, &g))
}

fn prox_logged(
    x: &Point,
    comp: &ComponentPair,
    set: &dyn ConstraintSet,
    alpha: f64,
    tol: f64,
    log: &mut OracleLog,
) -> Result<Point> {
    let next = match (comp.prox_part.is_zero(), comp.subgrad_part.is_zero()) {
        (_, true) => comp.prox_part.prox(x, alpha, set, tol)?,
        (true, false) => NumericProx::new(comp.subgrad_part.clone()).prox(x, alpha, set, tol)?,
        (false, false) => {
            let sum = Sum::new(vec![comp.prox_part.clone(), comp.subgrad_part.clone()]);
            sum.prox(x, alpha, set, tol)?
        }
    };
    log.record(recovered(x, &next, alpha));
    Ok(next)
}

/// `x_{k+1} = x_k - alpha g(x_k) + beta (x_k - x_{k-1})` with `x_{-1} = x_0`.
pub fn step_momentum(x: &Point, prev: &Point, comp: &ComponentPair, alpha: f64, beta: f64) -> Point {
    momentum_logged(x, prev, comp, alpha, beta, &mut OracleLog::default())
}

fn momentum_logged(x: &Point, prev: &Point, comp: &ComponentPair, alpha: f64, beta: f64, log: &mut OracleLog) -> Point {
    let g = component_gradient(x, comp, log);
    let mut out = x.step(alpha, &g);
    if beta != 0.0 {
        out = out.zip_map(&x.sub(prev), |a, d| a + beta * d);
    }
    out
}

/// Sliding window of the last `m` component gradients for the aggregated
/// gradient method.
#[derive(Debug, Clone)]
pub struct GradientWindow {
    m: usize,
    grads: VecDeque<Point>,
}

impl GradientWindow {
    pub fn new(m: usize) -> Self {
        GradientWindow {
            m,
            grads: VecDeque::with_capacity(m),
        }
    }

    pub fn len(&self) -> usize {
        self.grads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grads.is_empty()
    }

    pub fn sum(&self) -> Option<Point> {
        let mut it = self.grads.iter();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, g| acc.add(g)))
    }

    /// Pushes `g` and returns the step to take: the window sum with
    /// `alpha`, or while the window is still filling, the partial sum with
    /// the inflated stepsize `m alpha / (k + 1)`.
    fn push(&mut self, g: Point, alpha: f64) -> (Point, f64) {
        if self.grads.len() == self.m {
            self.grads.pop_front();
        }
        self.grads.push_back(g);
        let n = self.grads.len();
        let alpha = if n < self.m {
            self.m as f64 * alpha / n as f64
        } else {
            alpha
        };
        (self.sum().expect("window is nonempty"), alpha)
    }
}

/// Advances the aggregated gradient method by one step, returning the new
/// iterate and the stepsize used.
pub fn step_aggregated(
    x: &Point,
    comp: &ComponentPair,
    window: &mut GradientWindow,
    alpha: f64,
) -> (Point, f64) {
    aggregated_logged(x, comp, window, alpha, &mut OracleLog::default())
}

fn aggregated_logged(
    x: &Point,
    comp: &ComponentPair,
    window: &mut GradientWindow,
    alpha: f64,
    log: &mut OracleLog,
) -> (Point, f64) {
    let g = component_gradient(x, comp, log);
    let (sum, a) = window.push(g, alpha);
    (x.step(a, &sum), a)
}

/// Stepper for the built-in variants, holding the per-run state that the
/// momentum and aggregated methods need.
#[derive(Debug, Clone)]
pub struct VariantStepper {
    variant: Variant,
    beta: f64,
    prev: Option<Point>,
    window: GradientWindow,
}

impl VariantStepper {
    pub fn new(variant: Variant, beta: f64, m: usize) -> Self {
        VariantStepper {
            variant,
            beta,
            prev: None,
            window: GradientWindow::new(m),
        }
    }
}

impl Stepper for VariantStepper {
    fn method(&self) -> String {
        self.variant.name().to_string()
    }

    fn step(&mut self, problem: &Problem, i: usize, x: &Point, alpha: f64, log: &mut OracleLog) -> Result<Step> {
        let comp = problem.component(i);
        let set: &dyn ConstraintSet = problem.constraint().as_ref();
        let tol = problem.tolerances().oracle;
        let (z, next, used) = match self.variant {
            Variant::ProxThenSubgrad => {
                let (z, n) = variant_a_logged(x, comp, set, alpha, tol, log)?;
                (Some(z), n, alpha)
            }
            Variant::ProxFreeThenSubgrad => {
                let (z, n) = variant_b_logged(x, comp, set, alpha, tol, log)?;
                (Some(z), n, alpha)
            }
            Variant::SubgradThenProx => {
                let (z, n) = variant_c_logged(x, comp, set, alpha, tol, log)?;
                (Some(z), n, alpha)
            }
            Variant::SubgradOnly => (None, subgradient_logged(x, comp, set, alpha, log), alpha),
            Variant::ProxOnly => (None, prox_logged(x, comp, set, alpha, tol, log)?, alpha),
            Variant::GradMomentum => {
                let prev = self.prev.take().unwrap_or_else(|| x.clone());
                let n = momentum_logged(x, &prev, comp, alpha, self.beta, log);
                self.prev = Some(x.clone());
                (None, n, alpha)
            }
            Variant::AggregatedGrad => {
                let (n, a) = aggregated_logged(x, comp, &mut self.window, alpha, log);
                (None, n, a)
            }
        };
        Ok(Step { z, x: next, alpha: used })
    }
}

pub(crate) fn check_variant(variant: Variant, beta: f64, problem: &Problem, cyclic: bool) -> Result<()> {
    let whole = problem.constraint().is_whole_space();
    match variant {
        Variant::GradMomentum => {
            if !(0.0..1.0).contains(&beta) {
                return Err(Error::Config(format!("momentum beta must lie in [0, 1), got {beta}")));
            }
            if !whole {
                return Err(Error::Config("momentum requires an unconstrained problem".into()));
            }
        }
        Variant::AggregatedGrad => {
            if !whole {
                return Err(Error::Config("aggregated gradient requires an unconstrained problem".into()));
            }
            if !cyclic {
                return Err(Error::Config("aggregated gradient requires cyclic ordering".into()));
            }
        }
        _ => {}
    }
    Ok(())
}
