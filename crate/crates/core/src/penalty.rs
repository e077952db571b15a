//! Exact penalties for intersection constraints, and the incremental
//! feasibility method built on interpolated projections.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::engine::{run_with, OracleLog, RunConfig, Step, Stepper, Trace};
use crate::error::{check_dim, check_positive, Error, Result};
use crate::model::function::{DistanceFunction, MaxPenalty, ProxFunction, SubgradientFunction, Sum, Zero};
use crate::model::point::Point;
use crate::model::problem::{ComponentPair, Problem};
use crate::model::set::{ConstraintSet, WholeSpace};
use crate::prox::interpolated_projection;

/// Weights `gamma_1 < gamma_2 < ...` with `gamma_k > L + gamma_1 + ... +
/// gamma_{k-1}`, which make the distance penalties exact one set at a time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltyLadder {
    pub lipschitz: f64,
    pub margin: f64,
    pub gammas: Vec<f64>,
}

/// `gamma_k = (1 + margin) 2^(k-1) L`, which clears each rung by exactly
/// `margin * L`.
pub fn build_ladder(lipschitz: f64, m: usize, margin: f64) -> Result<PenaltyLadder> {
    check_positive("Lipschitz constant", lipschitz)?;
    check_positive("margin", margin)?;
    if m == 0 {
        return Err(Error::Parameter("a ladder needs at least one set".into()));
    }
    let gammas = (0..m)
        .map(|k| (1.0 + margin) * 2f64.powi(k as i32) * lipschitz)
        .collect();
    Ok(PenaltyLadder {
        lipschitz,
        margin,
        gammas,
    })
}

/// Smallest amount by which `gammas` (in the given order) clear the ladder
/// inequalities; positive iff every rung holds strictly.
pub fn ladder_slack(lipschitz: f64, gammas: &[f64]) -> f64 {
    let mut below = lipschitz;
    let mut slack = f64::INFINITY;
    for &g in gammas {
        slack = slack.min(g - below);
        below += g;
    }
    slack
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PenaltyWeights {
    /// One common weight `(1 + margin) 2^(s-1) L` for `s` sets, the top rung
    /// of the ladder. Needs `L`.
    Default { margin: f64 },
    Common { gamma: f64 },
    PerSet { gammas: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LipschitzSource {
    Given,
    /// Largest total subgradient norm over random points of a box.
    Sampled { samples: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lipschitz {
    pub value: f64,
    pub source: LipschitzSource,
}

impl Lipschitz {
    pub fn given(value: f64) -> Self {
        Lipschitz {
            value,
            source: LipschitzSource::Given,
        }
    }
}

/// Estimates the Lipschitz constant of `sum_i F_i` from subgradient norms at
/// `samples` uniform points of the box `[lo, hi]`. This is a lower estimate
/// of the true constant over the box.
pub fn estimate_lipschitz(
    components: &[ComponentPair],
    lo: &[f64],
    hi: &[f64],
    samples: usize,
    seed: u64,
) -> Result<Lipschitz> {
    if lo.is_empty() || lo.len() != hi.len() || lo.iter().zip(hi).any(|(l, h)| !(l <= h) || !l.is_finite() || !h.is_finite()) {
        return Err(Error::Config("sampling box must be finite with lo <= hi".into()));
    }
    if samples == 0 || components.is_empty() {
        return Err(Error::Estimation("nothing to sample".into()));
    }
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut best = 0.0f64;
    for _ in 0..samples {
        let x = Point::from_vec(lo.iter().zip(hi).map(|(l, h)| l + (h - l) * rng.gen::<f64>()).collect());
        let mut g = Point::zeros(x.dim());
        for c in components {
            g = g.add(&c.prox_part.subgradient(&x)).add(&c.subgrad_part.subgradient(&x));
        }
        best = best.max(g.norm());
    }
    Ok(Lipschitz {
        value: best,
        source: LipschitzSource::Sampled { samples },
    })
}

#[derive(Debug, Clone)]
pub struct Penalized {
    /// The original components followed by one `gamma_j dist(.; X_j)` per set,
    /// with no constraint.
    pub problem: Problem,
    pub gammas: Vec<f64>,
    pub lipschitz: Option<Lipschitz>,
    /// True when `L` is known and the weights meet the ladder condition
    /// (for a common weight: at least the ladder's top rung with zero margin).
    pub certified_exact: bool,
}

fn resolve_gammas(weights: &PenaltyWeights, s: usize, lipschitz: Option<Lipschitz>) -> Result<(Vec<f64>, bool)> {
    let l = lipschitz.map(|l| l.value);
    if let Some(v) = l {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Config(format!("Lipschitz constant must be positive, got {v}")));
        }
    }
    let top = |l: f64| 2f64.powi(s as i32 - 1) * l;
    match weights {
        PenaltyWeights::Default { margin } => {
            let l = l.ok_or_else(|| Error::Config("default penalty weights need a Lipschitz constant".into()))?;
            check_positive("margin", *margin).map_err(|e| Error::Config(e.to_string()))?;
            Ok((vec![(1.0 + margin) * top(l); s], true))
        }
        PenaltyWeights::Common { gamma } => {
            check_positive("gamma", *gamma).map_err(|e| Error::Config(e.to_string()))?;
            Ok((vec![*gamma; s], l.is_some_and(|l| *gamma > top(l))))
        }
        PenaltyWeights::PerSet { gammas } => {
            if gammas.len() != s {
                return Err(Error::Config(format!("{} penalty weights for {s} sets", gammas.len())));
            }
            for g in gammas {
                check_positive("gamma", *g).map_err(|e| Error::Config(e.to_string()))?;
            }
            let mut sorted = gammas.clone();
            sorted.sort_by(f64::total_cmp);
            Ok((gammas.clone(), l.is_some_and(|l| ladder_slack(l, &sorted) > 0.0)))
        }
    }
}

/// Replaces the constraint `x in X_1 ∩ ... ∩ X_s` by distance penalties.
/// `base` must be unconstrained; its components are kept as they are.
pub fn penalize(
    base: &Problem,
    sets: &[Arc<dyn ConstraintSet>],
    weights: &PenaltyWeights,
    lipschitz: Option<Lipschitz>,
) -> Result<Penalized> {
    if !base.constraint().is_whole_space() {
        return Err(Error::Config("penalize expects the constraint to be given as sets".into()));
    }
    if sets.is_empty() {
        return Err(Error::Config("penalize needs at least one set".into()));
    }
    let (gammas, certified_exact) = resolve_gammas(weights, sets.len(), lipschitz)?;
    let mut components = base.components().to_vec();
    for (j, (set, g)) in sets.iter().zip(&gammas).enumerate() {
        components.push(ComponentPair::prox(
            format!("dist{j}"),
            Arc::new(DistanceFunction::new(set.clone(), *g)?),
        ));
    }
    let problem = Problem::unconstrained(base.dim(), components)?.with_tolerances(*base.tolerances());
    Ok(Penalized {
        problem,
        gammas,
        lipschitz,
        certified_exact,
    })
}

/// Appends `c max{0, g_j(x)}` for each constraint `g_j(x) <= 0`, as
/// subgradient parts.
pub fn max_penalty_reformulate(constraints: &[Arc<dyn SubgradientFunction>], c: f64) -> Result<Vec<ComponentPair>> {
    constraints
        .iter()
        .enumerate()
        .map(|(j, g)| Ok(ComponentPair::subgrad(format!("maxpen{j}"), Arc::new(MaxPenalty::new(g.clone(), c)?))))
        .collect()
}

/// One step of the composed method: subgradient step on `h`, prox on `f`
/// over the whole space, then interpolated projection onto `set`.
pub fn feasibility_step(
    x: &Point,
    comp: &ComponentPair,
    set: &dyn ConstraintSet,
    gamma: f64,
    alpha: f64,
    tol: f64,
) -> Result<Point> {
    feasibility_step_logged(x, comp, set, gamma, alpha, tol, &mut OracleLog::default())
}

fn feasibility_step_logged(
    x: &Point,
    comp: &ComponentPair,
    set: &dyn ConstraintSet,
    gamma: f64,
    alpha: f64,
    tol: f64,
    log: &mut OracleLog,
) -> Result<Point> {
    let y = if comp.subgrad_part.is_zero() {
        x.clone()
    } else {
        let g = comp.subgrad_part.subgradient(x);
        log.record(g.norm());
        x.step(alpha, &g)
    };
    let z = if comp.prox_part.is_zero() {
        y
    } else {
        let z = comp.prox_part.prox(&y, alpha, &WholeSpace, tol)?;
        log.record(y.distance(&z) / alpha);
        z
    };
    let next = interpolated_projection(&z, set, gamma, alpha)?;
    log.record(z.distance(&next) / alpha);
    Ok(next)
}

/// `minimize sum_i (f_i + h_i)(x)` subject to `x in X_1 ∩ ... ∩ X_m`, with
/// component `i` paired with set `i`. With no components this is the pure
/// feasibility problem.
#[derive(Debug, Clone)]
pub struct FeasibilityProblem {
    dim: usize,
    components: Vec<ComponentPair>,
    sets: Vec<Arc<dyn ConstraintSet>>,
}

impl FeasibilityProblem {
    pub fn new(dim: usize, components: Vec<ComponentPair>, sets: Vec<Arc<dyn ConstraintSet>>) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::Config("feasibility needs at least one set".into()));
        }
        for s in &sets {
            if let Some(d) = s.dim() {
                check_dim(dim, d).map_err(|e| Error::Config(format!("set: {e}")))?;
            }
        }
        let components = if components.is_empty() {
            (0..sets.len())
                .map(|j| ComponentPair::prox(format!("zero{j}"), Arc::new(Zero)))
                .collect()
        } else if components.len() == sets.len() {
            components
        } else {
            return Err(Error::Config(format!(
                "{} components for {} sets; component i is paired with set i",
                components.len(),
                sets.len()
            )));
        };
        Ok(FeasibilityProblem { dim, components, sets })
    }

    pub fn sets(&self) -> &[Arc<dyn ConstraintSet>] {
        &self.sets
    }

    pub fn components(&self) -> &[ComponentPair] {
        &self.components
    }

    /// The unconstrained problem without penalties.
    pub fn base(&self) -> Result<Problem> {
        Problem::unconstrained(self.dim, self.components.clone())
    }

    /// The penalized objective arranged with one component per set, so the
    /// composed method and the run loop agree on `m`.
    fn paired(&self, gammas: &[f64]) -> Result<Problem> {
        let comps = self
            .components
            .iter()
            .zip(&self.sets)
            .zip(gammas)
            .map(|((c, s), g)| {
                let dist: Arc<dyn SubgradientFunction> = Arc::new(DistanceFunction::new(s.clone(), *g)?);
                let f: Arc<dyn ProxFunction> = Arc::new(Sum::new(vec![c.prox_part.clone(), dist]));
                Ok(ComponentPair::new(c.label.clone(), f, c.subgrad_part.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        Problem::unconstrained(self.dim, comps)
    }

    /// Largest distance from `x` to any of the sets.
    pub fn max_distance(&self, x: &Point) -> f64 {
        self.sets.iter().map(|s| s.distance(x)).fold(0.0, f64::max)
    }
}

struct ComposedStepper<'a> {
    problem: &'a FeasibilityProblem,
    gammas: Vec<f64>,
    tol: f64,
}

impl Stepper for ComposedStepper<'_> {
    fn method(&self) -> String {
        "composed_feasibility".into()
    }

    fn step(&mut self, _problem: &Problem, i: usize, x: &Point, alpha: f64, log: &mut OracleLog) -> Result<Step> {
        let next = feasibility_step_logged(
            x,
            &self.problem.components[i],
            self.problem.sets[i].as_ref(),
            self.gammas[i],
            alpha,
            self.tol,
            log,
        )?;
        Ok(Step { z: None, x: next, alpha })
    }
}

#[derive(Debug, Clone)]
pub struct FeasibilityRun {
    pub trace: Trace,
    pub penalized: Penalized,
    /// Largest distance from the final iterate to any set.
    pub final_max_distance: f64,
}

/// Runs the composed method. The trace records the penalized objective.
pub fn solve_feasibility(
    problem: &FeasibilityProblem,
    weights: &PenaltyWeights,
    lipschitz: Option<Lipschitz>,
    config: &RunConfig,
    x0: Option<&Point>,
) -> Result<FeasibilityRun> {
    let base = problem.base()?;
    let penalized = penalize(&base, &problem.sets, weights, lipschitz)?;
    let paired = problem.paired(&penalized.gammas)?;
    let mut stepper = ComposedStepper {
        problem,
        gammas: penalized.gammas.clone(),
        tol: base.tolerances().oracle,
    };
    let trace = run_with(&paired, &mut stepper, config, x0)?;
    let final_max_distance = problem.max_distance(&trace.final_point);
    Ok(FeasibilityRun {
        trace,
        penalized,
        final_max_distance,
    })
}
