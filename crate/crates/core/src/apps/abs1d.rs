//! `F(x) = sum_i |x - b_i|` on the line: every subgradient has norm at most
//! one, and the minimizers form the median interval of `b`.

use std::sync::Arc;

use super::PartRole;
use crate::error::{Error, Result};
use crate::model::function::WeightedNorm;
use crate::model::point::Point;
use crate::model::problem::{ComponentPair, Problem};
use crate::model::set::{BoxSet, ConstraintSet, WholeSpace};

#[derive(Debug, Clone)]
pub struct Abs1d {
    pub problem: Problem,
    pub f_star: f64,
    /// The optimal interval `[lo, hi]`.
    pub x_star: (f64, f64),
    /// Bound on every subgradient norm.
    pub c: f64,
}

/// The unconstrained benchmark with each `|x - b_i|` as a subgradient part.
pub fn onedim_abs_benchmark(b: &[f64]) -> Result<Abs1d> {
    build_abs1d(b, PartRole::Subgradient, None)
}

/// General form: choose the role of the terms and an optional interval
/// constraint.
pub fn build_abs1d(b: &[f64], role: PartRole, interval: Option<(f64, f64)>) -> Result<Abs1d> {
    if b.is_empty() {
        return Err(Error::Config("abs1d needs at least one b_i".into()));
    }
    if let Some(bad) = b.iter().find(|v| !v.is_finite()) {
        return Err(Error::Config(format!("abs1d b_i must be finite, got {bad}")));
    }
    let components = b
        .iter()
        .enumerate()
        .map(|(i, &bi)| {
            let term = Arc::new(WeightedNorm::new(Point::from_vec(vec![bi]), 1.0)?);
            let label = format!("abs{i}");
            Ok(match role {
                PartRole::Prox => ComponentPair::prox(label, term),
                PartRole::Subgradient => ComponentPair::subgrad(label, term),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut sorted = b.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len();
    let (mut lo, mut hi) = if m % 2 == 1 {
        (sorted[m / 2], sorted[m / 2])
    } else {
        (sorted[m / 2 - 1], sorted[m / 2])
    };

    let constraint: Arc<dyn ConstraintSet> = match interval {
        Some((l, h)) => {
            // F is convex on the line, so the constrained minimizers are the
            // median interval clamped into [l, h]
            lo = lo.clamp(l, h);
            hi = hi.clamp(l, h);
            Arc::new(BoxSet::interval(l, h)?)
        }
        None => Arc::new(WholeSpace),
    };
    let f_star = b.iter().map(|bi| (lo - bi).abs()).sum();
    let problem = Problem::new(1, components, constraint)?
        .with_optimal_value(f_star)
        .with_optimal_set(Arc::new(BoxSet::interval(lo, hi)?))?;
    Ok(Abs1d {
        problem,
        f_star,
        x_star: (lo, hi),
        c: 1.0,
    })
}
