//! l1-regularized least squares, `gamma |x|_1 + (1/2) sum_i (c_i'x - d_i)^2`.

use std::sync::Arc;

use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, check_positive, Error, Result};
use crate::model::function::{ProxFunction, Rank1Quadratic, ScaledL1, Zero};
use crate::model::point::Point;
use crate::model::problem::{ComponentPair, Problem};
use crate::prox::shrink_unchecked;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LassoRow {
    pub c: Point,
    pub d: f64,
}

/// How the regularizer is distributed over the components.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitMode {
    /// Every component carries `(gamma / m) |x|_1`.
    #[default]
    PerComponentScaled,
    /// The first component carries `gamma |x|_1`, the rest none.
    SingleProxCopy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LassoInstance {
    pub rows: Vec<LassoRow>,
    pub gamma: f64,
    #[serde(default)]
    pub split_mode: SplitMode,
}

impl LassoInstance {
    pub fn new(rows: Vec<LassoRow>, gamma: f64, split_mode: SplitMode) -> Result<Self> {
        let inst = LassoInstance { rows, gamma, split_mode };
        inst.validate()?;
        Ok(inst)
    }

    /// Gaussian rows and a planted sparse solution, reproducible from `seed`.
    pub fn random(m: usize, n: usize, gamma: f64, seed: u64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Config("lasso needs m, n >= 1".into()));
        }
        let mut rng = SplitMix64::seed_from_u64(seed);
        let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
        let planted: Vec<f64> = (0..n).map(|j| if j % 3 == 0 { normal() } else { 0.0 }).collect();
        let rows = (0..m)
            .map(|_| {
                let c: Vec<f64> = (0..n).map(|_| normal()).collect();
                let d = c.iter().zip(&planted).map(|(a, b)| a * b).sum::<f64>() + 0.1 * normal();
                LassoRow {
                    c: Point::from_vec(c),
                    d,
                }
            })
            .collect();
        Self::new(rows, gamma, SplitMode::PerComponentScaled)
    }

    pub fn validate(&self) -> Result<()> {
        let first = self
            .rows
            .first()
            .ok_or_else(|| Error::Config("lasso needs at least one row".into()))?;
        for r in &self.rows {
            check_dim(first.c.dim(), r.c.dim()).map_err(|e| Error::Config(format!("lasso row: {e}")))?;
            if !r.d.is_finite() {
                return Err(Error::Config(format!("lasso d must be finite, got {}", r.d)));
            }
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::Config(format!("lasso gamma must be nonnegative, got {}", self.gamma)));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.rows[0].c.dim()
    }

    /// Regularizer weight carried by component `i`.
    pub fn gamma_share(&self, i: usize) -> f64 {
        match self.split_mode {
            SplitMode::PerComponentScaled => self.gamma / self.rows.len() as f64,
            SplitMode::SingleProxCopy if i == 0 => self.gamma,
            SplitMode::SingleProxCopy => 0.0,
        }
    }

    /// The objective written directly, for cross-checks.
    pub fn objective(&self, x: &Point) -> f64 {
        let fit: f64 = self
            .rows
            .iter()
            .map(|r| {
                let e = r.c.dot(x) - r.d;
                0.5 * e * e
            })
            .sum();
        self.gamma * x.l1_norm() + fit
    }
}

/// One component per row: `f_i` is the row's share of the regularizer and
/// `h_i = (c_i'x - d_i)^2 / 2`; no constraint.
pub fn lasso_problem(inst: &LassoInstance) -> Result<Problem> {
    inst.validate()?;
    let components = inst
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let share = inst.gamma_share(i);
            let f: Arc<dyn ProxFunction> = if share > 0.0 {
                Arc::new(ScaledL1::new(share)?)
            } else {
                Arc::new(Zero)
            };
            let h = Arc::new(Rank1Quadratic::new(r.c.clone(), r.d)?);
            Ok(ComponentPair::new(format!("row{i}"), f, h))
        })
        .collect::<Result<Vec<_>>>()?;
    Problem::unconstrained(inst.dim(), components)
}

/// Shrink, then a gradient step on the row's data term:
/// `z = shrink(x, gamma_share alpha)`, `x+ = z - alpha c (c'z - d)`.
pub fn lasso_step(x: &Point, row: &LassoRow, gamma_share: f64, alpha: f64) -> Result<Point> {
    check_positive("alpha", alpha)?;
    check_dim(row.c.dim(), x.dim())?;
    if !(gamma_share >= 0.0) {
        return Err(Error::Parameter(format!("gamma share must be nonnegative, got {gamma_share}")));
    }
    let z = if gamma_share > 0.0 {
        shrink_unchecked(x, gamma_share * alpha)
    } else {
        x.clone()
    };
    let r = row.c.dot(&z) - row.d;
    Ok(z.step(alpha, &row.c.scale(r)))
}
