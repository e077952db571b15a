//! JSON descriptions of component functions for `custom` and `feasibility`
//! problems.

use std::sync::Arc;

use incrprox::{
    ComponentPair, DistanceFunction, HalfSquaredDistance, Linear, MaxPenalty, Point, ProxFunction, Rank1Quadratic,
    Result, ScaledL1, SetSpec, SubgradientFunction, Sum, WeightedNorm, Zero,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Zero,
    /// `gamma |x|_1`.
    L1 { gamma: f64 },
    /// `(c'x - d)^2 / 2`.
    Rank1Quadratic { c: Vec<f64>, d: f64 },
    /// `weight |x - anchor|`.
    WeightedNorm { anchor: Vec<f64>, weight: f64 },
    /// `gamma dist(x, set)`.
    Distance { set: SetSpec, gamma: f64 },
    /// `a'x + b`.
    Linear {
        a: Vec<f64>,
        #[serde(default)]
        b: f64,
    },
    /// `(weight / 2) |x - anchor|^2`.
    HalfSquaredDistance {
        anchor: Vec<f64>,
        #[serde(default = "one")]
        weight: f64,
    },
    /// `c max(0, g(x))`.
    MaxPenalty { g: Box<FunctionSpec>, c: f64 },
    Sum { parts: Vec<FunctionSpec> },
}

fn one() -> f64 {
    1.0
}

impl FunctionSpec {
    pub fn build(&self, projection_tol: f64) -> Result<Arc<dyn ProxFunction>> {
        Ok(match self {
            FunctionSpec::Zero => Arc::new(Zero),
            FunctionSpec::L1 { gamma } => Arc::new(ScaledL1::new(*gamma)?),
            FunctionSpec::Rank1Quadratic { c, d } => Arc::new(Rank1Quadratic::new(Point::new(c.clone())?, *d)?),
            FunctionSpec::WeightedNorm { anchor, weight } => {
                Arc::new(WeightedNorm::new(Point::new(anchor.clone())?, *weight)?)
            }
            FunctionSpec::Distance { set, gamma } => Arc::new(DistanceFunction::new(set.build(projection_tol)?, *gamma)?),
            FunctionSpec::Linear { a, b } => Arc::new(Linear::new(Point::new(a.clone())?, *b)?),
            FunctionSpec::HalfSquaredDistance { anchor, weight } => {
                Arc::new(HalfSquaredDistance::new(Point::new(anchor.clone())?, *weight)?)
            }
            FunctionSpec::MaxPenalty { g, c } => {
                let g: Arc<dyn SubgradientFunction> = g.build(projection_tol)?;
                Arc::new(MaxPenalty::new(g, *c)?)
            }
            FunctionSpec::Sum { parts } => Arc::new(Sum::new(
                parts
                    .iter()
                    .map(|p| p.build(projection_tol).map(|f| f as Arc<dyn SubgradientFunction>))
                    .collect::<Result<Vec<_>>>()?,
            )),
        })
    }
}

/// One component `f_i + h_i`; a missing part is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prox: Option<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgrad: Option<FunctionSpec>,
}

impl ComponentSpec {
    pub fn build(&self, index: usize, projection_tol: f64) -> Result<ComponentPair> {
        let label = self.label.clone().unwrap_or_else(|| format!("c{index}"));
        let f = match &self.prox {
            Some(s) => s.build(projection_tol)?,
            None => Arc::new(Zero),
        };
        let h: Arc<dyn SubgradientFunction> = match &self.subgrad {
            Some(s) => s.build(projection_tol)?,
            None => Arc::new(Zero),
        };
        Ok(ComponentPair::new(label, f, h))
    }
}
