//! Weber location problem: `minimize sum_i w_i |x - y_i|`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use super::PartRole;
use crate::error::{check_dim, Error, Result};
use crate::model::function::WeightedNorm;
use crate::model::point::Point;
use crate::model::problem::{ComponentPair, Problem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub y: Point,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeberInstance {
    pub anchors: Vec<Anchor>,
    #[serde(default)]
    pub role: PartRole,
}

impl WeberInstance {
    pub fn new(anchors: Vec<Anchor>, role: PartRole) -> Result<Self> {
        let inst = WeberInstance { anchors, role };
        inst.validate()?;
        Ok(inst)
    }

    /// `m` anchors uniform in `[0, 10]^n` with weights in `[0.5, 2]`,
    /// reproducible from `seed`.
    pub fn random(m: usize, n: usize, seed: u64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Config("weber needs m, n >= 1".into()));
        }
        let mut rng = SplitMix64::seed_from_u64(seed);
        let anchors = (0..m)
            .map(|_| Anchor {
                y: Point::from_vec((0..n).map(|_| rng.gen_range(0.0..10.0)).collect()),
                w: rng.gen_range(0.5..2.0),
            })
            .collect();
        Self::new(anchors, PartRole::Prox)
    }

    pub fn validate(&self) -> Result<()> {
        let first = self
            .anchors
            .first()
            .ok_or_else(|| Error::Config("weber needs at least one anchor".into()))?;
        for a in &self.anchors {
            check_dim(first.y.dim(), a.y.dim()).map_err(|e| Error::Config(format!("weber anchor: {e}")))?;
            if !(a.w > 0.0 && a.w.is_finite()) {
                return Err(Error::Config(format!("weber weights must be positive, got {}", a.w)));
            }
        }
        Ok(())
    }

    /// Each component's subgradients have norm at most its weight.
    pub fn c(&self) -> f64 {
        self.anchors.iter().map(|a| a.w).fold(0.0, f64::max)
    }
}

pub fn weber_problem(inst: &WeberInstance) -> Result<Problem> {
    inst.validate()?;
    let components = inst
        .anchors
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let term = Arc::new(WeightedNorm::new(a.y.clone(), a.w)?);
            let label = format!("anchor{i}");
            Ok(match inst.role {
                PartRole::Prox => ComponentPair::prox(label, term),
                PartRole::Subgradient => ComponentPair::subgrad(label, term),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Problem::unconstrained(inst.anchors[0].y.dim(), components)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pt;

    #[test]
    fn weights_validated() {
        let bad = WeberInstance::new(vec![Anchor { y: pt![0.0], w: 0.0 }], PartRole::Prox);
        assert!(bad.is_err());
        assert!(WeberInstance::new(vec![], PartRole::Prox).is_err());
    }

    #[test]
    fn subgradient_norms_bounded_by_weight() {
        let inst = WeberInstance::new(
            vec![Anchor { y: pt![0.0, 0.0], w: 2.0 }, Anchor { y: pt![1.0, 3.0], w: 0.5 }],
            PartRole::Subgradient,
        )
        .unwrap();
        let p = weber_problem(&inst).unwrap();
        for x in [pt![0.0, 0.0], pt![5.0, -1.0], pt![1.0, 3.0]] {
            for (c, a) in p.components().iter().zip(&inst.anchors) {
                assert!(c.subgrad_part.subgradient(&x).norm() <= a.w * (1.0 + 1e-15));
            }
        }
        assert_eq!(p.components()[0].subgrad_part.subgradient(&pt![0.0, 0.0]), pt![0.0, 0.0]);
        assert_eq!(inst.c(), 2.0);
    }

    #[test]
    fn random_is_reproducible() {
        let a = WeberInstance::random(5, 2, 9).unwrap();
        assert_eq!(a, WeberInstance::random(5, 2, 9).unwrap());
        assert_eq!(a.anchors.len(), 5);
        assert!(a.anchors.iter().all(|x| (0.5..2.0).contains(&x.w)));
    }
}
