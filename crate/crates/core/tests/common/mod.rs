#![allow(dead_code)]

use std::sync::Arc;

use incrprox::{
    Ball, BoxSet, ConstraintSet, DistanceFunction, Halfspace, HalfSquaredDistance, Linear, Point, ProxFunction,
    Rank1Quadratic, ScaledL1, Sum, WeightedNorm, Zero,
};
use incrprox_oracle::SetSpec as RefSet;
use rand::Rng;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;

pub fn rng(seed: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed)
}

pub fn point(rng: &mut impl Rng, n: usize, scale: f64) -> Point {
    Point::new((0..n).map(|_| rng.gen_range(-scale..scale)).collect()).unwrap()
}

/// A random set together with the oracle's description of the same set.
pub fn random_set(rng: &mut impl Rng, n: usize) -> (Arc<dyn ConstraintSet>, RefSet) {
    match rng.gen_range(0..3) {
        0 => {
            let mut a = point(rng, n, 1.0);
            if a.norm() < 0.1 {
                a = Point::new(vec![1.0; n]).unwrap();
            }
            let b = rng.gen_range(-1.0..1.0);
            (
                Arc::new(Halfspace::new(a.clone(), b).unwrap()),
                RefSet::Halfspace { a: a.into_vec(), b },
            )
        }
        1 => {
            let c = point(rng, n, 1.0);
            let r = rng.gen_range(0.2..2.0);
            (
                Arc::new(Ball::new(c.clone(), r).unwrap()),
                RefSet::Ball {
                    center: c.into_vec(),
                    radius: r,
                },
            )
        }
        _ => {
            let lo: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..0.0)).collect();
            let hi: Vec<f64> = lo.iter().map(|l| l + rng.gen_range(0.1..2.0)).collect();
            (
                Arc::new(BoxSet::new(lo.clone(), hi.clone()).unwrap()),
                RefSet::Box { lo, hi },
            )
        }
    }
}

/// Every prox-capable function family, with random data.
pub fn random_operator(rng: &mut impl Rng, n: usize, which: usize) -> Arc<dyn ProxFunction> {
    match which % 7 {
        0 => Arc::new(Zero),
        1 => Arc::new(ScaledL1::new(rng.gen_range(0.05..3.0)).unwrap()),
        2 => Arc::new(Rank1Quadratic::new(point(rng, n, 2.0), rng.gen_range(-2.0..2.0)).unwrap()),
        3 => Arc::new(WeightedNorm::new(point(rng, n, 2.0), rng.gen_range(0.1..3.0)).unwrap()),
        4 => {
            let (set, _) = random_set(rng, n);
            Arc::new(DistanceFunction::new(set, rng.gen_range(0.1..3.0)).unwrap())
        }
        5 => Arc::new(Linear::new(point(rng, n, 2.0), rng.gen_range(-1.0..1.0)).unwrap()),
        _ => Arc::new(HalfSquaredDistance::new(point(rng, n, 2.0), rng.gen_range(0.1..3.0)).unwrap()),
    }
}

pub const OPERATOR_FAMILIES: usize = 7;

/// Small constrained problems with a known Lipschitz constant, for the exact
/// penalty checks.
pub struct PenaltyCase {
    pub name: &'static str,
    pub f: Arc<dyn incrprox::SubgradientFunction>,
    pub sets: Vec<Arc<dyn ConstraintSet>>,
    pub reference: Vec<RefSet>,
    pub lipschitz: f64,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

pub fn penalty_cases() -> Vec<PenaltyCase> {
    let half = |a: Vec<f64>, b: f64| -> (Arc<dyn ConstraintSet>, RefSet) {
        (
            Arc::new(Halfspace::new(Point::new(a.clone()).unwrap(), b).unwrap()),
            RefSet::Halfspace { a, b },
        )
    };
    let (h0, r0) = half(vec![-1.0], 0.0);
    let (h1, r1) = half(vec![-1.0, -1.0], -1.0);
    let (h2, r2) = half(vec![0.0, -1.0], 0.0);
    // each minimizer is sharp: the objective grows linearly away from it
    // inside the feasible set, so grid minimizers are within a few cells
    vec![
        // x over x >= 0: minimizer 0
        PenaltyCase {
            name: "halfline",
            f: Arc::new(Linear::new(Point::new(vec![1.0]).unwrap(), 0.0).unwrap()),
            sets: vec![h0],
            reference: vec![r0],
            lipschitz: 1.0,
            lo: vec![-1.0],
            hi: vec![1.0],
        },
        // x + 2y over x + y >= 1, y >= 0: minimizer (1, 0)
        PenaltyCase {
            name: "wedge",
            f: Arc::new(Linear::new(Point::new(vec![1.0, 2.0]).unwrap(), 0.0).unwrap()),
            sets: vec![h1, h2],
            reference: vec![r1, r2],
            lipschitz: 5f64.sqrt(),
            lo: vec![-1.0, -1.0],
            hi: vec![2.0, 2.0],
        },
        // |x|_1 - 3 x_1 over the unit disk: minimizer (1, 0)
        PenaltyCase {
            name: "disk",
            f: Arc::new(Sum::new(vec![
                Arc::new(ScaledL1::new(1.0).unwrap()),
                Arc::new(Linear::new(Point::new(vec![-3.0, 0.0]).unwrap(), 0.0).unwrap()),
            ])),
            sets: vec![Arc::new(Ball::new(Point::new(vec![0.0, 0.0]).unwrap(), 1.0).unwrap())],
            reference: vec![RefSet::Ball {
                center: vec![0.0, 0.0],
                radius: 1.0,
            }],
            lipschitz: 2f64.sqrt() + 3.0,
            lo: vec![-2.0, -2.0],
            hi: vec![2.0, 2.0],
        },
    ]
}
