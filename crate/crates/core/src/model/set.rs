//! Closed convex constraint sets with projection, distance and membership
//! oracles.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::point::Point;
use crate::error::{check_positive, Error, Result};

/// A nonempty closed convex set `X` in `R^n`.
///
/// Implementations return an exact clone from [`project`](Self::project) when
/// the input already lies in the set, so projecting feasible points never
/// perturbs them.
pub trait ConstraintSet: Send + Sync + fmt::Debug {
    fn project(&self, x: &Point) -> Point;

    fn distance(&self, x: &Point) -> f64 {
        x.distance(&self.project(x))
    }

    fn contains(&self, x: &Point, tol: f64) -> bool {
        self.distance(x) <= tol
    }

    fn description(&self) -> String;

    /// Ambient dimension, or `None` for sets that accept any dimension.
    fn dim(&self) -> Option<usize>;

    fn is_whole_space(&self) -> bool {
        false
    }

    /// True when the projection acts coordinate by coordinate.
    fn is_box(&self) -> bool {
        false
    }
}

/// `R^n` itself.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WholeSpace;

impl ConstraintSet for WholeSpace {
    fn project(&self, x: &Point) -> Point {
        x.clone()
    }

    fn distance(&self, _x: &Point) -> f64 {
        0.0
    }

    fn contains(&self, _x: &Point, _tol: f64) -> bool {
        true
    }

    fn description(&self) -> String {
        "whole space".into()
    }

    fn dim(&self) -> Option<usize> {
        None
    }

    fn is_whole_space(&self) -> bool {
        true
    }

    fn is_box(&self) -> bool {
        true
    }
}

/// `{x : lo <= x <= hi}`; bounds may be infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSet {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl BoxSet {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::Parameter("box bounds must be nonempty and equal length".into()));
        }
        for (l, h) in lo.iter().zip(&hi) {
            if l.is_nan() || h.is_nan() || l > h || *l == f64::INFINITY || *h == f64::NEG_INFINITY {
                return Err(Error::Parameter(format!("empty box side [{l}, {h}]")));
            }
        }
        Ok(BoxSet { lo, hi })
    }

    /// The interval `[lo, hi]` in one dimension.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo], vec![hi])
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    fn holds(&self, x: &Point) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (l, h))| l <= v && v <= h)
    }
}

impl ConstraintSet for BoxSet {
    fn project(&self, x: &Point) -> Point {
        if self.holds(x) {
            return x.clone();
        }
        Point::from_vec(
            x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .map(|(v, (l, h))| v.max(*l).min(*h))
                .collect(),
        )
    }

    fn description(&self) -> String {
        format!("box lo={:?} hi={:?}", self.lo, self.hi)
    }

    fn dim(&self) -> Option<usize> {
        Some(self.lo.len())
    }

    fn is_box(&self) -> bool {
        true
    }
}

/// Closed Euclidean ball.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    center: Point,
    radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::Parameter(format!("ball radius {radius}")));
        }
        Ok(Ball { center, radius })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

impl ConstraintSet for Ball {
    fn project(&self, x: &Point) -> Point {
        let r = x.distance(&self.center);
        if r <= self.radius {
            return x.clone();
        }
        let s = self.radius / r;
        self.center.zip_map(x, |c, v| c + s * (v - c))
    }

    fn distance(&self, x: &Point) -> f64 {
        // exact formula rather than the generic one, but identical up to rounding
        let d = x.distance(&self.project(x));
        d.max(0.0)
    }

    fn description(&self) -> String {
        format!("ball center={:?} radius={}", self.center, self.radius)
    }

    fn dim(&self) -> Option<usize> {
        Some(self.center.dim())
    }

    fn is_box(&self) -> bool {
        self.center.dim() == 1
    }
}

/// `{x : a'x <= b}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    normal: Point,
    offset: f64,
    normal_sq: f64,
}

impl Halfspace {
    pub fn new(normal: Point, offset: f64) -> Result<Self> {
        let normal_sq = normal.norm_sq();
        check_positive("halfspace normal norm", normal_sq)?;
        if !offset.is_finite() {
            return Err(Error::Parameter(format!("halfspace offset {offset}")));
        }
        Ok(Halfspace { normal, offset, normal_sq })
    }

    pub fn normal(&self) -> &Point {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }
}

impl ConstraintSet for Halfspace {
    fn project(&self, x: &Point) -> Point {
        let excess = self.normal.dot(x) - self.offset;
        if excess <= 0.0 {
            return x.clone();
        }
        x.step(excess / self.normal_sq, &self.normal)
    }

    fn description(&self) -> String {
        format!("halfspace a={:?} b={}", self.normal, self.offset)
    }

    fn dim(&self) -> Option<usize> {
        Some(self.normal.dim())
    }

    fn is_box(&self) -> bool {
        self.normal.dim() == 1
    }
}

/// `{x : a'x = b}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    normal: Point,
    offset: f64,
    normal_sq: f64,
}

impl Hyperplane {
    pub fn new(normal: Point, offset: f64) -> Result<Self> {
        let normal_sq = normal.norm_sq();
        check_positive("hyperplane normal norm", normal_sq)?;
        if !offset.is_finite() {
            return Err(Error::Parameter(format!("hyperplane offset {offset}")));
        }
        Ok(Hyperplane { normal, offset, normal_sq })
    }
}

impl ConstraintSet for Hyperplane {
    fn project(&self, x: &Point) -> Point {
        let excess = self.normal.dot(x) - self.offset;
        if excess == 0.0 {
            return x.clone();
        }
        x.step(excess / self.normal_sq, &self.normal)
    }

    fn description(&self) -> String {
        format!("hyperplane a={:?} b={}", self.normal, self.offset)
    }

    fn dim(&self) -> Option<usize> {
        Some(self.normal.dim())
    }

    fn is_box(&self) -> bool {
        self.normal.dim() == 1
    }
}

/// Intersection of finitely many sets, projected by cyclic projections.
///
/// For affine pieces the sweep converges to the true projection; otherwise
/// the result is only some point of the intersection near `x`, so this set is
/// meant for diagnostics rather than for driving the solvers.
#[derive(Debug, Clone)]
pub struct Intersection {
    parts: Vec<Arc<dyn ConstraintSet>>,
    max_sweeps: usize,
    tol: f64,
}

impl Intersection {
    pub const DEFAULT_MAX_SWEEPS: usize = 10_000;

    pub fn new(parts: Vec<Arc<dyn ConstraintSet>>, tol: f64) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Parameter("intersection of zero sets".into()));
        }
        check_positive("intersection tolerance", tol)?;
        let dims: Vec<usize> = parts.iter().filter_map(|p| p.dim()).collect();
        if let Some(&d) = dims.first() {
            if let Some(&bad) = dims.iter().find(|&&e| e != d) {
                return Err(Error::Dimension { expected: d, got: bad });
            }
        }
        Ok(Intersection {
            parts,
            max_sweeps: Self::DEFAULT_MAX_SWEEPS,
            tol,
        })
    }

    pub fn parts(&self) -> &[Arc<dyn ConstraintSet>] {
        &self.parts
    }
}

impl ConstraintSet for Intersection {
    fn project(&self, x: &Point) -> Point {
        if self.parts.iter().all(|p| p.contains(x, 0.0)) {
            return x.clone();
        }
        let mut cur = x.clone();
        for _ in 0..self.max_sweeps {
            let start = cur.clone();
            for p in &self.parts {
                cur = p.project(&cur);
            }
            if cur.distance(&start) <= self.tol {
                break;
            }
        }
        cur
    }

    fn contains(&self, x: &Point, tol: f64) -> bool {
        self.parts.iter().all(|p| p.contains(x, tol))
    }

    fn description(&self) -> String {
        let inner: Vec<String> = self.parts.iter().map(|p| p.description()).collect();
        format!("intersection[{}]", inner.join("; "))
    }

    fn dim(&self) -> Option<usize> {
        self.parts.iter().find_map(|p| p.dim())
    }
}

/// Serializable description of a set, as used in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    Whole,
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Halfspace {
        a: Vec<f64>,
        b: f64,
    },
    Hyperplane {
        a: Vec<f64>,
        b: f64,
    },
    Intersection {
        sets: Vec<SetSpec>,
    },
}

impl SetSpec {
    pub fn build(&self, projection_tol: f64) -> Result<Arc<dyn ConstraintSet>> {
        Ok(match self {
            SetSpec::Whole => Arc::new(WholeSpace),
            SetSpec::Box { lo, hi } => Arc::new(BoxSet::new(lo.clone(), hi.clone())?),
            SetSpec::Ball { center, radius } => {
                Arc::new(Ball::new(Point::new(center.clone())?, *radius)?)
            }
            SetSpec::Halfspace { a, b } => Arc::new(Halfspace::new(Point::new(a.clone())?, *b)?),
            SetSpec::Hyperplane { a, b } => {
                Arc::new(Hyperplane::new(Point::new(a.clone())?, *b)?)
            }
            SetSpec::Intersection { sets } => {
                let parts = sets
                    .iter()
                    .map(|s| s.build(projection_tol))
                    .collect::<Result<Vec<_>>>()?;
                Arc::new(Intersection::new(parts, projection_tol)?)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pt;
    use incrprox_oracle::{projection_reference, SetSpec as RefSet};

    #[test]
    fn halfspace_drop_matches_reference() {
        let h = Halfspace::new(pt![1.0, 0.0], 0.0).unwrap();
        assert_eq!(h.project(&pt![2.0, 1.0]), pt![0.0, 1.0]);
        let r = projection_reference(&RefSet::Halfspace { a: vec![1.0, 0.0], b: 0.0 }, &[2.0, 1.0]);
        assert_eq!(h.project(&pt![2.0, 1.0]).as_slice(), r.as_slice());
    }

    #[test]
    fn ball_and_box_examples() {
        let b = Ball::new(pt![0.0, 0.0], 1.0).unwrap();
        assert_eq!(b.project(&pt![0.0, 2.0]), pt![0.0, 1.0]);
        let bx = BoxSet::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(bx.project(&pt![-1.0, 2.0]), pt![0.0, 1.0]);
        assert_eq!(bx.distance(&pt![-1.0, 2.0]), 2f64.sqrt());
        assert!(bx.contains(&pt![0.5, 0.5], 0.0));
    }

    #[test]
    fn feasible_points_are_returned_unchanged() {
        let x = pt![-0.0, 0.25];
        let sets: Vec<Arc<dyn ConstraintSet>> = vec![
            Arc::new(BoxSet::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap()),
            Arc::new(Ball::new(pt![0.0, 0.0], 1.0).unwrap()),
            Arc::new(Halfspace::new(pt![1.0, 1.0], 1.0).unwrap()),
        ];
        for s in &sets {
            let p = s.project(&x);
            assert!(p.iter().zip(x.iter()).all(|(a, b)| a.to_bits() == b.to_bits()));
        }
    }

    #[test]
    fn rejects_degenerate_sets() {
        assert!(BoxSet::new(vec![1.0], vec![0.0]).is_err());
        assert!(Halfspace::new(pt![0.0, 0.0], 1.0).is_err());
        assert!(Ball::new(pt![0.0], -1.0).is_err());
        assert!(Intersection::new(vec![], 1e-10).is_err());
    }

    #[test]
    fn infinite_box_sides() {
        let half_line = BoxSet::interval(0.0, f64::INFINITY).unwrap();
        assert_eq!(half_line.project(&pt![-3.0]), pt![0.0]);
        assert_eq!(half_line.project(&pt![1e300]), pt![1e300]);
    }

    #[test]
    fn intersection_of_hyperplanes_is_exact_projection() {
        // lines x = 1 and y = 2 meet at (1, 2)
        let i = Intersection::new(
            vec![
                Arc::new(Hyperplane::new(pt![1.0, 0.0], 1.0).unwrap()),
                Arc::new(Hyperplane::new(pt![0.0, 1.0], 2.0).unwrap()),
            ],
            1e-10,
        )
        .unwrap();
        let p = i.project(&pt![5.0, -3.0]);
        assert!(p.distance(&pt![1.0, 2.0]) < 1e-12);
        assert!(i.contains(&p, 1e-10));
    }

    #[test]
    fn set_spec_parses_and_builds() {
        let spec: SetSpec =
            serde_json::from_str(r#"{"type":"halfspace","a":[1,0],"b":0}"#).unwrap();
        let s = spec.build(1e-10).unwrap();
        assert_eq!(s.project(&pt![2.0, 1.0]), pt![0.0, 1.0]);
        assert!(serde_json::from_str::<SetSpec>(r#"{"type":"cone"}"#).is_err());
    }
}
