//! Convex component functions and their oracle contracts.

use std::fmt;
use std::sync::Arc;

use super::point::Point;
use super::set::ConstraintSet;
use crate::error::{check_positive, Error, Result};
use crate::prox;

/// A convex function with value and subgradient oracles.
pub trait SubgradientFunction: Send + Sync + fmt::Debug {
    fn value(&self, x: &Point) -> f64;

    /// One element of the subdifferential at `x`.
    fn subgradient(&self, x: &Point) -> Point;

    /// Fixed input dimension, or `None` when any dimension is accepted.
    fn dim(&self) -> Option<usize> {
        None
    }

    /// True for the constant-zero function; the engine skips such parts.
    fn is_zero(&self) -> bool {
        false
    }
}

/// A convex function whose proximal map can be computed.
pub trait ProxFunction: SubgradientFunction {
    /// `argmin_{z in set} f(z) + |z - center|^2 / (2 alpha)`.
    ///
    /// `tol` is the accuracy asked of numeric solves; closed forms ignore it.
    fn prox(&self, center: &Point, alpha: f64, set: &dyn ConstraintSet, tol: f64) -> Result<Point>;
}

/// Applies a closed-form whole-space prox and handles constrained sets.
///
/// Over a box, a coordinate-separable problem splits into scalar problems
/// whose constrained minimizers are the clamped unconstrained ones; the same
/// holds for any interval in one dimension. Everything else goes to the
/// numeric solver.
fn constrained_closed_form(
    f: &dyn SubgradientFunction,
    separable: bool,
    center: &Point,
    alpha: f64,
    set: &dyn ConstraintSet,
    tol: f64,
    closed: impl FnOnce(&Point) -> Point,
) -> Result<Point> {
    if set.is_whole_space() {
        Ok(closed(center))
    } else if set.is_box() && (separable || center.dim() == 1) {
        Ok(set.project(&closed(center)))
    } else {
        prox::prox_numeric_fallback(f, center, alpha, set, tol)
    }
}

/// The constant zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct Zero;

impl SubgradientFunction for Zero {
    fn value(&self, _x: &Point) -> f64 {
        0.0
    }

    fn subgradient(&self, x: &Point) -> Point {
        Point::zeros(x.dim())
    }

    fn is_zero(&self) -> bool {
        true
    }
}

impl ProxFunction for Zero {
    fn prox(&self, center: &Point, _alpha: f64, set: &dyn ConstraintSet, _tol: f64) -> Result<Point> {
        Ok(set.project(center))
    }
}

/// `gamma * |x|_1`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledL1 {
    gamma: f64,
}

impl ScaledL1 {
    pub fn new(gamma: f64) -> Result<Self> {
        check_positive("gamma", gamma)?;
        Ok(ScaledL1 { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

impl SubgradientFunction for ScaledL1 {
    fn value(&self, x: &Point) -> f64 {
        self.gamma * x.l1_norm()
    }

    fn subgradient(&self, x: &Point) -> Point {
        // sign with 0 at 0
        x.map(|v| {
            if v > 0.0 {
                self.gamma
            } else if v < 0.0 {
                -self.gamma
            } else {
                0.0
            }
        })
    }
}

impl ProxFunction for ScaledL1 {
    fn prox(&self, center: &Point, alpha: f64, set: &dyn ConstraintSet, tol: f64) -> Result<Point> {
        check_positive("alpha", alpha)?;
        let gamma = self.gamma;
        constrained_closed_form(self, true, center, alpha, set, tol, |c| {
            prox::shrink_unchecked(c, gamma * alpha)
        })
    }
}

/// `(c'x - d)^2 / 2`, the data-fit term of least squares.
#[derive(Debug, Clone)]
pub struct Rank1Quadratic {
    c: Point,
    d: f64,
    c_norm_sq: f64,
}

impl Rank1Quadratic {
    pub fn new(c: Point, d: f64) -> Result<Self> {
        if !d.is_finite() {
            return Err(Error::Parameter(format!("rank-1 quadratic offset {d}")));
        }
        let c_norm_sq = c.norm_sq();
        Ok(Rank1Quadratic { c, d, c_norm_sq })
    }

    pub fn c(&self) -> &Point {
        &self.c
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn residual(&self, x: &Point) -> f64 {
        self.c.dot(x) - self.d
    }
}

impl SubgradientFunction for Rank1Quadratic {
    fn value(&self, x: &Point) -> f64 {
        let r = self.residual(x);
        0.5 * r * r
    }

    fn subgradient(&self, x: &Point) -> Point {
        self.c.scale(self.residual(x))
    }

    fn dim(&self) -> Option<usize> {
        Some(self.c.dim())
    }
}

impl ProxFunction for Rank1Quadratic {
    fn prox(&self, center: &Point, alpha: f64, set: &dyn ConstraintSet, tol: f64) -> Result<Point> {
        check_positive("alpha", alpha)?;
        constrained_closed_form(self, false, center, alpha, set, tol, |x| {
            let shrink = alpha * self.residual(x) / (1.0 + alpha * self.c_norm_sq);
            x.step(shrink, &self.c)
        })
    }
}

/// `w * |x - y|`, a weighted Euclidean distance to an anchor.
#[derive(Debug, Clone)]
pub struct WeightedNorm {
    anchor: Point,
    weight: f64,
}

impl WeightedNorm {
    pub fn new(anchor: Point, weight: f64) -> Result<Self> {
        check_positive("weight", weight)?;
        Ok(WeightedNorm { anchor, weight })
    }

    pub fn anchor(&self) -> &Point {
        &self.anchor
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }
}

impl SubgradientFunction for WeightedNorm {
    fn value(&self, x: &Point) -> f64 {
        self.weight * x.distance(&self.anchor)
    }

    fn subgradient(&self, x: &Point) -> Point {
        let r = x.distance(&self.anchor);
        if r == 0.0 {
            return Point::zeros(x.dim());
        }
        let s = self.weight / r;
        x.zip_map(&self.anchor, |a, b| s * (a - b))
    }

    fn dim(&self) -> Option<usize> {
        Some(self.anchor.dim())
    }
}

impl ProxFunction for WeightedNorm {
    fn prox(&self, center: &Point, alpha: f64, set: &dyn ConstraintSet, tol: f64) -> Result<Point> {
        check_positive("alpha", alpha)?;
        constrained_closed_form(self, false, center, alpha, set, tol, |x| {
            prox::prox_weighted_norm_unchecked(x, &self.anchor, self.weight, alpha)
        })
    }
}

/// `gamma * dist(x; X)`.
#[derive(Debug, Clone)]
pub struct DistanceFunction {
    set: Arc<dyn ConstraintSet>,
    gamma: f64,
}

impl DistanceFunction {
    pub fn new(set: Arc<dyn ConstraintSet>, gamma: f64) -> Result<Self> {
        check_positive("gamma", gamma)?;
        Ok(DistanceFunction { set, gamma })
    }

    pub fn set(&self) -> &Arc<dyn ConstraintSet> {
        &self.set
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

impl SubgradientFunction for DistanceFunction {
    fn value(&self, x: &Point) -> f64 {
        self.gamma * self.set.distance(x)
    }

    fn subgradient(&self, x: &Point) -> Point {
        let p = self.set.project(x);
        let d = x.distance(&p);
        if d == 0.0 {
            return Point::zeros(x.dim());
        }
        let s = self.gamma / d;
        x.zip_map(&p, |a, b| s * (a - b))
    }

    fn dim(&self) -> Option<usize> {
        self.set.dim()
    }
}

impl ProxFunction for DistanceFunction {
    fn prox(&self, center: &Point, alpha: f64, set: &dyn ConstraintSet, tol: f64) -> Result<Point> {
        check_positive("alpha", alpha)?;
        constrained_closed_form(self, false, center, alpha, set, tol, |x| {
            prox::interpolated_projection_unchecked(x, self.set.as_ref(), self.gamma, alpha)
        })
    }
}

/// `a'x + b`.
#[derive(Debug, Clone)]
pub struct Linear {
    a: Point,
    b: f64,
}

impl Linear {
    pub fn new(a: Point, b: f64) -> Result<Self> {
        if !b.is_finite() {
            return Err(Error::Parameter(format!("linear offset {b}")));
        }
        Ok(Linear { a, b })
    }
}

impl SubgradientFunction for Linear {
    fn value(&self, x: &Point) -> f64 {
        self.a.dot(x) + self.b
    }

    fn subgradient(&self, _x: &Point) -> Point {
        self.a.clone()
    }

    fn dim(&self) -> Option<usize> {
        Some(self.a.dim())
    }
}

impl ProxFunction for Linear {
    fn prox(&self, center: &Point, alpha: f64, set: &dyn ConstraintSet, tol: f64) -> Result<Point> {
        check_positive("alpha", alpha)?;
        constrained_closed_form(self, true, center, alpha, set, tol, |x| x.step(alpha, &self.a))
    }
}

/// `(w / 2) * |x - y|^2`.
#[derive(Debug, Clone)]
pub struct HalfSquaredDistance {
    anchor: Point,
    weight: f64,
}

impl HalfSquaredDistance {
    pub fn new(anchor: Point, weight: f64) -> Result<Self> {
        check_positive("weight", weight)?;
        Ok(HalfSquaredDistance { anchor, weight })
    }
}

impl SubgradientFunction for HalfSquaredDistance {
    fn value(&self, x: &Point) -> f64 {
        0.5 * self.weight * x.distance_sq(&self.anchor)
    }

    fn subgradient(&self, x: &Point) -> Point {
        x.zip_map(&self.anchor, |a, b| self.weight * (a - b))
    }

    fn dim(&self) -> Option<usize> {
        Some(self.anchor.dim())
    }
}

impl ProxFunction for HalfSquaredDistance {
    fn prox(&self, center: &Point, alpha: f64, set: &dyn ConstraintSet, tol: f64) -> Result<Point> {
        check_positive("alpha", alpha)?;
        let aw = alpha * self.weight;
        constrained_closed_form(self, true, center, alpha, set, tol, |x| {
            x.zip_map(&self.anchor, |v, y| (v + aw * y) / (1.0 + aw))
        })
    }
}

/// `c * max{0, g(x)}` for a convex constraint function `g`.
#[derive(Debug, Clone)]
pub struct MaxPenalty {
    g: Arc<dyn SubgradientFunction>,
    c: f64,
}

impl MaxPenalty {
    pub fn new(g: Arc<dyn SubgradientFunction>, c: f64) -> Result<Self> {
        check_positive("penalty weight", c)?;
        Ok(MaxPenalty { g, c })
    }
}

impl SubgradientFunction for MaxPenalty {
    fn value(&self, x: &Point) -> f64 {
        self.c * self.g.value(x).max(0.0)
    }

    fn subgradient(&self, x: &Point) -> Point {
        if self.g.value(x) > 0.0 {
            self.g.subgradient(x).scale(self.c)
        } else {
            Point::zeros(x.dim())
        }
    }

    fn dim(&self) -> Option<usize> {
        self.g.dim()
    }
}

impl ProxFunction for MaxPenalty {
    fn prox(&self, center: &Point, alpha: f64, set: &dyn ConstraintSet, tol: f64) -> Result<Point> {
        prox::prox_numeric_fallback(self, center, alpha, set, tol)
    }
}

/// Pointwise sum of convex functions.
#[derive(Debug, Clone)]
pub struct Sum {
    parts: Vec<Arc<dyn SubgradientFunction>>,
}

impl Sum {
    pub fn new(parts: Vec<Arc<dyn SubgradientFunction>>) -> Self {
        Sum { parts }
    }
}

impl SubgradientFunction for Sum {
    fn value(&self, x: &Point) -> f64 {
        self.parts.iter().map(|p| p.value(x)).sum()
    }

    fn subgradient(&self, x: &Point) -> Point {
        let mut g = Point::zeros(x.dim());
        for p in &self.parts {
            g = g.add(&p.subgradient(x));
        }
        g
    }

    fn dim(&self) -> Option<usize> {
        self.parts.iter().find_map(|p| p.dim())
    }

    fn is_zero(&self) -> bool {
        self.parts.iter().all(|p| p.is_zero())
    }
}

impl ProxFunction for Sum {
    fn prox(&self, center: &Point, alpha: f64, set: &dyn ConstraintSet, tol: f64) -> Result<Point> {
        if self.is_zero() {
            return Ok(set.project(center));
        }
        prox::prox_numeric_fallback(self, center, alpha, set, tol)
    }
}

/// Makes any convex function prox-capable through the numeric solver.
#[derive(Debug, Clone)]
pub struct NumericProx {
    inner: Arc<dyn SubgradientFunction>,
}

impl NumericProx {
    pub fn new(inner: Arc<dyn SubgradientFunction>) -> Self {
        NumericProx { inner }
    }
}

impl SubgradientFunction for NumericProx {
    fn value(&self, x: &Point) -> f64 {
        self.inner.value(x)
    }

    fn subgradient(&self, x: &Point) -> Point {
        self.inner.subgradient(x)
    }

    fn dim(&self) -> Option<usize> {
        self.inner.dim()
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }
}

impl ProxFunction for NumericProx {
    fn prox(&self, center: &Point, alpha: f64, set: &dyn ConstraintSet, tol: f64) -> Result<Point> {
        prox::prox_numeric_fallback(self.inner.as_ref(), center, alpha, set, tol)
    }
}

/// True iff `f(y) >= f(x) + <g, y - x> - tol` for every sample `y`, using
/// the function's own subgradient at `x`.
pub fn check_subgradient(f: &dyn SubgradientFunction, x: &Point, samples: &[Point], tol: f64) -> bool {
    check_subgradient_with(f, x, &f.subgradient(x), samples, tol)
}

/// Like [`check_subgradient`] but for a claimed subgradient `g`.
pub fn check_subgradient_with(
    f: &dyn SubgradientFunction,
    x: &Point,
    g: &Point,
    samples: &[Point],
    tol: f64,
) -> bool {
    let fx = f.value(x);
    samples
        .iter()
        .all(|y| f.value(y) >= fx + g.dot(&y.sub(x)) - tol)
}
