use std::fmt;
use std::ops::{Deref, Index};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A dense point in `R^n` with finite coordinates.
///
/// The finiteness check happens at construction; arithmetic helpers build new
/// points without rechecking, and the run loop rejects non-finite iterates.
#[derive(Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Parameter("a point needs at least one coordinate".into()));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::Parameter(format!("non-finite coordinate {bad}")));
        }
        Ok(Point(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    /// Wraps coordinates that are already known to be finite.
    pub(crate) fn from_vec(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn dot(&self, other: &Point) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        self.0.iter().map(|c| c.abs()).sum()
    }

    pub fn distance_sq(&self, other: &Point) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.distance_sq(other).sqrt()
    }

    pub fn sub(&self, other: &Point) -> Point {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Point) -> Point {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn scale(&self, s: f64) -> Point {
        self.map(|a| s * a)
    }

    /// `self - step * direction`, the basic move of every iteration here.
    pub fn step(&self, step: f64, direction: &Point) -> Point {
        self.zip_map(direction, |a, d| a - step * d)
    }

    /// `(1 - t) * self + t * other`.
    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        self.zip_map(other, |a, b| (1.0 - t) * a + t * b)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Point {
        Point(self.0.iter().map(|&a| f(a)).collect())
    }

    pub fn zip_map(&self, other: &Point, f: impl Fn(f64, f64) -> f64) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Point(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl Index<usize> for Point {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(v)
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        Point::new(v).map_err(serde::de::Error::custom)
    }
}

/// Shorthand used heavily in tests and examples.
#[macro_export]
macro_rules! pt {
    ($($x:expr),+ $(,)?) => {
        $crate::Point::new(vec![$($x as f64),+]).expect("finite coordinates")
    };
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_and_empty() {
        assert!(Point::new(vec![1.0, f64::NAN]).is_err());
        assert!(Point::new(vec![f64::INFINITY]).is_err());
        assert!(Point::new(vec![]).is_err());
    }

    #[test]
    fn basic_arithmetic() {
        let a = pt![3.0, 4.0];
        let b = pt![1.0, 0.0];
        assert_eq!(a.norm(), 5.0);
        assert_eq!(a.dot(&b), 3.0);
        assert_eq!(a.step(2.0, &b), pt![1.0, 4.0]);
        assert_eq!(a.lerp(&b, 0.5), pt![2.0, 2.0]);
        assert_eq!(a.distance(&b), 20f64.sqrt());
    }

    #[test]
    fn serde_roundtrip_checks_finiteness() {
        let p: Point = serde_json::from_str("[1.5, -2]").unwrap();
        assert_eq!(p, pt![1.5, -2.0]);
        assert_eq!(serde_json::to_string(&p).unwrap(), "[1.5,-2.0]");
        assert!(serde_json::from_str::<Point>("[]").is_err());
    }
}
