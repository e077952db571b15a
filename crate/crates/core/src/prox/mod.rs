//! Proximal operators: closed forms plus a numeric fallback.

mod fallback;

pub use fallback::{prox_numeric_fallback, FALLBACK_MAX_STEPS};

use crate::error::{check_positive, Result};
use crate::model::point::Point;
use crate::model::set::ConstraintSet;

/// Distances below this count as "inside" for the interpolated projection.
pub const INSIDE_DISTANCE: f64 = 1e-14;

/// Coordinatewise soft-thresholding at level `gamma * alpha`, the prox of
/// `gamma * |x|_1`.
///
/// A coordinate sitting exactly on the threshold maps to zero.
pub fn shrink(x: &Point, gamma: f64, alpha: f64) -> Result<Point> {
    check_positive("gamma", gamma)?;
    check_positive("alpha", alpha)?;
    Ok(shrink_unchecked(x, gamma * alpha))
}

pub(crate) fn shrink_unchecked(x: &Point, threshold: f64) -> Point {
    x.map(|v| {
        if v > threshold {
            v - threshold
        } else if v < -threshold {
            v + threshold
        } else {
            0.0
        }
    })
}

/// Prox of `(c'z - d)^2 / 2`: `x - alpha c (c'x - d) / (1 + alpha |c|^2)`.
pub fn prox_rank1_quadratic(x: &Point, c: &Point, d: f64, alpha: f64) -> Result<Point> {
    check_positive("alpha", alpha)?;
    crate::error::check_dim(c.dim(), x.dim())?;
    let s = alpha * (c.dot(x) - d) / (1.0 + alpha * c.norm_sq());
    Ok(x.step(s, c))
}

/// Prox of `w |z - center|`, a block soft-threshold toward `center`.
pub fn prox_weighted_norm(x: &Point, center: &Point, w: f64, alpha: f64) -> Result<Point> {
    check_positive("weight", w)?;
    check_positive("alpha", alpha)?;
    crate::error::check_dim(center.dim(), x.dim())?;
    Ok(prox_weighted_norm_unchecked(x, center, w, alpha))
}

pub(crate) fn prox_weighted_norm_unchecked(x: &Point, center: &Point, w: f64, alpha: f64) -> Point {
    let r = x.distance(center);
    if r <= alpha * w {
        return center.clone();
    }
    let keep = 1.0 - alpha * w / r;
    center.zip_map(x, |c, v| c + keep * (v - c))
}

/// Prox of `gamma * dist(z; set)`: move from `x` toward its projection by the
/// fraction `alpha gamma / dist(x)`, or all the way once that reaches one.
pub fn interpolated_projection(x: &Point, set: &dyn ConstraintSet, gamma: f64, alpha: f64) -> Result<Point> {
    check_positive("gamma", gamma)?;
    check_positive("alpha", alpha)?;
    Ok(interpolated_projection_unchecked(x, set, gamma, alpha))
}

pub(crate) fn interpolated_projection_unchecked(
    x: &Point,
    set: &dyn ConstraintSet,
    gamma: f64,
    alpha: f64,
) -> Point {
    let p = set.project(x);
    let dist = x.distance(&p);
    if dist < INSIDE_DISTANCE {
        return x.clone();
    }
    let beta = alpha * gamma / dist;
    if beta < 1.0 {
        x.lerp(&p, beta)
    } else {
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::set::{Halfspace, WholeSpace};
    use crate::pt;
    use incrprox_oracle::numeric_prox_1d;

    #[test]
    fn shrink_examples() {
        assert_eq!(shrink(&pt![0.0, 0.0, 0.0], 3.0, 0.7).unwrap(), pt![0.0, 0.0, 0.0]);
        assert_eq!(shrink(&pt![3.0, -0.5, -4.0], 2.0, 0.5).unwrap(), pt![2.0, 0.0, -3.0]);
        let z = shrink(&pt![1.0], 1.0, 1.0).unwrap();
        assert_eq!(z, pt![0.0]);
        let r = numeric_prox_1d(|t: f64| t.abs(), 1.0, 1.0, 1.0, 1e-12).unwrap();
        assert!((z[0] - r).abs() <= 1e-8);
        assert!(shrink(&pt![1.0], 0.0, 1.0).is_err());
        assert!(shrink(&pt![1.0], 1.0, -1.0).is_err());
    }

    #[test]
    fn shrink_threshold_boundary_is_zero() {
        let z = shrink(&pt![1.0, -1.0], 2.0, 0.5).unwrap();
        assert_eq!(z[0].to_bits(), 0f64.to_bits());
        assert_eq!(z[1].to_bits(), 0f64.to_bits());
    }

    #[test]
    fn rank1_examples() {
        assert_eq!(prox_rank1_quadratic(&pt![2.0, 3.0], &pt![0.0, 0.0], 5.0, 1.0).unwrap(), pt![2.0, 3.0]);
        assert_eq!(prox_rank1_quadratic(&pt![2.0, 3.0], &pt![1.0, 0.0], 0.0, 1.0).unwrap(), pt![1.0, 3.0]);
        assert_eq!(prox_rank1_quadratic(&pt![1.0, 1.0], &pt![1.0, 1.0], 2.0, 1.0).unwrap(), pt![1.0, 1.0]);
        // first coordinate against a scalar oracle: (t^2)/2 + (t - 2)^2 / 2
        let r = numeric_prox_1d(|t: f64| 0.5 * t * t, 2.0, 1.0, 4.0, 1e-12).unwrap();
        assert!((r - 1.0).abs() < 1e-7);
    }

    #[test]
    fn weighted_norm_examples() {
        let o = pt![0.0, 0.0];
        assert_eq!(prox_weighted_norm(&o, &o, 1.0, 1.0).unwrap(), o);
        let z = prox_weighted_norm(&pt![3.0, 4.0], &o, 1.0, 1.0).unwrap();
        assert!(z.distance(&pt![2.4, 3.2]) < 1e-15);
        // radial 1-D oracle: minimize t + (t - 5)^2 / 2
        let r = numeric_prox_1d(|t: f64| t.abs(), 5.0, 1.0, 1.0, 1e-12).unwrap();
        assert!((z.norm() - r).abs() < 1e-7);
        assert_eq!(prox_weighted_norm(&pt![3.0, 4.0], &o, 1.0, 10.0).unwrap(), o);
    }

    #[test]
    fn interpolated_projection_examples() {
        let h = Halfspace::new(pt![1.0, 0.0], 0.0).unwrap();
        let inside = pt![-1.0, 7.0];
        assert_eq!(interpolated_projection(&inside, &h, 1.0, 1.0).unwrap(), inside);
        assert_eq!(interpolated_projection(&pt![2.0, 1.0], &h, 1.0, 1.0).unwrap(), pt![1.0, 1.0]);
        assert_eq!(interpolated_projection(&pt![2.0, 1.0], &h, 3.0, 1.0).unwrap(), pt![0.0, 1.0]);
        assert_eq!(interpolated_projection(&pt![2.0, 1.0], &WholeSpace, 3.0, 1.0).unwrap(), pt![2.0, 1.0]);
    }
}
