use crate::error::{check_dim, check_positive, Error, Result};
use crate::model::function::SubgradientFunction;
use crate::model::point::Point;
use crate::model::set::ConstraintSet;

/// Iteration cap of the numeric prox solver.
pub const FALLBACK_MAX_STEPS: usize = 100_000;

/// Numeric prox for functions without a closed form.
///
/// Minimizes `phi(z) = f(z) + |z - center|^2 / (2 alpha)` over `set` using
/// only the subgradient oracle of `f`. `phi` is `1/alpha`-strongly convex, so
/// for any feasible `z` with subgradient `g` of `phi`, `|z - z*| <= alpha |g|`,
/// and the minimizer lies within `2 alpha |g(z0)|` of `z0 = P(center)`.
///
/// From that ball the solver runs bisection (one dimension) or the
/// central-cut ellipsoid method, cutting with the subgradient of `phi` at
/// feasible centers and with `x - P(x)` at infeasible ones. It stops once the
/// localization ellipsoid, or the gradient residual above, guarantees a
/// distance of at most `tol` to the true prox point, or once the center has
/// moved less than `tol` in total over the last `50n` cuts.
pub fn prox_numeric_fallback(
    f: &dyn SubgradientFunction,
    center: &Point,
    alpha: f64,
    set: &dyn ConstraintSet,
    tol: f64,
) -> Result<Point> {
    check_positive("alpha", alpha)?;
    check_positive("tolerance", tol)?;
    if let Some(d) = f.dim() {
        check_dim(d, center.dim())?;
    }
    let z0 = set.project(center);
    if f.is_zero() {
        return Ok(z0);
    }
    let inner = Inner { f, center, alpha };
    let g0 = inner.subgradient(&z0);
    let radius = 2.0 * alpha * g0.norm();
    if !radius.is_finite() {
        return Err(Error::NonFinite { iteration: 0 });
    }
    if radius <= tol {
        return Ok(z0);
    }
    if center.dim() == 1 {
        bisection(&inner, set, z0[0], radius, tol)
    } else {
        ellipsoid(&inner, set, z0, radius, tol)
    }
}

struct Inner<'a> {
    f: &'a dyn SubgradientFunction,
    center: &'a Point,
    alpha: f64,
}

impl Inner<'_> {
    fn subgradient(&self, z: &Point) -> Point {
        let inv = 1.0 / self.alpha;
        self.f
            .subgradient(z)
            .zip_map(&z.zip_map(self.center, |a, b| a - b), |g, d| g + inv * d)
    }

    fn certifies(&self, g: &Point, tol: f64) -> bool {
        self.alpha * g.norm() <= tol
    }
}

fn bisection(inner: &Inner, set: &dyn ConstraintSet, z0: f64, radius: f64, tol: f64) -> Result<Point> {
    let (mut lo, mut hi) = (z0 - radius, z0 + radius);
    for _ in 0..super::FALLBACK_MAX_STEPS {
        let mid = 0.5 * (lo + hi);
        if 0.5 * (hi - lo) <= tol || mid <= lo || mid >= hi {
            return Ok(set.project(&Point::from_vec(vec![mid])));
        }
        let x = Point::from_vec(vec![mid]);
        let p = set.project(&x);
        if p[0] != mid {
            if mid > p[0] {
                hi = mid;
            } else {
                lo = mid;
            }
            continue;
        }
        let g = inner.subgradient(&x);
        if inner.certifies(&g, tol) {
            return Ok(x);
        }
        if g[0] > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::Convergence {
        steps: super::FALLBACK_MAX_STEPS,
        residual: 0.5 * (hi - lo),
    })
}

fn ellipsoid(inner: &Inner, set: &dyn ConstraintSet, z0: Point, radius: f64, tol: f64) -> Result<Point> {
    let n = z0.dim();
    let nf = n as f64;
    let mut x = z0.into_vec();
    // the ellipsoid is {x + L u : |u| <= 1}; keeping the factor L instead of
    // P = L L' keeps the shape positive semidefinite under rounding
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        l[i * n + i] = radius;
    }
    let scale = (nf * nf / (nf * nf - 1.0)).sqrt();
    let beta = 1.0 - ((nf - 1.0) / (nf + 1.0)).sqrt();
    let size = |l: &[f64]| l.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut p = vec![0.0; n];
    let mut lp = vec![0.0; n];
    // recent center moves, for the stall test below
    let window = 50 * n;
    let mut moves = std::collections::VecDeque::with_capacity(window);

    for _ in 0..super::FALLBACK_MAX_STEPS {
        let xp = Point::from_vec(x.clone());
        let proj = set.project(&xp);
        let viol = xp.distance(&proj);
        let cut = if viol > 1e-12 * (1.0 + xp.norm()) {
            let gp = inner.subgradient(&proj);
            if inner.certifies(&gp, tol) {
                return Ok(proj);
            }
            xp.sub(&proj)
        } else {
            // on or numerically at the boundary: x - P(x) has no reliable
            // direction here, so cut with phi's subgradient instead
            let g = inner.subgradient(&proj);
            if inner.certifies(&g, tol) {
                return Ok(proj);
            }
            g
        };

        // p = L' a / |L' a|
        for (j, v) in p.iter_mut().enumerate() {
            *v = (0..n).map(|i| l[i * n + j] * cut[i]).sum();
        }
        let norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            // zero width along the cut: rounding has flattened the
            // ellipsoid onto a hyperplane through the center
            return Ok(proj);
        }
        if !norm.is_finite() {
            break;
        }
        p.iter_mut().for_each(|v| *v /= norm);
        for (i, v) in lp.iter_mut().enumerate() {
            *v = (0..n).map(|j| l[i * n + j] * p[j]).sum();
        }
        for (xi, v) in x.iter_mut().zip(&lp) {
            *xi -= v / (nf + 1.0);
        }
        let moved = lp.iter().map(|v| v * v).sum::<f64>().sqrt() / (nf + 1.0);
        if moves.len() == window {
            moves.pop_front();
        }
        moves.push_back(moved);
        // L <- scale L (I - beta p p')
        for i in 0..n {
            for j in 0..n {
                l[i * n + j] = scale * (l[i * n + j] - beta * lp[i] * p[j]);
            }
        }
        if size(&l) <= tol {
            return Ok(set.project(&Point::from_vec(x)));
        }
        // At a kink on the solution the cuts can stay inside a subspace, and
        // the ellipsoid then grows along the directions never cut while the
        // center no longer moves. Accept a center that has stalled.
        if moves.len() == window && moves.iter().sum::<f64>() <= tol {
            return Ok(set.project(&Point::from_vec(x)));
        }
    }

    let residual = size(&l);
    if residual <= tol {
        return Ok(set.project(&Point::from_vec(x)));
    }
    Err(Error::Convergence {
        steps: super::FALLBACK_MAX_STEPS,
        residual,
    })
}
