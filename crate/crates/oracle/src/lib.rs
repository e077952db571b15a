//! Brute-force reference solvers.
//!
//! Nothing in here shares code with `incrprox`; the routines work on plain
//! slices and closures so they can serve as independent checks for the
//! closed-form operators and iteration rules in the main library. They are
//! slow on purpose and only support tiny dimensions.

use thiserror::Error;

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const MAX_GRID_DIM: usize = 3;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("dimension {0} is not supported (at most {MAX_GRID_DIM})")]
    Unsupported(usize),
    #[error("invalid search box: {0}")]
    InvalidBox(String),
    #[error("minimizer {at} sits on the bracket edge [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64, at: f64 },
    #[error("singular linear system")]
    Singular,
}

pub type Result<T> = std::result::Result<T, OracleError>;

/// Golden-section search for the minimizer of a unimodal function on
/// `[lo, hi]`. Runs until the bracket is narrower than `tol`.
///
/// At a smooth minimizer the attainable accuracy is about `sqrt(f64::EPSILON)`
/// relative to the curvature scale, since nearby values become equal in
/// floating point. At a kink it is limited only by `tol`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    if b - a <= tol {
        return 0.5 * (a + b);
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..400 {
        if b - a <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Minimizes `f(t) + (t - center)^2 / (2 alpha)` by golden-section search.
///
/// `slope_bound` is an upper bound on |f'|; the minimizer then lies within
/// `alpha * slope_bound` of `center`, and the search interval is ten times
/// wider than that. A result pinned to the interval edge means the bound was
/// wrong and is reported as a bracket failure.
pub fn numeric_prox_1d<F: Fn(f64) -> f64>(
    f: F,
    center: f64,
    alpha: f64,
    slope_bound: f64,
    tol: f64,
) -> Result<f64> {
    let half = 10.0 * alpha * slope_bound;
    if half == 0.0 {
        return Ok(center);
    }
    let (lo, hi) = (center - half, center + half);
    let t = golden_section(
        |t| f(t) + (t - center) * (t - center) / (2.0 * alpha),
        lo,
        hi,
        tol,
    );
    if t - lo <= 2.0 * tol || hi - t <= 2.0 * tol {
        return Err(OracleError::Bracket { lo, hi, at: t });
    }
    Ok(t)
}

/// Minimizes a convex function over a box by nested golden-section search
/// (the partial minimum of a convex function is convex, so each level is
/// unimodal).
pub fn nested_golden<F: Fn(&[f64]) -> f64>(
    objective: F,
    lo: &[f64],
    hi: &[f64],
    tol: f64,
) -> Result<(Vec<f64>, f64)> {
    check_box(lo, hi)?;
    if lo.len() > MAX_GRID_DIM {
        return Err(OracleError::Unsupported(lo.len()));
    }
    let mut scratch = lo.to_vec();
    let point = nested_level(&objective, lo, hi, tol, 0, &mut scratch);
    let value = objective(&point);
    Ok((point, value))
}

fn nested_level<F: Fn(&[f64]) -> f64>(
    objective: &F,
    lo: &[f64],
    hi: &[f64],
    tol: f64,
    level: usize,
    scratch: &mut Vec<f64>,
) -> Vec<f64> {
    let n = lo.len();
    if level + 1 == n {
        let best = golden_section(
            |t| {
                scratch[level] = t;
                objective(scratch)
            },
            lo[level],
            hi[level],
            tol,
        );
        scratch[level] = best;
        return scratch.clone();
    }
    // an inner minimum at a kink is located only to `tol`, which perturbs the
    // partial minimum by O(tol); the outer search would then be off by
    // O(sqrt(tol)), so inner levels search much more finely
    let inner_tol = tol * 1e-3;
    let inner_value = |t: f64, scratch: &mut Vec<f64>| {
        scratch[level] = t;
        let p = nested_level(objective, lo, hi, inner_tol, level + 1, scratch);
        objective(&p)
    };
    let mut s = scratch.clone();
    let best = golden_section(|t| inner_value(t, &mut s), lo[level], hi[level], tol);
    scratch[level] = best;
    nested_level(objective, lo, hi, inner_tol, level + 1, scratch)
}

/// Result of an exhaustive grid search.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMin {
    pub point: Vec<f64>,
    pub value: f64,
    pub resolution: f64,
}

impl GridMin {
    /// Worst-case gap between the grid minimum and the true minimum for an
    /// objective with the given Lipschitz constant.
    pub fn error_bound(&self, lipschitz: f64) -> f64 {
        lipschitz * self.resolution * (self.point.len() as f64).sqrt()
    }
}

/// Exhaustive grid minimization over a finite box (dimension at most 3).
/// Ties keep the first point in lexicographic order.
pub fn grid_minimize<F: Fn(&[f64]) -> f64>(
    objective: F,
    lo: &[f64],
    hi: &[f64],
    resolution: f64,
) -> Result<GridMin> {
    check_box(lo, hi)?;
    if lo.len() > MAX_GRID_DIM {
        return Err(OracleError::Unsupported(lo.len()));
    }
    if !(resolution > 0.0) {
        return Err(OracleError::InvalidBox(format!("resolution {resolution}")));
    }
    let counts: Vec<usize> = lo
        .iter()
        .zip(hi)
        .map(|(l, h)| ((h - l) / resolution).round() as usize + 1)
        .collect();
    let mut idx = vec![0usize; lo.len()];
    let mut x = lo.to_vec();
    let mut best = GridMin {
        point: lo.to_vec(),
        value: f64::INFINITY,
        resolution,
    };
    loop {
        for (d, &i) in idx.iter().enumerate() {
            x[d] = (lo[d] + i as f64 * resolution).min(hi[d]);
        }
        let v = objective(&x);
        if v < best.value {
            best.value = v;
            best.point.copy_from_slice(&x);
        }
        let mut d = 0;
        loop {
            if d == idx.len() {
                return Ok(best);
            }
            idx[d] += 1;
            if idx[d] < counts[d] {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Coarse-to-fine grid search for convex objectives: each pass scans a
/// 41-point-per-axis grid, then zooms onto a window of five cells around the
/// incumbent, until the target resolution is reached.
pub fn grid_minimize_refined<F: Fn(&[f64]) -> f64>(
    objective: F,
    lo: &[f64],
    hi: &[f64],
    resolution: f64,
) -> Result<GridMin> {
    check_box(lo, hi)?;
    let mut lo = lo.to_vec();
    let mut hi = hi.to_vec();
    loop {
        let width = lo
            .iter()
            .zip(&hi)
            .map(|(l, h)| h - l)
            .fold(0.0_f64, f64::max);
        let step = (width / 40.0).max(resolution);
        let found = grid_minimize(&objective, &lo, &hi, step)?;
        if step <= resolution {
            return Ok(GridMin {
                resolution,
                ..found
            });
        }
        for d in 0..lo.len() {
            let l = (found.point[d] - 5.0 * step).max(lo[d]);
            let h = (found.point[d] + 5.0 * step).min(hi[d]);
            lo[d] = l;
            hi[d] = h;
        }
    }
}

fn check_box(lo: &[f64], hi: &[f64]) -> Result<()> {
    if lo.is_empty() || lo.len() != hi.len() {
        return Err(OracleError::InvalidBox("bounds must be nonempty and equal length".into()));
    }
    if lo.iter().zip(hi).any(|(l, h)| !(l.is_finite() && h.is_finite() && l <= h)) {
        return Err(OracleError::InvalidBox("bounds must be finite with lo <= hi".into()));
    }
    Ok(())
}

/// Simple convex sets described by their defining data.
#[derive(Debug, Clone, PartialEq)]
pub enum SetSpec {
    /// `{x : a'x <= b}`
    Halfspace { a: Vec<f64>, b: f64 },
    Ball { center: Vec<f64>, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

/// Textbook projection formulas.
pub fn projection_reference(set: &SetSpec, x: &[f64]) -> Vec<f64> {
    match set {
        SetSpec::Halfspace { a, b } => {
            let ax: f64 = a.iter().zip(x).map(|(p, q)| p * q).sum();
            let aa: f64 = a.iter().map(|p| p * p).sum();
            let excess = (ax - b).max(0.0);
            x.iter().zip(a).map(|(xi, ai)| xi - excess / aa * ai).collect()
        }
        SetSpec::Ball { center, radius } => {
            let r: f64 = x
                .iter()
                .zip(center)
                .map(|(p, q)| (p - q) * (p - q))
                .sum::<f64>()
                .sqrt();
            let scale = radius / r.max(*radius);
            x.iter()
                .zip(center)
                .map(|(xi, ci)| ci + scale * (xi - ci))
                .collect()
        }
        SetSpec::Box { lo, hi } => x
            .iter()
            .zip(lo.iter().zip(hi))
            .map(|(xi, (l, h))| xi.max(*l).min(*h))
            .collect(),
    }
}

/// Euclidean distance from `x` to the set, via [`projection_reference`].
pub fn distance_reference(set: &SetSpec, x: &[f64]) -> f64 {
    projection_reference(set, x)
        .iter()
        .zip(x)
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt()
}

/// Classical method of cyclic projections: `sweeps` passes of
/// `x <- P_m(...P_2(P_1(x)))`. Returns every intermediate point.
pub fn cyclic_projections(sets: &[SetSpec], x0: &[f64], steps: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut x = x0.to_vec();
    out.push(x.clone());
    for k in 0..steps {
        x = projection_reference(&sets[k % sets.len()], &x);
        out.push(x.clone());
    }
    out
}

/// Dykstra's alternating projections: converges to the Euclidean
/// projection of `x` onto the intersection of the sets, not just to some
/// point of it.
pub fn dykstra_projection(sets: &[SetSpec], x: &[f64], sweeps: usize) -> Vec<f64> {
    let mut y = x.to_vec();
    let mut corrections = vec![vec![0.0; x.len()]; sets.len()];
    for _ in 0..sweeps {
        for (set, p) in sets.iter().zip(corrections.iter_mut()) {
            let shifted: Vec<f64> = y.iter().zip(p.iter()).map(|(a, b)| a + b).collect();
            let next = projection_reference(set, &shifted);
            for ((pi, s), n) in p.iter_mut().zip(&shifted).zip(&next) {
                *pi = s - n;
            }
            y = next;
        }
    }
    y
}

/// Dense Gaussian elimination with partial pivoting.
pub fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .ok_or(OracleError::Singular)?;
        if a[pivot][col].abs() < 1e-300 {
            return Err(OracleError::Singular);
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Ok(x)
}

/// Least-squares solution of `min ½ Σ (c_i'x - d_i)^2` through the normal
/// equations.
pub fn least_squares(rows: &[(Vec<f64>, f64)]) -> Result<Vec<f64>> {
    let n = rows.first().map(|r| r.0.len()).unwrap_or(0);
    let mut ata = vec![vec![0.0; n]; n];
    let mut atb = vec![0.0; n];
    for (c, d) in rows {
        for i in 0..n {
            atb[i] += c[i] * d;
            for j in 0..n {
                ata[i][j] += c[i] * c[j];
            }
        }
    }
    solve_linear(ata, atb)
}
