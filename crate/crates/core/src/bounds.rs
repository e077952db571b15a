//! Error bounds and iteration estimates for constant stepsizes, and the
//! empirical subgradient-norm constant they depend on.

use serde::{Deserialize, Serialize};

use crate::engine::OracleLog;
use crate::error::{Error, Result};

/// Inputs shared by all bounds. `dist0` and `epsilon` are only needed by
/// the iteration estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub alpha: f64,
    pub m: usize,
    pub c: f64,
    pub dist0: Option<f64>,
    pub epsilon: Option<f64>,
}

impl BoundInputs {
    pub fn new(alpha: f64, m: usize, c: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Parameter(format!("alpha must be positive, got {alpha}")));
        }
        if m == 0 {
            return Err(Error::Parameter("m must be positive".into()));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Parameter(format!("c must be positive, got {c}")));
        }
        Ok(BoundInputs {
            alpha,
            m,
            c,
            dist0: None,
            epsilon: None,
        })
    }

    pub fn with_start(mut self, dist0: f64, epsilon: f64) -> Result<Self> {
        if !(dist0 >= 0.0 && dist0.is_finite()) {
            return Err(Error::Parameter(format!("dist0 must be nonnegative, got {dist0}")));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Parameter(format!("epsilon must be positive, got {epsilon}")));
        }
        self.dist0 = Some(dist0);
        self.epsilon = Some(epsilon);
        Ok(self)
    }

    fn start(&self) -> Result<(f64, f64)> {
        match (self.dist0, self.epsilon) {
            (Some(d), Some(e)) => Ok((d, e)),
            _ => Err(Error::Parameter("iteration estimates need dist0 and epsilon".into())),
        }
    }
}

/// `beta = 1/m + 4`, the constant of the per-cycle estimate.
pub fn cyclic_beta(m: usize) -> f64 {
    1.0 / m as f64 + 4.0
}

/// The constant of the randomized-order estimates.
pub const RANDOMIZED_BETA: f64 = 5.0;

/// `alpha beta m^2 c^2 / 2` with `beta = 1/m + 4`: the asymptotic gap of the
/// best iterate under cyclic order and constant stepsize.
pub fn cyclic_error_bound(b: &BoundInputs) -> f64 {
    let m = b.m as f64;
    b.alpha * cyclic_beta(b.m) * m * m * b.c * b.c / 2.0
}

/// `5 alpha m c^2 / 2`: the same gap under uniform random order (with
/// probability one).
pub fn randomized_error_bound(b: &BoundInputs) -> f64 {
    b.alpha * RANDOMIZED_BETA * b.m as f64 * b.c * b.c / 2.0
}

/// `N = m floor(dist0^2 / (alpha epsilon))`: iterations after which the best
/// cyclic iterate is within `(alpha beta m^2 c^2 + epsilon) / 2` of optimal.
pub fn cyclic_iteration_estimate(b: &BoundInputs) -> Result<u64> {
    let (d, e) = b.start()?;
    // nudge by a relative 1e-12 so that quotients like 1 / (0.1 * 0.1), which
    // round to just below an integer, floor to that integer
    let cycles = (d * d / (b.alpha * e) * (1.0 + 1e-12)).floor();
    Ok(b.m as u64 * cycles as u64)
}

/// Upper bound `m dist0^2 / (alpha epsilon)` on the expected number of
/// randomized iterations to reach the analogous level.
pub fn randomized_expected_iterations(b: &BoundInputs) -> Result<f64> {
    let (d, e) = b.start()?;
    Ok(b.m as f64 * d * d / (b.alpha * e))
}

/// Largest norm in the log, used as the constant `c`.
pub fn estimate_c(log: &OracleLog) -> Result<f64> {
    if log.is_empty() {
        return Err(Error::Estimation("no oracle calls were logged".into()));
    }
    let c = log.norms().iter().cloned().fold(0.0, f64::max);
    if c > 0.0 && c.is_finite() {
        Ok(c)
    } else {
        Err(Error::Estimation(format!("logged norms give no positive bound (max {c})")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantSource {
    /// Maximum norm observed during the run itself.
    Empirical,
    /// Supplied by the caller.
    Given,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub inputs: BoundInputs,
    pub c_source: ConstantSource,
    pub cyclic_bound: f64,
    pub randomized_bound: f64,
    /// Present only when `dist0` is known.
    pub cyclic_n: Option<u64>,
    pub randomized_en: Option<f64>,
    pub observed_gap: Option<f64>,
    pub notes: Vec<String>,
}

impl BoundReport {
    pub fn new(inputs: BoundInputs, c_source: ConstantSource, observed_gap: Option<f64>) -> Self {
        let mut notes = Vec::new();
        if c_source == ConstantSource::Empirical {
            notes.push("c is the largest oracle norm seen during this run".to_string());
        }
        let (cyclic_n, randomized_en) = match inputs.start() {
            Ok(_) => {
                notes.push(
                    "randomized_en bounds the expected count; a single run is only a soft check".to_string(),
                );
                (cyclic_iteration_estimate(&inputs).ok(), randomized_expected_iterations(&inputs).ok())
            }
            Err(_) => {
                notes.push("optimal set unknown: iteration estimates omitted".to_string());
                (None, None)
            }
        };
        BoundReport {
            inputs,
            c_source,
            cyclic_bound: cyclic_error_bound(&inputs),
            randomized_bound: randomized_error_bound(&inputs),
            cyclic_n,
            randomized_en,
            observed_gap,
            notes,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn inputs(alpha: f64, m: usize, c: f64) -> BoundInputs {
        BoundInputs::new(alpha, m, c).unwrap()
    }

    #[test]
    fn cyclic_examples() {
        assert_relative_eq!(cyclic_error_bound(&inputs(0.01, 10, 1.0)), 2.05, max_relative = 1e-12);
        assert_relative_eq!(cyclic_error_bound(&inputs(0.3, 1, 2.0)), 0.3 * 5.0 * 4.0 / 2.0, max_relative = 1e-15);
        assert!(cyclic_error_bound(&inputs(1e-300, 10, 1.0)) < 1e-297);
    }

    #[test]
    fn randomized_examples() {
        let b = inputs(0.01, 10, 1.0);
        assert_relative_eq!(randomized_error_bound(&b), 0.25, max_relative = 1e-12);
        assert_relative_eq!(cyclic_error_bound(&b) / randomized_error_bound(&b), 8.2, max_relative = 1e-12);
        let one = inputs(0.7, 1, 3.0);
        assert_eq!(cyclic_error_bound(&one), randomized_error_bound(&one));
    }

    #[test]
    fn iteration_estimates() {
        let b = inputs(0.1, 5, 1.0).with_start(1.0, 0.1).unwrap();
        assert_eq!(cyclic_iteration_estimate(&b).unwrap(), 500);
        assert_relative_eq!(randomized_expected_iterations(&b).unwrap(), 500.0, max_relative = 1e-12);
        let z = inputs(0.1, 5, 1.0).with_start(0.0, 0.1).unwrap();
        assert_eq!(cyclic_iteration_estimate(&z).unwrap(), 0);
        assert_eq!(randomized_expected_iterations(&z).unwrap(), 0.0);
        let d = inputs(0.1, 5, 1.0).with_start(1.0, 0.2).unwrap();
        assert_eq!(cyclic_iteration_estimate(&d).unwrap(), 250);
        assert_relative_eq!(randomized_expected_iterations(&d).unwrap(), 250.0, max_relative = 1e-12);
        assert!(cyclic_iteration_estimate(&inputs(0.1, 5, 1.0)).is_err());
    }

    #[test]
    fn estimate_c_examples() {
        assert!(matches!(estimate_c(&OracleLog::default()), Err(Error::Estimation(_))));
        let log: OracleLog = [3.7].into_iter().collect();
        assert_eq!(estimate_c(&log).unwrap(), 3.7);
        let zeros: OracleLog = [0.0, 0.0].into_iter().collect();
        assert!(estimate_c(&zeros).is_err());
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(BoundInputs::new(0.0, 1, 1.0).is_err());
        assert!(BoundInputs::new(1.0, 0, 1.0).is_err());
        assert!(BoundInputs::new(1.0, 1, -1.0).is_err());
        assert!(inputs(1.0, 1, 1.0).with_start(-1.0, 1.0).is_err());
    }

    #[test]
    fn report_omits_estimates_without_start() {
        let r = BoundReport::new(inputs(0.01, 10, 1.0), ConstantSource::Empirical, Some(0.1));
        assert!(r.cyclic_n.is_none());
        assert_eq!(r.observed_gap, Some(0.1));
    }
}
