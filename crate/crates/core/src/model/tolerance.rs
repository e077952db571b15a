use serde::{Deserialize, Serialize};

/// Every numeric tolerance the library uses, passed explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceConfig {
    /// Accuracy requested from numeric proximal solves.
    pub oracle: f64,
    /// Membership slack for projections and feasibility checks.
    pub projection: f64,
    /// Slack allowed in subgradient-inequality checks.
    pub subgradient_slack: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            oracle: 1e-8,
            projection: 1e-10,
            subgradient_slack: 1e-9,
        }
    }
}
