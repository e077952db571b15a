//! Bundled application problems.

pub mod abs1d;
pub mod lasso;
pub mod weber;

use serde::{Deserialize, Serialize};

/// Whether a term is handled by proximal or by subgradient steps.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartRole {
    Prox,
    #[default]
    Subgradient,
}
