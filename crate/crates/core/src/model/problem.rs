use std::fmt;
use std::sync::Arc;

use super::function::{ProxFunction, SubgradientFunction, Zero};
use super::point::Point;
use super::set::{ConstraintSet, WholeSpace};
use super::tolerance::ToleranceConfig;
use crate::error::{check_dim, Error, Result};

/// One summand `F_i = f_i + h_i`: `f_i` is handled by proximal steps and
/// `h_i` by subgradient steps.
#[derive(Clone)]
pub struct ComponentPair {
    pub label: String,
    pub prox_part: Arc<dyn ProxFunction>,
    pub subgrad_part: Arc<dyn SubgradientFunction>,
}

impl ComponentPair {
    pub fn new(
        label: impl Into<String>,
        prox_part: Arc<dyn ProxFunction>,
        subgrad_part: Arc<dyn SubgradientFunction>,
    ) -> Self {
        ComponentPair {
            label: label.into(),
            prox_part,
            subgrad_part,
        }
    }

    /// A component with `h_i = 0`.
    pub fn prox(label: impl Into<String>, f: Arc<dyn ProxFunction>) -> Self {
        Self::new(label, f, Arc::new(Zero))
    }

    /// A component with `f_i = 0`.
    pub fn subgrad(label: impl Into<String>, h: Arc<dyn SubgradientFunction>) -> Self {
        Self::new(label, Arc::new(Zero), h)
    }

    pub fn value(&self, x: &Point) -> f64 {
        self.prox_part.value(x) + self.subgrad_part.value(x)
    }
}

impl fmt::Debug for ComponentPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComponentPair")
            .field("label", &self.label)
            .field("prox_part", &self.prox_part)
            .field("subgrad_part", &self.subgrad_part)
            .finish()
    }
}

/// `minimize sum_i F_i(x)` over a closed convex set.
#[derive(Debug, Clone)]
pub struct Problem {
    dim: usize,
    components: Vec<ComponentPair>,
    constraint: Arc<dyn ConstraintSet>,
    optimal_value: Option<f64>,
    optimal_set: Option<Arc<dyn ConstraintSet>>,
    tolerances: ToleranceConfig,
}

impl Problem {
    pub fn new(dim: usize, components: Vec<ComponentPair>, constraint: Arc<dyn ConstraintSet>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("problem dimension must be positive".into()));
        }
        if components.is_empty() {
            return Err(Error::Config("a problem needs at least one component".into()));
        }
        for c in &components {
            for d in [c.prox_part.dim(), c.subgrad_part.dim()].into_iter().flatten() {
                check_dim(dim, d).map_err(|e| Error::Config(format!("component {}: {e}", c.label)))?;
            }
        }
        if let Some(d) = constraint.dim() {
            check_dim(dim, d).map_err(|e| Error::Config(format!("constraint: {e}")))?;
        }
        Ok(Problem {
            dim,
            components,
            constraint,
            optimal_value: None,
            optimal_set: None,
            tolerances: ToleranceConfig::default(),
        })
    }

    pub fn unconstrained(dim: usize, components: Vec<ComponentPair>) -> Result<Self> {
        Self::new(dim, components, Arc::new(WholeSpace))
    }

    pub fn with_optimal_value(mut self, value: f64) -> Self {
        self.optimal_value = Some(value);
        self
    }

    pub fn with_optimal_set(mut self, set: Arc<dyn ConstraintSet>) -> Result<Self> {
        if let Some(d) = set.dim() {
            check_dim(self.dim, d).map_err(|e| Error::Config(format!("optimal set: {e}")))?;
        }
        self.optimal_set = Some(set);
        Ok(self)
    }

    pub fn with_tolerances(mut self, tolerances: ToleranceConfig) -> Self {
        self.tolerances = tolerances;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn m(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[ComponentPair] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &ComponentPair {
        &self.components[i]
    }

    pub fn constraint(&self) -> &Arc<dyn ConstraintSet> {
        &self.constraint
    }

    pub fn optimal_value(&self) -> Option<f64> {
        self.optimal_value
    }

    pub fn optimal_set(&self) -> Option<&Arc<dyn ConstraintSet>> {
        self.optimal_set.as_ref()
    }

    pub fn tolerances(&self) -> &ToleranceConfig {
        &self.tolerances
    }

    /// `F(x) = sum_i (f_i(x) + h_i(x))`.
    pub fn value(&self, x: &Point) -> Result<f64> {
        evaluate_total(self, x)
    }

    /// `dist(x; X*)` when the optimal set is known.
    pub fn dist_to_optimum(&self, x: &Point) -> Option<f64> {
        self.optimal_set.as_ref().map(|s| s.distance(x))
    }
}

/// Exact sum of all component values at `x`.
pub fn evaluate_total(problem: &Problem, x: &Point) -> Result<f64> {
    check_dim(problem.dim, x.dim()).map_err(|e| Error::Config(e.to_string()))?;
    Ok(problem.components.iter().map(|c| c.value(x)).sum())
}
