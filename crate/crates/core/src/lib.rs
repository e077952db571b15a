//! Incremental subgradient-proximal methods for minimizing
//! `sum_i (f_i(x) + h_i(x))` over a closed convex set, where the `f_i` are
//! handled by proximal steps and the `h_i` by subgradient steps.
//!
//! ```
//! use incrprox::apps::abs1d::onedim_abs_benchmark;
//! use incrprox::engine::{run, Limits, RunConfig, Variant};
//! use incrprox::schedule::{OrderingKind, StepsizeSchedule};
//!
//! let bench = onedim_abs_benchmark(&[0.0, 1.0, 2.0]).unwrap();
//! let cfg = RunConfig::new(
//!     Variant::SubgradOnly,
//!     OrderingKind::Cyclic,
//!     StepsizeSchedule::constant(0.01).unwrap(),
//!     Limits::iters(3000),
//! );
//! let trace = run(&bench.problem, &cfg, None).unwrap();
//! assert!(trace.best_value - bench.f_star < 0.2);
//! ```

pub mod apps;
pub mod bounds;
pub mod engine;
pub mod error;
pub mod model;
pub mod penalty;
pub mod prox;
pub mod schedule;

pub use error::{Error, Result};
pub use model::function::{
    check_subgradient, check_subgradient_with, DistanceFunction, HalfSquaredDistance, Linear, MaxPenalty,
    NumericProx, ProxFunction, Rank1Quadratic, ScaledL1, SubgradientFunction, Sum, WeightedNorm, Zero,
};
pub use model::point::Point;
pub use model::problem::{evaluate_total, ComponentPair, Problem};
pub use model::set::{Ball, BoxSet, ConstraintSet, Halfspace, Hyperplane, Intersection, SetSpec, WholeSpace};
pub use model::tolerance::ToleranceConfig;
