//! The run configuration file and how it becomes a problem plus a
//! [`RunConfig`].

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use incrprox::apps::abs1d::build_abs1d;
use incrprox::apps::lasso::{lasso_problem, LassoInstance, LassoRow, SplitMode};
use incrprox::apps::weber::{weber_problem, Anchor, WeberInstance};
use incrprox::apps::PartRole;
use incrprox::engine::{Limits, RowDetail, RunConfig, Variant};
use incrprox::penalty::{FeasibilityProblem, Lipschitz, PenaltyWeights};
use incrprox::schedule::{OrderingKind, StepsizeSchedule};
use incrprox::{ConstraintSet, Point, Problem, SetSpec, ToleranceConfig};
use serde::{Deserialize, Serialize};

use crate::function::ComponentSpec;
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub problem: ProblemSpec,
    pub algorithm: AlgorithmSpec,
    pub limits: Limits,
    #[serde(default)]
    pub report: ReportSpec,
    /// Starting point; the origin when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemSpec {
    Lasso(LassoSpec),
    Weber(WeberSpec),
    Abs1d(Abs1dSpec),
    Feasibility(FeasibilitySpec),
    Custom(CustomSpec),
}

/// Sizes and seed for a generated instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generate {
    pub m: usize,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
}

/// Exactly one of `rows`, `file` and `generate` gives the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LassoSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<LassoRow>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generate: Option<Generate>,
    /// Overrides the file's value when both are present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split_mode: Option<SplitMode>,
}

/// Exactly one of `anchors`, `file` and `generate` gives the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeberSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchors: Option<Vec<Anchor>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generate: Option<Generate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<PartRole>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Abs1dSpec {
    pub b: Vec<f64>,
    #[serde(default)]
    pub role: PartRole,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeasibilitySpec {
    pub sets: Vec<SetSpec>,
    /// Empty for a pure feasibility problem; otherwise one per set.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<ComponentSpec>,
    #[serde(default = "default_feasibility_weights")]
    pub weights: PenaltyWeights,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<f64>,
}

fn default_feasibility_weights() -> PenaltyWeights {
    PenaltyWeights::Common { gamma: 1e3 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomSpec {
    pub dim: usize,
    pub components: Vec<ComponentSpec>,
    #[serde(default = "whole")]
    pub constraint: SetSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimal_value: Option<f64>,
    /// Known bound on subgradient norms, used by the bound report.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

fn whole() -> SetSpec {
    SetSpec::Whole
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSpec {
    pub variant: Variant,
    #[serde(default = "cyclic")]
    pub ordering: OrderingKind,
    #[serde(default)]
    pub seed: u64,
    pub stepsize: StepsizeSchedule,
    /// Momentum coefficient for `grad_momentum`.
    #[serde(default)]
    pub beta: f64,
}

fn cyclic() -> OrderingKind {
    OrderingKind::Cyclic
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Emit {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eval_stride: Option<usize>,
    #[serde(default = "both")]
    pub emit: Vec<Emit>,
    #[serde(default)]
    pub rows: RowDetail,
    #[serde(default)]
    pub timing: bool,
    #[serde(default)]
    pub instrument: bool,
    /// Target accuracy for the iteration estimates in `bounds.json`.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

fn both() -> Vec<Emit> {
    vec![Emit::Csv, Emit::Json]
}

fn default_epsilon() -> f64 {
    1e-2
}

impl Default for ReportSpec {
    fn default() -> Self {
        ReportSpec {
            eval_stride: None,
            emit: both(),
            rows: RowDetail::default(),
            timing: false,
            instrument: false,
            epsilon: default_epsilon(),
        }
    }
}

/// Parses a config, reporting the path of the offending field on error and
/// passing each ignored key to `unknown`.
pub fn parse_config(text: &str, mut unknown: impl FnMut(String)) -> Result<Config, CliError> {
    let mut json = serde_json::Deserializer::from_str(text);
    let mut on_ignored = |path: serde_ignored::Path<'_>| unknown(path.to_string());
    let tracked = serde_ignored::Deserializer::new(&mut json, &mut on_ignored);
    let config: Config = serde_path_to_error::deserialize(tracked).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            CliError::Config(inner.to_string())
        } else {
            CliError::Config(format!("{path}: {inner}"))
        }
    })?;
    json.end().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(config)
}

/// Reads a config file. A `trace.json` written by `run` is accepted too: its
/// embedded `config` is used.
pub fn load_config(path: &Path, unknown: impl FnMut(String)) -> Result<Config, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    match value.get("config") {
        Some(inner) if value.get("problem").is_none() => parse_config(&inner.to_string(), unknown),
        _ => parse_config(&text, unknown),
    }
}

/// What a config builds into.
pub enum Built {
    Plain {
        problem: Problem,
        /// Known bound on subgradient norms, if the problem provides one.
        c: Option<f64>,
    },
    Feasibility {
        problem: FeasibilityProblem,
        weights: PenaltyWeights,
        lipschitz: Option<Lipschitz>,
    },
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn one_source(kind: &str, count: usize) -> Result<(), CliError> {
    if count == 1 {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "problem: {kind} needs exactly one of its data, file and generate fields, got {count}"
        )))
    }
}

impl LassoSpec {
    fn instance(&self, base: &Path) -> Result<LassoInstance, CliError> {
        one_source("lasso", [self.rows.is_some(), self.file.is_some(), self.generate.is_some()].iter().filter(|b| **b).count())?;
        let field = |name: &str, e: incrprox::Error| CliError::Config(format!("problem.{name}: {e}"));
        let mut inst = if let Some(rows) = &self.rows {
            let gamma = self.gamma.ok_or_else(|| CliError::Config("problem.gamma: missing".into()))?;
            LassoInstance::new(rows.clone(), gamma, SplitMode::default()).map_err(|e| field("rows", e))?
        } else if let Some(file) = &self.file {
            read_json::<LassoInstance>(&base.join(file))?
        } else {
            let g = self.generate.expect("one source is present");
            LassoInstance::random(g.m, g.n, self.gamma.unwrap_or(0.1), g.seed).map_err(|e| field("generate", e))?
        };
        if let Some(gamma) = self.gamma {
            inst.gamma = gamma;
        }
        if let Some(mode) = self.split_mode {
            inst.split_mode = mode;
        }
        inst.validate().map_err(|e| field("gamma", e))?;
        Ok(inst)
    }
}

impl WeberSpec {
    fn instance(&self, base: &Path) -> Result<WeberInstance, CliError> {
        one_source("weber", [self.anchors.is_some(), self.file.is_some(), self.generate.is_some()].iter().filter(|b| **b).count())?;
        let field = |name: &str, e: incrprox::Error| CliError::Config(format!("problem.{name}: {e}"));
        let mut inst = if let Some(anchors) = &self.anchors {
            WeberInstance::new(anchors.clone(), PartRole::Prox).map_err(|e| field("anchors", e))?
        } else if let Some(file) = &self.file {
            read_json::<WeberInstance>(&base.join(file))?
        } else {
            let g = self.generate.expect("one source is present");
            WeberInstance::random(g.m, g.n, g.seed).map_err(|e| field("generate", e))?
        };
        if let Some(role) = self.role {
            inst.role = role;
        }
        inst.validate().map_err(|e| field("anchors", e))?;
        Ok(inst)
    }
}

fn config_err(section: &str) -> impl Fn(incrprox::Error) -> CliError + '_ {
    move |e| CliError::Config(format!("{section}: {e}"))
}

impl Config {
    /// The same config with file and generated instances written out inline,
    /// so it replays without the original files.
    pub fn resolved(&self, base: &Path) -> Result<Config, CliError> {
        let mut out = self.clone();
        match &mut out.problem {
            ProblemSpec::Lasso(spec) => {
                let inst = spec.instance(base)?;
                *spec = LassoSpec {
                    rows: Some(inst.rows),
                    file: None,
                    generate: None,
                    gamma: Some(inst.gamma),
                    split_mode: Some(inst.split_mode),
                };
            }
            ProblemSpec::Weber(spec) => {
                let inst = spec.instance(base)?;
                *spec = WeberSpec {
                    anchors: Some(inst.anchors),
                    file: None,
                    generate: None,
                    role: Some(inst.role),
                };
            }
            _ => {}
        }
        Ok(out)
    }

    pub fn run_config(&self) -> Result<RunConfig, CliError> {
        self.algorithm.stepsize.validate().map_err(config_err("algorithm.stepsize"))?;
        let mut rc = RunConfig::new(self.algorithm.variant, self.algorithm.ordering, self.algorithm.stepsize.clone(), self.limits)
            .seed(self.algorithm.seed)
            .beta(self.algorithm.beta)
            .rows(self.report.rows)
            .instrument(self.report.instrument);
        if let Some(s) = self.report.eval_stride {
            if s == 0 {
                return Err(CliError::Config("report.eval_stride: must be positive".into()));
            }
            rc = rc.eval_stride(s);
        }
        rc.timing = self.report.timing;
        if self.limits.max_iters.is_none() && self.limits.max_cycles.is_none() {
            return Err(CliError::Config("limits: need max_iters or max_cycles".into()));
        }
        if !(self.report.epsilon > 0.0 && self.report.epsilon.is_finite()) {
            return Err(CliError::Config(format!("report.epsilon: must be positive, got {}", self.report.epsilon)));
        }
        Ok(rc)
    }

    pub fn x0(&self) -> Result<Option<Point>, CliError> {
        self.x0
            .as_ref()
            .map(|v| Point::new(v.clone()).map_err(config_err("x0")))
            .transpose()
    }

    /// Builds the problem; `base` resolves relative instance paths.
    pub fn build(&self, base: &Path) -> Result<Built, CliError> {
        let tol = self.tolerances.projection;
        let built = match &self.problem {
            ProblemSpec::Lasso(spec) => {
                let inst = spec.instance(base)?;
                Built::Plain {
                    problem: lasso_problem(&inst).map_err(config_err("problem"))?,
                    c: None,
                }
            }
            ProblemSpec::Weber(spec) => {
                let inst = spec.instance(base)?;
                Built::Plain {
                    problem: weber_problem(&inst).map_err(config_err("problem"))?,
                    c: Some(inst.c()),
                }
            }
            ProblemSpec::Abs1d(spec) => {
                let a = build_abs1d(&spec.b, spec.role, spec.interval).map_err(config_err("problem.b"))?;
                Built::Plain {
                    problem: a.problem,
                    c: Some(a.c),
                }
            }
            ProblemSpec::Custom(spec) => {
                let components = spec
                    .components
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c.build(i, tol).map_err(|e| CliError::Config(format!("problem.components[{i}]: {e}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                let set = spec.constraint.build(tol).map_err(config_err("problem.constraint"))?;
                let mut problem = Problem::new(spec.dim, components, set).map_err(config_err("problem"))?;
                if let Some(v) = spec.optimal_value {
                    problem = problem.with_optimal_value(v);
                }
                Built::Plain { problem, c: spec.c }
            }
            ProblemSpec::Feasibility(spec) => {
                let sets = spec
                    .sets
                    .iter()
                    .enumerate()
                    .map(|(i, s)| s.build(tol).map_err(|e| CliError::Config(format!("problem.sets[{i}]: {e}"))))
                    .collect::<Result<Vec<Arc<dyn ConstraintSet>>, _>>()?;
                let dim = sets
                    .iter()
                    .find_map(|s| s.dim())
                    .ok_or_else(|| CliError::Config("problem.sets: need at least one set of known dimension".into()))?;
                let components = spec
                    .components
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c.build(i, tol).map_err(|e| CliError::Config(format!("problem.components[{i}]: {e}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                let problem = FeasibilityProblem::new(dim, components, sets).map_err(config_err("problem"))?;
                Built::Feasibility {
                    problem,
                    weights: spec.weights.clone(),
                    lipschitz: spec.lipschitz.map(Lipschitz::given),
                }
            }
        };
        Ok(match built {
            Built::Plain { problem, c } => Built::Plain {
                problem: problem.with_tolerances(self.tolerances),
                c,
            },
            other => other,
        })
    }
}
