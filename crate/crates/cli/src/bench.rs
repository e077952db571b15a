//! Benchmark suites: many seeds of a fixed experiment, fanned out over a
//! thread pool and merged in seed order.

use std::path::Path;
use std::sync::Arc;

use incrprox::apps::abs1d::onedim_abs_benchmark;
use incrprox::bounds::{cyclic_error_bound, randomized_error_bound, BoundInputs};
use incrprox::engine::{run, Limits, RowDetail, RunConfig, Variant};
use incrprox::penalty::{solve_feasibility, FeasibilityProblem, PenaltyWeights};
use incrprox::schedule::{OrderingKind, StepsizeSchedule};
use incrprox::{ConstraintSet, Halfspace, Point};
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::Serialize;

use crate::{io_err, CliError};

pub const SUITES: [&str; 2] = ["bounds", "feasibility"];

/// Environment variable capping the number of worker threads.
pub const THREADS_VAR: &str = "INCRPROX_THREADS";

/// Parses `N` (seeds `0..N`) or a comma-separated list.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>, CliError> {
    let bad = |_| CliError::Config(format!("--seeds: expected a count or a comma-separated list, got `{text}`"));
    let seeds = if text.contains(',') {
        text.split(',').map(|s| s.trim().parse::<u64>().map_err(bad)).collect::<Result<Vec<_>, _>>()?
    } else {
        (0..text.trim().parse::<u64>().map_err(bad)?).collect()
    };
    if seeds.is_empty() {
        return Err(CliError::Config("--seeds: need at least one seed".into()));
    }
    Ok(seeds)
}

fn thread_count() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("{THREADS_VAR}: expected a positive integer, got `{v}`"))),
        },
    }
}

#[derive(Debug, Serialize)]
pub struct Criterion {
    pub name: String,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct BenchReport {
    pub suite: String,
    pub seeds: Vec<u64>,
    #[serde(flatten)]
    pub results: serde_json::Value,
    pub criteria: Vec<Criterion>,
    pub pass: bool,
}

pub fn cmd_bench(suite: &str, seeds: &[u64], out: &Path, quiet: bool) -> Result<BenchReport, CliError> {
    if !SUITES.contains(&suite) {
        return Err(CliError::Config(format!("--suite: unknown suite `{suite}`, expected one of {SUITES:?}")));
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count()? {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Solver(e.to_string()))?;
    let (results, criteria) = pool.install(|| match suite {
        "bounds" => bounds_suite(seeds),
        _ => feasibility_suite(seeds),
    })?;
    let pass = criteria.iter().all(|c| c.pass);
    let report = BenchReport {
        suite: suite.to_string(),
        seeds: seeds.to_vec(),
        results,
        criteria,
        pass,
    };
    std::fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
    let path = out.join("bench.json");
    let text = serde_json::to_string_pretty(&report).map_err(|e| io_err(&path, e))?;
    std::fs::write(&path, text + "\n").map_err(|e| io_err(&path, e))?;
    if !quiet {
        for c in &report.criteria {
            println!("{}: {}", c.name, if c.pass { "PASS" } else { "FAIL" });
        }
    }
    Ok(report)
}

const BOUNDS_M: usize = 10;
const BOUNDS_ALPHA: f64 = 0.01;
const BOUNDS_ITERS: usize = 100_000;

#[derive(Debug, Serialize)]
struct SeedGap {
    seed: u64,
    randomized_gap: f64,
}

/// `sum_i |x - i|` for `i = 1..10` under constant stepsize: one cyclic run
/// and one uniformly random run per seed, against both error bounds.
fn bounds_suite(seeds: &[u64]) -> Result<(serde_json::Value, Vec<Criterion>), CliError> {
    let b: Vec<f64> = (1..=BOUNDS_M).map(|i| i as f64).collect();
    let bench = onedim_abs_benchmark(&b)?;
    let inputs = BoundInputs::new(BOUNDS_ALPHA, BOUNDS_M, bench.c)?;
    let config = |ordering| {
        Ok::<_, CliError>(
            RunConfig::new(
                Variant::SubgradOnly,
                ordering,
                StepsizeSchedule::constant(BOUNDS_ALPHA)?,
                Limits::iters(BOUNDS_ITERS),
            )
            .rows(RowDetail::Evaluated),
        )
    };
    let cyclic_gap = run(&bench.problem, &config(OrderingKind::Cyclic)?, None)?.best_value - bench.f_star;
    let random = config(OrderingKind::UniformRandom)?;
    let per_seed = seeds
        .par_iter()
        .map(|&seed| {
            let t = run(&bench.problem, &random.clone().seed(seed), None)?;
            Ok(SeedGap {
                seed,
                randomized_gap: t.best_value - bench.f_star,
            })
        })
        .collect::<Result<Vec<_>, incrprox::Error>>()?;

    let cyclic_bound = cyclic_error_bound(&inputs);
    let randomized_bound = randomized_error_bound(&inputs);
    let ratio = cyclic_bound / randomized_bound;
    let m = BOUNDS_M as f64;
    let criteria = vec![
        Criterion {
            name: "cyclic gap within cyclic bound".into(),
            pass: cyclic_gap <= cyclic_bound,
        },
        Criterion {
            name: "every randomized gap within randomized bound".into(),
            pass: per_seed.iter().all(|s| s.randomized_gap <= randomized_bound),
        },
        Criterion {
            name: "bound ratio equals (1/m + 4) m / 5".into(),
            pass: (ratio - (1.0 / m + 4.0) * m / 5.0).abs() <= 1e-12,
        },
        Criterion {
            name: "every randomized gap below cyclic bound".into(),
            pass: per_seed.iter().all(|s| s.randomized_gap <= cyclic_bound),
        },
    ];
    let results = serde_json::json!({
        "m": BOUNDS_M,
        "alpha": BOUNDS_ALPHA,
        "iterations": BOUNDS_ITERS,
        "cyclic_bound": cyclic_bound,
        "randomized_bound": randomized_bound,
        "bound_ratio": ratio,
        "cyclic_gap": cyclic_gap,
        "per_seed": per_seed,
    });
    Ok((results, criteria))
}

const FEASIBILITY_TOL: f64 = 1e-6;
const FEASIBILITY_STEPS: usize = 10_000;

#[derive(Debug, Serialize)]
struct SeedDistance {
    seed: u64,
    final_max_distance: f64,
}

/// Three random halfspaces in the plane sharing a random point, started from
/// a random point in `[-10, 10]^2` with `f = h = 0`.
fn feasibility_suite(seeds: &[u64]) -> Result<(serde_json::Value, Vec<Criterion>), CliError> {
    let per_seed = seeds
        .par_iter()
        .map(|&seed| {
            let mut rng = SplitMix64::seed_from_u64(seed);
            let anchor = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let sets = (0..3)
                .map(|_| {
                    let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                    let a = [t.cos(), t.sin()];
                    let b = a[0] * anchor[0] + a[1] * anchor[1] + rng.gen_range(0.0..0.5);
                    Ok(Arc::new(Halfspace::new(Point::new(a.to_vec())?, b)?) as Arc<dyn ConstraintSet>)
                })
                .collect::<incrprox::Result<Vec<_>>>()?;
            let x0 = Point::new(vec![rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)])?;
            let problem = FeasibilityProblem::new(2, vec![], sets)?;
            let config = RunConfig::new(
                Variant::SubgradThenProx,
                OrderingKind::Cyclic,
                StepsizeSchedule::constant(1.0)?,
                Limits::iters(FEASIBILITY_STEPS),
            )
            .rows(RowDetail::Evaluated);
            let out = solve_feasibility(&problem, &PenaltyWeights::Common { gamma: 1e3 }, None, &config, Some(&x0))?;
            Ok(SeedDistance {
                seed,
                final_max_distance: out.final_max_distance,
            })
        })
        .collect::<Result<Vec<_>, incrprox::Error>>()?;
    let criteria = vec![Criterion {
        name: format!("every final distance within {FEASIBILITY_TOL:e}"),
        pass: per_seed.iter().all(|s| s.final_max_distance <= FEASIBILITY_TOL),
    }];
    let results = serde_json::json!({
        "steps": FEASIBILITY_STEPS,
        "tolerance": FEASIBILITY_TOL,
        "per_seed": per_seed,
    });
    Ok((results, criteria))
}
