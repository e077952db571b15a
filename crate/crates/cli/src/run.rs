//! `run` and `validate`.

use std::fs;
use std::path::{Path, PathBuf};

use incrprox::bounds::{estimate_c, BoundInputs, BoundReport, ConstantSource};
use incrprox::engine::{run, Trace};
use incrprox::penalty::solve_feasibility;
use incrprox::schedule::StepsizeKind;
use incrprox::{Error, Point, Problem};
use serde::Serialize;

use crate::config::{load_config, Built, Config, Emit};
use crate::{io_err, CliError};

/// Loads a config, printing a warning for every unknown key unless `quiet`.
pub fn load_with_warnings(path: &Path, quiet: bool) -> Result<Config, CliError> {
    load_config(path, |key| {
        if !quiet {
            eprintln!("warning: unknown key `{key}` ignored");
        }
    })
}

fn base_dir(config_path: &Path) -> PathBuf {
    config_path.parent().map(Path::to_path_buf).unwrap_or_default()
}

/// Parses and builds everything a run needs without running it.
pub fn cmd_validate(config_path: &Path, quiet: bool) -> Result<(), CliError> {
    let config = load_with_warnings(config_path, quiet)?;
    let base = base_dir(config_path);
    config.run_config()?;
    config.x0()?;
    config.build(&base)?;
    if !quiet {
        println!("{}: ok", config_path.display());
    }
    Ok(())
}

/// Everything `trace.json` holds: the replayable config plus the trace.
#[derive(Debug, Serialize)]
struct TraceFile<'a> {
    config: &'a Config,
    #[serde(flatten)]
    trace: &'a Trace,
}

pub struct RunOutcome {
    pub trace: Trace,
    pub bounds: Option<BoundReport>,
}

pub fn cmd_run(config_path: &Path, out: &Path, quiet: bool) -> Result<RunOutcome, CliError> {
    let config = load_with_warnings(config_path, quiet)?;
    let base = base_dir(config_path);
    let resolved = config.resolved(&base)?;
    let rc = resolved.run_config()?;
    let x0 = resolved.x0()?;
    let built = resolved.build(&base)?;
    fs::create_dir_all(out).map_err(|e| io_err(out, e))?;

    let (result, problem, c) = match built {
        Built::Plain { problem, c } => (run(&problem, &rc, x0.as_ref()), problem, c),
        Built::Feasibility {
            problem,
            weights,
            lipschitz,
        } => match solve_feasibility(&problem, &weights, lipschitz, &rc, x0.as_ref()) {
            Ok(r) => (Ok(r.trace), r.penalized.problem, None),
            Err(e) => {
                let base = problem.base()?;
                (Err(e), base, None)
            }
        },
    };
    let trace = match result {
        Ok(t) => t,
        Err(Error::Aborted { trace, source }) => {
            // keep what was recorded so the failure can be inspected
            write_trace(&resolved, &trace, out)?;
            return Err(CliError::Solver(format!("{source} (partial trace written)")));
        }
        Err(e) => return Err(e.into()),
    };
    write_trace(&resolved, &trace, out)?;

    let bounds = bound_report(&resolved, &problem, &trace, c, x0.as_ref());
    match &bounds {
        Some(b) => write_json(&out.join("bounds.json"), b)?,
        None if !quiet => eprintln!("warning: no positive subgradient bound available, bounds.json not written"),
        None => {}
    }
    if !quiet {
        print_summary(&trace, &problem, bounds.as_ref());
    }
    Ok(RunOutcome { trace, bounds })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}

fn write_trace(config: &Config, trace: &Trace, out: &Path) -> Result<(), CliError> {
    if config.report.emit.contains(&Emit::Csv) {
        let path = out.join("trace.csv");
        let file = fs::File::create(&path).map_err(|e| io_err(&path, e))?;
        trace.write_csv(std::io::BufWriter::new(file)).map_err(|e| io_err(&path, e))?;
    }
    if config.report.emit.contains(&Emit::Json) {
        write_json(&out.join("trace.json"), &TraceFile { config, trace })?;
    }
    Ok(())
}

fn bound_report(config: &Config, problem: &Problem, trace: &Trace, c: Option<f64>, x0: Option<&Point>) -> Option<BoundReport> {
    let (c, source) = match c {
        Some(c) => (c, ConstantSource::Given),
        None => (estimate_c(&trace.oracle_log).ok()?, ConstantSource::Empirical),
    };
    let alpha = config.algorithm.stepsize.max_value();
    let mut inputs = BoundInputs::new(alpha, problem.m(), c).ok()?;
    let start = x0.cloned().unwrap_or_else(|| Point::zeros(problem.dim()));
    if let Some(d) = problem.dist_to_optimum(&problem.constraint().project(&start)) {
        inputs = inputs.with_start(d, config.report.epsilon).ok()?;
    }
    let gap = problem.optimal_value().map(|f| trace.best_value - f);
    let mut report = BoundReport::new(inputs, source, gap);
    if !matches!(config.algorithm.stepsize.kind, StepsizeKind::Constant { .. }) {
        report
            .notes
            .push("the bounds assume a constant stepsize; alpha is the schedule's largest value".into());
    }
    Some(report)
}

fn print_summary(trace: &Trace, problem: &Problem, bounds: Option<&BoundReport>) {
    println!("method      {}", trace.metadata.method);
    println!("iterations  {}", trace.iterations);
    println!("best value  {} (k = {})", trace.best_value, trace.best_k);
    if let Some(f) = problem.optimal_value() {
        println!("gap         {:e}", trace.best_value - f);
    }
    if let Some(b) = bounds {
        println!("bounds      cyclic {:e}, randomized {:e}", b.cyclic_bound, b.randomized_bound);
    }
}
