use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use cavity_core::coloring::{node_warnings, warning_histogram, wp_fixed_point, WarningInit};
use cavity_core::decimate::{decimate_solve, DecimationOutcome, DecimationParams};
use cavity_core::graph::{generate, DegreeModel, Graph};
use cavity_core::io::{parse_coloring, parse_edge_list, parse_grid, write_coloring, write_edge_list};
use cavity_core::matching::{ensemble_average, CostDistribution};
use cavity_core::population::{threshold_scan, ComplexityParams, ScanParams};
use cavity_core::survey::{bias_histogram, marginals, sp_fixed_point, SpParams};
use cavity_core::{BetheError, ColoringError, GraphError, MatchingError, ParseError, SurveyError};

use crate::manifest::{versions, RunManifest};
use crate::{
    resolve_seed, BetheArgs, CliError, ColorArgs, Command, DistArg, GraphGenArgs, MatchingArgs, ModelArg, ScanArgs,
    SpArgs, WpArgs, WpInitArg,
};

macro_rules! usage_on_invalid {
    ($($ty:ident),*) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                match e {
                    $ty::InvalidParameter(_) => CliError::Usage(e.to_string()),
                    _ => CliError::Runtime(e.to_string()),
                }
            }
        }
    )*};
}

usage_on_invalid!(GraphError, BetheError, MatchingError, ColoringError, SurveyError);

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

/// Outcome of a subcommand body, finished into a manifest by [`run`].
struct Finished {
    parameters: Value,
    seeds: Vec<u64>,
    results: Option<Value>,
    extra_outputs: Vec<std::path::PathBuf>,
    /// Set when the run wrote its report but counts as a failure.
    failure: Option<String>,
}

impl Finished {
    fn new(args: &impl Serialize, seeds: Vec<u64>) -> Self {
        Self {
            parameters: serde_json::to_value(args).expect("arguments serialize"),
            seeds,
            results: None,
            extra_outputs: Vec::new(),
            failure: None,
        }
    }
}

pub fn run(command: Command) -> Result<(), CliError> {
    let start = Instant::now();
    let (name, output, finished) = match command {
        Command::GraphGen(a) => ("graph-gen", a.output.clone(), graph_gen(&a)?),
        Command::Bethe(a) => ("bethe", a.output.clone(), bethe(&a)?),
        Command::MatchingEnsemble(a) => ("matching-ensemble", a.output.clone(), matching_ensemble(&a)?),
        Command::WpRun(a) => ("wp-run", a.output.clone(), wp_run(&a)?),
        Command::SpRun(a) => ("sp-run", a.output.clone(), sp_run(&a)?),
        Command::Color(a) => ("color", a.output.clone(), color(&a)?),
        Command::ComplexityScan(a) => ("complexity-scan", a.output.clone(), complexity_scan(&a)?),
    };
    let mut outputs = vec![output.clone()];
    outputs.extend(finished.extra_outputs);
    let manifest = RunManifest {
        command: name.to_string(),
        parameters: finished.parameters,
        seeds: finished.seeds,
        versions: versions(),
        wall_time: start.elapsed().as_secs_f64(),
        results: finished.results,
        outputs,
    };
    manifest.write_beside(&output)?;
    match finished.failure {
        Some(msg) => Err(CliError::Domain(msg)),
        None => Ok(()),
    }
}

fn write(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    text.push('\n');
    write(path, text.as_bytes())
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?;
    write(path, &bytes)
}

fn read_graph(path: &Path) -> Result<Graph, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_edge_list(&text).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn graph_gen(a: &GraphGenArgs) -> Result<Finished, CliError> {
    let seed = resolve_seed(a.seed);
    let model = match a.model {
        ModelArg::PoissonM => DegreeModel::PoissonFixedM { alpha: a.z / 2.0 },
        ModelArg::Gnp => DegreeModel::Gnp { z: a.z },
        ModelArg::Regular => {
            if a.z.fract() != 0.0 || a.z < 0.0 {
                return Err(CliError::Usage(format!("regular graphs need an integer degree, got {}", a.z)));
            }
            DegreeModel::Regular { z: a.z as usize }
        }
    };
    let g = generate(model, a.n, seed)?;
    write(&a.output, write_edge_list(&g).as_bytes())?;
    let mut f = Finished::new(a, vec![seed]);
    f.results = Some(json!({ "n_nodes": g.n_nodes(), "n_edges": g.n_edges(), "mean_degree": g.mean_degree() }));
    Ok(f)
}

fn bethe(a: &BetheArgs) -> Result<Finished, CliError> {
    let grid = parse_grid(&a.beta_j_grid).map_err(|e| CliError::Usage(format!("--betaJ-grid: {e}")))?;
    let rows = cavity_core::bethe::sweep(a.z, &grid, a.tol)?;
    write_csv(&a.output, &rows)?;
    Ok(Finished::new(a, Vec::new()))
}

#[derive(Serialize)]
struct MatchingRow {
    n: usize,
    samples: usize,
    mean: f64,
    stderr: f64,
    target: f64,
    z_score: f64,
}

fn matching_ensemble(a: &MatchingArgs) -> Result<Finished, CliError> {
    let seed = resolve_seed(a.seed);
    let dist = match a.dist {
        DistArg::Exponential => CostDistribution::Exponential,
        DistArg::UniformLinear => CostDistribution::UniformLinear { a: a.a },
    };
    let rows = a
        .n
        .iter()
        .map(|&n| {
            let s = ensemble_average(n, dist, a.samples, seed)?;
            Ok(MatchingRow {
                n,
                samples: s.samples,
                mean: s.mean_cost,
                stderr: s.std_error,
                target: s.target(),
                z_score: s.z_score(),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    write_csv(&a.output, &rows)?;
    Ok(Finished::new(a, vec![seed]))
}

fn histogram_json(hist: &[usize]) -> Value {
    let q = hist.len() - 2;
    json!({ "white": hist[0], "colors": &hist[1..=q], "contradiction": hist[q + 1] })
}

fn wp_run(a: &WpArgs) -> Result<Finished, CliError> {
    let seed = resolve_seed(a.seed);
    let g = read_graph(&a.graph)?;
    let init = match (a.init, &a.coloring) {
        (WpInitArg::Random, None) => WarningInit::Random(seed),
        (WpInitArg::Coloring, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            WarningInit::FromColoring(parse_coloring(&text, g.n_nodes(), a.q)?)
        }
        (WpInitArg::Random, Some(_)) => return Err(CliError::Usage("--coloring needs --init coloring".into())),
        (WpInitArg::Coloring, None) => return Err(CliError::Usage("--init coloring needs --coloring FILE".into())),
    };
    // The order seed is decorrelated from the one drawing the initial messages.
    let order_seed = seed ^ 0x9e37_79b9_7f4a_7c15;
    let run = wp_fixed_point(&g, a.q, &init, a.max_sweeps, order_seed)?;
    let hist = warning_histogram(&node_warnings(&g, &run.state), a.q);
    let report = json!({
        "status": run.status,
        "sweeps": run.sweeps,
        "histogram": histogram_json(&hist),
        "transitions": run.transitions,
    });
    write_json(&a.output, &report)?;
    let mut f = Finished::new(a, vec![seed, order_seed]);
    f.results = Some(json!({ "status": run.status }));
    Ok(f)
}

fn sp_run(a: &SpArgs) -> Result<Finished, CliError> {
    let seed = resolve_seed(a.seed);
    if a.bins == 0 {
        return Err(CliError::Usage("--bins must be >= 1".into()));
    }
    let g = read_graph(&a.graph)?;
    let params = SpParams { damping: a.damping, tol: a.tol, max_sweeps: a.max_sweeps };
    let run = sp_fixed_point(&g, a.q, seed, &params)?;
    let m = marginals(&g, &run.state);
    let report = json!({
        "status": run.status,
        "sweeps": run.sweeps,
        "max_bias": run.max_bias,
        "bias_histogram": bias_histogram(&m, a.bins),
        "contradictory_nodes": m.contradictory,
    });
    write_json(&a.output, &report)?;
    let mut f = Finished::new(a, vec![seed]);
    f.results = Some(json!({ "status": run.status, "max_bias": run.max_bias }));
    Ok(f)
}

fn color(a: &ColorArgs) -> Result<Finished, CliError> {
    let seed = resolve_seed(a.seed);
    let g = read_graph(&a.graph)?;
    let params = DecimationParams { local_search_factor: a.local_search_factor, ..DecimationParams::default() };
    let outcome = decimate_solve(&g, a.q, seed, &params)?;
    let mut f = Finished::new(a, vec![seed]);
    match outcome {
        DecimationOutcome::Colored { coloring, stats } => {
            write_json(&a.output, &json!({ "status": "colored", "stats": stats, "coloring": coloring.colors }))?;
            if let Some(path) = &a.coloring_out {
                write(path, write_coloring(&coloring).as_bytes())?;
                f.extra_outputs.push(path.clone());
            }
            f.results = Some(json!({ "status": "colored" }));
        }
        DecimationOutcome::Failed(report) => {
            write_json(&a.output, &json!({ "status": "failed", "failure": report }))?;
            f.results = Some(json!({ "status": "failed", "stage": report.stage }));
            f.failure = Some(format!("no {}-coloring found: {}", a.q, report.message));
        }
    }
    Ok(f)
}

#[derive(Serialize)]
struct ScanRow {
    z: f64,
    sigma: f64,
    stderr: f64,
    nontrivial: bool,
    reject_frac: f64,
}

fn complexity_scan(a: &ScanArgs) -> Result<Finished, CliError> {
    let seed = resolve_seed(a.seed);
    let grid = parse_grid(&format!("{}:{}:{}", a.z_min, a.z_max, a.step)).map_err(|e| CliError::Usage(e.to_string()))?;
    let params = ScanParams {
        complexity: ComplexityParams {
            population: a.population,
            burn_in: a.sweeps,
            samples: a.samples,
            ..ComplexityParams::default()
        },
        onset_bisections: a.bisections,
    };
    let (curve, thresholds) = threshold_scan(a.q, &grid, &params, seed)?;
    let rows: Vec<ScanRow> = curve
        .points
        .iter()
        .map(|p| ScanRow { z: p.z, sigma: p.sigma, stderr: p.stderr, nontrivial: p.nontrivial, reject_frac: p.reject_frac })
        .collect();
    write_csv(&a.output, &rows)?;
    let mut f = Finished::new(a, vec![seed]);
    f.results = Some(json!({ "thresholds": thresholds, "complexity": params.complexity }));
    Ok(f)
}
