use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rgg_resilience::experiments::{self, recipes, Bisection, CriticalInterval, Seeding, VERSION};
use rgg_resilience::io::{graph_to_json, load_config, load_graph, result_to_json, write_result_csv};
use rgg_resilience::theory::{circuits_surrounding_origin, k0_diagnostic, MAX_ENUMERATION_HALF_LENGTH};
use rgg_resilience::{
    apply_failures, circuit_bound, classify, components, critical_phi, critical_q, crosses_region,
    estimate_lambda_c, estimate_qc, generate_poisson, generate_uniform, run_cascade, run_sweep,
    sample_thresholds, thm1_necessary_nondecreasing, thm1_necessary_nonincreasing,
    thm2_cascade_sufficient_check, thm2_no_cascade_condition, Boundary, ConditionValue, CriticalConstants,
    FailureRule, Region, SeriesControl, SpatialGraph, ThresholdDistribution,
};
use serde_json::{json, Value};

/// Node failures and cascades on random geometric graphs.
#[derive(Parser)]
#[command(name = "rggres", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a random geometric graph and write it as JSON.
    Generate(GenerateArgs),
    /// Apply a degree-dependent failure rule to a graph.
    Fail(FailArgs),
    /// Run a threshold cascade on a graph.
    Cascade(CascadeArgs),
    /// Run an experiment config.
    Sweep(SweepArgs),
    /// Evaluate closed-form conditions.
    #[command(subcommand)]
    Theory(TheoryCommand),
    /// Estimate critical parameters by bisection.
    #[command(subcommand)]
    Estimate(EstimateCommand),
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Args)]
struct Output {
    /// Output format.
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Poisson density (points per unit area).
    #[arg(long, conflicts_with = "nodes", required_unless_present = "nodes")]
    lambda: Option<f64>,
    /// Exact number of uniform points.
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long, default_value_t = 10.0)]
    width: f64,
    /// Defaults to the width.
    #[arg(long)]
    height: Option<f64>,
    /// open-box or torus.
    #[arg(long, default_value = "open-box")]
    boundary: Boundary,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Random seed; drawn from entropy and reported when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the graph here and print a summary to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FailArgs {
    /// Graph JSON file.
    #[arg(long)]
    graph: PathBuf,
    /// Rule: indep:<q>, attack:<phi>, table:<q0>,<q1>,...;tail=<q>
    #[arg(long)]
    rule: FailureRule,
    #[arg(long)]
    seed: Option<u64>,
    /// Include the per-node alive mask.
    #[arg(long)]
    mask: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct CascadeArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Threshold density: uniform or pieces:<start>,<end>,<density>;...
    #[arg(long)]
    distribution: ThresholdDistribution,
    /// Start from this node instead of applying the seeding policy.
    #[arg(long)]
    seed_node: Option<usize>,
    /// random-node or adjacent.
    #[arg(long, default_value = "random-node")]
    seeding: Seeding,
    #[arg(long)]
    seed: Option<u64>,
    /// Include the per-round failure lists.
    #[arg(long)]
    rounds: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SweepArgs {
    /// Experiment config JSON.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's base seed.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SeriesArgs {
    /// Bound on the truncation error of the series.
    #[arg(long, default_value_t = 1e-12)]
    tolerance: f64,
    #[arg(long, default_value_t = 100_000)]
    max_terms: usize,
}

impl SeriesArgs {
    fn control(&self) -> SeriesControl {
        SeriesControl {
            tail_tolerance: self.tolerance,
            max_terms: self.max_terms,
        }
    }
}

#[derive(Subcommand)]
enum TheoryCommand {
    /// Largest independent failure probability that keeps percolation.
    CriticalQ {
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 1.435)]
        lambda_c: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Largest attack threshold that still destroys percolation.
    CriticalPhi {
        #[arg(long)]
        lambda: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Non-percolation test for a non-decreasing failure rule.
    Nondecreasing {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        rule: FailureRule,
        #[command(flatten)]
        series: SeriesArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Non-percolation test for a non-increasing failure rule.
    Nonincreasing {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        rule: FailureRule,
        #[command(flatten)]
        series: SeriesArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Condition under which no cascade can reach infinitely many nodes.
    NoCascade {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        distribution: ThresholdDistribution,
        #[command(flatten)]
        series: SeriesArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Sufficient condition for a giant vulnerable cluster.
    CascadeSufficient {
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        mu1: f64,
        #[arg(long)]
        k0: usize,
        #[arg(long)]
        distribution: ThresholdDistribution,
        #[command(flatten)]
        output: Output,
    },
    /// Node-count cap on the enlarged lattice rectangle.
    K0 {
        #[arg(long)]
        lambda: f64,
        /// Lattice edge length, greater than 4.
        #[arg(long)]
        d: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Count lattice circuits of length 2m around a cell and their bound.
    Circuits {
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long, default_value_t = 50.0)]
    side: f64,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Bisection bracket lower end.
    #[arg(long)]
    lo: Option<f64>,
    /// Bisection bracket upper end.
    #[arg(long)]
    hi: Option<f64>,
    #[arg(long, default_value_t = 0.02)]
    width: f64,
}

#[derive(Subcommand)]
enum EstimateCommand {
    /// Critical density from left-right crossings.
    LambdaC {
        #[command(flatten)]
        args: EstimateArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Critical independent failure probability at a density.
    Qc {
        #[arg(long)]
        lambda: f64,
        #[command(flatten)]
        args: EstimateArgs,
        #[command(flatten)]
        output: Output,
    },
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        eprintln!("seed: {s}");
        s
    })
}

fn emit(output: &Output, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            let written = stdout.write_all(text.as_bytes()).and_then(|()| {
                if text.ends_with('\n') {
                    Ok(())
                } else {
                    stdout.write_all(b"\n")
                }
            });
            match written {
                // A closed pipe (e.g. `| head`) is not an error for the user.
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
                other => Ok(other?),
            }
        }
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// JSON object as pretty JSON, or as a two-line CSV of its scalar fields.
fn emit_record(output: &Output, record: &Value) -> Result<()> {
    match output.format {
        Format::Json => emit(output, &serde_json::to_string_pretty(record)?),
        Format::Csv => {
            let Value::Object(map) = record else {
                bail!("record is not an object");
            };
            let fields: Vec<(&String, &Value)> =
                map.iter().filter(|(_, v)| !v.is_array() && !v.is_object()).collect();
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(fields.iter().map(|(k, _)| k.as_str()))?;
            w.write_record(fields.iter().map(|(_, v)| csv_cell(v)))?;
            emit(output, &String::from_utf8(w.into_inner()?)?)
        }
    }
}

fn load(path: &PathBuf) -> Result<SpatialGraph> {
    let loaded = load_graph(path)?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    Ok(loaded.graph)
}

fn open_box_crossing(graph: &SpatialGraph, mask: &[bool]) -> Result<Value> {
    Ok(if graph.region().boundary == Boundary::OpenBox {
        json!(crosses_region(graph, mask)?)
    } else {
        Value::Null
    })
}

fn generate(args: GenerateArgs) -> Result<()> {
    let seed = resolve_seed(args.seed);
    let region = Region::new(args.width, args.height.unwrap_or(args.width), args.boundary)?;
    let points = match (args.lambda, args.nodes) {
        (Some(lambda), None) => generate_poisson(lambda, region, seed)?,
        (None, Some(n)) => generate_uniform(n, region, seed)?,
        _ => bail!("give exactly one of --lambda and --nodes"),
    };
    let graph = SpatialGraph::build(points, args.radius)?;
    let text = graph_to_json(&graph);
    match args.out {
        Some(path) => {
            fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
            let summary = json!({
                "version": VERSION,
                "seed": seed,
                "out": path.display().to_string(),
                "nodes": graph.len(),
                "edges": graph.edge_count(),
                "mean_degree": graph.mean_degree(),
            });
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn fail(args: FailArgs) -> Result<()> {
    let graph = load(&args.graph)?;
    let seed = resolve_seed(args.seed);
    let outcome = apply_failures(&graph, &args.rule, seed)?;
    let labels = components(&graph, &outcome.alive)?;
    let mut record = json!({
        "version": VERSION,
        "graph": args.graph.display().to_string(),
        "rule": args.rule.to_string(),
        "seed": seed,
        "nodes": graph.len(),
        "operational": outcome.alive_count(),
        "components": labels.component_count(),
        "largest_component": labels.largest_size(),
        "crosses": open_box_crossing(&graph, &outcome.alive)?,
    });
    if args.mask {
        record["alive"] = json!(outcome.alive);
    }
    emit_record(&args.output, &record)
}

fn cascade(args: CascadeArgs) -> Result<()> {
    let graph = load(&args.graph)?;
    if graph.is_empty() {
        bail!("graph has no nodes");
    }
    let seed = resolve_seed(args.seed);
    let thresholds = sample_thresholds(&graph, &args.distribution, seed);
    let start = match args.seed_node {
        Some(s) => Some(s),
        None => experiments::choose_seed_node(&graph, &thresholds, args.seeding, seed)?,
    };
    let Some(start) = start else {
        bail!("seeding policy found no vulnerable cluster to attach to; try --seeding random-node");
    };
    let state = run_cascade(&graph, &thresholds, start)?;
    let (labels, holds_seed) = state.failed_components(&graph)?;
    let classes = classify(&graph, &thresholds)?;
    let count = |f: fn(&rgg_resilience::NodeClass) -> bool| classes.iter().filter(|c| f(c)).count();
    let mut record = json!({
        "version": VERSION,
        "graph": args.graph.display().to_string(),
        "distribution": args.distribution.to_string(),
        "seed": seed,
        "seed_node": start,
        "nodes": graph.len(),
        "vulnerable": count(|c| c.vulnerable),
        "reliable": count(|c| c.reliable),
        "isolated_reliable": count(|c| c.isolated_reliable),
        "failed": state.failed_count(),
        "failed_fraction": state.failed_fraction(),
        "rounds": state.round_count(),
        "largest_failed_component": labels.largest_size(),
        "largest_failed_holds_seed": holds_seed,
        "failed_crosses": open_box_crossing(&graph, &state.failed)?,
    });
    if args.rounds {
        record["round_lists"] = json!(state.rounds);
    }
    emit_record(&args.output, &record)
}

fn sweep(args: SweepArgs) -> Result<()> {
    let mut config = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        config.base_seed = seed;
    }
    let result = run_sweep(&config)?;
    match args.output.format {
        Format::Json => emit(&args.output, &result_to_json(&result)),
        Format::Csv => {
            let mut buf = Vec::new();
            write_result_csv(&result, &mut buf)?;
            emit(&args.output, &String::from_utf8(buf)?)
        }
    }
}

fn warn_if_subcritical(lambda: f64) {
    let lambda_c = CriticalConstants::default().lambda_c;
    if lambda <= lambda_c {
        eprintln!(
            "warning: lambda = {lambda} is at or below the critical density {lambda_c}; \
             the graph does not percolate even without failures"
        );
    }
}

fn condition_record(v: &ConditionValue, extra: Value) -> Value {
    let mut record = json!({
        "version": VERSION,
        "condition": v.condition,
        "lhs": v.lhs,
        "comparison": v.comparison,
        "threshold": v.threshold,
        "holds": v.holds,
        "margin": v.margin(),
    });
    if let (Value::Object(map), Value::Object(more)) = (&mut record, extra) {
        map.extend(more);
    }
    record
}

fn theory(cmd: TheoryCommand) -> Result<()> {
    match cmd {
        TheoryCommand::CriticalQ {
            lambda,
            lambda_c,
            output,
        } => {
            let q = critical_q(lambda, &CriticalConstants { lambda_c })?;
            emit_record(
                &output,
                &json!({"version": VERSION, "lambda": lambda, "lambda_c": lambda_c, "q_c": q}),
            )
        }
        TheoryCommand::CriticalPhi { lambda, output } => {
            let phi = critical_phi(lambda)?;
            emit_record(
                &output,
                &json!({"version": VERSION, "lambda": lambda, "phi": phi.finite(), "unbounded": phi.finite().is_none()}),
            )
        }
        TheoryCommand::Nondecreasing {
            lambda,
            rule,
            series,
            output,
        } => {
            warn_if_subcritical(lambda);
            let v = thm1_necessary_nondecreasing(lambda, &rule, &series.control())?;
            emit_record(
                &output,
                &condition_record(&v, json!({"lambda": lambda, "rule": rule.to_string()})),
            )
        }
        TheoryCommand::Nonincreasing {
            lambda,
            rule,
            series,
            output,
        } => {
            warn_if_subcritical(lambda);
            let v = thm1_necessary_nonincreasing(lambda, &rule, &series.control())?;
            emit_record(
                &output,
                &condition_record(&v, json!({"lambda": lambda, "rule": rule.to_string()})),
            )
        }
        TheoryCommand::NoCascade {
            lambda,
            distribution,
            series,
            output,
        } => {
            warn_if_subcritical(lambda);
            let v = thm2_no_cascade_condition(lambda, &distribution, &series.control())?;
            emit_record(
                &output,
                &condition_record(&v, json!({"lambda": lambda, "distribution": distribution.to_string()})),
            )
        }
        TheoryCommand::CascadeSufficient {
            mu,
            mu1,
            k0,
            distribution,
            output,
        } => {
            let v = thm2_cascade_sufficient_check(mu, mu1, &distribution, k0, &CriticalConstants::default())?;
            emit_record(
                &output,
                &condition_record(
                    &v,
                    json!({"mu": mu, "mu1": mu1, "k0": k0, "distribution": distribution.to_string()}),
                ),
            )
        }
        TheoryCommand::K0 { lambda, d, output } => {
            let k0 = k0_diagnostic(lambda, d)?;
            emit_record(&output, &json!({"version": VERSION, "lambda": lambda, "d": d, "k0": k0}))
        }
        TheoryCommand::Circuits { m, output } => {
            let bound = circuit_bound(m)?;
            let count = if m <= MAX_ENUMERATION_HALF_LENGTH {
                Value::from(circuits_surrounding_origin(2 * m).len())
            } else {
                eprintln!("warning: m = {m} is too large to enumerate; reporting the bound only");
                Value::Null
            };
            emit_record(
                &output,
                &json!({"version": VERSION, "m": m, "length": 2 * m, "count": count, "bound": bound.to_string()}),
            )
        }
    }
}

fn bracket(args: &EstimateArgs, default: Bisection) -> Bisection {
    Bisection {
        lo: args.lo.unwrap_or(default.lo),
        hi: args.hi.unwrap_or(default.hi),
        width: args.width,
    }
}

fn interval_record(output: &Output, iv: &CriticalInterval, mut record: Value) -> Result<()> {
    record["lo"] = json!(iv.lo);
    record["hi"] = json!(iv.hi);
    record["estimate"] = json!(iv.midpoint());
    if matches!(output.format, Format::Json) {
        record["evaluations"] = json!(iv.evaluations);
    }
    emit_record(output, &record)
}

fn estimate(cmd: EstimateCommand) -> Result<()> {
    match cmd {
        EstimateCommand::LambdaC { args, output } => {
            let seed = resolve_seed(args.seed);
            let mut config = recipes::critical_density(args.trials, seed);
            config.region = Region::square(args.side, Boundary::OpenBox)?;
            config.bisection = Some(bracket(&args, Bisection::lambda_default()));
            let iv = estimate_lambda_c(&config)?;
            interval_record(
                &output,
                &iv,
                json!({"version": VERSION, "seed": seed, "side": args.side, "trials": args.trials}),
            )
        }
        EstimateCommand::Qc { lambda, args, output } => {
            let seed = resolve_seed(args.seed);
            let mut config = recipes::critical_failure(args.trials, seed);
            config.region = Region::square(args.side, Boundary::OpenBox)?;
            config.bisection = Some(bracket(&args, Bisection::q_default()));
            let iv = estimate_qc(lambda, &config)?;
            interval_record(
                &output,
                &iv,
                json!({"version": VERSION, "seed": seed, "lambda": lambda, "side": args.side, "trials": args.trials}),
            )
        }
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Generate(args) => generate(args),
        Command::Fail(args) => fail(args),
        Command::Cascade(args) => cascade(args),
        Command::Sweep(args) => sweep(args),
        Command::Theory(cmd) => theory(cmd),
        Command::Estimate(cmd) => estimate(cmd),
    }
}
