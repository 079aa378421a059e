use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use rmcif::exact::{enumerate_optimum, export_lp, DEFAULT_NODE_BUDGET};
use rmcif::format::{parse_instance, write_instance, write_solution};
use rmcif::harness::{generate, load_instances, run_bench, write_solutions, BenchConfig, FlowPolicy, GeneratorSpec};
use rmcif::heuristics::{solve, Problem, SearchParams};
use rmcif::model::{Instance, SolutionRecord, SolverTag, Variant};
use rmcif::objectives::compute_optima;

#[derive(Parser)]
#[command(name = "rmcif", version, about = "Robust minimum-cost integer flow solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a layered instance.
    Generate(GenerateArgs),
    /// Solve one instance with one solver.
    Solve(SolveArgs),
    /// Export the linearized model in LP format.
    ExportLp(ExportArgs),
    /// Run every solver on every instance of a directory.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Number of layers of equal width.
    #[arg(long, default_value_t = 2, conflicts_with = "widths")]
    layers: usize,
    #[arg(long, default_value_t = 8, conflicts_with = "widths")]
    width: usize,
    /// Comma-separated layer widths, overriding --layers/--width.
    #[arg(long, value_delimiter = ',')]
    widths: Option<Vec<usize>>,
    #[arg(long, default_value_t = 30)]
    scenarios: usize,
    #[arg(long, default_value_t = 1.0)]
    density: f64,
    /// Capacity range lo:hi.
    #[arg(long, default_value = "0:99", value_parser = parse_range)]
    cap: (i64, i64),
    /// Cost range lo:hi.
    #[arg(long, default_value = "0:99", value_parser = parse_range)]
    cost: (i64, i64),
    /// Flow value as a fraction of the maximum flow.
    #[arg(long, default_value_t = 0.5, conflicts_with = "flow")]
    flow_frac: f64,
    /// Explicit flow value.
    #[arg(long)]
    flow: Option<i64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    /// Parameter override, repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    /// TOML file of parameters; --param overrides it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Node budget of exact enumeration.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: u64,
}

impl SearchArgs {
    fn params(&self) -> Result<SearchParams> {
        let mut params = match &self.config {
            Some(path) => toml::from_str(&read(path)?).with_context(|| format!("{}", path.display()))?,
            None => SearchParams::default(),
        };
        for p in &self.params {
            let (name, value) = p.split_once('=').with_context(|| format!("expected NAME=VALUE, got `{p}`"))?;
            params.set(name.trim(), value.trim())?;
        }
        params.validate()?;
        Ok(params)
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_parser = parse_variant)]
    variant: Variant,
    #[arg(long, value_parser = parse_solver)]
    solver: SolverTag,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_parser = parse_variant)]
    variant: Variant,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    dir: PathBuf,
    #[arg(long, default_value = "abs,dev", value_delimiter = ',', value_parser = parse_variant)]
    variants: Vec<Variant>,
    /// Comma-separated solver tags, or `all`.
    #[arg(long, default_value = "all")]
    solvers: String,
    /// Seed range lo:hi (inclusive) or a comma-separated list.
    #[arg(long, default_value = "1:1")]
    seeds: String,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long)]
    out: PathBuf,
    /// Directory of per-run solution files; defaults to `<out>.runs`.
    #[arg(long)]
    runs_dir: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected lo:hi")?;
    Ok((lo.trim().parse().map_err(|_| "bad lower bound")?, hi.trim().parse().map_err(|_| "bad upper bound")?))
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    Variant::parse(s).ok_or_else(|| format!("unknown variant `{s}`"))
}

fn parse_solver(s: &str) -> Result<SolverTag, String> {
    SolverTag::parse(s).ok_or_else(|| format!("unknown solver `{s}`"))
}

fn parse_solvers(s: &str) -> Result<Vec<SolverTag>> {
    if s.trim() == "all" {
        return Ok(SolverTag::HEURISTICS.to_vec());
    }
    s.split(',').filter(|t| !t.trim().is_empty()).map(|t| parse_solver(t.trim()).map_err(anyhow::Error::msg)).collect()
}

fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    if let Some((lo, hi)) = s.split_once(':') {
        let lo: u64 = lo.trim().parse().context("bad seed range")?;
        let hi: u64 = hi.trim().parse().context("bad seed range")?;
        if lo > hi {
            bail!("empty seed range {s}");
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',').map(|t| t.trim().parse().with_context(|| format!("bad seed `{t}`"))).collect()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_instance(path: &Path) -> Result<Instance> {
    parse_instance(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_generate(args: GenerateArgs) -> Result<()> {
    let spec = GeneratorSpec {
        layer_widths: args.widths.unwrap_or_else(|| vec![args.width; args.layers]),
        scenario_count: args.scenarios,
        capacity: args.cap,
        cost: args.cost,
        density: args.density,
        flow: args.flow.map_or(FlowPolicy::Fraction(args.flow_frac), FlowPolicy::Explicit),
        seed: args.seed,
    };
    emit(args.output.as_deref(), &write_instance(&generate(&spec)?))
}

fn run_solve(args: SolveArgs) -> Result<()> {
    let instance = read_instance(&args.instance)?;
    let record = if args.solver == SolverTag::Exact {
        let started = Instant::now();
        let e = enumerate_optimum(&instance, args.variant, args.search.node_budget)?;
        SolutionRecord {
            variant: args.variant,
            solver: SolverTag::Exact,
            robust_cost: e.cost,
            flow: e.flow,
            elapsed_seconds: started.elapsed().as_secs_f64(),
            seed: args.seed,
        }
    } else {
        let params = args.search.params()?;
        let problem = Problem::new(instance.clone())?;
        solve(&problem, args.variant, args.solver, &params, args.seed)?.record
    };
    eprintln!(
        "{} {}: robust cost {} in {:.3} s",
        args.variant, args.solver, record.robust_cost, record.elapsed_seconds
    );
    emit(args.output.as_deref(), &write_solution(instance.network(), &record))
}

fn run_export(args: ExportArgs) -> Result<()> {
    let instance = read_instance(&args.instance)?;
    let optima = match args.variant {
        Variant::Absolute => None,
        Variant::Deviation => Some(compute_optima(&instance)?.costs().to_vec()),
    };
    emit(args.output.as_deref(), &export_lp(&instance, args.variant, optima.as_deref())?)
}

fn run_bench_cmd(args: BenchArgs) -> Result<()> {
    let config = BenchConfig {
        variants: args.variants,
        solvers: parse_solvers(&args.solvers)?,
        seeds: parse_seeds(&args.seeds)?,
        params: args.search.params()?,
        node_budget: args.search.node_budget,
    };
    let instances = load_instances(&args.dir)?;
    let report = run_bench(&instances, &config);
    for f in &report.failures {
        let what = f.solver.map_or("exact".to_string(), |s| format!("{s} seed {}", f.seed.unwrap_or(0)));
        eprintln!("warning: {} {} {what}: {}", f.instance, f.variant, f.message);
    }
    let file = fs::File::create(&args.out).with_context(|| format!("writing {}", args.out.display()))?;
    report.write_csv(file)?;
    let runs_dir = args.runs_dir.unwrap_or_else(|| {
        let mut p = args.out.clone().into_os_string();
        p.push(".runs");
        PathBuf::from(p)
    });
    write_solutions(&report, &instances, &runs_dir)?;
    let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.2}"));
    println!("{:<10} {:<6} {:>5} {:>12} {:>10} {:>10}", "variant", "solver", "runs", "mean cost", "error %", "speedup");
    for s in report.summaries() {
        println!(
            "{:<10} {:<6} {:>5} {:>12.2} {:>10} {:>10}",
            s.variant.tag(),
            s.solver.tag(),
            s.runs,
            s.mean_robust_cost,
            fmt(s.mean_rel_error_pct),
            fmt(s.mean_speedup)
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Generate(a) => run_generate(a),
        Command::Solve(a) => run_solve(a),
        Command::ExportLp(a) => run_export(a),
        Command::Bench(a) => run_bench_cmd(a),
    }
}
