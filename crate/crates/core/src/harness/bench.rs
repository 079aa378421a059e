use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use thiserror::Error;

use crate::exact::{enumerate_optimum, DEFAULT_NODE_BUDGET};
use crate::format::{parse_instance, write_solution, ParseError};
use crate::heuristics::{solve, Problem, SearchParams};
use crate::model::{Instance, SolutionRecord, SolverTag, Variant};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub variants: Vec<Variant>,
    pub solvers: Vec<SolverTag>,
    pub seeds: Vec<u64>,
    pub params: SearchParams,
    pub node_budget: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            variants: Variant::ALL.to_vec(),
            solvers: SolverTag::HEURISTICS.to_vec(),
            seeds: vec![1],
            params: SearchParams::default(),
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

/// Exact optimum of one instance under one variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactResult {
    pub cost: i64,
    pub seconds: f64,
}

/// One heuristic run.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub instance: String,
    pub record: SolutionRecord,
    pub exact: Option<ExactResult>,
}

impl BenchRow {
    /// `100 * (approx - exact) / exact`; undefined for a zero optimum.
    pub fn rel_error_pct(&self) -> Option<f64> {
        let exact = self.exact?;
        (exact.cost != 0).then(|| 100.0 * (self.record.robust_cost - exact.cost) as f64 / exact.cost as f64)
    }

    pub fn speedup(&self) -> Option<f64> {
        let exact = self.exact?;
        (self.record.elapsed_seconds > 0.0).then(|| exact.seconds / self.record.elapsed_seconds)
    }
}

/// A run or exact computation that did not produce a result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub instance: String,
    pub variant: Variant,
    /// `None` for the exact computation.
    pub solver: Option<SolverTag>,
    pub seed: Option<u64>,
    pub message: String,
}

/// Per (variant, solver) averages over the rows where they are defined.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub variant: Variant,
    pub solver: SolverTag,
    pub runs: usize,
    pub mean_robust_cost: f64,
    pub mean_seconds: f64,
    pub mean_rel_error_pct: Option<f64>,
    pub mean_speedup: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub failures: Vec<Failure>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

impl BenchReport {
    /// Summaries in variant-major, solver-minor order of first appearance.
    pub fn summaries(&self) -> Vec<Summary> {
        let mut keys: Vec<(Variant, SolverTag)> = Vec::new();
        for row in &self.rows {
            let key = (row.record.variant, row.record.solver);
            if !keys.contains(&key) {
                keys.push(key);
            }
        }
        keys.sort_by_key(|&(v, s)| (Variant::ALL.iter().position(|&x| x == v), s as usize));
        keys.into_iter()
            .map(|(variant, solver)| {
                let rows: Vec<&BenchRow> =
                    self.rows.iter().filter(|r| r.record.variant == variant && r.record.solver == solver).collect();
                Summary {
                    variant,
                    solver,
                    runs: rows.len(),
                    mean_robust_cost: mean(rows.iter().map(|r| r.record.robust_cost as f64)).unwrap_or(0.0),
                    mean_seconds: mean(rows.iter().map(|r| r.record.elapsed_seconds)).unwrap_or(0.0),
                    mean_rel_error_pct: mean(rows.iter().filter_map(|r| r.rel_error_pct())),
                    mean_speedup: mean(rows.iter().filter_map(|r| r.speedup())),
                }
            })
            .collect()
    }

    pub fn summary(&self, variant: Variant, solver: SolverTag) -> Option<Summary> {
        self.summaries().into_iter().find(|s| s.variant == variant && s.solver == solver)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "instance",
            "variant",
            "solver",
            "seed",
            "robust_cost",
            "exact_cost",
            "rel_error_pct",
            "seconds",
            "speedup",
        ])?;
        let opt = |v: Option<f64>, digits: usize| v.map_or(String::new(), |x| format!("{x:.digits$}"));
        for row in &self.rows {
            let r = &row.record;
            w.write_record([
                row.instance.clone(),
                r.variant.tag().to_string(),
                r.solver.tag().to_string(),
                r.seed.to_string(),
                r.robust_cost.to_string(),
                row.exact.map_or(String::new(), |e| e.cost.to_string()),
                opt(row.rel_error_pct(), 4),
                format!("{:.6}", r.elapsed_seconds),
                opt(row.speedup(), 3),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs every (instance, variant, solver, seed) combination. Exact optima
/// come from enumeration within `node_budget`; failures are recorded and
/// the batch continues.
pub fn run_bench(instances: &[(String, Instance)], config: &BenchConfig) -> BenchReport {
    let mut report = BenchReport::default();
    if config.solvers.is_empty() || config.seeds.is_empty() {
        return report;
    }
    for (name, instance) in instances {
        let problem = match Problem::new(instance.clone()) {
            Ok(p) => p,
            Err(e) => {
                for &variant in &config.variants {
                    report.failures.push(Failure {
                        instance: name.clone(),
                        variant,
                        solver: None,
                        seed: None,
                        message: e.to_string(),
                    });
                }
                continue;
            }
        };
        for &variant in &config.variants {
            let started = Instant::now();
            let exact = match enumerate_optimum(instance, variant, config.node_budget) {
                Ok(e) => Some(ExactResult { cost: e.cost, seconds: started.elapsed().as_secs_f64() }),
                Err(e) => {
                    report.failures.push(Failure {
                        instance: name.clone(),
                        variant,
                        solver: None,
                        seed: None,
                        message: e.to_string(),
                    });
                    None
                }
            };
            for &solver in &config.solvers {
                for &seed in &config.seeds {
                    match solve(&problem, variant, solver, &config.params, seed) {
                        Ok(out) => report.rows.push(BenchRow { instance: name.clone(), record: out.record, exact }),
                        Err(e) => report.failures.push(Failure {
                            instance: name.clone(),
                            variant,
                            solver: Some(solver),
                            seed: Some(seed),
                            message: e.to_string(),
                        }),
                    }
                }
            }
        }
    }
    report
}

/// Every `*.rmcif` file in `dir`, sorted by file name, keyed by file stem.
pub fn load_instances(dir: &Path) -> Result<Vec<(String, Instance)>, BenchError> {
    fn io(path: &Path) -> impl Fn(std::io::Error) -> BenchError + '_ {
        move |source| BenchError::Io { path: path.to_path_buf(), source }
    }
    let mut paths: Vec<PathBuf> =
        fs::read_dir(dir).map_err(io(dir))?.map(|e| e.map(|e| e.path())).collect::<Result<_, _>>().map_err(io(dir))?;
    paths.retain(|p| p.extension().is_some_and(|e| e == "rmcif"));
    paths.sort();
    paths
        .into_iter()
        .map(|path| {
            let text = fs::read_to_string(&path).map_err(io(&path))?;
            let instance = parse_instance(&text).map_err(|source| BenchError::Parse { path: path.clone(), source })?;
            let name = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
            Ok((name, instance))
        })
        .collect()
}

/// Solution file name of a row.
pub fn solution_file_name(row: &BenchRow) -> String {
    let r = &row.record;
    format!("{}.{}.{}.{}.sol", row.instance, r.variant.tag(), r.solver.tag(), r.seed)
}

/// Writes one `.sol` file per row into `dir`.
pub fn write_solutions(report: &BenchReport, instances: &[(String, Instance)], dir: &Path) -> Result<(), BenchError> {
    fs::create_dir_all(dir).map_err(|source| BenchError::Io { path: dir.to_path_buf(), source })?;
    for row in &report.rows {
        let (_, instance) = instances.iter().find(|(n, _)| *n == row.instance).expect("row of a loaded instance");
        let path = dir.join(solution_file_name(row));
        fs::write(&path, write_solution(instance.network(), &row.record))
            .map_err(|source| BenchError::Io { path, source })?;
    }
    Ok(())
}
