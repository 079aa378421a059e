//! Layered instance generation and batch benchmarking against exact optima.

mod bench;
mod generate;

pub use bench::{
    load_instances, run_bench, solution_file_name, write_solutions, BenchConfig, BenchError, BenchReport, BenchRow,
    ExactResult, Failure, Summary,
};
pub use generate::{generate, FlowPolicy, GenerateError, GeneratorSpec, MAX_ATTEMPTS};
