//! Experiment driver for the `tfade` solver: convergence tables, timing
//! sweeps and SOE certification, all written as CSV.

pub mod cli;
pub mod commands;
pub mod error;
pub mod spec;

pub use commands::{
    bench, convergence, loglog_slope, soe_check, solve, BenchOptions, BenchReport, ConvergenceRow, SoeCheck,
    SolveOutput, TimingRow,
};
pub use error::{CliError, CliResult};
pub use spec::{CaseProblem, MethodChoice, NormChoice, RunSpec, Settings, Sweep};
