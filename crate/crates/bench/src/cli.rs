//! Command-line front end.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::commands::{
    bench, convergence, soe_check, solve, write_bench, write_convergence, write_soe_samples, write_solution,
    BenchOptions,
};
use crate::error::{CliError, CliResult};
use crate::spec::{MethodChoice, NormChoice, RunSpec, Settings};

#[derive(Debug, Parser)]
#[command(name = "tfade", version, about = "Graded-mesh SOE solver for the tempered fractional advection-dispersion equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// March one configuration and write the solution at selected levels.
    Solve {
        #[command(flatten)]
        run: RunArgs,
        /// Time levels to write (default 0, N/4, N/2, 3N/4, N).
        #[arg(long, value_parser = parse_list)]
        levels: Option<List>,
    },
    /// Observed orders over an N or M sweep.
    Convergence {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Wall-clock scaling in N.
    Bench {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        /// Time the direct method only up to this N.
        #[arg(long = "direct-max-N")]
        direct_max_steps: Option<usize>,
    },
    /// Build and certify the exponential sum for t^(-1-α).
    SoeCheck {
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 1e-10)]
        eps: f64,
        #[arg(long, default_value_t = 1e-4)]
        t_min: f64,
        #[arg(long, default_value_t = 2.0)]
        t_max: f64,
        /// Rows in the sample CSV.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Comma-separated list of positive integers; may be empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct List(pub Vec<usize>);

fn parse_list(s: &str) -> Result<List, String> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<usize>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<_, _>>()
        .map(List)
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// TOML file with any of the keys below; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub case: Option<u32>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Mesh grading exponent (default 3).
    #[arg(long)]
    pub r: Option<f64>,
    /// SOE relative tolerance (default 1e-10).
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, value_enum)]
    pub method: Option<MethodChoice>,
    /// Time steps, comma list.
    #[arg(long = "N", value_parser = parse_list)]
    pub steps: Option<List>,
    /// Spatial cells, comma list.
    #[arg(long = "M", value_parser = parse_list)]
    pub cells: Option<List>,
    /// Final time (default 2).
    #[arg(long = "T")]
    pub horizon: Option<f64>,
    /// Domain length (default 1).
    #[arg(long = "L")]
    pub length: Option<f64>,
    #[arg(long, value_enum)]
    pub norm: Option<NormChoice>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RunArgs {
    fn settings(&self) -> Settings {
        Settings {
            case: self.case,
            alpha: self.alpha,
            lambda: self.lambda,
            delta: self.delta,
            r: self.r,
            eps: self.eps,
            method: self.method,
            steps: self.steps.clone().map(|l| l.0),
            cells: self.cells.clone().map(|l| l.0),
            horizon: self.horizon,
            length: self.length,
            norm: self.norm,
            out: self.out.clone(),
        }
    }

    pub fn resolve(&self, default_method: MethodChoice) -> CliResult<RunSpec> {
        let base = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        Ok(base.overlay(self.settings()).resolve(default_method))
    }
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Run `body` against the output file or standard output.
fn with_output(path: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> CliResult<()>) -> CliResult<()> {
    match path {
        Some(p) => {
            let mut f = create(p)?;
            body(&mut f)?;
            f.flush().map_err(|source| CliError::Io {
                path: p.to_owned(),
                source,
            })
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock)
        }
    }
}

/// Summary lines go to stdout when the CSV goes to a file, otherwise to
/// stderr so that stdout stays pure CSV.
fn note(to_file: bool, msg: &str) {
    if to_file {
        println!("{msg}");
    } else {
        eprintln!("{msg}");
    }
}

pub fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Solve { run, levels } => {
            let spec = run.resolve(MethodChoice::Fast)?;
            let out = solve(&spec, levels.as_ref().map(|l| l.0.as_slice()))?;
            with_output(spec.out.as_deref(), |w| write_solution(&spec, &out, w))?;
            note(spec.out.is_some(), &format!("final L2 error {:e}", out.final_l2_error));
        }
        Command::Convergence { run } => {
            let spec = run.resolve(MethodChoice::Both)?;
            let sweep = spec.sweep()?;
            let rows = convergence(&spec)?;
            with_output(spec.out.as_deref(), |w| write_convergence(&spec, &sweep, &rows, w))?;
        }
        Command::Bench {
            run,
            repeats,
            direct_max_steps,
        } => {
            let spec = run.resolve(MethodChoice::Both)?;
            let opts = BenchOptions {
                repeats,
                direct_max_steps: direct_max_steps.unwrap_or(usize::MAX),
            };
            let report = bench(&spec, &opts)?;
            with_output(spec.out.as_deref(), |w| write_bench(&spec, &report, w))?;
        }
        Command::SoeCheck {
            alpha,
            eps,
            t_min,
            t_max,
            samples,
            out,
        } => {
            let check = soe_check(alpha, eps, t_min, t_max)?;
            println!("n_exp {}", check.soe.n_exp());
            println!("max_rel_error {:e} at t = {:e}", check.report.max_rel_error, check.report.argmax_t);
            if let Some(path) = out {
                let mut f = create(&path)?;
                write_soe_samples(&check, samples, &mut f)?;
                f.flush().map_err(|source| CliError::Io { path, source })?;
            }
        }
    }
    Ok(())
}

/// Parse arguments, run, and map the outcome to an exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
