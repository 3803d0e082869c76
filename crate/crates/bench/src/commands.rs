//! The four subcommands as library functions returning plain data, plus
//! their CSV writers.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use tfade::soe::log_grid;
use tfade::{build_soe, certify_soe, max_error, order_table, run, CertReport, Method, Norm, SoeApprox};

use crate::error::{CliError, CliResult};
use crate::spec::{RunSpec, Sweep};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub knob: usize,
    pub error: f64,
    pub order: Option<f64>,
    pub method: Method,
    pub norm: Norm,
}

/// Error table over the swept list for every requested method. Runs are
/// independent and execute in parallel; the row order is fixed.
pub fn convergence(spec: &RunSpec) -> CliResult<Vec<ConvergenceRow>> {
    let sweep = spec.sweep()?;
    let case = spec.manufactured()?;
    let methods = spec.method.methods();
    let jobs: Vec<(Method, usize)> = methods
        .iter()
        .flat_map(|&m| sweep.knobs().iter().map(move |&k| (m, k)))
        .collect();
    let errors: Vec<f64> = jobs
        .par_iter()
        .map(|&(method, knob)| {
            let (steps, cells) = sweep.point(knob);
            let traj = run(&spec.scheme(steps, cells, method), &case)?;
            Ok(max_error(&traj, &case, spec.norm))
        })
        .collect::<CliResult<_>>()?;

    let mut rows = Vec::with_capacity(jobs.len());
    for (chunk, &method) in errors.chunks(sweep.knobs().len()).zip(&methods) {
        let pairs: Vec<(usize, f64)> = sweep.knobs().iter().copied().zip(chunk.iter().copied()).collect();
        for r in order_table(&pairs)? {
            rows.push(ConvergenceRow {
                knob: r.knob,
                error: r.err,
                order: r.order,
                method,
                norm: spec.norm,
            });
        }
    }
    Ok(rows)
}

pub fn write_convergence<W: Write>(spec: &RunSpec, sweep: &Sweep, rows: &[ConvergenceRow], mut out: W) -> CliResult<()> {
    let fixed = match sweep {
        Sweep::Time { cells, .. } => format!("# sweep=N fixed M={cells}"),
        Sweep::Space { steps, .. } => format!("# sweep=M fixed N={steps}"),
    };
    write_comments(&mut out, &[spec.provenance(), fixed])?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["knob", "error", "order", "method", "norm"])?;
    for r in rows {
        w.write_record([
            r.knob.to_string(),
            format!("{:e}", r.error),
            r.order.map_or_else(String::new, |o| format!("{o:.6}")),
            r.method.name().to_owned(),
            r.norm.name().to_owned(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingRow {
    pub steps: usize,
    pub wall_seconds_fast: f64,
    pub wall_seconds_direct: Option<f64>,
    pub n_exp: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub cells: usize,
    pub rows: Vec<TimingRow>,
    pub fast_slope: f64,
    pub direct_slope: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchOptions {
    pub repeats: usize,
    /// Skip the direct method above this many steps.
    pub direct_max_steps: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            repeats: 3,
            direct_max_steps: usize::MAX,
        }
    }
}

pub const DEFAULT_BENCH_CELLS: usize = 64;

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Wall-clock timings over the `N` list. Strictly serial.
pub fn bench(spec: &RunSpec, opts: &BenchOptions) -> CliResult<BenchReport> {
    let steps = spec
        .steps
        .clone()
        .ok_or_else(|| CliError::usage("bench needs --N"))?;
    let (lo, hi) = (steps.iter().min(), steps.iter().max());
    match (lo, hi) {
        (Some(&lo), Some(&hi)) if lo > 0 && hi >= 16 * lo => {}
        _ => return Err(CliError::usage("bench needs an --N list spanning at least four doublings")),
    }
    if opts.repeats == 0 {
        return Err(CliError::usage("repeats must be positive"));
    }
    let cells = spec.single_cells(DEFAULT_BENCH_CELLS)?;
    let problem = spec.problem()?;
    let methods = spec.method.methods();
    let time = |n: usize, method: Method| -> CliResult<(f64, usize)> {
        let mut walls = Vec::with_capacity(opts.repeats);
        let mut n_exp = 0;
        for _ in 0..opts.repeats {
            let start = Instant::now();
            let traj = run(&spec.scheme(n, cells, method), &problem)?;
            walls.push(start.elapsed().as_secs_f64());
            n_exp = traj.n_exp_used;
        }
        Ok((median(walls), n_exp))
    };

    let mut rows = Vec::with_capacity(steps.len());
    for &n in &steps {
        let (wall_seconds_fast, n_exp) = if methods.contains(&Method::Fast) {
            time(n, Method::Fast)?
        } else {
            (f64::NAN, 0)
        };
        let wall_seconds_direct = if methods.contains(&Method::Direct) && n <= opts.direct_max_steps {
            Some(time(n, Method::Direct)?.0)
        } else {
            None
        };
        rows.push(TimingRow {
            steps: n,
            wall_seconds_fast,
            wall_seconds_direct,
            n_exp,
        });
    }
    let fast: Vec<(f64, f64)> = rows.iter().map(|r| (r.steps as f64, r.wall_seconds_fast)).collect();
    let direct: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.wall_seconds_direct.map(|w| (r.steps as f64, w)))
        .collect();
    Ok(BenchReport {
        cells,
        fast_slope: loglog_slope(&fast),
        direct_slope: (direct.len() >= 2).then(|| loglog_slope(&direct)),
        rows,
    })
}

pub fn write_bench<W: Write>(spec: &RunSpec, report: &BenchReport, mut out: W) -> CliResult<()> {
    write_comments(&mut out, &[spec.provenance(), format!("# fixed M={}", report.cells)])?;
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(["N", "wall_seconds_fast", "wall_seconds_direct", "n_exp"])?;
        for r in &report.rows {
            w.write_record([
                r.steps.to_string(),
                format!("{:.6e}", r.wall_seconds_fast),
                r.wall_seconds_direct.map_or_else(String::new, |d| format!("{d:.6e}")),
                r.n_exp.to_string(),
            ])?;
        }
        w.flush().map_err(csv::Error::from)?;
    }
    let direct = report.direct_slope.map_or_else(|| "n/a".to_owned(), |s| format!("{s:.4}"));
    write_comments(
        &mut out,
        &[format!("# loglog slope fast={:.4} direct={direct}", report.fast_slope)],
    )
}

#[derive(Debug, Clone)]
pub struct SoeCheck {
    pub soe: SoeApprox,
    pub report: CertReport,
}

/// Build, certify and report an SOE approximation of `t^(-1-α)`.
pub fn soe_check(alpha: f64, epsilon: f64, t_min: f64, t_max: f64) -> CliResult<SoeCheck> {
    let soe = build_soe(alpha, epsilon, t_min, t_max)?;
    let report = certify_soe(&soe, tfade::soe::CERT_SAMPLES)?;
    Ok(SoeCheck { soe, report })
}

pub fn write_soe_samples<W: Write>(check: &SoeCheck, samples: usize, mut out: W) -> CliResult<()> {
    let soe = &check.soe;
    write_comments(
        &mut out,
        &[format!(
            "# alpha={} eps={:e} t_min={:e} t_max={:e} n_exp={}",
            soe.alpha(),
            soe.epsilon(),
            soe.t_min(),
            soe.t_max(),
            soe.n_exp()
        )],
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "kernel", "soe", "rel_err"])?;
    let beta = 1.0 + soe.alpha();
    for t in log_grid(soe.t_min(), soe.t_max(), samples.max(2)) {
        let k = t.powf(-beta);
        let s = soe.eval_unchecked(t);
        w.write_record([
            format!("{t:e}"),
            format!("{k:e}"),
            format!("{s:e}"),
            format!("{:e}", (k - s).abs() / k),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionRow {
    pub x: f64,
    pub t: f64,
    pub u: f64,
    pub exact: f64,
    pub abs_err: f64,
}

#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub levels: Vec<usize>,
    pub rows: Vec<SolutionRow>,
    /// Discrete L² error at `t = T`.
    pub final_l2_error: f64,
    pub n_exp: usize,
}

pub const DEFAULT_SOLVE_SIZE: usize = 64;

/// Levels `0, N/4, N/2, 3N/4, N`.
pub fn default_levels(steps: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..=4).map(|k| k * steps / 4).collect();
    v.dedup();
    v
}

/// March one configuration and tabulate the solution at the given levels,
/// boundary points included.
pub fn solve(spec: &RunSpec, levels: Option<&[usize]>) -> CliResult<SolveOutput> {
    let steps = spec.single_steps(DEFAULT_SOLVE_SIZE)?;
    let cells = spec.single_cells(DEFAULT_SOLVE_SIZE)?;
    let method = match spec.method.methods().as_slice() {
        [m] => *m,
        _ => return Err(CliError::usage("solve runs one method; pick fast or direct")),
    };
    let problem = spec.problem()?;
    let traj = run(&spec.scheme(steps, cells, method), &problem)?;
    let levels = levels.map_or_else(|| default_levels(steps), <[usize]>::to_vec);

    let x = traj.grid.points();
    let mut rows = Vec::new();
    for &n in &levels {
        let u = traj
            .snapshots
            .iter()
            .find(|(k, _)| *k == n)
            .map(|(_, u)| u)
            .ok_or_else(|| CliError::usage(format!("level {n} is not available (N = {steps})")))?;
        let t = traj.mesh.t(n);
        let last = x.len() - 1;
        for (j, &xj) in x.iter().enumerate() {
            let uj = if j == 0 || j == last { 0.0 } else { u[j - 1] };
            let ex = if j == 0 || j == last { 0.0 } else { problem.exact(xj, t) };
            rows.push(SolutionRow {
                x: xj,
                t,
                u: uj,
                exact: ex,
                abs_err: (uj - ex).abs(),
            });
        }
    }
    let h = traj.grid.h();
    let t_end = traj.mesh.t(steps);
    let diff: Vec<f64> = traj
        .grid
        .interior()
        .iter()
        .zip(traj.final_level())
        .map(|(&xi, &ui)| ui - problem.exact(xi, t_end))
        .collect();
    Ok(SolveOutput {
        levels,
        rows,
        final_l2_error: tfade::l2_norm(&diff, h),
        n_exp: traj.n_exp_used,
    })
}

pub fn write_solution<W: Write>(spec: &RunSpec, output: &SolveOutput, mut out: W) -> CliResult<()> {
    write_comments(&mut out, &[spec.provenance()])?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "t", "U", "exact", "abs_err"])?;
    for r in &output.rows {
        w.write_record([
            format!("{:e}", r.x),
            format!("{:e}", r.t),
            format!("{:e}", r.u),
            format!("{:e}", r.exact),
            format!("{:e}", r.abs_err),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn write_comments<W: Write>(out: &mut W, lines: &[String]) -> CliResult<()> {
    for l in lines {
        writeln!(out, "{l}").map_err(|e| CliError::Csv(e.into()))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_exact_power() {
        let pts: Vec<(f64, f64)> = [1.0, 2.0, 4.0, 8.0].iter().map(|&x: &f64| (x, 3.0 * x.powf(1.7))).collect();
        assert!((loglog_slope(&pts) - 1.7).abs() < 1e-12);
    }

    #[test]
    fn median_of_three() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0]), 2.5);
    }

    #[test]
    fn levels_cover_ends() {
        assert_eq!(default_levels(64), vec![0, 16, 32, 48, 64]);
        assert_eq!(default_levels(2), vec![0, 1, 2]);
    }
}
