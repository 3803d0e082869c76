//! Crank-Nicolson-type time marching with the fast or direct operator.
//!
//! At every step the scheme collocates the equation at `t̄_n` and solves
//!
//! ```text
//!     (-1/(2h²) + 1/(4h)) U^{n+1}_{j+1} + (1/τ + B + 1/h²) U^{n+1}_j + (-1/(2h²) - 1/(4h)) U^{n+1}_{j-1}
//!   = (1/(2h²) - 1/(4h)) U^n_{j+1} + (1/τ - 1/h²) U^n_j + (1/(2h²) + 1/(4h)) U^n_{j-1} - E_j + f(x_j, t̄_n)
//! ```
//!
//! where `B U^{n+1}_j + E_j` is the discrete fractional operator at `t̄_n`.

use std::time::Instant;

use log::warn;

use crate::error::{Error, Result};
use crate::mesh::{graded_mesh, soe_interval, uniform_grid, SpatialGrid, TemporalMesh};
use crate::soe::{build_soe, SoeApprox};
use crate::tempered::{direct_history_weights, step_weights, HistoryState};

/// Retain every level while `(M+1)(N+1)` stays below this many entries.
pub const SNAPSHOT_BUDGET: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Fast,
    Direct,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Fast => "fast",
            Method::Direct => "direct",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Method::Fast),
            "direct" | "l1" => Ok(Method::Direct),
            other => Err(Error::param("method", format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub alpha: f64,
    pub lam: f64,
    /// Final time `T`.
    pub horizon: f64,
    /// Domain length `L`.
    pub length: f64,
    /// Spatial cells `M`.
    pub cells: usize,
    /// Time steps `N`.
    pub steps: usize,
    /// Grading exponent `r`.
    pub grading: f64,
    pub epsilon: f64,
    pub method: Method,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            lam: 1.0,
            horizon: 2.0,
            length: 1.0,
            cells: 64,
            steps: 64,
            grading: 3.0,
            epsilon: 1e-10,
            method: Method::Fast,
        }
    }
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::param("alpha", format!("must lie in (0, 1), got {}", self.alpha)));
        }
        if !(self.lam >= 0.0) || !self.lam.is_finite() {
            return Err(Error::param("lambda", format!("must be nonnegative, got {}", self.lam)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::param("epsilon", format!("must be positive, got {}", self.epsilon)));
        }
        // remaining ranges are checked by the mesh constructors
        graded_mesh(self.horizon, self.steps, self.grading)?;
        uniform_grid(self.length, self.cells)?;
        Ok(())
    }

    /// Largest `τ_{n+1}^(2-2α)`; the stability analysis assumes it stays below 1/3.
    pub fn tau_condition(&self, mesh: &TemporalMesh) -> f64 {
        mesh.taus()
            .iter()
            .map(|t| t.powf(2.0 - 2.0 * self.alpha))
            .fold(0.0, f64::max)
    }
}

/// Initial data and source term of a problem with homogeneous Dirichlet
/// boundaries.
pub trait Problem {
    fn initial(&self, x: f64) -> f64;
    fn forcing(&self, x: f64, t: f64) -> f64;
}

/// Problem given by plain closures.
pub struct RawProblem<P, F> {
    pub phi: P,
    pub f: F,
}

impl<P, F> Problem for RawProblem<P, F>
where
    P: Fn(f64) -> f64,
    F: Fn(f64, f64) -> f64,
{
    fn initial(&self, x: f64) -> f64 {
        (self.phi)(x)
    }

    fn forcing(&self, x: f64, t: f64) -> f64 {
        (self.f)(x, t)
    }
}

/// Tridiagonal system over the interior unknowns; `lower[0]` and
/// `upper[last]` are unused.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `A x`
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let m = self.len();
        (0..m)
            .map(|j| {
                let mut v = self.diag[j] * x[j];
                if j > 0 {
                    v += self.lower[j] * x[j - 1];
                }
                if j + 1 < m {
                    v += self.upper[j] * x[j + 1];
                }
                v
            })
            .collect()
    }
}

/// Build the step system from `U^n` and the explicit operator part `E`.
pub fn assemble_step(
    u_n: &[f64],
    explicit: &[f64],
    f_bar: &[f64],
    b_local: f64,
    tau_np1: f64,
    h: f64,
) -> TridiagonalSystem {
    let m = u_n.len();
    let (ih2, i4h) = (1.0 / (h * h), 0.25 / h);
    let off_up = -0.5 * ih2 + i4h;
    let off_lo = -0.5 * ih2 - i4h;
    let diag = 1.0 / tau_np1 + b_local + ih2;
    let rhs_diag = 1.0 / tau_np1 - ih2;
    let rhs = (0..m)
        .map(|j| {
            let up = if j + 1 < m { u_n[j + 1] } else { 0.0 };
            let lo = if j > 0 { u_n[j - 1] } else { 0.0 };
            -off_up * up + rhs_diag * u_n[j] - off_lo * lo - explicit[j] + f_bar[j]
        })
        .collect();
    let mut lower = vec![off_lo; m];
    let mut upper = vec![off_up; m];
    if m > 0 {
        lower[0] = 0.0;
        upper[m - 1] = 0.0;
    }
    TridiagonalSystem {
        lower,
        diag: vec![diag; m],
        upper,
        rhs,
    }
}

/// Thomas algorithm; fails on a vanishing pivot.
pub fn thomas_solve(sys: &TridiagonalSystem) -> Result<Vec<f64>> {
    let m = sys.len();
    let mut c = vec![0.0; m];
    let mut x = vec![0.0; m];
    let mut prev_c = 0.0;
    let mut prev_x = 0.0;
    for j in 0..m {
        let pivot = sys.diag[j] - sys.lower[j] * prev_c;
        if !(pivot.abs() > f64::EPSILON * sys.diag[j].abs()) || !pivot.is_finite() {
            return Err(Error::PivotBreakdown { row: j, step: None });
        }
        c[j] = sys.upper[j] / pivot;
        x[j] = (sys.rhs[j] - sys.lower[j] * prev_x) / pivot;
        prev_c = c[j];
        prev_x = x[j];
    }
    for j in (0..m.saturating_sub(1)).rev() {
        x[j] -= c[j] * x[j + 1];
    }
    Ok(x)
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub config: SchemeConfig,
    pub mesh: TemporalMesh,
    pub grid: SpatialGrid,
    /// `(n, interior values of U^n)`; boundary values are identically zero.
    pub snapshots: Vec<(usize, Vec<f64>)>,
    pub wall_time: f64,
    pub n_exp_used: usize,
}

impl Trajectory {
    pub fn final_level(&self) -> &[f64] {
        &self.snapshots.last().expect("at least one level").1
    }

    /// `U^n` including the zero boundary values, if retained.
    pub fn full_level(&self, n: usize) -> Option<Vec<f64>> {
        self.snapshots.iter().find(|(k, _)| *k == n).map(|(_, u)| {
            let mut v = Vec::with_capacity(u.len() + 2);
            v.push(0.0);
            v.extend_from_slice(u);
            v.push(0.0);
            v
        })
    }
}

fn snapshot_stride(cells: usize, steps: usize) -> usize {
    let entries = (cells + 1) * (steps + 1);
    if entries <= SNAPSHOT_BUDGET {
        1
    } else {
        entries.div_ceil(SNAPSHOT_BUDGET)
    }
}

/// Build the SOE used by the fast operator for this configuration.
pub fn scheme_soe(config: &SchemeConfig, mesh: &TemporalMesh) -> Result<SoeApprox> {
    let (lo, hi) = soe_interval(mesh);
    build_soe(config.alpha, config.epsilon, lo, hi)
}

/// March the scheme from `t = 0` to `t = T`.
pub fn run<P: Problem + ?Sized>(config: &SchemeConfig, problem: &P) -> Result<Trajectory> {
    config.validate()?;
    let start = Instant::now();
    let mesh = graded_mesh(config.horizon, config.steps, config.grading)?;
    let grid = uniform_grid(config.length, config.cells)?;
    let cond = config.tau_condition(&mesh);
    if cond >= 1.0 / 3.0 {
        warn!(
            "max τ^(2-2α) = {cond:.4} >= 1/3 (α = {}, N = {}); stability bound not guaranteed",
            config.alpha, config.steps
        );
    }

    let (alpha, lam) = (config.alpha, config.lam);
    let x = grid.interior();
    let m = x.len();
    let h = grid.h();
    let n_steps = config.steps;
    let stride = snapshot_stride(config.cells, n_steps);

    let soe = match config.method {
        Method::Fast => Some(scheme_soe(config, &mesh)?),
        Method::Direct => None,
    };
    let n_exp = soe.as_ref().map_or(0, |s| s.n_exp());
    let mut hist = HistoryState::new(m, n_exp);

    let u0: Vec<f64> = x.iter().map(|&xi| problem.initial(xi)).collect();
    // the direct operator needs every level
    let mut levels: Vec<Vec<f64>> = vec![u0.clone()];
    let mut prev = u0.clone();
    let mut cur = u0.clone();
    let mut snapshots = vec![(0, u0.clone())];

    let mut explicit = vec![0.0; m];
    let mut sums = vec![0.0; m];
    let mut f_bar = vec![0.0; m];
    let inv_gamma_1ma = 1.0 / crate::gamma::gamma_fn(1.0 - alpha)?;

    for n in 0..n_steps {
        let tbar = mesh.tbar(n);
        for (f, &xi) in f_bar.iter_mut().zip(x) {
            *f = problem.forcing(xi, tbar);
        }
        let b_local = match &soe {
            Some(soe) => {
                let w = step_weights(&mesh, soe, lam, alpha, n)?;
                if n >= 1 {
                    hist.advance(&cur, &prev, &w)?;
                    hist.weighted_sums(soe.weights(), &mut sums);
                } else {
                    sums.iter_mut().for_each(|s| *s = 0.0);
                }
                for j in 0..m {
                    explicit[j] = w.c_expl * cur[j] - w.inv_gamma_1ma * (alpha * sums[j] + w.bndry * u0[j]);
                }
                w.b_local
            }
            None => {
                let tau = mesh.tau(n + 1);
                let b_local = tau.powf(-alpha) / (2f64.powf(1.0 - alpha) * crate::gamma::gamma_fn(2.0 - alpha)?);
                let c_expl = (1.0 - 2.0 * alpha * (-0.5 * lam * tau).exp()) * b_local;
                let bndry = (-lam * tbar).exp() * tbar.powf(-alpha);
                let weights = direct_history_weights(&mesh, lam, alpha, n);
                sums.iter_mut().for_each(|s| *s = 0.0);
                for (c, level) in weights.iter().zip(&levels) {
                    for (s, u) in sums.iter_mut().zip(level) {
                        *s += c * u;
                    }
                }
                for j in 0..m {
                    explicit[j] = c_expl * cur[j] - inv_gamma_1ma * (sums[j] + bndry * u0[j]);
                }
                b_local
            }
        };

        let sys = assemble_step(&cur, &explicit, &f_bar, b_local, mesh.tau(n + 1), h);
        let next = thomas_solve(&sys).map_err(|e| match e {
            Error::PivotBreakdown { row, .. } => Error::PivotBreakdown { row, step: Some(n + 1) },
            other => other,
        })?;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { step: n + 1 });
        }
        if (n + 1) % stride == 0 || n + 1 == n_steps {
            snapshots.push((n + 1, next.clone()));
        }
        if config.method == Method::Direct {
            levels.push(next.clone());
        }
        prev = std::mem::replace(&mut cur, next);
    }

    Ok(Trajectory {
        config: *config,
        mesh,
        grid,
        snapshots,
        wall_time: start.elapsed().as_secs_f64(),
        n_exp_used: n_exp,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub max_ratio: f64,
}

/// Largest `‖U^n_a - U^n_b‖ / ‖U^0_a - U^0_b‖` (discrete L²) for two initial
/// data under the same source term.
pub fn stability_probe<A, B, F>(config: &SchemeConfig, phi_a: A, phi_b: B, f: F) -> Result<StabilityReport>
where
    A: Fn(f64) -> f64,
    B: Fn(f64) -> f64,
    F: Fn(f64, f64) -> f64 + Copy,
{
    let ta = run(config, &RawProblem { phi: phi_a, f })?;
    let tb = run(config, &RawProblem { phi: phi_b, f })?;
    let h = ta.grid.h();
    let diff_norm = |a: &[f64], b: &[f64]| {
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        crate::problems::l2_norm(&d, h)
    };
    let base = diff_norm(&ta.snapshots[0].1, &tb.snapshots[0].1);
    if !(base > 0.0) {
        return Err(Error::param("phi_b", "initial data must differ"));
    }
    let max_ratio = ta
        .snapshots
        .iter()
        .zip(&tb.snapshots)
        .map(|((_, a), (_, b))| diff_norm(a, b) / base)
        .fold(0.0, f64::max);
    Ok(StabilityReport { max_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_system() {
        let sys = TridiagonalSystem {
            lower: vec![0.0; 4],
            diag: vec![1.0; 4],
            upper: vec![0.0; 4],
            rhs: vec![1.0, -2.0, 3.5, 0.25],
        };
        assert_eq!(thomas_solve(&sys).unwrap(), sys.rhs);
    }

    #[test]
    fn thomas_matches_dense_elimination() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let m = 5;
            let lower: Vec<f64> = (0..m).map(|j| if j == 0 { 0.0 } else { rng.gen_range(-1.0..1.0) }).collect();
            let upper: Vec<f64> = (0..m).map(|j| if j == m - 1 { 0.0 } else { rng.gen_range(-1.0..1.0) }).collect();
            let diag: Vec<f64> = (0..m).map(|j| 2.5 + lower[j].abs() + upper[j].abs()).collect();
            let rhs: Vec<f64> = (0..m).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let sys = TridiagonalSystem { lower, diag, upper, rhs };
            let x = thomas_solve(&sys).unwrap();

            let mut a = nalgebra::DMatrix::<f64>::zeros(m, m);
            for j in 0..m {
                a[(j, j)] = sys.diag[j];
                if j > 0 {
                    a[(j, j - 1)] = sys.lower[j];
                }
                if j + 1 < m {
                    a[(j, j + 1)] = sys.upper[j];
                }
            }
            let dense = a.lu().solve(&nalgebra::DVector::from_vec(sys.rhs.clone())).unwrap();
            for j in 0..m {
                assert!((x[j] - dense[j]).abs() <= 1e-12 * (1.0 + dense[j].abs()));
            }
        }
    }

    #[test]
    fn pivot_breakdown_reported() {
        let sys = TridiagonalSystem {
            lower: vec![0.0, 1.0],
            diag: vec![1.0, 1.0],
            upper: vec![1.0, 0.0],
            rhs: vec![1.0, 1.0],
        };
        assert!(matches!(thomas_solve(&sys), Err(Error::PivotBreakdown { row: 1, .. })));
    }

    #[test]
    fn zero_data_stays_zero() {
        let cfg = SchemeConfig { cells: 16, steps: 16, ..Default::default() };
        for method in [Method::Fast, Method::Direct] {
            let cfg = SchemeConfig { method, ..cfg };
            let traj = run(&cfg, &RawProblem { phi: |_| 0.0, f: |_, _| 0.0 }).unwrap();
            assert_eq!(traj.snapshots.len(), 17);
            assert!(traj.snapshots.iter().all(|(_, u)| u.iter().all(|&v| v == 0.0)));
        }
    }

    #[test]
    fn zero_history_zero_forcing_gives_zero_rhs() {
        let sys = assemble_step(&[0.0; 5], &[0.0; 5], &[0.0; 5], 2.0, 0.1, 0.1);
        assert!(sys.rhs.iter().all(|&r| r == 0.0));
    }

    #[test]
    fn single_unknown_hand_formula() {
        let (u, e, f, b, tau, h) = (0.7, 0.3, 1.1, 2.0, 0.05, 1.0 / 3.0);
        let sys = assemble_step(&[u], &[e], &[f], b, tau, h);
        let x = thomas_solve(&sys).unwrap()[0];
        let expected = ((1.0 / tau - 1.0 / (h * h)) * u - e + f) / (1.0 / tau + b + 1.0 / (h * h));
        assert!((x - expected).abs() < 1e-14);
    }

    #[test]
    fn step_matrix_eigenvalues_bounded_below() {
        let m_cells = 8;
        let h = 1.0 / m_cells as f64;
        let (b, tau) = (3.0, 0.01);
        let sys = assemble_step(&[0.0; 7], &[0.0; 7], &[0.0; 7], b, tau, h);
        let eta = 1.0 / tau + b;
        let mut a = nalgebra::DMatrix::<f64>::zeros(7, 7);
        for j in 0..7 {
            a[(j, j)] = sys.diag[j];
            if j > 0 {
                a[(j, j - 1)] = sys.lower[j];
            }
            if j + 1 < 7 {
                a[(j, j + 1)] = sys.upper[j];
            }
        }
        let mut eig: Vec<f64> = a.complex_eigenvalues().iter().map(|z| {
            assert!(z.im.abs() < 1e-9);
            z.re
        }).collect();
        eig.sort_by(f64::total_cmp);
        let p = (0.25 / h - 0.5 / (h * h)) * (-0.25 / h - 0.5 / (h * h));
        let mut closed: Vec<f64> = (1..m_cells)
            .map(|k| eta + 1.0 / (h * h) + 2.0 * p.sqrt() * (k as f64 * std::f64::consts::PI / m_cells as f64).cos())
            .collect();
        closed.sort_by(f64::total_cmp);
        for (e, c) in eig.iter().zip(&closed) {
            assert!((e - c).abs() <= 1e-9 * c, "{e} vs {c}");
            assert!(*e >= eta);
        }
    }

    #[test]
    fn step_residual_small() {
        use crate::problems::case;
        let cfg = SchemeConfig { alpha: 0.5, cells: 40, steps: 16, ..Default::default() };
        let c = case(1, 0.5, 1.0, 1.8).unwrap();
        let traj = run(&cfg, &c).unwrap();
        // rebuild the last step's system from the stored levels
        let mesh = &traj.mesh;
        let soe = scheme_soe(&cfg, mesh).unwrap();
        let mut hist = HistoryState::new(39, soe.n_exp());
        let x = traj.grid.interior();
        let u0 = &traj.snapshots[0].1;
        for n in 0..16 {
            let w = step_weights(mesh, &soe, 1.0, 0.5, n).unwrap();
            let cur = &traj.snapshots[n].1;
            if n >= 1 {
                hist.advance(cur, &traj.snapshots[n - 1].1, &w).unwrap();
            }
            let mut sums = vec![0.0; 39];
            if n >= 1 {
                hist.weighted_sums(soe.weights(), &mut sums);
            }
            let explicit: Vec<f64> = (0..39)
                .map(|j| w.c_expl * cur[j] - w.inv_gamma_1ma * (0.5 * sums[j] + w.bndry * u0[j]))
                .collect();
            let f: Vec<f64> = x.iter().map(|&xi| c.forcing(xi, mesh.tbar(n))).collect();
            let sys = assemble_step(cur, &explicit, &f, w.b_local, mesh.tau(n + 1), traj.grid.h());
            let sol = thomas_solve(&sys).unwrap();
            let ax = sys.apply(&sol);
            let res = ax.iter().zip(&sys.rhs).map(|(a, r)| (a - r).abs()).fold(0.0, f64::max);
            let scale = sys.rhs.iter().map(|r| r.abs()).fold(0.0, f64::max);
            assert!(res <= 1e-11 * scale, "n={n}: {res} vs {scale}");
            let next = &traj.snapshots[n + 1].1;
            assert!(sol.iter().zip(next).all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + b.abs())));
        }
    }

    #[test]
    fn snapshot_stride_policy() {
        assert_eq!(snapshot_stride(2000, 64), 1);
        assert!(snapshot_stride(100_000, 1000) > 1);
        let cfg = SchemeConfig { cells: 8, steps: 10, ..Default::default() };
        let traj = run(&cfg, &RawProblem { phi: |x: f64| x * (1.0 - x), f: |_, _| 0.0 }).unwrap();
        assert_eq!(traj.snapshots.last().unwrap().0, 10);
        let full = traj.full_level(10).unwrap();
        assert_eq!(full.len(), 9);
        assert_eq!((full[0], full[8]), (0.0, 0.0));
    }

    #[test]
    fn identical_initial_data_rejected() {
        let cfg = SchemeConfig { cells: 8, steps: 8, ..Default::default() };
        let r = stability_probe(&cfg, |x: f64| x * (1.0 - x), |x: f64| x * (1.0 - x), |_, _| 0.0);
        assert!(r.is_err());
    }

    #[test]
    fn invalid_config_rejected() {
        let bad = [
            SchemeConfig { alpha: 1.0, ..Default::default() },
            SchemeConfig { lam: -1.0, ..Default::default() },
            SchemeConfig { cells: 1, ..Default::default() },
            SchemeConfig { steps: 1, ..Default::default() },
            SchemeConfig { grading: 0.5, ..Default::default() },
        ];
        for cfg in bad {
            assert!(run(&cfg, &RawProblem { phi: |_| 0.0, f: |_, _| 0.0 }).is_err());
        }
    }
}
