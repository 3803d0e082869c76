//! Graded temporal mesh and uniform spatial grid.

use crate::error::{Error, Result};

/// Time points `t_n = T (n/N)^r`, step sizes `τ_n = t_n - t_{n-1}` and
/// half-time levels `t̄_n = (t_n + t_{n+1})/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalMesh {
    horizon: f64,
    steps: usize,
    grading: f64,
    t: Vec<f64>,
    // tau[0] is unused; tau[n] = t[n] - t[n-1] for n >= 1
    tau: Vec<f64>,
    tbar: Vec<f64>,
}

impl TemporalMesh {
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }

    /// All time points `t_0..=t_N`.
    pub fn points(&self) -> &[f64] {
        &self.t
    }

    #[inline]
    pub fn t(&self, n: usize) -> f64 {
        self.t[n]
    }

    /// Step size `τ_n`, `1 <= n <= N`.
    #[inline]
    pub fn tau(&self, n: usize) -> f64 {
        debug_assert!(n >= 1 && n <= self.steps);
        self.tau[n]
    }

    /// Half-time level `t̄_n`, `0 <= n <= N-1`.
    #[inline]
    pub fn tbar(&self, n: usize) -> f64 {
        self.tbar[n]
    }

    pub fn taus(&self) -> &[f64] {
        &self.tau[1..]
    }

    pub fn midpoints(&self) -> &[f64] {
        &self.tbar
    }
}

pub fn graded_mesh(horizon: f64, steps: usize, grading: f64) -> Result<TemporalMesh> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::param("T", format!("must be positive, got {horizon}")));
    }
    if steps < 2 {
        return Err(Error::param("N", format!("must be at least 2, got {steps}")));
    }
    if !(grading >= 1.0) || !grading.is_finite() {
        return Err(Error::param("r", format!("grading exponent must be >= 1, got {grading}")));
    }
    let nf = steps as f64;
    let mut t: Vec<f64> = (0..=steps)
        .map(|n| horizon * (n as f64 / nf).powf(grading))
        .collect();
    t[steps] = horizon;
    let mut tau = vec![0.0; steps + 1];
    for n in 1..=steps {
        tau[n] = t[n] - t[n - 1];
    }
    let tbar = (0..steps).map(|n| 0.5 * (t[n] + t[n + 1])).collect();
    Ok(TemporalMesh {
        horizon,
        steps,
        grading,
        t,
        tau,
        tbar,
    })
}

/// Interval of kernel arguments `t̄_n - s`, `s <= t_n`, `n >= 1`, that the
/// history part ever evaluates: `[τ_2/2, t̄_{N-1}]`.
pub fn soe_interval(mesh: &TemporalMesh) -> (f64, f64) {
    (0.5 * mesh.tau(2), mesh.tbar(mesh.steps() - 1))
}

/// Uniform grid `x_i = i h`, `h = L/M`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    length: f64,
    cells: usize,
    h: f64,
    x: Vec<f64>,
}

impl SpatialGrid {
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn points(&self) -> &[f64] {
        &self.x
    }

    /// Interior points `x_1..x_{M-1}`.
    pub fn interior(&self) -> &[f64] {
        &self.x[1..self.cells]
    }
}

pub fn uniform_grid(length: f64, cells: usize) -> Result<SpatialGrid> {
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::param("L", format!("must be positive, got {length}")));
    }
    if cells < 2 {
        return Err(Error::param("M", format!("must be at least 2, got {cells}")));
    }
    let h = length / cells as f64;
    let mut x: Vec<f64> = (0..=cells).map(|i| i as f64 * h).collect();
    x[cells] = length;
    Ok(SpatialGrid {
        length,
        cells,
        h,
        x,
    })
}
