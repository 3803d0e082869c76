use crate::error::{Error, Result};
use crate::gamma::gamma_fn;
use crate::mesh::TemporalMesh;
use crate::soe::SoeApprox;

/// Below this `z = μτ_n` the moment factors switch to Taylor series.
const TAYLOR_THRESHOLD: f64 = 0.5;
const TAYLOR_TERMS: usize = 24;

/// `(e^(-z) - 1 + z)/z²` and `(1 - e^(-z) - z e^(-z))/z²`.
fn moment_factors(z: f64) -> (f64, f64) {
    if z < TAYLOR_THRESHOLD {
        // Σ_k (-z)^k/(k+2)!  and  Σ_k (-1)^k (k+1) z^k/(k+2)!
        let mut p = 0.5; // 1/(k+2)! at k = 0
        let mut zk = 1.0;
        let (mut f1, mut f2) = (0.0, 0.0);
        for k in 0..TAYLOR_TERMS {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            f1 += sign * zk * p;
            f2 += sign * (k as f64 + 1.0) * zk * p;
            zk *= z;
            p /= k as f64 + 3.0;
        }
        (f1, f2)
    } else {
        let e = (-z).exp();
        let z2 = z * z;
        ((e - 1.0 + z) / z2, (1.0 - e - z * e) / z2)
    }
}

/// Weights `(λ¹, λ²)` of the linear-interpolation moments over
/// `[t_{n-1}, t_n]` for the exponential `e^(-μ(t̄_n - s))`, `μ = lam + s`.
pub fn lambda_weights(lam: f64, s: f64, tau_n: f64, tau_np1: f64) -> (f64, f64) {
    let mu = lam + s;
    let z = mu * tau_n;
    let pre = (-0.5 * mu * tau_np1).exp() * tau_n;
    let (f1, f2) = moment_factors(z);
    (pre * f1, pre * f2)
}

/// Per-step constants of the fast operator at `t̄_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepWeights {
    pub n: usize,
    pub lam1: Vec<f64>,
    pub lam2: Vec<f64>,
    /// `e^(-(λ+s_i)(τ_n+τ_{n+1})/2)`, carries `H` from `t̄_{n-1}` to `t̄_n`.
    pub decay: Vec<f64>,
    /// Implicit coefficient `B = τ_{n+1}^(-α) / (2^(1-α) Γ(2-α))`.
    pub b_local: f64,
    /// `(1 - 2α e^(-λτ_{n+1}/2)) B`, the coefficient of `u^n`.
    pub c_expl: f64,
    /// `e^(-λt̄_n) t̄_n^(-α)`.
    pub bndry: f64,
    pub alpha: f64,
    pub inv_gamma_1ma: f64,
}

pub(crate) fn local_coefficient(mesh: &TemporalMesh, alpha: f64, n: usize) -> Result<f64> {
    let tau = mesh.tau(n + 1);
    Ok(tau.powf(-alpha) / (2f64.powf(1.0 - alpha) * gamma_fn(2.0 - alpha)?))
}

fn check_step(mesh: &TemporalMesh, n: usize) -> Result<()> {
    if n >= mesh.steps() {
        return Err(Error::param("n", format!("step {n} outside 0..{}", mesh.steps())));
    }
    Ok(())
}

pub fn step_weights(
    mesh: &TemporalMesh,
    soe: &SoeApprox,
    lam: f64,
    alpha: f64,
    n: usize,
) -> Result<StepWeights> {
    check_step(mesh, n)?;
    let tau_np1 = mesh.tau(n + 1);
    let b_local = local_coefficient(mesh, alpha, n)?;
    let c_expl = (1.0 - 2.0 * alpha * (-0.5 * lam * tau_np1).exp()) * b_local;
    let tbar = mesh.tbar(n);
    let bndry = (-lam * tbar).exp() * tbar.powf(-alpha);
    let inv_gamma_1ma = 1.0 / gamma_fn(1.0 - alpha)?;

    let n_exp = soe.n_exp();
    let (mut lam1, mut lam2, mut decay) = (vec![0.0; n_exp], vec![0.0; n_exp], vec![0.0; n_exp]);
    if n >= 1 {
        let tau_n = mesh.tau(n);
        for (i, s) in soe.exponents().iter().enumerate() {
            let (l1, l2) = lambda_weights(lam, *s, tau_n, tau_np1);
            lam1[i] = l1;
            lam2[i] = l2;
            decay[i] = (-(lam + s) * 0.5 * (tau_n + tau_np1)).exp();
        }
    }
    Ok(StepWeights {
        n,
        lam1,
        lam2,
        decay,
        b_local,
        c_expl,
        bndry,
        alpha,
        inv_gamma_1ma,
    })
}

/// Unrolled history coefficients: `a[j]` multiplies `u^{n-j}` and `b[j]`
/// multiplies `u^{n-1-j}`, `j = 0..n-1`; both include the factor `α`.
#[derive(Debug, Clone, PartialEq)]
pub struct ABCoeffs {
    pub n: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl ABCoeffs {
    /// Coefficient of each `u^l`, `l = 0..=n`, in `α Σ_i ω_i U_his,i`.
    pub fn node_weights(&self) -> Vec<f64> {
        let n = self.n;
        let mut c = vec![0.0; n + 1];
        for j in 0..n {
            c[n - j] += self.a[j];
            c[n - 1 - j] += self.b[j];
        }
        c
    }

    pub fn total(&self) -> f64 {
        self.a.iter().sum::<f64>() + self.b.iter().sum::<f64>()
    }
}

pub fn ab_coeffs(mesh: &TemporalMesh, soe: &SoeApprox, lam: f64, alpha: f64, n: usize) -> Result<ABCoeffs> {
    check_step(mesh, n)?;
    if n == 0 {
        return Err(Error::param("n", "history coefficients need n >= 1"));
    }
    let tbar_n = mesh.tbar(n);
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    for j in 0..n {
        let k = n - j;
        let (tau_k, tau_kp1) = (mesh.tau(k), mesh.tau(k + 1));
        let gap = tbar_n - mesh.tbar(k);
        let (mut sa, mut sb) = (0.0, 0.0);
        for (w, s) in soe.terms() {
            let (l1, l2) = lambda_weights(lam, s, tau_k, tau_kp1);
            let d = w * (-(lam + s) * gap).exp();
            sa += d * l1;
            sb += d * l2;
        }
        a[j] = alpha * sa;
        b[j] = alpha * sb;
    }
    Ok(ABCoeffs { n, a, b })
}
