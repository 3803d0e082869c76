use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::gamma::gamma_fn;
use crate::mesh::TemporalMesh;
use crate::quadrature::{gauss_legendre, QuadratureRule};

use super::weights::local_coefficient;

/// Gauss-Legendre nodes per history interval.
pub const DIRECT_NODES: usize = 32;

fn rule() -> &'static QuadratureRule {
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(DIRECT_NODES).expect("valid order"))
}

/// Coefficients `c_l`, `l = 0..=n`, of
/// `α ∫_0^{t_n} e^(-λ(t̄_n-s)) (t̄_n-s)^(-1-α) (L u)(s) ds = Σ_l c_l u^l`
/// with the exact kernel and piecewise linear `L u`.
pub fn direct_history_weights(mesh: &TemporalMesh, lam: f64, alpha: f64, n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n + 1];
    if n == 0 {
        return c;
    }
    let tbar = mesh.tbar(n);
    let rule = rule();
    let p = -(1.0 + alpha);
    for k in 1..=n {
        let (lo, hi) = (mesh.t(k - 1), mesh.t(k));
        let tau = hi - lo;
        let (mut up, mut down) = (0.0, 0.0);
        for (s, w) in rule.mapped(lo, hi) {
            let v = tbar - s;
            let kern = w * (-lam * v + p * v.ln()).exp();
            let theta = (s - lo) / tau;
            up += kern * theta;
            down += kern * (1.0 - theta);
        }
        c[k] += alpha * up;
        c[k - 1] += alpha * down;
    }
    c
}

/// Explicit part of the direct operator at `t̄_n` for one spatial point;
/// `u_hist` holds `u^0..=u^n`.
pub fn direct_caputo_explicit(
    u_hist: &[f64],
    mesh: &TemporalMesh,
    lam: f64,
    alpha: f64,
    n: usize,
) -> Result<f64> {
    if n >= mesh.steps() || u_hist.len() < n + 1 {
        return Err(Error::param("n", format!("step {n} inconsistent with mesh or history")));
    }
    let b = local_coefficient(mesh, alpha, n)?;
    let tau = mesh.tau(n + 1);
    let c_expl = (1.0 - 2.0 * alpha * (-0.5 * lam * tau).exp()) * b;
    let tbar = mesh.tbar(n);
    let bndry = (-lam * tbar).exp() * tbar.powf(-alpha);
    let hist: f64 = direct_history_weights(mesh, lam, alpha, n)
        .iter()
        .zip(u_hist)
        .map(|(c, u)| c * u)
        .sum();
    Ok(c_expl * u_hist[n] - (hist + bndry * u_hist[0]) / gamma_fn(1.0 - alpha)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{graded_mesh, soe_interval};
    use crate::soe::build_soe;
    use crate::tempered::{fast_operator_series, direct_operator_series};

    #[test]
    fn constant_has_zero_derivative() {
        let mesh = graded_mesh(2.0, 32, 3.0).unwrap();
        let alpha = 0.5;
        let u = vec![1.0; 33];
        let scale = (0.5 * mesh.tau(2)).powf(-1.0 - alpha);
        let d = direct_operator_series(&mesh, 0.0, alpha, &u).unwrap();
        for v in d {
            assert!(v.abs() <= 1e-10 * scale, "{v}");
        }
    }

    #[test]
    fn first_step_matches_fast() {
        let mesh = graded_mesh(2.0, 16, 3.0).unwrap();
        let (lo, hi) = soe_interval(&mesh);
        let soe = build_soe(0.25, 1e-10, lo, hi).unwrap();
        let u: Vec<f64> = (0..=16).map(|k| 1.0 + mesh.t(k).powf(1.8)).collect();
        let f = fast_operator_series(&mesh, &soe, 1.0, 0.25, &u).unwrap();
        let d = direct_operator_series(&mesh, 1.0, 0.25, &u).unwrap();
        // the boundary terms cancel analytically; compare on the scale of B·|u|
        let scale = super::local_coefficient(&mesh, 0.25, 0).unwrap() * (u[0].abs() + u[1].abs());
        assert!((f[0] - d[0]).abs() <= 1e-13 * scale, "{} vs {}", f[0], d[0]);
    }

    #[test]
    fn weights_telescope_for_zero_rate() {
        // α∫ v^(-1-α) dv over [τ_{n+1}/2, t̄_n] in closed form
        let mesh = graded_mesh(2.0, 24, 3.0).unwrap();
        let alpha = 0.3;
        for n in 1..24 {
            let total: f64 = direct_history_weights(&mesh, 0.0, alpha, n).iter().sum();
            let exact = (0.5 * mesh.tau(n + 1)).powf(-alpha) - mesh.tbar(n).powf(-alpha);
            assert!((total - exact).abs() <= 1e-12 * exact, "n={n}");
        }
    }
}
