//! Discrete tempered Caputo operators at half-time levels.
//!
//! The derivative at `t̄_n` splits into a history integral over `[0, t_n]`
//! and a local integral over `[t_n, t̄_n]`. After integration by parts the
//! history part reads
//!
//! ```text
//!     1/Γ(1-α) [ e^(-λτ_{n+1}/2) (τ_{n+1}/2)^(-α) u(t_n) - e^(-λt̄_n) t̄_n^(-α) u(0)
//!                - α ∫_0^{t_n} e^(-λ(t̄_n-s)) (t̄_n-s)^(-1-α) u(s) ds ]
//! ```
//!
//! and the remaining integral is evaluated either with the SOE kernel and
//! the recurrence in [`HistoryState`] (fast operator) or with the exact
//! kernel on every past interval (direct operator). Both share the local
//! term, so the full operator value is `B u^{n+1} + E` with the explicit
//! part `E` depending only on `u^0..u^n`.

mod direct;
mod history;
mod oracle;
mod weights;

pub use direct::{direct_caputo_explicit, direct_history_weights, DIRECT_NODES};
pub use history::{fast_caputo_explicit, HistoryState};
pub use oracle::oracle_caputo;
pub use weights::{ab_coeffs, lambda_weights, step_weights, ABCoeffs, StepWeights};

use crate::error::Result;
use crate::mesh::TemporalMesh;
use crate::soe::SoeApprox;

/// Fast operator applied to a scalar series `u[k] = u(t_k)`, `k = 0..=N`.
/// Returns the operator value at `t̄_n` for `n = 0..N-1`.
pub fn fast_operator_series(
    mesh: &TemporalMesh,
    soe: &SoeApprox,
    lam: f64,
    alpha: f64,
    u: &[f64],
) -> Result<Vec<f64>> {
    let n_steps = mesh.steps();
    let mut hist = HistoryState::new(1, soe.n_exp());
    let mut out = Vec::with_capacity(n_steps);
    for n in 0..n_steps {
        let w = step_weights(mesh, soe, lam, alpha, n)?;
        if n >= 1 {
            hist.advance(&u[n..=n], &u[n - 1..n], &w)?;
        }
        let e = fast_caputo_explicit(&u[..=n], hist.row(0), soe, &w);
        out.push(w.b_local * u[n + 1] + e);
    }
    Ok(out)
}

/// Direct operator applied to a scalar series, same layout as
/// [`fast_operator_series`].
pub fn direct_operator_series(
    mesh: &TemporalMesh,
    lam: f64,
    alpha: f64,
    u: &[f64],
) -> Result<Vec<f64>> {
    (0..mesh.steps())
        .map(|n| {
            let e = direct_caputo_explicit(&u[..=n], mesh, lam, alpha, n)?;
            let b = weights::local_coefficient(mesh, alpha, n)?;
            Ok(b * u[n + 1] + e)
        })
        .collect()
}
