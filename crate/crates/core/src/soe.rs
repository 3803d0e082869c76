//! Sum-of-exponentials surrogate for the kernel `t^(-1-α)`.
//!
//! The construction discretizes the Laplace representation
//!
//! ```text
//!     t^(-β) = 1/Γ(β) ∫_0^∞ s^(β-1) e^(-t s) ds,   β = 1 + α,
//! ```
//!
//! with Gauss-Legendre rules on dyadic panels `[2^j, 2^(j+1)]` of the
//! `s`-axis. Both tails are truncated, each panel is refined until its
//! contribution to the relative error settles, negligible terms are
//! pruned, and the result is certified on a dense log-spaced grid.
//! Accuracy is relative: `|t^(-β) - Σ ω_l e^(-s_l t)| <= ε t^(-β)`.

use crate::error::{Error, Result};
use crate::gamma::gamma_unchecked;
use crate::quadrature::{gauss_legendre, QuadratureRule, MAX_ORDER};

/// Smallest accepted target accuracy.
pub const MIN_EPSILON: f64 = 1e-14;
/// Largest accepted target accuracy.
pub const MAX_EPSILON: f64 = 1e-2;
/// Number of samples used by `build_soe` for the final certification.
pub const CERT_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SoeApprox {
    alpha: f64,
    epsilon: f64,
    t_min: f64,
    t_max: f64,
    weights: Vec<f64>,
    exponents: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertReport {
    pub max_rel_error: f64,
    pub argmax_t: f64,
    /// Largest absolute error seen on the grid.
    pub max_abs_error: f64,
    /// Absolute bound `ε t_min^(-1-α)` implied by the relative target.
    pub abs_bound_t_min: f64,
}

/// Knobs for the panel construction.
#[derive(Debug, Clone, Copy)]
pub struct SoeOptions {
    pub start_nodes: usize,
    pub max_nodes: usize,
    /// Drop outermost terms while the certification-grid error stays within
    /// `epsilon`.
    pub trim: bool,
}

impl Default for SoeOptions {
    fn default() -> Self {
        Self {
            start_nodes: 8,
            max_nodes: MAX_ORDER,
            trim: true,
        }
    }
}

impl SoeApprox {
    /// Assemble an approximation from explicit `(weight, exponent)` pairs.
    ///
    /// Weights must be positive and exponents nonnegative and strictly
    /// increasing. No accuracy claim is checked here; see [`certify_soe`].
    pub fn from_terms(
        alpha: f64,
        epsilon: f64,
        t_min: f64,
        t_max: f64,
        terms: &[(f64, f64)],
    ) -> Result<Self> {
        check_alpha(alpha)?;
        check_interval(t_min, t_max)?;
        if terms.is_empty() {
            return Err(Error::param("terms", "at least one term is required"));
        }
        if terms.iter().any(|&(w, s)| !(w > 0.0) || !(s >= 0.0) || !w.is_finite() || !s.is_finite()) {
            return Err(Error::param("terms", "weights must be positive, exponents nonnegative"));
        }
        if terms.windows(2).any(|p| p[0].1 >= p[1].1) {
            return Err(Error::param("terms", "exponents must be strictly increasing"));
        }
        Ok(Self {
            alpha,
            epsilon,
            t_min,
            t_max,
            weights: terms.iter().map(|t| t.0).collect(),
            exponents: terms.iter().map(|t| t.1).collect(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn n_exp(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    pub fn terms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.weights.iter().copied().zip(self.exponents.iter().copied())
    }

    /// `Σ ω_l e^(-s_l t)` without a range check.
    pub fn eval_unchecked(&self, t: f64) -> f64 {
        self.terms().map(|(w, s)| w * (-s * t).exp()).sum()
    }

    /// Copy with the term at `index` removed.
    pub fn without_term(&self, index: usize) -> Self {
        let mut out = self.clone();
        out.weights.remove(index);
        out.exponents.remove(index);
        out
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::param("alpha", format!("must lie in (0, 1), got {alpha}")))
    }
}

fn check_interval(t_min: f64, t_max: f64) -> Result<()> {
    if !(t_min > 0.0) || !t_max.is_finite() {
        return Err(Error::param("t_min", format!("must be positive, got {t_min}")));
    }
    if !(t_max > t_min) {
        return Err(Error::param("t_max", format!("must exceed t_min = {t_min}, got {t_max}")));
    }
    Ok(())
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if (MIN_EPSILON..MAX_EPSILON).contains(&epsilon) {
        Ok(())
    } else {
        Err(Error::param(
            "epsilon",
            format!("must lie in [{MIN_EPSILON:e}, {MAX_EPSILON:e}), got {epsilon:e}"),
        ))
    }
}

/// `n` log-spaced points covering `[a, b]`, endpoints included.
pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    let mut v: Vec<f64> = (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect();
    v[0] = a;
    v[n - 1] = b;
    v
}

/// Left end of the lowest panel: the dropped piece `∫_0^S s^(β-1) e^(-ts) ds
/// <= S^β/β` stays below `ε/4` of the integral at `t_max`.
fn lower_cutoff(beta: f64, gamma_beta: f64, epsilon: f64, t_max: f64) -> f64 {
    (beta * 0.25 * epsilon * gamma_beta).powf(1.0 / beta) / t_max
}

/// Right end of the highest panel: `Γ(β, S t_min)/Γ(β) <= ε/8`, bounded by
/// `x^(β-1) e^(-x) / (Γ(β)(1 - (β-1)/x))`.
fn upper_cutoff(beta: f64, gamma_beta: f64, epsilon: f64, t_min: f64) -> f64 {
    let mut x = (4.0 / epsilon).ln();
    loop {
        let bound = x.powf(beta - 1.0) * (-x).exp() / (gamma_beta * (1.0 - (beta - 1.0) / x));
        if bound <= 0.125 * epsilon {
            return x / t_min;
        }
        x += 0.25;
    }
}

fn panel_terms(rule: &QuadratureRule, lo: f64, hi: f64, beta: f64, gamma_beta: f64) -> Vec<(f64, f64)> {
    rule.mapped(lo, hi)
        .map(|(s, w)| (w * s.powf(beta - 1.0) / gamma_beta, s))
        .collect()
}

/// Build the exponential sum without the final certification.
pub fn construct_soe(
    alpha: f64,
    epsilon: f64,
    t_min: f64,
    t_max: f64,
    opts: &SoeOptions,
) -> Result<SoeApprox> {
    check_alpha(alpha)?;
    check_interval(t_min, t_max)?;
    check_epsilon(epsilon)?;
    let max_nodes = opts.max_nodes.clamp(1, MAX_ORDER);
    let start_nodes = opts.start_nodes.clamp(1, max_nodes);

    let beta = 1.0 + alpha;
    let gamma_beta = gamma_unchecked(beta);
    let j_min = lower_cutoff(beta, gamma_beta, epsilon, t_max).log2().floor() as i32;
    let j_max = upper_cutoff(beta, gamma_beta, epsilon, t_min).log2().ceil() as i32;
    let n_panels = (j_max - j_min).max(1) as usize;
    let panel_tol = epsilon / (4.0 * n_panels as f64);

    // coarse check grid for refinement: ~16 points per octave of t
    let octaves = (t_max / t_min).log2().ceil().max(1.0) as usize;
    let check_t = log_grid(t_min, t_max, (16 * octaves).max(200));
    let kernel_inv: Vec<f64> = check_t.iter().map(|t| t.powf(beta)).collect();

    let mut rules: Vec<Option<QuadratureRule>> = vec![None; MAX_ORDER + 1];
    let mut rule = |n: usize| -> Result<QuadratureRule> {
        if rules[n].is_none() {
            rules[n] = Some(gauss_legendre(n)?);
        }
        Ok(rules[n].clone().unwrap())
    };

    let mut terms: Vec<(f64, f64)> = Vec::new();
    for j in j_min..j_max {
        let lo = 2f64.powi(j);
        let hi = 2.0 * lo;
        let mut n = start_nodes;
        let mut accepted = panel_terms(&rule(n)?, lo, hi, beta, gamma_beta);
        while 2 * n <= max_nodes {
            let finer = panel_terms(&rule(2 * n)?, lo, hi, beta, gamma_beta);
            let diff = check_t
                .iter()
                .zip(&kernel_inv)
                .map(|(&t, &kinv)| {
                    let a: f64 = accepted.iter().map(|(w, s)| w * (-s * t).exp()).sum();
                    let b: f64 = finer.iter().map(|(w, s)| w * (-s * t).exp()).sum();
                    (a - b).abs() * kinv
                })
                .fold(0.0, f64::max);
            if diff <= panel_tol {
                break;
            }
            n *= 2;
            accepted = finer;
        }
        terms.extend(accepted);
    }

    // prune terms that never matter on [t_min, t_max]
    let n_raw = terms.len() as f64;
    let floor = epsilon * t_max.powf(-beta) / n_raw;
    terms.retain(|&(w, s)| w * (-s * t_min).exp() >= floor);
    terms.sort_by(|a, b| a.1.total_cmp(&b.1));
    if opts.trim {
        trim_ends(&mut terms, beta, epsilon, t_min, t_max);
    }

    SoeApprox::from_terms(alpha, epsilon, t_min, t_max, &terms)
}

/// Remove the smallest- and then the largest-exponent terms one at a time
/// for as long as the relative error on the certification grid stays below
/// `epsilon`. Afterwards dropping either end term breaks certification.
fn trim_ends(terms: &mut Vec<(f64, f64)>, beta: f64, epsilon: f64, t_min: f64, t_max: f64) {
    let limit = epsilon * (1.0 - 1e-6);
    let grid = log_grid(t_min, t_max, CERT_SAMPLES);
    let kernel: Vec<f64> = grid.iter().map(|t| t.powf(-beta)).collect();
    // signed residual kernel - sum
    let mut resid: Vec<f64> = grid
        .iter()
        .zip(&kernel)
        .map(|(&t, &k)| k - terms.iter().map(|(w, s)| w * (-s * t).exp()).sum::<f64>())
        .collect();
    let mut trial = vec![0.0; grid.len()];
    let mut try_remove = |term: (f64, f64), resid: &mut Vec<f64>| -> bool {
        let mut worst = 0.0f64;
        for (((r, tr), &t), &k) in resid.iter().zip(trial.iter_mut()).zip(&grid).zip(&kernel) {
            *tr = r + term.0 * (-term.1 * t).exp();
            worst = worst.max(tr.abs() / k);
        }
        if worst <= limit {
            resid.copy_from_slice(&trial);
            true
        } else {
            false
        }
    };
    let mut lo = 0;
    while terms.len() - lo > 1 && try_remove(terms[lo], &mut resid) {
        lo += 1;
    }
    terms.drain(..lo);
    while terms.len() > 1 && try_remove(*terms.last().unwrap(), &mut resid) {
        terms.pop();
    }
}

/// Build and certify an SOE approximation with relative accuracy `epsilon`
/// on `[t_min, t_max]`.
pub fn build_soe(alpha: f64, epsilon: f64, t_min: f64, t_max: f64) -> Result<SoeApprox> {
    let soe = construct_soe(alpha, epsilon, t_min, t_max, &SoeOptions::default())?;
    let report = certify_soe(&soe, CERT_SAMPLES)?;
    if report.max_rel_error > epsilon {
        return Err(Error::Certification {
            max_rel_error: report.max_rel_error,
            argmax_t: report.argmax_t,
            epsilon,
        });
    }
    Ok(soe)
}

/// Evaluate the sum at `t`, which must lie in the certified interval.
pub fn eval_soe(soe: &SoeApprox, t: f64) -> Result<f64> {
    let slack = 1e-12 * soe.t_max;
    if !(t >= soe.t_min * (1.0 - 1e-12) && t <= soe.t_max + slack) {
        return Err(Error::Domain(format!(
            "t = {t:e} outside certified interval [{:e}, {:e}]",
            soe.t_min, soe.t_max
        )));
    }
    Ok(soe.eval_unchecked(t))
}

/// Relative error of `soe` against `t^(-1-α)` on `n_samples` log-spaced points.
pub fn certify_soe(soe: &SoeApprox, n_samples: usize) -> Result<CertReport> {
    if n_samples < 100 {
        return Err(Error::param("n_samples", format!("must be at least 100, got {n_samples}")));
    }
    let beta = 1.0 + soe.alpha;
    let mut report = CertReport {
        max_rel_error: 0.0,
        argmax_t: soe.t_min,
        max_abs_error: 0.0,
        abs_bound_t_min: soe.epsilon * soe.t_min.powf(-beta),
    };
    for t in log_grid(soe.t_min, soe.t_max, n_samples) {
        let kernel = t.powf(-beta);
        let abs = (kernel - soe.eval_unchecked(t)).abs();
        let rel = abs / kernel;
        if rel > report.max_rel_error {
            report.max_rel_error = rel;
            report.argmax_t = t;
        }
        report.max_abs_error = report.max_abs_error.max(abs);
    }
    Ok(report)
}
