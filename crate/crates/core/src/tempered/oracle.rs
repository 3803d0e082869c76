use std::sync::OnceLock;

use crate::gamma::gamma_unchecked;
use crate::quadrature::{gauss_legendre, QuadratureRule};

const PANELS_PER_SIDE: usize = 100;
const GRADING: f64 = 0.7;
const NODES: usize = 20;

fn rule() -> &'static QuadratureRule {
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(NODES).expect("valid order"))
}

/// Tempered Caputo derivative
/// `e^(-λt)/Γ(1-α) ∫_0^t (t-s)^(-α) (e^(λs) u(s))' ds`
/// by composite Gauss quadrature on geometrically graded panels, refined
/// towards `s = t` (kernel singularity) and towards `s = 0` (where the
/// derivative of weakly singular solutions blows up).
pub fn oracle_caputo<U, D>(u: U, du: D, t: f64, alpha: f64, lam: f64) -> f64
where
    U: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    if t <= 0.0 {
        return 0.0;
    }
    let rule = rule();
    // e^{-λ(t-s)} (λ u(s) + u'(s))
    let g = |s: f64| (-lam * (t - s)).exp() * (lam * u(s) + du(s));
    let half = 0.5 * t;
    let mut total = 0.0;

    // s in [0, t/2], panels shrinking towards s = 0
    let mut hi = half;
    for _ in 0..PANELS_PER_SIDE {
        let lo = hi * GRADING;
        total += rule.integrate(lo, hi, |s| (t - s).powf(-alpha) * g(s));
        hi = lo;
    }
    total += rule.integrate(0.0, hi, |s| (t - s).powf(-alpha) * g(s));

    // v = t - s in [0, t/2], panels shrinking towards v = 0
    let mut hi = half;
    for _ in 0..PANELS_PER_SIDE {
        let lo = hi * GRADING;
        total += rule.integrate(lo, hi, |v| v.powf(-alpha) * g(t - v));
        hi = lo;
    }
    total += g(t - 0.5 * hi) * hi.powf(1.0 - alpha) / (1.0 - alpha);

    total / gamma_unchecked(1.0 - alpha)
}
