//! Gamma function via the Lanczos approximation (g = 7, 9 coefficients).

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) for x > 0.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("gamma_fn requires x > 0, got {x}")));
    }
    Ok(gamma_unchecked(x))
}

/// Lanczos sum without argument checks; reflection below 1/2.
pub(crate) fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    let z = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (k, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (z + k as f64);
    }
    let w = z + LANCZOS_G + 0.5;
    // split the power to stay finite for large arguments
    let p = w.powf(0.5 * (z + 0.5));
    (2.0 * PI).sqrt() * p * (-w).exp() * p * acc
}

#[cfg(test)]
mod tests {
    use super::*;

    /// ln Γ(z) by upward recurrence into the Stirling regime plus a long
    /// Bernoulli series; independent of the Lanczos coefficients.
    fn gamma_series(x: f64) -> f64 {
        const B: [f64; 8] = [
            1.0 / 6.0,
            -1.0 / 30.0,
            1.0 / 42.0,
            -1.0 / 30.0,
            5.0 / 66.0,
            -691.0 / 2730.0,
            7.0 / 6.0,
            -3617.0 / 510.0,
        ];
        let mut z = x;
        let mut shift = 1.0;
        while z < 30.0 {
            shift *= z;
            z += 1.0;
        }
        let mut lg = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln();
        for (k, b) in B.iter().enumerate() {
            let n = 2 * (k + 1);
            lg += b / ((n * (n - 1)) as f64 * z.powi(n as i32 - 1));
        }
        lg.exp() / shift
    }

    #[test]
    fn trivial_values() {
        assert!((gamma_fn(1.0).unwrap() - 1.0).abs() < 1e-15);
        let sqrt_pi = 1.772_453_850_905_516;
        assert!((gamma_fn(0.5).unwrap() - sqrt_pi).abs() / sqrt_pi < 1e-14);
        assert!((gamma_fn(5.0).unwrap() - 24.0).abs() < 24.0 * 1e-14);
    }

    #[test]
    fn matches_series_oracle() {
        let g = gamma_fn(2.8).unwrap();
        assert!((g - gamma_series(2.8)).abs() / g < 1e-12);
        for i in 1..400 {
            let x = 0.02 * i as f64;
            let g = gamma_fn(x).unwrap();
            let s = gamma_series(x);
            assert!((g - s).abs() / s < 1e-13, "x={x}: {g} vs {s}");
        }
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-1.5).is_err());
        assert!(gamma_fn(f64::NAN).is_err());
    }
}
