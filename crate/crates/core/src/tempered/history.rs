use crate::error::{Error, Result};
use crate::soe::SoeApprox;

use super::weights::StepWeights;

/// SOE history accumulators `U_his,i` for every interior point, stored row
/// by row (one row of `n_exp` entries per spatial point).
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryState {
    data: Vec<f64>,
    rows: usize,
    n_exp: usize,
    n_last: usize,
}

impl HistoryState {
    pub fn new(rows: usize, n_exp: usize) -> Self {
        Self {
            data: vec![0.0; rows * n_exp],
            rows,
            n_exp,
            n_last: 0,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn n_exp(&self) -> usize {
        self.n_exp
    }

    /// Step index the accumulators currently refer to.
    pub fn n_last(&self) -> usize {
        self.n_last
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.data[j * self.n_exp..(j + 1) * self.n_exp]
    }

    /// `H_{j,i} <- decay_i H_{j,i} + λ¹_{i,n} u_n[j] + λ²_{i,n} u_nm1[j]`.
    pub fn advance(&mut self, u_n: &[f64], u_nm1: &[f64], w: &StepWeights) -> Result<()> {
        if w.n != self.n_last + 1 {
            return Err(Error::StepOrder {
                expected: self.n_last + 1,
                got: w.n,
            });
        }
        if u_n.len() != self.rows || u_nm1.len() != self.rows || w.decay.len() != self.n_exp {
            return Err(Error::param("u_n", "history state shape mismatch"));
        }
        for (j, row) in self.data.chunks_exact_mut(self.n_exp).enumerate() {
            let (a, b) = (u_n[j], u_nm1[j]);
            for (((h, d), l1), l2) in row.iter_mut().zip(&w.decay).zip(&w.lam1).zip(&w.lam2) {
                *h = d * *h + l1 * a + l2 * b;
            }
        }
        self.n_last = w.n;
        Ok(())
    }

    /// `Σ_i ω_i H_{j,i}` for every row.
    pub fn weighted_sums(&self, omega: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.n_exp)) {
            *o = row.iter().zip(omega).map(|(h, w)| h * w).sum();
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

/// Explicit part `E` of the fast operator at `t̄_n` for one spatial point,
/// so that the operator equals `B u^{n+1} + E`.
///
/// `u_hist` holds `u^0..=u^n` (only the first and last entries are read)
/// and `h_row` the accumulators already advanced to step `n`.
pub fn fast_caputo_explicit(u_hist: &[f64], h_row: &[f64], soe: &SoeApprox, w: &StepWeights) -> f64 {
    let n = w.n;
    let history: f64 = if n == 0 {
        0.0
    } else {
        soe.weights().iter().zip(h_row).map(|(o, h)| o * h).sum()
    };
    w.c_expl * u_hist[n] - w.inv_gamma_1ma * (w.alpha * history + w.bndry * u_hist[0])
}
