//! Published reference values for the manufactured benchmarks and a small
//! verdict type used by the acceptance gate.
//!
//! The gate lives in `tests/acceptance.rs` and is run with `cargo test`.

pub mod published;

use std::fmt;

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub id: u32,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "criterion {} [{tag}] {}: {}", self.id, self.title, self.detail)
    }
}

/// Collects named sub-checks; the criterion passes when all of them do.
#[derive(Debug, Default)]
pub struct Checks {
    failed: Vec<String>,
    total: usize,
}

impl Checks {
    pub fn check(&mut self, ok: bool, what: impl Into<String>) -> bool {
        self.total += 1;
        if !ok {
            self.failed.push(what.into());
        }
        ok
    }

    pub fn verdict(self, id: u32, title: &'static str) -> Verdict {
        let pass = self.failed.is_empty();
        let detail = if pass {
            format!("{} checks passed", self.total)
        } else {
            format!("{}/{} checks failed: {}", self.failed.len(), self.total, self.failed.join("; "))
        };
        Verdict { id, title, pass, detail }
    }
}

/// `|got - want| <= tol |want|`
pub fn within_rel(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol * want.abs()
}
