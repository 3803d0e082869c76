//! Run parameters: defaults, configuration file and command-line overrides.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Deserialize;
use tfade::{case, ManufacturedCase, Method, Norm, Problem, SchemeConfig};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    Fast,
    Direct,
    Both,
}

impl MethodChoice {
    pub fn methods(self) -> Vec<Method> {
        match self {
            MethodChoice::Fast => vec![Method::Fast],
            MethodChoice::Direct => vec![Method::Direct],
            MethodChoice::Both => vec![Method::Fast, Method::Direct],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormChoice {
    L2,
    H1,
}

impl From<NormChoice> for Norm {
    fn from(n: NormChoice) -> Self {
        match n {
            NormChoice::L2 => Norm::L2,
            NormChoice::H1 => Norm::H1,
        }
    }
}

/// Partially specified parameters. Used both for the configuration file and
/// for command-line flags; later layers win.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub case: Option<u32>,
    pub alpha: Option<f64>,
    pub lambda: Option<f64>,
    pub delta: Option<f64>,
    pub r: Option<f64>,
    pub eps: Option<f64>,
    pub method: Option<MethodChoice>,
    #[serde(rename = "N")]
    pub steps: Option<Vec<usize>>,
    #[serde(rename = "M")]
    pub cells: Option<Vec<usize>>,
    #[serde(rename = "T")]
    pub horizon: Option<f64>,
    #[serde(rename = "L")]
    pub length: Option<f64>,
    pub norm: Option<NormChoice>,
    pub out: Option<PathBuf>,
}

impl Settings {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_toml(&text).map_err(|e| CliError::Config {
            path: path.to_owned(),
            msg: e.message().to_owned(),
        })
    }

    /// `over` wins wherever it has a value.
    pub fn overlay(self, over: Settings) -> Settings {
        Settings {
            case: over.case.or(self.case),
            alpha: over.alpha.or(self.alpha),
            lambda: over.lambda.or(self.lambda),
            delta: over.delta.or(self.delta),
            r: over.r.or(self.r),
            eps: over.eps.or(self.eps),
            method: over.method.or(self.method),
            steps: over.steps.or(self.steps),
            cells: over.cells.or(self.cells),
            horizon: over.horizon.or(self.horizon),
            length: over.length.or(self.length),
            norm: over.norm.or(self.norm),
            out: over.out.or(self.out),
        }
    }

    /// Fill the gaps with defaults; `method` falls back to `default_method`.
    pub fn resolve(self, default_method: MethodChoice) -> RunSpec {
        RunSpec {
            case_id: self.case.unwrap_or(1),
            alpha: self.alpha.unwrap_or(0.5),
            lam: self.lambda.unwrap_or(1.0),
            delta: self.delta.unwrap_or(1.8),
            grading: self.r.unwrap_or(3.0),
            epsilon: self.eps.unwrap_or(1e-10),
            method: self.method.unwrap_or(default_method),
            steps: self.steps,
            cells: self.cells,
            horizon: self.horizon.unwrap_or(2.0),
            length: self.length.unwrap_or(1.0),
            norm: self.norm.unwrap_or(NormChoice::L2).into(),
            out: self.out,
        }
    }
}

/// Fully resolved run parameters. Runs are deterministic, so there is no seed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    /// Manufactured case 1..=3; 0 is the homogeneous problem (`φ = 0`, `f = 0`).
    pub case_id: u32,
    pub alpha: f64,
    pub lam: f64,
    pub delta: f64,
    pub grading: f64,
    pub epsilon: f64,
    pub method: MethodChoice,
    pub steps: Option<Vec<usize>>,
    pub cells: Option<Vec<usize>>,
    pub horizon: f64,
    pub length: f64,
    pub norm: Norm,
    pub out: Option<PathBuf>,
}

impl Default for RunSpec {
    fn default() -> Self {
        Settings::default().resolve(MethodChoice::Fast)
    }
}

/// Which list is swept and the value held fixed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sweep {
    Time { steps: Vec<usize>, cells: usize },
    Space { cells: Vec<usize>, steps: usize },
}

impl Sweep {
    pub fn knobs(&self) -> &[usize] {
        match self {
            Sweep::Time { steps, .. } => steps,
            Sweep::Space { cells, .. } => cells,
        }
    }

    /// `(N, M)` for one sweep value.
    pub fn point(&self, knob: usize) -> (usize, usize) {
        match self {
            Sweep::Time { cells, .. } => (knob, *cells),
            Sweep::Space { steps, .. } => (*steps, knob),
        }
    }
}

/// Fixed `M` when only `N` is swept (Table 1 setting).
pub const DEFAULT_TIME_STUDY_CELLS: usize = 2000;
/// Fixed `N` when only `M` is swept.
pub const DEFAULT_SPACE_STUDY_STEPS: usize = 1000;

fn single(list: &[usize], flag: &str) -> CliResult<usize> {
    match list {
        [v] => Ok(*v),
        _ => Err(CliError::usage(format!("--{flag} must hold exactly one value here"))),
    }
}

impl RunSpec {
    pub fn sweep(&self) -> CliResult<Sweep> {
        let empty = |l: &Option<Vec<usize>>| l.as_ref().is_some_and(|v| v.is_empty());
        if empty(&self.steps) || empty(&self.cells) {
            return Err(CliError::usage("empty sweep list"));
        }
        match (&self.steps, &self.cells) {
            (None, None) => Err(CliError::usage("no sweep list given; pass --N or --M")),
            (Some(n), Some(m)) if n.len() > 1 && m.len() > 1 => {
                Err(CliError::usage("sweep either --N or --M, not both"))
            }
            (Some(n), m) if m.as_ref().is_none_or(|m| m.len() == 1) => Ok(Sweep::Time {
                steps: n.clone(),
                cells: m.as_ref().map_or(DEFAULT_TIME_STUDY_CELLS, |m| m[0]),
            }),
            (n, Some(m)) => Ok(Sweep::Space {
                cells: m.clone(),
                steps: n.as_ref().map_or(Ok(DEFAULT_SPACE_STUDY_STEPS), |n| single(n, "N"))?,
            }),
            _ => unreachable!("covered above"),
        }
    }

    pub fn single_steps(&self, default: usize) -> CliResult<usize> {
        self.steps.as_deref().map_or(Ok(default), |l| single(l, "N"))
    }

    pub fn single_cells(&self, default: usize) -> CliResult<usize> {
        self.cells.as_deref().map_or(Ok(default), |l| single(l, "M"))
    }

    pub fn scheme(&self, steps: usize, cells: usize, method: Method) -> SchemeConfig {
        SchemeConfig {
            alpha: self.alpha,
            lam: self.lam,
            horizon: self.horizon,
            length: self.length,
            cells,
            steps,
            grading: self.grading,
            epsilon: self.epsilon,
            method,
        }
    }

    pub fn problem(&self) -> CliResult<CaseProblem> {
        if self.case_id == 0 {
            return Ok(CaseProblem::Zero);
        }
        let c = case(self.case_id, self.alpha, self.lam, self.delta)?;
        if self.length != c.length() {
            return Err(CliError::usage(format!(
                "case {} is posed on (0, {}); got L = {}",
                self.case_id,
                c.length(),
                self.length
            )));
        }
        Ok(CaseProblem::Manufactured(c))
    }

    pub fn manufactured(&self) -> CliResult<ManufacturedCase> {
        match self.problem()? {
            CaseProblem::Manufactured(c) => Ok(c),
            CaseProblem::Zero => Err(CliError::usage("this command needs a manufactured case 1, 2 or 3")),
        }
    }

    /// One comment line recording every parameter.
    pub fn provenance(&self) -> String {
        let list = |l: &Option<Vec<usize>>| {
            l.as_ref().map_or_else(
                || "default".to_owned(),
                |v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";"),
            )
        };
        format!(
            "# case={} alpha={} lambda={} delta={} r={} eps={:e} method={} N={} M={} T={} L={} norm={}",
            self.case_id,
            self.alpha,
            self.lam,
            self.delta,
            self.grading,
            self.epsilon,
            self.method.to_possible_value().map_or("?".into(), |v| v.get_name().to_owned()),
            list(&self.steps),
            list(&self.cells),
            self.horizon,
            self.length,
            self.norm.name()
        )
    }
}

/// Manufactured case or the homogeneous problem.
#[derive(Debug, Clone, Copy)]
pub enum CaseProblem {
    Zero,
    Manufactured(ManufacturedCase),
}

impl CaseProblem {
    pub fn exact(&self, x: f64, t: f64) -> f64 {
        match self {
            CaseProblem::Zero => 0.0,
            CaseProblem::Manufactured(c) => c.exact(x, t),
        }
    }
}

impl Problem for CaseProblem {
    fn initial(&self, x: f64) -> f64 {
        match self {
            CaseProblem::Zero => 0.0,
            CaseProblem::Manufactured(c) => c.phi(x),
        }
    }

    fn forcing(&self, x: f64, t: f64) -> f64 {
        match self {
            CaseProblem::Zero => 0.0,
            CaseProblem::Manufactured(c) => c.forcing(x, t),
        }
    }
}
