//! Run configuration: one JSON document with expression-string leaves.
//!
//! ```json
//! {
//!   "problem": { "theta": "pi/3", "p": "0.1*cos(x)", "m12": "cos(x - t)", "grid_n": 4000 },
//!   "spectrum": { "n_min": 1, "n_max": 40, "tol": 1e-10 },
//!   "inversion": { "n_list": [50, 100, 200, 400], "l": "from-problem" },
//!   "tolerances": { "theta": 5e-3 }
//! }
//! ```
//!
//! Omitted coefficient expressions default to `"0"`; every other block and
//! key is optional. Unknown keys are rejected.

use std::fmt;
use std::path::Path;

use dirac_nodal::exprlang::{parse, Arity};
use dirac_nodal::inverse::InversionOptions;
use dirac_nodal::model::{ModelError, Problem};
use serde::Deserialize;

/// A configuration problem together with the key path it refers to.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

/// `θ` as a number or a constant expression such as `"pi/3"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Number(f64),
    Expr(String),
}

fn zero_expr() -> String {
    "0".into()
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub theta: Scalar,
    #[serde(default = "zero_expr")]
    pub p: String,
    #[serde(default = "zero_expr")]
    pub r: String,
    #[serde(default = "zero_expr")]
    pub m11: String,
    #[serde(default = "zero_expr")]
    pub m12: String,
    #[serde(default = "zero_expr")]
    pub m21: String,
    #[serde(default = "zero_expr")]
    pub m22: String,
    #[serde(default = "zero_expr")]
    pub omega: String,
    #[serde(default = "default_grid_n")]
    pub grid_n: usize,
}

fn default_grid_n() -> usize {
    dirac_nodal::forward::DEFAULT_GRID_N
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    pub n_min: i64,
    pub n_max: i64,
    pub tol: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig { n_min: 1, n_max: 40, tol: dirac_nodal::forward::DEFAULT_TOL }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InversionConfig {
    pub n_list: Vec<i64>,
    pub x_lo: f64,
    pub x_hi: f64,
    pub points: usize,
    /// `"from-problem"` or an expression in `x`.
    pub l: String,
}

impl Default for InversionConfig {
    fn default() -> Self {
        let o = InversionOptions::<f64>::default();
        InversionConfig { n_list: o.n_list, x_lo: o.x_lo, x_hi: o.x_hi, points: o.grid_points, l: FROM_PROBLEM.into() }
    }
}

pub const FROM_PROBLEM: &str = "from-problem";

/// Round-trip pass thresholds (sup norms over the interior grid).
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub theta: f64,
    pub omega_pi: f64,
    pub mu: f64,
    pub p_plus_r: f64,
    pub v_sq: f64,
    pub p: f64,
    pub r: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { theta: 5e-3, omega_pi: 5e-2, mu: 1e-2, p_plus_r: 1e-1, v_sq: 1e-1, p: 1e-1, r: 1e-1 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub inversion: InversionConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
}

/// Command-line overrides applied on top of a loaded configuration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub grid_n: Option<usize>,
    pub tol: Option<f64>,
    pub n_list: Option<Vec<i64>>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            ConfigError::new(path, e.into_inner().to_string())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), ConfigError> {
        if let Some(n) = o.grid_n {
            self.problem.grid_n = n;
        }
        if let Some(t) = o.tol {
            self.spectrum.tol = t;
        }
        if let Some(list) = &o.n_list {
            self.inversion.n_list = list.clone();
        }
        self.validate()
    }

    /// Checks everything that can be checked without computing anything.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.problem()?;
        let s = &self.spectrum;
        if s.n_min > s.n_max {
            return Err(ConfigError::new("spectrum.n_min", format!("n_min = {} exceeds n_max = {}", s.n_min, s.n_max)));
        }
        if !(s.tol > 0.0 && s.tol.is_finite()) {
            return Err(ConfigError::new("spectrum.tol", format!("tolerance must be positive, got {}", s.tol)));
        }
        let inv = &self.inversion;
        if inv.n_list.len() < 2 {
            return Err(ConfigError::new("inversion.n_list", "need at least two indices"));
        }
        if let Some(&n) = inv.n_list.iter().find(|&&n| n < 1) {
            return Err(ConfigError::new("inversion.n_list", format!("indices must be ≥ 1, got {n}")));
        }
        let mut sorted = inv.n_list.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != inv.n_list.len() {
            return Err(ConfigError::new("inversion.n_list", "indices must be distinct"));
        }
        self.inversion_options()
            .grid()
            .map_err(|e| ConfigError::new("inversion", e.to_string()))?;
        if inv.l != FROM_PROBLEM {
            parse(&inv.l, Arity::Univariate).map_err(|e| ConfigError::new("inversion.l", e.to_string()))?;
        }
        Ok(())
    }

    pub fn theta(&self) -> Result<f64, ConfigError> {
        match &self.problem.theta {
            Scalar::Number(v) => Ok(*v),
            Scalar::Expr(s) => {
                let e = parse(s, Arity::Univariate).map_err(|e| ConfigError::new("problem.theta", e.to_string()))?;
                let eval = |x| e.evaluate(x, None).map_err(|e| ConfigError::new("problem.theta", e.to_string()));
                let v = eval(0.0)?;
                if eval(1.0)? != v {
                    return Err(ConfigError::new("problem.theta", "must be a constant expression"));
                }
                Ok(v)
            }
        }
    }

    pub fn problem(&self) -> Result<Problem<f64>, ConfigError> {
        let p = &self.problem;
        let exprs = [&*p.p, &*p.r, &*p.m11, &*p.m12, &*p.m21, &*p.m22, &*p.omega];
        Problem::from_exprs(self.theta()?, exprs, p.grid_n).map_err(|e| match e {
            ModelError::ThetaOutOfRange(_) => ConfigError::new("problem.theta", e.to_string()),
            ModelError::Expr { field, source } => ConfigError::new(format!("problem.{field}"), source.to_string()),
            ModelError::Numerics { field, source } => ConfigError::new(format!("problem.{field}"), source.to_string()),
            other => ConfigError::new("problem", other.to_string()),
        })
    }

    pub fn inversion_options(&self) -> InversionOptions<f64> {
        let inv = &self.inversion;
        InversionOptions {
            n_list: inv.n_list.clone(),
            x_lo: inv.x_lo,
            x_hi: inv.x_hi,
            grid_points: inv.points,
            ..InversionOptions::default()
        }
    }
}
