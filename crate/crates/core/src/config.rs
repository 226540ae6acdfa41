//! Run configuration: TOML sections, environment overrides and value specs.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

use crate::construct::ConstructConfig;
use crate::dynamics::DynamicsConfig;
use crate::error::{Error, Result};
use crate::profiles::Nonlinearity;
use crate::radial::GridSpec;
use crate::verify::SuiteContext;

pub const ENV_WORKERS: &str = "CRITNLS_WORKERS";
pub const ENV_OUT: &str = "CRITNLS_OUT";

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
    /// Output root; each subcommand writes into its own directory below it.
    pub out: PathBuf,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection { seed: 0, workers: 0, out: PathBuf::from("critnls-out") }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub p: f64,
    pub sign: f64,
    /// Single value, comma list, or `a:b:logN` / `a:b:linN`.
    pub eps: String,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection { p: 4.0, sign: 1.0, eps: "0.05".into() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    pub suite: String,
    pub functional_eps: Vec<f64>,
    pub dynamics_eps: f64,
    pub dichotomy_a: Vec<f64>,
}

impl Default for VerifySection {
    fn default() -> Self {
        let ctx = SuiteContext::default();
        VerifySection {
            suite: "all".into(),
            functional_eps: ctx.functional_eps,
            dynamics_eps: ctx.dynamics_eps,
            dichotomy_a: ctx.dichotomy_a,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeSection {
    pub lambdas: String,
    /// `gaussian`, `w4` or `psi`.
    pub data: String,
}

impl Default for ProbeSection {
    fn default() -> Self {
        ProbeSection { lambdas: "1.171875e-4:3e-2:log9".into(), data: "gaussian".into() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveSection {
    /// `scale:a` or a field CSV path.
    pub init: String,
    pub t_end: f64,
}

impl Default for EvolveSection {
    fn default() -> Self {
        EvolveSection { init: "scale:0.5".into(), t_end: 1.0 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub a: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection { a: vec![0.3, 0.5, 0.8, 1.2, 1.5] }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub run: RunSection,
    pub model: ModelSection,
    pub grid: GridSpec,
    pub construct: ConstructConfig,
    pub dynamics: DynamicsConfig,
    pub verify: VerifySection,
    pub probe: ProbeSection,
    pub evolve: EvolveSection,
    pub sweep: SweepSection,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    /// Applies `CRITNLS_WORKERS` and `CRITNLS_OUT` through `get`.
    pub fn apply_env(&mut self, get: impl Fn(&str) -> Option<String>) -> Result<()> {
        if let Some(w) = get(ENV_WORKERS) {
            self.run.workers =
                w.trim().parse().map_err(|_| Error::Config(format!("{ENV_WORKERS} must be a count, got '{w}'")))?;
        }
        if let Some(o) = get(ENV_OUT) {
            if o.is_empty() {
                return Err(Error::Config(format!("{ENV_OUT} is empty")));
            }
            self.run.out = PathBuf::from(o);
        }
        Ok(())
    }

    pub fn nonlinearity(&self) -> Result<Nonlinearity> {
        Nonlinearity::pure_power(self.model.p, self.model.sign).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn eps_values(&self) -> Result<Vec<f64>> {
        let v = parse_values(&self.model.eps)?;
        if v.iter().any(|e| !(*e >= 0.0)) {
            return Err(Error::Config(format!("ε must be non-negative: '{}'", self.model.eps)));
        }
        Ok(v)
    }

    /// The single `ε` required by evolution subcommands.
    pub fn single_eps(&self) -> Result<f64> {
        match self.eps_values()?.as_slice() {
            [e] => Ok(*e),
            _ => Err(Error::Config(format!("expected a single ε, got '{}'", self.model.eps))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.nonlinearity()?;
        self.eps_values()?;
        self.construct.validate()?;
        self.dynamics.validate()?;
        if self.grid.n < crate::radial::grid::MIN_NODES || !(self.grid.r_max >= crate::radial::grid::MIN_RMAX) {
            return Err(Error::Config(format!("grid too small: n = {}, r_max = {}", self.grid.n, self.grid.r_max)));
        }
        if !(self.evolve.t_end > 0.0) {
            return Err(Error::Config("t_end must be positive".into()));
        }
        let lams = parse_values(&self.probe.lambdas)?;
        if lams.iter().any(|l| !(*l > 0.0)) {
            return Err(Error::Config("probe λ values must be positive".into()));
        }
        crate::verify::Suite::parse_list(&self.verify.suite)?;
        Ok(())
    }

    pub fn suite_context(&self) -> Result<SuiteContext> {
        Ok(SuiteContext {
            grid: self.grid,
            nl: self.nonlinearity()?,
            construct: self.construct.clone(),
            dynamics: self.dynamics.clone(),
            functional_eps: self.verify.functional_eps.clone(),
            dynamics_eps: self.verify.dynamics_eps,
            dichotomy_a: self.verify.dichotomy_a.clone(),
        })
    }

    /// SHA-256 of the resolved TOML.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }
}

/// Parses `x`, `x,y,z`, `a:b:logN` or `a:b:linN`.
pub fn parse_values(spec: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| Error::Config(format!("value spec '{spec}': {why}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(&format!("'{}' is not a number", s.trim())));
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [list] => {
            let v = list.split(',').filter(|s| !s.trim().is_empty()).map(num).collect::<Result<Vec<_>>>()?;
            if v.is_empty() {
                return Err(bad("empty"));
            }
            Ok(v)
        }
        [a, b, mode] => {
            let (a, b) = (num(a)?, num(b)?);
            let mode = mode.trim();
            let (log, count) = if let Some(c) = mode.strip_prefix("log") {
                (true, c)
            } else if let Some(c) = mode.strip_prefix("lin") {
                (false, c)
            } else {
                return Err(bad("mode must be logN or linN"));
            };
            let n: usize = count.parse().map_err(|_| bad("count must be an integer"))?;
            if n == 0 {
                return Err(bad("count must be positive"));
            }
            if log {
                if !(a > 0.0 && b > 0.0) {
                    return Err(bad("log spacing needs positive endpoints"));
                }
                Ok(crate::verify::logspace(a, b, n))
            } else if n == 1 {
                Ok(vec![a])
            } else {
                Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
            }
        }
        _ => Err(bad("expected x, x,y,.. or a:b:logN")),
    }
}
