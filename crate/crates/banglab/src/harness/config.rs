//! Declarative experiment configuration (TOML), with CLI overrides applied by
//! the binary before validation.

use crate::error::{Error, Result};
use crate::landscape::{make_ramp, make_spike, BushCost, Instance, SymmetricCost};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: InstanceSpec,
    pub algorithm: AlgorithmSpec,
    /// Problem sizes n to sweep.
    pub sizes: Vec<usize>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub budgets: Budgets,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    /// "ramp" | "spike" | "bush" | "table"
    pub kind: String,
    pub a: Option<f64>,
    pub b: Option<f64>,
    /// Table file for kind = "table" (lines "w c(w)" or "w c(w) r(w) s(w)").
    pub table: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSpec {
    /// "sa" | "lusa" | "bbsa" | "qao" | "qaoa"
    pub kind: String,
    /// QAOA rounds as (beta, gamma) pairs; default one round (pi/4, pi/2).
    pub angles: Option<Vec<(f64, f64)>>,
    /// Bush mixer strength; default 1/(n+1).
    pub lambda: Option<f64>,
    /// BBSA phase durations (descend, diffuse, descend); defaults depend on
    /// the instance (see `run`).
    pub t1: Option<f64>,
    pub td: Option<f64>,
    pub t2: Option<f64>,
    /// SA geometric cooling: initial temperature (default n), ratio, rounds.
    pub tau0: Option<f64>,
    #[serde(default = "default_ratio")]
    pub ratio: f64,
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    /// When true, evolve the full distribution instead of sampling walkers.
    #[serde(default)]
    pub exact: bool,
}

fn default_ratio() -> f64 {
    0.7
}

fn default_rounds() -> usize {
    20
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    /// Monte Carlo ensemble size.
    #[serde(default = "default_walkers")]
    pub walkers: usize,
    /// Evolution step; default 1/(n+2) when unset.
    pub dt: Option<f64>,
    /// Total anneal time for qao/lusa; default 10 n.
    pub total_time: Option<f64>,
    /// Path discretization pieces for qao/lusa.
    #[serde(default = "default_pieces")]
    pub pieces: usize,
    /// SA step budget: ceil(budget_factor * n^2) discrete moves.
    #[serde(default = "default_sa_budget_factor")]
    pub sa_budget_factor: f64,
}

fn default_walkers() -> usize {
    10_000
}

fn default_pieces() -> usize {
    64
}

fn default_sa_budget_factor() -> f64 {
    50.0
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            walkers: default_walkers(),
            dt: None,
            total_time: None,
            pieces: default_pieces(),
            sa_budget_factor: default_sa_budget_factor(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self> {
        let config: Self =
            toml::from_str(text).map_err(|e| Error::config(origin, e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<()> {
        match self.instance.kind.as_str() {
            "ramp" | "bush" => {}
            "spike" => {
                for (key, v) in [("instance.a", self.instance.a), ("instance.b", self.instance.b)] {
                    match v {
                        None => return Err(Error::config(key, "required for spike instances")),
                        Some(x) if !(0.0..=1.0).contains(&x) => {
                            return Err(Error::config(key, "must lie in [0, 1]"))
                        }
                        _ => {}
                    }
                }
            }
            "table" => {
                if self.instance.table.is_none() {
                    return Err(Error::config("instance.table", "required for table instances"));
                }
            }
            other => {
                return Err(Error::config(
                    "instance.kind",
                    format!("unknown instance kind `{other}`"),
                ))
            }
        }
        match self.algorithm.kind.as_str() {
            "sa" | "lusa" | "bbsa" | "qao" | "qaoa" => {}
            other => {
                return Err(Error::config(
                    "algorithm.kind",
                    format!("unknown algorithm `{other}`"),
                ))
            }
        }
        if let Some(angles) = &self.algorithm.angles {
            if angles.is_empty() {
                return Err(Error::config("algorithm.angles", "needs at least one round"));
            }
        }
        if !(0.0 < self.algorithm.ratio && self.algorithm.ratio < 1.0) {
            return Err(Error::config("algorithm.ratio", "must lie in (0, 1)"));
        }
        if self.algorithm.rounds == 0 {
            return Err(Error::config("algorithm.rounds", "must be positive"));
        }
        if self.budgets.pieces == 0 {
            return Err(Error::config("budgets.pieces", "must be positive"));
        }
        if !(self.budgets.sa_budget_factor > 0.0) {
            return Err(Error::config("budgets.sa_budget_factor", "must be positive"));
        }
        if let Some(dt) = self.budgets.dt {
            if !(dt > 0.0) {
                return Err(Error::config("budgets.dt", "must be positive"));
            }
        }
        for (i, &n) in self.sizes.iter().enumerate() {
            let min_n = if self.instance.kind == "spike" { 4 } else { 1 };
            if n < min_n {
                return Err(Error::config(
                    format!("sizes[{i}]"),
                    format!("must be at least {min_n}"),
                ));
            }
        }
        Ok(())
    }

    /// Materialize the instance at size n.
    pub fn instance_at(&self, n: usize) -> Result<Instance> {
        match self.instance.kind.as_str() {
            "ramp" => Ok(Instance::Symmetric(make_ramp(n))),
            "spike" => Ok(Instance::Symmetric(make_spike(
                n,
                self.instance.a.unwrap(),
                self.instance.b.unwrap(),
            )?)),
            "bush" => Ok(Instance::Bush(BushCost::new(n))),
            "table" => {
                let path = self.instance.table.as_ref().unwrap();
                let cost = SymmetricCost::from_table_file(Path::new(path))?;
                if cost.n() != n {
                    return Err(Error::config(
                        "instance.table",
                        format!("table has n = {}, requested {}", cost.n(), n),
                    ));
                }
                Ok(Instance::Symmetric(cost))
            }
            _ => unreachable!("validated"),
        }
    }
}
