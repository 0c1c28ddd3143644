//! Run configuration: command-line flags, optionally layered over a JSON
//! config file with the same fields.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Constants,
    Threshold,
    Bracket,
    Verify,
    Dixon,
    CompareMcw,
    Local,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// Which constants feed the Dixon and comparison tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ConstantSource {
    /// Evaluate the theorem's formulas on the problem's local data.
    Theorem,
    /// Published constants of the transformed d = 2 Dixon problem.
    Published,
}

/// A list of `n` values, or a geometric grid `geom:lo:hi:count`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NList {
    Values(Vec<f64>),
    Spec(String),
}

impl NList {
    pub fn resolve(&self) -> Result<Vec<f64>> {
        let values = match self {
            NList::Values(v) => v.clone(),
            NList::Spec(s) => parse_n_list(s)?,
        };
        if values.is_empty() {
            bail!("the n list is empty");
        }
        if let Some(bad) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            bail!("n must be positive and finite, got {bad}");
        }
        Ok(values)
    }
}

pub fn parse_n_list(s: &str) -> Result<Vec<f64>> {
    if let Some(rest) = s.strip_prefix("geom:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            bail!("geometric grid must look like geom:lo:hi:count, got `{s}`");
        }
        let lo: f64 = parts[0].parse().with_context(|| format!("bad lower end in `{s}`"))?;
        let hi: f64 = parts[1].parse().with_context(|| format!("bad upper end in `{s}`"))?;
        let count: usize = parts[2].parse().with_context(|| format!("bad count in `{s}`"))?;
        if !(lo > 0.0 && hi >= lo) || count == 0 {
            bail!("geometric grid needs 0 < lo ≤ hi and count ≥ 1, got `{s}`");
        }
        return Ok(geometric(lo, hi, count));
    }
    s.split(',')
        .map(|t| t.trim().parse::<f64>().with_context(|| format!("bad n value `{t}`")))
        .collect()
}

pub fn geometric(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<CommandKind>,
    /// Selector such as `dixon:d=3,eta=0.2`, or a path to a JSON file.
    pub problem: Option<String>,
    pub n_list: Option<NList>,
    pub relax_a: Option<f64>,
    pub output: Option<OutputFormat>,
    pub out_path: Option<PathBuf>,
    pub constants: Option<ConstantSource>,
    pub ceil: bool,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Fields set in `over` win.
    pub fn merged(self, over: RunConfig) -> Self {
        Self {
            command: over.command.or(self.command),
            problem: over.problem.or(self.problem),
            n_list: over.n_list.or(self.n_list),
            relax_a: over.relax_a.or(self.relax_a),
            output: over.output.or(self.output),
            out_path: over.out_path.or(self.out_path),
            constants: over.constants.or(self.constants),
            ceil: over.ceil || self.ceil,
        }
    }
}
