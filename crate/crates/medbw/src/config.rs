//! Run configuration: per-command defaults, a flat `key = value` file, and
//! command-line overrides, applied in that order.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use medbw_core::{NuConvention, Scenario, ScenarioKind};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Seed used when none is given.
pub const REFERENCE_SEED: u64 = 20_190_521;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Figure1,
    Figure2,
    Figure3,
    Figure4,
    Figure5,
    CltSuite,
    GapCheck,
    Bandwidth,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Figure1 => "figure1",
            Command::Figure2 => "figure2",
            Command::Figure3 => "figure3",
            Command::Figure4 => "figure4",
            Command::Figure5 => "figure5",
            Command::CltSuite => "clt-suite",
            Command::GapCheck => "gap-check",
            Command::Bandwidth => "bandwidth",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioChoice {
    Mean,
    Var,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunConfig {
    pub command: Command,
    /// `None` runs both panels where a command has two.
    pub scenario: Option<ScenarioChoice>,
    pub mu: f64,
    /// Standard deviation of `Q` in the variance scenario.
    pub sigma: f64,
    pub alpha: f64,
    pub dim: usize,
    pub n: usize,
    pub ns: Vec<usize>,
    pub replicates: usize,
    pub seed: u64,
    pub grid_mu: Vec<f64>,
    /// Variances `σ²`.
    pub grid_sigma2: Vec<f64>,
    pub grid_nu: Vec<f64>,
    pub grid_t: Vec<f64>,
    pub grid_lambda: Vec<f64>,
    pub bins: usize,
    pub lambda1_points: usize,
    pub lambda1_reps: usize,
    pub nu_convention: NuConvention,
    pub threshold: Option<f64>,
    pub ecdf_n: usize,
    pub ecdf_replicates: usize,
    pub gap_replicates: usize,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

fn arange(start: f64, step: f64, stop: f64) -> Vec<f64> {
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| start + step * i as f64).collect()
}

fn geomspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

impl RunConfig {
    /// Defaults for `command`.
    pub fn defaults(command: Command) -> Self {
        let mut c = RunConfig {
            command,
            scenario: None,
            mu: 1.0,
            sigma: 2.0,
            alpha: 0.5,
            dim: 1,
            n: 1000,
            ns: vec![100, 200, 400],
            replicates: 2000,
            seed: REFERENCE_SEED,
            grid_mu: arange(0.25, 0.25, 10.0),
            grid_sigma2: arange(1.25, 0.25, 16.0),
            grid_nu: geomspace(0.01, 100.0, 201),
            grid_t: arange(0.1, 0.1, 200.0),
            grid_lambda: vec![200.0, 1000.0, 5000.0],
            bins: 50,
            lambda1_points: 1000,
            lambda1_reps: 5,
            nu_convention: NuConvention::HalfMedian,
            threshold: None,
            ecdf_n: 2000,
            ecdf_replicates: 20,
            gap_replicates: 100_000,
            input: None,
            out: None,
            format: Format::Csv,
        };
        match command {
            Command::Figure1 => {
                c.dim = 100;
                c.n = 400;
                c.alpha = 0.25;
                c.replicates = 10;
                c.mu = 1000.0;
                c.sigma = 2f64.sqrt();
            }
            Command::Figure3 => {
                c.grid_mu = arange(1.0, 1.0, 8.0);
                c.grid_sigma2 = arange(2.0, 2.0, 16.0);
            }
            Command::Figure4 => {
                c.grid_mu = vec![0.1, 0.5, 1.0, 2.0, 5.0, 10.0];
            }
            Command::Figure5 => {
                c.grid_sigma2 = vec![1.5, 2.0, 4.0, 8.0, 16.0];
                c.grid_t = arange(0.1, 0.1, 400.0);
            }
            Command::CltSuite => {
                c.grid_t = arange(0.2, 0.2, 10.0);
            }
            Command::GapCheck => {
                c.replicates = 100_000;
            }
            Command::Bandwidth => {}
            Command::Figure2 => {}
        }
        c
    }

    /// Applies one `key = value` setting. Keys accept `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        let bad = |what: &str| LabError::config(format!("invalid value for `{key}`: {what} (got `{value}`)"));
        let float = || value.parse::<f64>().map_err(|_| bad("expected a number"));
        let uint = || value.parse::<usize>().map_err(|_| bad("expected a nonnegative integer"));
        match key.as_str() {
            "scenario" => {
                self.scenario = match value {
                    "mean" => Some(ScenarioChoice::Mean),
                    "var" => Some(ScenarioChoice::Var),
                    "both" => None,
                    _ => return Err(bad("expected `mean`, `var` or `both`")),
                }
            }
            "mu" => self.mu = float()?,
            "sigma" => self.sigma = float()?,
            "alpha" => self.alpha = float()?,
            "dim" => self.dim = uint()?,
            "n" => self.n = uint()?,
            "ns" => {
                self.ns = value
                    .split(',')
                    .map(|v| v.trim().parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad("expected a comma-separated list of integers"))?
            }
            "replicates" => self.replicates = uint()?,
            "seed" => self.seed = value.parse().map_err(|_| bad("expected a 64-bit unsigned integer"))?,
            "grid-mu" => self.grid_mu = parse_grid(value).map_err(|e| bad(&e))?,
            "grid-sigma2" => self.grid_sigma2 = parse_grid(value).map_err(|e| bad(&e))?,
            "grid-nu" => self.grid_nu = parse_grid(value).map_err(|e| bad(&e))?,
            "grid-t" => self.grid_t = parse_grid(value).map_err(|e| bad(&e))?,
            "grid-lambda" => self.grid_lambda = parse_grid(value).map_err(|e| bad(&e))?,
            "bins" => self.bins = uint()?,
            "lambda1-points" => self.lambda1_points = uint()?,
            "lambda1-reps" => self.lambda1_reps = uint()?,
            "nu-convention" => {
                self.nu_convention = match value {
                    "half-median" => NuConvention::HalfMedian,
                    "median" => NuConvention::Median,
                    _ => return Err(bad("expected `half-median` or `median`")),
                }
            }
            "threshold" => self.threshold = Some(float()?),
            "ecdf-n" => self.ecdf_n = uint()?,
            "ecdf-replicates" => self.ecdf_replicates = uint()?,
            "gap-replicates" => self.gap_replicates = uint()?,
            "input" => self.input = Some(PathBuf::from(value)),
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => {
                self.format = match value {
                    "csv" => Format::Csv,
                    "json" => Format::Json,
                    _ => return Err(bad("expected `csv` or `json`")),
                }
            }
            "command" => {
                if value != self.command.name() {
                    return Err(bad(&format!("config file is for another command than `{}`", self.command.name())));
                }
            }
            "version" => {}
            _ => return Err(LabError::config(format!("unknown configuration key `{key}`"))),
        }
        Ok(())
    }

    /// Applies a flat `key = value` file; `#` starts a comment line.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        self.apply_text(&text)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| LabError::config(format!("line {}: expected `key = value`, got `{line}`", lineno + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    /// Checks cross-field invariants.
    pub fn validate(&self) -> Result<()> {
        let fail = |field: &str, why: String| Err(LabError::config(format!("`{field}`: {why}")));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return fail("alpha", format!("must lie strictly inside (0, 1), got {}", self.alpha));
        }
        if !self.mu.is_finite() {
            return fail("mu", format!("must be finite, got {}", self.mu));
        }
        if !(self.sigma >= 1.0 && self.sigma.is_finite()) {
            return fail("sigma", format!("must be finite and at least 1, got {}", self.sigma));
        }
        if self.dim == 0 {
            return fail("dim", "must be at least 1".into());
        }
        if self.n < 2 {
            return fail("n", format!("must be at least 2, got {}", self.n));
        }
        if self.bins == 0 {
            return fail("bins", "must be positive".into());
        }
        if self.replicates == 0 {
            return fail("replicates", "must be positive".into());
        }
        if self.lambda1_points < 10 {
            return fail("lambda1-points", format!("must be at least 10, got {}", self.lambda1_points));
        }
        if self.lambda1_reps == 0 {
            return fail("lambda1-reps", "must be positive".into());
        }
        for (name, grid) in [
            ("grid-mu", &self.grid_mu),
            ("grid-sigma2", &self.grid_sigma2),
            ("grid-nu", &self.grid_nu),
            ("grid-t", &self.grid_t),
            ("grid-lambda", &self.grid_lambda),
        ] {
            if grid.is_empty() {
                return fail(name, "must not be empty".into());
            }
            if grid.iter().any(|v| !v.is_finite()) {
                return fail(name, "values must be finite".into());
            }
            if grid.windows(2).any(|w| w[1] <= w[0]) {
                return fail(name, "must be strictly increasing".into());
            }
        }
        if self.grid_sigma2.iter().any(|&s| s < 1.0) {
            return fail("grid-sigma2", "variances must be at least 1".into());
        }
        if self.grid_nu.iter().any(|&v| v <= 0.0) {
            return fail("grid-nu", "bandwidths must be positive".into());
        }
        if self.ns.is_empty() || self.ns.windows(2).any(|w| w[1] <= w[0]) {
            return fail("ns", "must be a nonempty strictly increasing list".into());
        }
        Ok(())
    }

    /// The scenario selected by `scenario`, `mu`, `sigma`, `alpha` and `dim`.
    pub fn scenario_for(&self, choice: ScenarioChoice) -> Result<Scenario> {
        let kind = match choice {
            ScenarioChoice::Mean => ScenarioKind::MeanShift { mu: self.mu },
            ScenarioChoice::Var => ScenarioKind::VarianceScale { sigma: self.sigma },
        };
        Ok(Scenario::new(kind, self.alpha, self.dim)?)
    }

    /// Resolved settings as `key = value` pairs, readable by [`RunConfig::apply_text`].
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut pairs = vec![
            ("command", self.command.name().to_string()),
            (
                "scenario",
                match self.scenario {
                    Some(ScenarioChoice::Mean) => "mean",
                    Some(ScenarioChoice::Var) => "var",
                    None => "both",
                }
                .to_string(),
            ),
            ("mu", self.mu.to_string()),
            ("sigma", self.sigma.to_string()),
            ("alpha", self.alpha.to_string()),
            ("dim", self.dim.to_string()),
            ("n", self.n.to_string()),
            ("ns", self.ns.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")),
            ("replicates", self.replicates.to_string()),
            ("seed", self.seed.to_string()),
            ("grid-mu", list(&self.grid_mu)),
            ("grid-sigma2", list(&self.grid_sigma2)),
            ("grid-nu", list(&self.grid_nu)),
            ("grid-t", list(&self.grid_t)),
            ("grid-lambda", list(&self.grid_lambda)),
            ("bins", self.bins.to_string()),
            ("lambda1-points", self.lambda1_points.to_string()),
            ("lambda1-reps", self.lambda1_reps.to_string()),
            (
                "nu-convention",
                match self.nu_convention {
                    NuConvention::HalfMedian => "half-median",
                    NuConvention::Median => "median",
                }
                .to_string(),
            ),
            ("ecdf-n", self.ecdf_n.to_string()),
            ("ecdf-replicates", self.ecdf_replicates.to_string()),
            ("gap-replicates", self.gap_replicates.to_string()),
            ("format", match self.format {
                Format::Csv => "csv",
                Format::Json => "json",
            }
            .to_string()),
        ];
        if let Some(t) = self.threshold {
            pairs.push(("threshold", t.to_string()));
        }
        if let Some(p) = &self.input {
            pairs.push(("input", p.display().to_string()));
        }
        if let Some(p) = &self.out {
            pairs.push(("out", p.display().to_string()));
        }
        pairs
    }
}

/// Grid syntax: `a,b,c`, `start:step:stop` (inclusive), or
/// `geom:lo:hi:count` for logarithmic spacing.
pub fn parse_grid(text: &str) -> std::result::Result<Vec<f64>, String> {
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("`{s}` is not a number"));
    if let Some(rest) = text.strip_prefix("geom:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err("expected geom:lo:hi:count".into());
        }
        let (lo, hi) = (num(parts[0])?, num(parts[1])?);
        let count: usize = parts[2].trim().parse().map_err(|_| "count must be an integer".to_string())?;
        if !(lo > 0.0 && hi > lo) || count < 2 {
            return Err("geom grids need 0 < lo < hi and count >= 2".into());
        }
        return Ok(geomspace(lo, hi, count));
    }
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err("expected start:step:stop".into());
        }
        let (a, s, b) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(s > 0.0) || b < a {
            return Err("range grids need step > 0 and stop >= start".into());
        }
        if (b - a) / s > 1e7 {
            return Err("range grid is too long".into());
        }
        return Ok(arange(a, s, b));
    }
    text.split(',').map(num).collect()
}

/// Merges defaults, an optional file and explicit overrides, then validates.
pub fn resolve(command: Command, file: Option<&Path>, overrides: &BTreeMap<String, String>) -> Result<RunConfig> {
    let mut cfg = RunConfig::defaults(command);
    if let Some(path) = file {
        cfg.apply_file(path)?;
    }
    for (k, v) in overrides {
        cfg.set(k, v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("1,2,3").unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(parse_grid("0.25:0.25:1").unwrap(), vec![0.25, 0.5, 0.75, 1.0]);
        let g = parse_grid("geom:0.01:100:5").unwrap();
        assert_eq!(g.len(), 5);
        assert!((g[2] - 1.0).abs() < 1e-12);
        assert!(parse_grid("1,x").is_err());
        assert!(parse_grid("1:0:3").is_err());
        assert_eq!(arange(0.25, 0.25, 10.0).len(), 40);
        assert_eq!(arange(1.25, 0.25, 16.0).len(), 60);
    }

    #[test]
    fn pairs_round_trip() {
        let mut a = RunConfig::defaults(Command::Figure2);
        a.set("mu", "3.5").unwrap();
        a.set("grid_nu", "geom:0.1:10:7").unwrap();
        a.set("threshold", "0.7").unwrap();
        let text: String = a.to_pairs().iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
        let mut b = RunConfig::defaults(Command::Figure2);
        b.apply_text(&text).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors_name_the_field() {
        let mut c = RunConfig::defaults(Command::Figure2);
        let e = c.set("alpha", "abc").unwrap_err().to_string();
        assert!(e.contains("alpha"), "{e}");
        let e = c.set("colour", "red").unwrap_err().to_string();
        assert!(e.contains("colour"), "{e}");
        c.set("grid-mu", "3,2,1").unwrap();
        let e = c.validate().unwrap_err().to_string();
        assert!(e.contains("grid-mu"), "{e}");
        let e = c.apply_text("alpha 0.3").unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }
}
