//! Verification suites and report assembly behind the `ccr-lab` binary.

mod suites;
mod sweep;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use ccr_core::grid::Scheme;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use suites::REFERENCES;
pub use sweep::{interval_sweep_csv, weyl_sweep_csv, SWEEP_HEADER};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum UsageError {
    #[error("{0}")]
    Invalid(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, UsageError> {
    Err(UsageError::Invalid(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Fock,
    Analytic,
    Weyl,
    Schrodinger,
    Irregular,
    Symbolic,
    All,
}

impl Suite {
    pub const INDIVIDUAL: [Suite; 6] = [
        Suite::Fock,
        Suite::Analytic,
        Suite::Weyl,
        Suite::Schrodinger,
        Suite::Irregular,
        Suite::Symbolic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Fock => "fock",
            Suite::Analytic => "analytic",
            Suite::Weyl => "weyl",
            Suite::Schrodinger => "schrodinger",
            Suite::Irregular => "irregular",
            Suite::Symbolic => "symbolic",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = UsageError;
    fn from_str(s: &str) -> Result<Self, UsageError> {
        Suite::INDIVIDUAL
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| UsageError::Invalid(format!("unknown suite `{s}`")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub half_width: f64,
    pub m: usize,
    pub scheme: Scheme,
}

impl FromStr for GridConfig {
    type Err = UsageError;
    /// `L,M,scheme`, e.g. `10,256,spectral`.
    fn from_str(s: &str) -> Result<Self, UsageError> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [l, m, scheme] = parts[..] else {
            return invalid(format!("grid must be L,M,scheme, got `{s}`"));
        };
        Ok(Self {
            half_width: l
                .parse()
                .map_err(|_| UsageError::Invalid(format!("bad grid half-width `{l}`")))?,
            m: m.parse().map_err(|_| UsageError::Invalid(format!("bad grid size `{m}`")))?,
            scheme: scheme
                .parse()
                .map_err(|_| UsageError::Invalid(format!("unknown scheme `{scheme}`")))?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalConfig {
    pub a: f64,
    pub b: f64,
}

impl FromStr for IntervalConfig {
    type Err = UsageError;
    fn from_str(s: &str) -> Result<Self, UsageError> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| UsageError::Invalid(format!("interval must be a,b, got `{s}`")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| UsageError::Invalid(format!("bad interval endpoint `{v}`")))
        };
        Ok(Self {
            a: parse(a)?,
            b: parse(b)?,
        })
    }
}

/// Everything a suite run depends on. Runs are deterministic functions of
/// this value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub suite: Suite,
    pub dim: usize,
    pub t: f64,
    pub s: f64,
    pub k_max: usize,
    /// Weyl guard band; `None` means `dim / 4`.
    pub guard: Option<usize>,
    pub grid: GridConfig,
    pub interval: IntervalConfig,
    pub seed: u64,
}

pub const DIM_RANGE: (usize, usize) = (8, 1024);
pub const K_MAX_RANGE: (usize, usize) = (1, 200);
pub const GRID_M_RANGE: (usize, usize) = (16, 4096);
pub const MAX_PARAM: f64 = 10.0;

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            suite: Suite::All,
            dim: 64,
            t: 0.5,
            s: 0.5,
            k_max: 40,
            guard: None,
            grid: GridConfig {
                half_width: 10.0,
                m: 256,
                scheme: Scheme::Spectral,
            },
            interval: IntervalConfig { a: 0.0, b: 1.0 },
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn for_suite(suite: Suite) -> Self {
        Self {
            suite,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), UsageError> {
        let in_range = |v: usize, (lo, hi): (usize, usize)| (lo..=hi).contains(&v);
        if !in_range(self.dim, DIM_RANGE) {
            return invalid(format!("--dim must lie in {}..={}, got {}", DIM_RANGE.0, DIM_RANGE.1, self.dim));
        }
        if !in_range(self.k_max, K_MAX_RANGE) {
            return invalid(format!(
                "--kmax must lie in {}..={}, got {}",
                K_MAX_RANGE.0, K_MAX_RANGE.1, self.k_max
            ));
        }
        for (flag, v) in [("--t", self.t), ("--s", self.s)] {
            if !v.is_finite() || v.abs() > MAX_PARAM {
                return invalid(format!("{flag} must be finite with |value| <= {MAX_PARAM}, got {v}"));
            }
        }
        if let Some(g) = self.guard {
            if g >= self.dim {
                return invalid(format!("--guard {g} must be below --dim {}", self.dim));
            }
        }
        let g = &self.grid;
        if !(g.half_width.is_finite() && g.half_width > 0.0) {
            return invalid(format!("grid half-width must be positive, got {}", g.half_width));
        }
        if !in_range(g.m, GRID_M_RANGE) {
            return invalid(format!(
                "grid size must lie in {}..={}, got {}",
                GRID_M_RANGE.0, GRID_M_RANGE.1, g.m
            ));
        }
        let iv = &self.interval;
        if !(iv.a.is_finite() && iv.b.is_finite() && iv.b > iv.a) {
            return invalid(format!("--interval needs a < b, got {},{}", iv.a, iv.b));
        }
        Ok(())
    }

    pub fn guard(&self) -> usize {
        self.guard.unwrap_or(self.dim / 4)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The corrected statement holds, but the printed form it replaces does
    /// not.
    Flagged,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Flagged => "flagged",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// The relation being checked, written out as a formula.
    pub reference: String,
    pub status: Status,
    pub measured: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub suite: Suite,
    pub config: RunConfig,
    /// Sorted by name.
    pub checks: Vec<Check>,
    pub wall_time_s: f64,
}

impl Report {
    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(self.failed())
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["name", "reference", "status", "measured", "tolerance", "detail"])
            .expect("in-memory write");
        let fmt_opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        for c in &self.checks {
            w.write_record([
                c.name.as_str(),
                c.reference.as_str(),
                &c.status.to_string(),
                &fmt_opt(c.measured),
                &fmt_opt(c.tolerance),
                c.detail.as_str(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("suite {} (seed {})\n", self.suite, self.config.seed);
        for c in &self.checks {
            let measured = c.measured.map(|x| format!("{x:.3e}")).unwrap_or_else(|| "-".into());
            let tol = c.tolerance.map(|x| format!("{x:.1e}")).unwrap_or_else(|| "-".into());
            out.push_str(&format!(
                "{:<8} {:<40} measured {:>10}  tol {:>8}  {}\n",
                c.status.to_string().to_uppercase(),
                c.name,
                measured,
                tol,
                c.reference
            ));
            if !c.detail.is_empty() {
                out.push_str(&format!("         {}\n", c.detail));
            }
        }
        let count = |s: Status| self.checks.iter().filter(|c| c.status == s).count();
        out.push_str(&format!(
            "{} pass, {} flagged, {} fail in {:.2}s\n",
            count(Status::Pass),
            count(Status::Flagged),
            count(Status::Fail),
            self.wall_time_s
        ));
        out
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Text => self.to_text(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

impl FromStr for OutputFormat {
    type Err = UsageError;
    fn from_str(s: &str) -> Result<Self, UsageError> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "text" => Ok(Self::Text),
            _ => invalid(format!("unknown format `{s}` (json, csv, text)")),
        }
    }
}

/// Runs every check of the configured suite. Numeric failures inside a check
/// become `fail` records; only an invalid config is an error.
pub fn run_suite(config: &RunConfig) -> Result<Report, UsageError> {
    config.validate()?;
    let start = Instant::now();
    let suites: Vec<Suite> = match config.suite {
        Suite::All => Suite::INDIVIDUAL.to_vec(),
        s => vec![s],
    };
    let mut checks: Vec<Check> = suites.into_iter().flat_map(|s| suites::run(s, config)).collect();
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(Report {
        schema: SCHEMA_VERSION,
        suite: config.suite,
        config: config.clone(),
        checks,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grid_and_interval() {
        let g: GridConfig = "10,256,spectral".parse().unwrap();
        assert_eq!((g.half_width, g.m, g.scheme), (10.0, 256, Scheme::Spectral));
        assert!("10,256".parse::<GridConfig>().is_err());
        assert!("10,256,fancy".parse::<GridConfig>().is_err());
        let iv: IntervalConfig = "-1.5, 2".parse().unwrap();
        assert_eq!((iv.a, iv.b), (-1.5, 2.0));
    }

    #[test]
    fn zero_dim_is_usage_error() {
        let cfg = RunConfig {
            dim: 0,
            ..RunConfig::for_suite(Suite::Fock)
        };
        assert!(run_suite(&cfg).is_err());
    }

    #[test]
    fn other_invalid_configs() {
        let base = RunConfig::default();
        for cfg in [
            RunConfig { t: f64::NAN, ..base.clone() },
            RunConfig { k_max: 0, ..base.clone() },
            RunConfig { guard: Some(64), ..base.clone() },
            RunConfig {
                interval: IntervalConfig { a: 1.0, b: 1.0 },
                ..base.clone()
            },
        ] {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
        assert!(base.validate().is_ok());
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::INDIVIDUAL.into_iter().chain([Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }
}
