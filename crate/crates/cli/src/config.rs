//! Run configuration: per-command defaults, `key=value` files and flag overrides.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Galerkin integration with energy report
    Simulate,
    /// Residuals of the three integrated forms on one trajectory
    FormsCheck,
    /// Resonant closed form against brute-force enumeration
    Resonance,
    /// Explicit and dense inversion of the linearized operator
    Invert,
    /// Rotating Burgers blow-up scan over an Omega sweep
    Burgers,
    /// Named suite of operator-bound ratio tests
    Estimates,
    /// Perturbation growth at a list of Sobolev indices
    Lipschitz,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::FormsCheck => "forms-check",
            Command::Resonance => "resonance",
            Command::Invert => "invert",
            Command::Burgers => "burgers",
            Command::Estimates => "estimates",
            Command::Lipschitz => "lipschitz",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Initial datum: a seeded random state or the single mode `amp (e_1 + e_-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Datum {
    Random,
    Mode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub m: Vec<i64>,
    pub n: Vec<i64>,
    pub dt: f64,
    #[serde(rename = "T")]
    pub t_end: f64,
    pub s: f64,
    pub theta: Vec<f64>,
    pub omega: Vec<f64>,
    pub seed: u64,
    pub trials: usize,
    pub tol: f64,
    pub amp: f64,
    pub eps: f64,
    pub strip: f64,
    pub datum: Datum,
    pub input: Option<PathBuf>,
    pub suite: String,
    pub stride: usize,
    pub out: PathBuf,
    pub format: Format,
    pub strict: bool,
}

/// Keys accepted in config files and as flags, in output order.
pub const KEYS: [&str; 21] = [
    "m", "n", "dt", "T", "s", "theta", "omega", "seed", "trials", "tol", "amp", "eps", "strip", "datum", "input",
    "suite", "stride", "out", "format", "strict", "command",
];

impl RunConfig {
    /// Defaults reproduce the acceptance runs of each command.
    pub fn defaults(command: Command) -> Self {
        let base = RunConfig {
            command,
            m: vec![16],
            n: vec![2, 4, 8],
            dt: 1e-4,
            t_end: 0.5,
            s: 0.0,
            theta: vec![-0.5, 0.0, 1.0],
            omega: vec![0.0, 4.0],
            seed: 0,
            trials: 50,
            tol: 1e-6,
            amp: 1.0,
            eps: 1e-6,
            strip: 2f64.acosh(),
            datum: Datum::Random,
            input: None,
            suite: "appendix-default".into(),
            stride: 1,
            out: PathBuf::from("out"),
            format: Format::Csv,
            strict: true,
        };
        match command {
            Command::Simulate => RunConfig { m: vec![32], t_end: 1.0, seed: 2024, stride: 100, tol: 1e-8, ..base },
            Command::FormsCheck => RunConfig { datum: Datum::Mode, amp: 0.5, ..base },
            Command::Resonance => RunConfig { m: vec![32], trials: 100, seed: 3000, tol: 1e-14, ..base },
            Command::Invert => RunConfig { tol: 1e-8, ..base },
            Command::Burgers => RunConfig { amp: 0.5, t_end: 100.0, tol: 0.5, ..base },
            Command::Estimates => RunConfig { m: vec![8, 16, 32], trials: 1000, seed: 8, ..base },
            Command::Lipschitz => RunConfig { dt: 1e-3, t_end: 1.0, trials: 4, seed: 40, stride: 10, ..base },
        }
    }

    /// Sets one field from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        let ctx = || format!("invalid value {v:?} for {key}");
        match key {
            "m" => self.m = parse_list(v).with_context(ctx)?,
            "n" => self.n = parse_list(v).with_context(ctx)?,
            "dt" => self.dt = v.parse().with_context(ctx)?,
            "T" => self.t_end = v.parse().with_context(ctx)?,
            "s" => self.s = v.parse().with_context(ctx)?,
            "theta" => self.theta = parse_list(v).with_context(ctx)?,
            "omega" => self.omega = parse_list(v).with_context(ctx)?,
            "seed" => self.seed = v.parse().with_context(ctx)?,
            "trials" => self.trials = v.parse().with_context(ctx)?,
            "tol" => self.tol = v.parse().with_context(ctx)?,
            "amp" => self.amp = v.parse().with_context(ctx)?,
            "eps" => self.eps = v.parse().with_context(ctx)?,
            "strip" => self.strip = v.parse().with_context(ctx)?,
            "datum" => self.datum = Datum::from_str(v, true).map_err(|e| anyhow!(e)).with_context(ctx)?,
            "input" => self.input = if v.is_empty() { None } else { Some(PathBuf::from(v)) },
            "suite" => self.suite = v.to_string(),
            "stride" => self.stride = v.parse().with_context(ctx)?,
            "out" => self.out = PathBuf::from(v),
            "format" => self.format = Format::from_str(v, true).map_err(|e| anyhow!(e)).with_context(ctx)?,
            "strict" => self.strict = v.parse().with_context(ctx)?,
            "command" => {
                if v != self.command.name() {
                    bail!("config file is for {v:?}, not {}", self.command.name());
                }
            }
            _ => bail!("unknown key {key:?}"),
        }
        Ok(())
    }

    /// Applies `key=value` lines; `#` starts a comment.
    pub fn apply_file(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("line {}: expected key=value", i + 1))?;
            self.set(k.trim(), v).with_context(|| format!("line {}", i + 1))?;
        }
        Ok(())
    }

    /// Inverse of `apply_file`.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let value = match key {
                "m" => join(&self.m),
                "n" => join(&self.n),
                "dt" => self.dt.to_string(),
                "T" => self.t_end.to_string(),
                "s" => self.s.to_string(),
                "theta" => join(&self.theta),
                "omega" => join(&self.omega),
                "seed" => self.seed.to_string(),
                "trials" => self.trials.to_string(),
                "tol" => self.tol.to_string(),
                "amp" => self.amp.to_string(),
                "eps" => self.eps.to_string(),
                "strip" => self.strip.to_string(),
                "datum" => format!("{:?}", self.datum).to_lowercase(),
                "input" => self.input.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
                "suite" => self.suite.clone(),
                "stride" => self.stride.to_string(),
                "out" => self.out.display().to_string(),
                "format" => format!("{:?}", self.format).to_lowercase(),
                "strict" => self.strict.to_string(),
                _ => self.command.name().to_string(),
            };
            out.push_str(&format!("{key}={value}\n"));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.m.is_empty() || self.m.iter().any(|&m| m < 1) {
            bail!("m must be a non-empty list of positive integers");
        }
        if self.m.len() > 1 && self.command != Command::Estimates {
            bail!("{} takes a single m", self.command.name());
        }
        if self.n.iter().any(|&n| n < 0) {
            bail!("n must be >= 0");
        }
        for (name, x) in [("dt", self.dt), ("tol", self.tol)] {
            if !(x > 0.0 && x.is_finite()) {
                bail!("{name} must be positive, got {x}");
            }
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            bail!("T must be >= 0, got {}", self.t_end);
        }
        if self.stride == 0 {
            bail!("stride must be >= 1");
        }
        if self.trials == 0 {
            bail!("trials must be >= 1");
        }
        if self.command == Command::Burgers && self.omega.is_empty() {
            bail!("omega list is empty");
        }
        if self.command == Command::Lipschitz && self.theta.is_empty() {
            bail!("theta list is empty");
        }
        if ![self.s, self.amp, self.eps, self.strip].iter().all(|x| x.is_finite()) {
            bail!("s, amp, eps and strip must be finite");
        }
        Ok(())
    }
}

fn parse_list<T: FromStr>(v: &str) -> Result<Vec<T>>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    v.split(',').filter(|x| !x.trim().is_empty()).map(|x| Ok(x.trim().parse::<T>()?)).collect()
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}
