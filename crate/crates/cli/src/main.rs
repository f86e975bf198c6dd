//! `kdv`: batch driver for the periodic KdV coefficient experiments.
//!
//! Exit codes: 0 ok, 1 validation or runtime error, 2 failed check.

mod commands;
mod config;

use anyhow::{Context, Result};
use clap::Parser;
use config::{Command, Format, RunConfig};
use kdv_core::io::Summary;
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "kdv", version, about = "Periodic KdV Fourier-coefficient experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// key=value file; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Galerkin cutoff (comma list for estimates)
    #[arg(long, global = true)]
    m: Option<String>,
    /// split index list for the third form
    #[arg(long, global = true)]
    n: Option<String>,
    #[arg(long, global = true)]
    dt: Option<String>,
    /// final time
    #[arg(long = "T", global = true)]
    t_end: Option<String>,
    /// Sobolev index of random data
    #[arg(long, global = true)]
    s: Option<String>,
    /// Sobolev index list for lipschitz
    #[arg(long, global = true)]
    theta: Option<String>,
    /// rotation rate list for burgers
    #[arg(long, global = true)]
    omega: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    #[arg(long, global = true)]
    trials: Option<String>,
    #[arg(long, global = true)]
    tol: Option<String>,
    /// datum amplitude
    #[arg(long, global = true)]
    amp: Option<String>,
    /// perturbation size for lipschitz
    #[arg(long, global = true)]
    eps: Option<String>,
    /// strip half-width for burgers
    #[arg(long, global = true)]
    strip: Option<String>,
    /// random | mode
    #[arg(long, global = true)]
    datum: Option<String>,
    /// initial state file (.csv with k,re,im or .json)
    #[arg(long, global = true)]
    input: Option<String>,
    /// appendix-default | appendix-empirical | k3
    #[arg(long, global = true)]
    suite: Option<String>,
    /// record every stride-th step
    #[arg(long, global = true)]
    stride: Option<String>,
    /// output directory
    #[arg(long, global = true)]
    out: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// report failed checks with exit code 0
    #[arg(long, global = true)]
    lenient: bool,
}

impl Cli {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::defaults(self.command);
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            cfg.apply_file(&text).with_context(|| format!("in {}", path.display()))?;
        }
        let flags = [
            ("m", &self.m),
            ("n", &self.n),
            ("dt", &self.dt),
            ("T", &self.t_end),
            ("s", &self.s),
            ("theta", &self.theta),
            ("omega", &self.omega),
            ("seed", &self.seed),
            ("trials", &self.trials),
            ("tol", &self.tol),
            ("amp", &self.amp),
            ("eps", &self.eps),
            ("strip", &self.strip),
            ("datum", &self.datum),
            ("input", &self.input),
            ("suite", &self.suite),
            ("stride", &self.stride),
            ("out", &self.out),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if let Some(f) = self.format {
            cfg.format = f;
        }
        if self.lenient {
            cfg.strict = false;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    // clap's own usage errors would exit with 2, which is reserved for failed checks
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let cfg = match cli.resolve() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    match execute(&cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) if !cfg.strict => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn execute(cfg: &RunConfig) -> Result<bool> {
    let out = commands::run(cfg)?;
    let summary = Summary::new(cfg.command.name(), cfg, &out.result)?;
    let path = cfg.out.join(format!("{}.summary.json", cfg.command.name()));
    summary.write(BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?))?;
    // replayable with --config
    let replay = cfg.out.join(format!("{}.config", cfg.command.name()));
    std::fs::write(&replay, cfg.to_kv()).with_context(|| format!("creating {}", replay.display()))?;
    println!(
        "{}: {} (data {}, summary {})",
        cfg.command.name(),
        if out.pass { "pass" } else { "FAIL" },
        out.data.display(),
        path.display()
    );
    Ok(out.pass)
}
