use std::path::PathBuf;
use std::process::ExitCode;

use alifs::config::{BurnInSetting, RunConfig, ThetaGrid};
use alifs::report::{self, Report};
use alifs::{pipeline, Command};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "alifs",
    version,
    about = "Tail analysis and simulation of asymptotically linear iterated function systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify the model, solve for the tail exponents and write the spectral report.
    Analyze(Opts),
    /// Analyze, then draw stationary samples and write samples.bin and tail curves.
    Simulate(Opts),
    /// Simulate, then run the verification ledger; nonzero exit on a failed required check.
    Verify(Opts),
    /// Print a summary of an existing report.json and write checks.csv.
    Report(Opts),
}

#[derive(Args)]
struct Opts {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Advisory (Monte Carlo) checks also decide the exit code.
    #[arg(long)]
    strict: bool,
    /// Grid for ρ(θ), as lo:hi:n.
    #[arg(long = "theta-grid")]
    theta_grid: Option<ThetaGrid>,
    #[arg(long)]
    samples: Option<usize>,
    /// "auto" or a fixed number of steps.
    #[arg(long = "burn-in")]
    burn_in: Option<BurnInSetting>,
    #[arg(long = "hill-k")]
    hill_k: Option<usize>,
}

impl Opts {
    fn apply(&self, cfg: &mut RunConfig) {
        if self.seed.is_some() {
            cfg.seed = self.seed;
        }
        if self.threads.is_some() {
            cfg.threads = self.threads;
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        cfg.strict |= self.strict;
        if let Some(g) = self.theta_grid {
            cfg.analyze.theta_grid = g;
        }
        if let Some(n) = self.samples {
            cfg.simulate.samples = n;
        }
        if let Some(b) = self.burn_in {
            cfg.simulate.burn_in = b;
        }
        if self.hill_k.is_some() {
            cfg.simulate.hill_k = self.hill_k;
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let (cmd, opts) = match cli.command {
        Cmd::Analyze(o) => (Command::Analyze, o),
        Cmd::Simulate(o) => (Command::Simulate, o),
        Cmd::Verify(o) => (Command::Verify, o),
        Cmd::Report(o) => {
            let dir = o
                .out
                .clone()
                .ok_or_else(|| anyhow::anyhow!("report needs --out DIR holding report.json"))?;
            let r = Report::read(&dir)?;
            alifs::io::write_checks(&dir.join("checks.csv"), &r.checks)?;
            print!("{}", report::summary(&r));
            return Ok(r.verdict.is_none_or(|v| v.ok));
        }
    };
    let path = opts
        .config
        .clone()
        .ok_or_else(|| anyhow::anyhow!("--config PATH is required"))?;
    let mut cfg = RunConfig::load(&path)?;
    opts.apply(&mut cfg);
    cfg.validate()?;
    let out = cfg.out.clone();
    let r = pipeline::run(cmd, &cfg, out.as_deref())?;
    print!("{}", report::summary(&r));
    Ok(r.verdict.is_none_or(|v| v.ok))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
