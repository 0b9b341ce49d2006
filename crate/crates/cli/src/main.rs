//! `perpot`: batch front end for periodic layer potential experiments.
//!
//! ```text
//! perpot <eval-green|jump-check|solve|asymptotics|shape-sweep> --config run.toml [--out dir] [--workers n] [--verbose]
//! ```
//!
//! Exit status: 0 when every check passes, 1 when a check fails or a run
//! errors, 2 for an invalid configuration.

mod commands;
mod config;
mod data;
mod output;

use clap::Parser;
use config::{parse_config, Command};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "perpot", version, about = "Periodic layer potentials: kernels, jump checks, solves and sweeps")]
struct Cli {
    command: Command,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Directory for CSV tables, summary.json and the resolved config.
    #[arg(long, default_value = "perpot-out")]
    out: PathBuf,
    /// Worker threads; all available cores when omitted.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    verbose: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "debug" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();

    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            log::error!("cannot read {}: {e}", cli.config.display());
            return ExitCode::from(2);
        }
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(errs) => {
            for e in errs {
                log::error!("config: {e}");
            }
            return ExitCode::from(2);
        }
    };
    let v = cfg.validate(cli.command);
    for w in &v.warnings {
        log::warn!("{w}");
    }
    if !v.errors.is_empty() {
        for e in &v.errors {
            log::error!("config: {e}");
        }
        return ExitCode::from(2);
    }
    cfg.command = Some(cli.command);
    let resolved = toml::to_string(&cfg).expect("config serializes");
    log::info!("resolved config:\n{resolved}");

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.workers {
        pool = pool.num_threads(n.max(1));
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            log::error!("worker pool: {e}");
            return ExitCode::from(1);
        }
    };
    log::info!("running {} with {} worker(s)", cli.command.name(), pool.current_num_threads());
    let start = std::time::Instant::now();
    let outcome = match pool.install(|| commands::run(cli.command, &cfg)) {
        Ok(o) => o,
        Err(e) => {
            log::error!("{} failed: {e:#}", cli.command.name());
            return ExitCode::from(1);
        }
    };
    log::info!("finished in {:.2?}", start.elapsed());
    if let Err(e) = outcome.write(&cli.out, cli.command.name(), &v.warnings, &resolved) {
        log::error!("writing {}: {e}", cli.out.display());
        return ExitCode::from(1);
    }
    print!("{}", outcome.report());
    if outcome.passed() {
        ExitCode::SUCCESS
    } else {
        for c in outcome.checks.iter().filter(|c| !c.passed) {
            log::error!("check failed: {}", c.describe());
        }
        ExitCode::from(1)
    }
}
