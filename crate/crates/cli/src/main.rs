use std::path::PathBuf;
use std::process::ExitCode;

use blowup_cli::pipeline::{execute, Options, Verb};
use blowup_cli::suite::run_suite;
use clap::{Args, Parser, Subcommand};

/// Pseudospectral blow-up experiments for ∂ₜω = ωR(ω).
#[derive(Parser)]
#[command(name = "blowup", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Seed for randomized checks; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Treat warnings as errors (exit code 6).
    #[arg(long)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Certificate, time integration and monitors for one scenario.
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Certificate only, no time integration.
    Certify {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Polar-model experiments.
    Polar {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Every scenario of a manifest, in parallel.
    Suite {
        manifest: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Worker threads (default: available parallelism).
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn options(c: Common) -> Options {
    Options {
        out: c.out,
        seed: c.seed,
        strict: c.strict,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (verb, config, common) = match cli.command {
        Command::Run { config, common } => (Verb::Run, config, common),
        Command::Certify { config, common } => (Verb::Certify, config, common),
        Command::Polar { config, common } => (Verb::Polar, config, common),
        Command::Suite {
            manifest,
            common,
            workers,
        } => {
            let workers = workers
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
                .max(1);
            let out = common.out.clone();
            let report = run_suite(&manifest, &options(common), workers);
            if let Some(e) = &report.error {
                eprintln!("error: {}", e.message);
            }
            for s in &report.scenarios {
                println!(
                    "{:<6} {:<28} {} (expected {})",
                    if s.passed { "pass" } else { "FAIL" },
                    s.name,
                    s.status.as_str(),
                    s.expected
                );
            }
            for c in &report.criteria {
                println!(
                    "criterion {:>2}: {} ({}/{} checks)",
                    c.criterion,
                    if c.passed { "pass" } else { "FAIL" },
                    c.checks_passed,
                    c.checks
                );
            }
            println!("{} -> {}", report.status.as_str(), out.join("suite_report.json").display());
            return ExitCode::from(report.exit_code);
        }
    };
    let out = common.out.clone();
    let report = execute(verb, &config, &options(common));
    if let Some(e) = &report.error {
        eprintln!("error: {}", e.message);
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for c in report.checks.iter().filter(|c| !c.passed) {
        eprintln!("check failed: {}: {}", c.name, c.detail);
    }
    println!(
        "{} -> {}",
        report.status.as_str(),
        out.join(&report.name).join("report.json").display()
    );
    ExitCode::from(report.exit_code)
}
