use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dnlab::harness::{list_experiments, run_config, verify, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "lab",
    version,
    about = "Inverse potential problems from boundary data"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Override the grid size.
        #[arg(long)]
        n: Option<usize>,
        /// Override the seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the output directory.
        #[arg(long)]
        output: Option<String>,
    },
    /// List available experiments.
    List,
    /// Recompute the checksums recorded in a manifest.
    Verify { manifest: PathBuf },
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> dnlab::Result<u8> {
    match Cli::parse().cmd {
        Cmd::List => {
            for e in list_experiments() {
                println!("{:<14} {:<40} {}", e.name, e.summary, e.runtime);
                println!("{:<14} keys: {}", "", e.keys);
            }
            Ok(0)
        }
        Cmd::Run {
            config,
            n,
            seed,
            output,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(n) = n {
                cfg.n = n;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if output.is_some() {
                cfg.output = output;
            }
            let out = run_config(&cfg)?;
            let m = &out.manifest;
            for c in &m.checks {
                println!(
                    "{} {}: {:e} ({})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.threshold
                );
            }
            if let Some(e) = &m.error {
                eprintln!("error in stage '{}': {}", e.stage, e.message);
            }
            println!("manifest: {}", out.manifest_path().display());
            Ok(m.exit_code() as u8)
        }
        Cmd::Verify { manifest } => {
            let r = verify(&manifest)?;
            for p in &r.mismatched {
                println!("MISMATCH {}", p.display());
            }
            println!(
                "{} files checked, {} mismatched",
                r.checked,
                r.mismatched.len()
            );
            Ok(if r.ok() { 0 } else { 1 })
        }
    }
}
