//! Runs a shipped config through the harness and verifies the written manifest.
use std::path::Path;

use dnlab::harness::{list_experiments, run_config, verify, ExperimentConfig};

fn main() -> dnlab::Result<()> {
    for e in list_experiments() {
        println!("{:<14} {}", e.name, e.summary);
    }
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/dn.toml");
    let mut cfg = ExperimentConfig::load(&path)?;
    cfg.output = Some(
        std::env::temp_dir()
            .join("dnlab-example-dn")
            .to_string_lossy()
            .into(),
    );
    let out = run_config(&cfg)?;
    for c in &out.manifest.checks {
        println!(
            "{} {}: {:e}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value
        );
    }
    let r = verify(&out.manifest_path())?;
    println!(
        "{}: {} outputs, verified {}",
        out.manifest_path().display(),
        r.checked,
        r.ok()
    );
    Ok(())
}
