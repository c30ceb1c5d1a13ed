use std::path::PathBuf;

use apilab::error::Result;
use apilab::sweep::{run_sweep, write_sweep_outputs, SweepSpec};
use clap::Args;

#[derive(Args)]
pub struct SweepArgs {
    /// Sweep specification (JSON)
    #[arg(long)]
    pub spec: PathBuf,
    /// Output directory
    #[arg(long = "out-dir")]
    pub out_dir: PathBuf,
    /// Worker threads: 1 = sequential, 0 = library default
    #[arg(long, env = "APILAB_JOBS", default_value_t = 0)]
    pub jobs: usize,
    /// Skip writing per-run trace files
    #[arg(long = "no-traces", default_value_t = false)]
    pub no_traces: bool,
}

pub fn run(args: SweepArgs) -> Result<i32> {
    let spec = SweepSpec::read_file(&args.spec)?;
    let outcome = run_sweep(&spec, args.jobs)?;
    write_sweep_outputs(&spec, &outcome, &args.out_dir, !args.no_traces)?;
    println!(
        "cells={} runs={} failures={} -> {}",
        outcome.cells.len(),
        outcome.runs.len(),
        outcome.failures.len(),
        args.out_dir.display()
    );
    if outcome.failures.is_empty() {
        Ok(0)
    } else {
        for failure in &outcome.failures {
            eprintln!("failed: {failure}");
        }
        Ok(4)
    }
}
