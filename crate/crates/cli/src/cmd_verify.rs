use std::path::PathBuf;

use apilab::bounds::verify_trace;
use apilab::concentrability::ConcentrabilityReport;
use apilab::error::{Error, Result};
use apilab::trace::RunTrace;
use clap::Args;

#[derive(Args)]
pub struct VerifyArgs {
    /// Trace CSV produced by `apilab run` or a sweep
    #[arg(long)]
    pub trace: PathBuf,
    /// Concentrability report produced by `apilab analyze`
    #[arg(long)]
    pub report: PathBuf,
    /// Bound-report CSV output path
    #[arg(long)]
    pub out: PathBuf,
    /// Optional summary JSON output path
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

pub fn run(args: VerifyArgs) -> Result<i32> {
    let trace = RunTrace::read_file(&args.trace)?;
    let report = ConcentrabilityReport::read_file(&args.report)?;
    if trace.mdp_fingerprint != report.mdp_fingerprint {
        return Err(Error::config(format!(
            "MDP fingerprint mismatch: trace {} vs report {}",
            trace.mdp_fingerprint, report.mdp_fingerprint
        )));
    }
    let bounds = verify_trace(&trace, &report)?;
    std::fs::write(&args.out, bounds.to_csv_string())?;
    if let Some(path) = &args.summary {
        std::fs::write(path, bounds.summary_json())?;
    }
    println!("{}", bounds.summary_json());
    if bounds.all_pass() {
        Ok(0)
    } else {
        Ok(5)
    }
}
