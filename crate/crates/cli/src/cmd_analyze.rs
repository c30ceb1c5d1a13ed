use std::path::PathBuf;

use apilab::concentrability::{analyze, ordering_check, AnalysisOptions};
use apilab::error::Result;
use apilab::mdp::optimal_solve;
use clap::Args;

use crate::common::{load_mdp_file, DistSpec};

#[derive(Args)]
pub struct AnalyzeArgs {
    /// MDP JSON file
    #[arg(long)]
    pub mdp: PathBuf,
    /// Loss distribution mu: uniform | point:<s>
    #[arg(long, default_value = "uniform")]
    pub mu: DistSpec,
    /// Greedy distribution nu: uniform | occupancy | point:<s>
    #[arg(long, default_value = "uniform")]
    pub nu: DistSpec,
    /// Target interval width for the summed constants
    #[arg(long, default_value_t = 1e-6)]
    pub width: f64,
    /// Hard cap on the truncation horizon
    #[arg(long = "horizon-cap", default_value_t = 2000)]
    pub horizon_cap: usize,
    /// Worker threads (0 = library default)
    #[arg(long, env = "APILAB_JOBS", default_value_t = 0)]
    pub jobs: usize,
    /// Report output path
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: AnalyzeArgs) -> Result<i32> {
    let problem = load_mdp_file(&args.mdp, None)?;
    let optimal = optimal_solve(&problem.mdp)?;
    let mu = args.mu.resolve_mu(&problem.mdp)?;
    let nu = args.nu.resolve_nu(&problem.mdp, &mu, &optimal)?;
    let options = AnalysisOptions {
        width_target: args.width,
        horizon_cap: args.horizon_cap,
        jobs: args.jobs,
    };
    let mut report = analyze(&problem.mdp, &optimal.pi_star, &mu, &nu, &options)?;
    let ordering = ordering_check(&report, report.gamma);
    for row in &ordering.rows {
        println!(
            "{}: lhs={} rhs={} {}",
            row.id,
            row.lhs,
            row.rhs,
            if row.holds { "holds" } else { "VIOLATED" }
        );
    }
    println!(
        "c_pistar={} c1_pistar=[{},{}] c1=[{},{}] c2=[{},{}] horizon={}{}",
        report.c_pistar_exact,
        report.c1_pistar.lower,
        report.c1_pistar.upper,
        report.c1.lower,
        report.c1.upper,
        report.c2.lower,
        report.c2.upper,
        report.horizon,
        if report.width_flag { " (width target not met)" } else { "" },
    );
    report.ordering = Some(ordering);
    report.write_file(&args.out)?;
    Ok(0)
}
