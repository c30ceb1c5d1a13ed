use std::path::PathBuf;

use apilab::algorithms::{
    run_cpi, run_dpi, run_nsdpi, AdvantageMode, CpiConfig, Instance, RunMeta, StepMode,
};
use apilab::error::{Error, Result};
use apilab::greedy::{BasisKind, GreedyConfig, GreedyOperator, NoiseMode};
use apilab::mdp::{optimal_solve, DeterministicPolicy};
use apilab::trace::Algorithm;
use clap::Args;

use crate::common::{generate_problem, load_mdp_file, CoeffSpec, DistSpec, LoadedProblem};

#[derive(Args)]
pub struct RunArgs {
    /// Load the MDP from a JSON file
    #[arg(long, conflicts_with = "params")]
    pub mdp: Option<PathBuf>,
    /// Feature matrix sidecar (defaults to <mdp>.features.json if present)
    #[arg(long, requires = "mdp")]
    pub features: Option<PathBuf>,
    /// Generate a Garnet in place, e.g. "G(100,2,2,10)"
    #[arg(long, required_unless_present = "mdp")]
    pub params: Option<String>,
    /// Garnet seed for --params
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Discount factor for --params
    #[arg(long, default_value_t = 0.99)]
    pub gamma: f64,
    /// Reward scale for --params
    #[arg(long = "r-max", default_value_t = 1.0)]
    pub r_max: f64,

    /// Algorithm: dpi | cpi | cpi-plus | cpi-alpha | nsdpi
    #[arg(long)]
    pub alg: Algorithm,
    /// Iteration count (safety cap for cpi variants with a stopping test)
    #[arg(long, default_value_t = 30)]
    pub iters: usize,
    /// CPI improvement threshold rho
    #[arg(long)]
    pub rho: Option<f64>,
    /// Fixed step for cpi-alpha
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Advantage estimation: exact | noisy
    #[arg(long, default_value = "exact")]
    pub advantage: AdvantageMode,
    /// Override the CPI safety cap
    #[arg(long = "max-iters")]
    pub max_iters: Option<usize>,

    /// Loss distribution mu: uniform | point:<s>
    #[arg(long, default_value = "uniform")]
    pub mu: DistSpec,
    /// Greedy distribution nu: uniform | occupancy | point:<s>
    #[arg(long, default_value = "uniform")]
    pub nu: DistSpec,

    /// Projection basis: fourier | random-features | identity
    #[arg(long, default_value = "fourier")]
    pub basis: BasisKind,
    /// Basis coefficients: a number or "full"
    #[arg(long = "n-coeffs", default_value = "full")]
    pub n_coeffs: CoeffSpec,
    /// Noise amplitude iota
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    /// Interpret the amplitude absolutely instead of relative to span(v)
    #[arg(long = "noise-absolute", default_value_t = false)]
    pub noise_absolute: bool,

    /// Initial policy: this action everywhere
    #[arg(long = "pi0-action", default_value_t = 0)]
    pub pi0_action: usize,
    /// Seed of this run's noise streams
    #[arg(long = "run-seed", default_value_t = 0)]
    pub run_seed: u64,
    /// Record per-iteration wall-clock times (breaks byte reproducibility)
    #[arg(long, default_value_t = false)]
    pub timings: bool,
    /// Trace output path
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: RunArgs) -> Result<i32> {
    let problem = match (&args.mdp, &args.params) {
        (Some(path), None) => load_mdp_file(path, args.features.as_deref())?,
        (None, Some(params)) => generate_problem(params, args.seed, args.gamma, args.r_max)?,
        _ => return Err(Error::config("exactly one of --mdp and --params is required")),
    };
    let LoadedProblem { mdp, features, mdp_seed } = problem;
    if args.pi0_action >= mdp.n_actions() {
        return Err(Error::config(format!(
            "--pi0-action {} out of range for {} actions",
            args.pi0_action,
            mdp.n_actions()
        )));
    }

    let optimal = optimal_solve(&mdp)?;
    let mu = args.mu.resolve_mu(&mdp)?;
    let nu = args.nu.resolve_nu(&mdp, &mu, &optimal)?;
    let inst = Instance::new(&mdp, &mu, &nu, &optimal)?;

    let meta = RunMeta { mdp_seed, run_seed: args.run_seed, timings: args.timings };
    let greedy_cfg = GreedyConfig {
        basis: args.basis,
        n_coeffs: args.n_coeffs.resolve(mdp.n_states()),
        noise_amplitude: args.noise,
        noise_mode: if args.noise_absolute { NoiseMode::Absolute } else { NoiseMode::Relative },
    };
    let greedy = GreedyOperator::new(greedy_cfg, &mdp, features.as_ref(), meta.greedy_stream())?;
    let pi0 = DeterministicPolicy::constant(mdp.n_states(), args.pi0_action);

    let require_rho = || {
        args.rho
            .ok_or_else(|| Error::config(format!("--rho is required for {}", args.alg)))
    };
    let trace = match args.alg {
        Algorithm::Dpi => run_dpi(&inst, &pi0, args.iters, &greedy, &meta)?,
        Algorithm::Nsdpi => run_nsdpi(&inst, args.iters, &greedy, &meta)?,
        Algorithm::Cpi => {
            let cfg = CpiConfig {
                rho: require_rho()?,
                advantage_mode: args.advantage,
                max_iters: args.max_iters,
                step_mode: StepMode::Adaptive,
            };
            run_cpi(&inst, &pi0, &cfg, &greedy, &meta)?
        }
        Algorithm::CpiPlus => {
            let cfg = CpiConfig {
                rho: require_rho()?,
                advantage_mode: args.advantage,
                max_iters: Some(args.max_iters.unwrap_or(args.iters)),
                step_mode: StepMode::LineSearch,
            };
            run_cpi(&inst, &pi0, &cfg, &greedy, &meta)?
        }
        Algorithm::CpiAlpha => {
            let alpha = args
                .alpha
                .ok_or_else(|| Error::config("--alpha is required for cpi-alpha"))?;
            let cfg = CpiConfig {
                rho: 0.0,
                advantage_mode: AdvantageMode::Exact,
                max_iters: Some(args.iters),
                step_mode: StepMode::Fixed(alpha),
            };
            run_cpi(&inst, &pi0, &cfg, &greedy, &meta)?
        }
    };

    trace.write_file(&args.out)?;
    if let Some(k_star) = trace.k_star {
        println!("final_loss={} k_star={}", trace.final_loss(), k_star);
    } else {
        println!("final_loss={}", trace.final_loss());
    }
    Ok(0)
}
