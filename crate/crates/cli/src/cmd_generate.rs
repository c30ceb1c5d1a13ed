use std::path::PathBuf;

use apilab::error::Result;
use apilab::garnet::{generate_garnet, GarnetParams};
use clap::Args;

use crate::common::features_path;

#[derive(Args)]
pub struct GenerateArgs {
    /// Garnet parameters, e.g. "G(100,2,2,10)"
    #[arg(long)]
    pub params: String,
    /// Generation seed
    #[arg(long)]
    pub seed: u64,
    /// Discount factor
    #[arg(long, default_value_t = 0.99)]
    pub gamma: f64,
    /// Reward scale
    #[arg(long = "r-max", default_value_t = 1.0)]
    pub r_max: f64,
    /// Output MDP path; the feature matrix lands next to it
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: GenerateArgs) -> Result<i32> {
    let params = GarnetParams::parse(&args.params, args.seed)?;
    let (mdp, features) = generate_garnet(&params, args.gamma, args.r_max)?;
    std::fs::write(&args.out, mdp.to_json_string())?;
    let sidecar = features_path(&args.out);
    std::fs::write(&sidecar, features.to_json_string())?;
    println!(
        "generated {} seed={} gamma={} fingerprint={} -> {} (+ {})",
        params.label(),
        args.seed,
        args.gamma,
        mdp.fingerprint(),
        args.out.display(),
        sidecar.display(),
    );
    Ok(0)
}
