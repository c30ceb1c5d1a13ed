//! Argument plumbing shared by the subcommands.

use std::path::{Path, PathBuf};

use apilab::error::{Error, Result};
use apilab::garnet::{generate_garnet, FeatureMatrix, GarnetParams};
use apilab::mdp::{discounted_occupancy, Distribution, Mdp, OptimalSolution};

/// How a state distribution is specified on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DistSpec {
    Uniform,
    /// Point mass on one state.
    Point(usize),
    /// Discounted occupancy of the optimal policy from mu (nu only).
    Occupancy,
}

impl std::str::FromStr for DistSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "uniform" {
            return Ok(DistSpec::Uniform);
        }
        if s == "occupancy" {
            return Ok(DistSpec::Occupancy);
        }
        if let Some(state) = s.strip_prefix("point:") {
            let state = state
                .parse()
                .map_err(|_| Error::parse(format!("invalid point state {state:?}")))?;
            return Ok(DistSpec::Point(state));
        }
        Err(Error::parse(format!(
            "unknown distribution {s:?} (expected uniform, occupancy, or point:<state>)"
        )))
    }
}

impl DistSpec {
    pub fn resolve_mu(&self, mdp: &Mdp) -> Result<Distribution> {
        match self {
            DistSpec::Uniform => Ok(Distribution::uniform(mdp.n_states())),
            DistSpec::Point(s) => {
                if *s >= mdp.n_states() {
                    return Err(Error::config(format!("point state {s} out of range")));
                }
                Ok(Distribution::point(mdp.n_states(), *s))
            }
            DistSpec::Occupancy => Err(Error::config(
                "mu cannot be an occupancy; occupancy is defined relative to mu",
            )),
        }
    }

    pub fn resolve_nu(
        &self,
        mdp: &Mdp,
        mu: &Distribution,
        optimal: &OptimalSolution,
    ) -> Result<Distribution> {
        match self {
            DistSpec::Occupancy => discounted_occupancy(mdp, &optimal.pi_star, mu),
            other => other.resolve_mu(mdp),
        }
    }
}

/// `--n-coeffs` accepts a number or the word `full`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoeffSpec {
    Full,
    Count(usize),
}

impl std::str::FromStr for CoeffSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "full" {
            return Ok(CoeffSpec::Full);
        }
        s.parse()
            .map(CoeffSpec::Count)
            .map_err(|_| Error::parse(format!("invalid coefficient count {s:?}")))
    }
}

impl CoeffSpec {
    pub fn resolve(&self, n_states: usize) -> usize {
        match self {
            CoeffSpec::Full => n_states,
            CoeffSpec::Count(n) => *n,
        }
    }
}

/// Sidecar path for the feature matrix of an MDP file.
pub fn features_path(mdp_path: &Path) -> PathBuf {
    let stem = mdp_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "mdp".to_string());
    mdp_path.with_file_name(format!("{stem}.features.json"))
}

/// A problem loaded from disk or generated in place.
pub struct LoadedProblem {
    pub mdp: Mdp,
    pub features: Option<FeatureMatrix>,
    /// Garnet seed when generated, content hash when loaded from a file.
    pub mdp_seed: u64,
}

pub fn load_mdp_file(path: &Path, features: Option<&Path>) -> Result<LoadedProblem> {
    let text = std::fs::read_to_string(path)?;
    let mdp = Mdp::from_json_str(&text)?;
    let features = match features {
        Some(path) => Some(FeatureMatrix::from_json_str(&std::fs::read_to_string(path)?)?),
        None => {
            let sidecar = features_path(path);
            if sidecar.exists() {
                Some(FeatureMatrix::from_json_str(&std::fs::read_to_string(sidecar)?)?)
            } else {
                None
            }
        }
    };
    let mdp_seed = u64::from_str_radix(&mdp.fingerprint(), 16)
        .expect("fingerprint is 16 hex digits");
    Ok(LoadedProblem { mdp, features, mdp_seed })
}

pub fn generate_problem(params_text: &str, seed: u64, gamma: f64, r_max: f64) -> Result<LoadedProblem> {
    let params = GarnetParams::parse(params_text, seed)?;
    let (mdp, features) = generate_garnet(&params, gamma, r_max)?;
    Ok(LoadedProblem { mdp, features: Some(features), mdp_seed: seed })
}
