//! Random Garnet problems `G(n_S, n_A, b, p)` and their feature matrices.
//!
//! For every state-action pair, `b` distinct successor states are drawn
//! uniformly without replacement and the transition probabilities are the
//! gaps between `b - 1` sorted uniform cut points in (0, 1). Rewards are
//! state-dependent, uniform on [0, r_max]. The feature matrix has uniform
//! entries in [0, 1].
//!
//! Generation is fully addressed by the seed: each (s, a) pair, each reward,
//! and each feature row draws from its own derived stream, so the output is
//! identical no matter what order the rows are produced in.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::{Distribution, Mdp};
use crate::rng::StreamKey;

/// Parameters of a Garnet problem plus the generation seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GarnetParams {
    pub n_states: usize,
    pub n_actions: usize,
    pub branching: usize,
    pub n_features: usize,
    pub seed: u64,
}

impl GarnetParams {
    pub fn new(n_states: usize, n_actions: usize, branching: usize, n_features: usize, seed: u64) -> Result<Self> {
        let params = GarnetParams { n_states, n_actions, branching, n_features, seed };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_states == 0 || self.n_actions == 0 {
            return Err(Error::config("Garnet needs at least one state and one action"));
        }
        if self.branching == 0 || self.branching > self.n_states {
            return Err(Error::config(format!(
                "branching factor {} outside [1, {}]",
                self.branching, self.n_states
            )));
        }
        if self.n_features == 0 || self.n_features > self.n_states {
            return Err(Error::config(format!(
                "feature count {} outside [1, {}]",
                self.n_features, self.n_states
            )));
        }
        Ok(())
    }

    /// Parse the CLI form `G(n_s,n_a,b,p)`; the seed is supplied separately.
    pub fn parse(text: &str, seed: u64) -> Result<Self> {
        let trimmed = text.trim();
        let inner = trimmed
            .strip_prefix("G(")
            .or_else(|| trimmed.strip_prefix("g("))
            .and_then(|rest| rest.strip_suffix(')'))
            .ok_or_else(|| Error::parse(format!("expected G(n_s,n_a,b,p), got {text:?}")))?;
        let fields: Vec<&str> = inner.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(Error::parse(format!("expected 4 Garnet parameters, got {}", fields.len())));
        }
        let mut values = [0usize; 4];
        for (slot, field) in values.iter_mut().zip(&fields) {
            *slot = field
                .parse()
                .map_err(|_| Error::parse(format!("invalid Garnet parameter {field:?}")))?;
        }
        GarnetParams::new(values[0], values[1], values[2], values[3], seed)
    }

    pub fn label(&self) -> String {
        format!(
            "G({},{},{},{})",
            self.n_states, self.n_actions, self.branching, self.n_features
        )
    }
}

/// Random feature matrix with entries in [0, 1], one row per state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    entries: Vec<Vec<f64>>,
}

impl FeatureMatrix {
    pub fn new(entries: Vec<Vec<f64>>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::config("feature matrix needs at least one row"));
        }
        let width = entries[0].len();
        if width == 0 || entries.iter().any(|row| row.len() != width) {
            return Err(Error::config("feature matrix rows must be non-empty and equal length"));
        }
        Ok(FeatureMatrix { entries })
    }

    pub fn n_states(&self) -> usize {
        self.entries.len()
    }

    pub fn n_features(&self) -> usize {
        self.entries[0].len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.entries).expect("feature serialization cannot fail")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let entries: Vec<Vec<f64>> = serde_json::from_str(text)?;
        FeatureMatrix::new(entries)
    }
}

/// Probabilities as gaps of sorted cut points: `b` masses from `b - 1` cuts.
fn probabilities_from_cuts(cuts: &[f64]) -> Vec<f64> {
    let mut probs = Vec::with_capacity(cuts.len() + 1);
    let mut prev = 0.0;
    for &c in cuts {
        probs.push(c - prev);
        prev = c;
    }
    probs.push(1.0 - prev);
    probs
}

/// Generate the Garnet MDP and its feature matrix.
pub fn generate_garnet(params: &GarnetParams, gamma: f64, r_max: f64) -> Result<(Mdp, FeatureMatrix)> {
    params.validate()?;
    let key = StreamKey::new(params.seed);
    let n = params.n_states;
    let b = params.branching;

    let mut transitions = Vec::with_capacity(n * params.n_actions);
    let transition_key = key.tagged("transitions");
    for s in 0..n {
        for a in 0..params.n_actions {
            let mut rng = transition_key.indexed((s * params.n_actions + a) as u64).rng();
            let successors = rng.sample_distinct(n, b);
            let cuts = rng.sorted_uniforms(b - 1);
            let probs = probabilities_from_cuts(&cuts);
            let row: Vec<(usize, f64)> = successors.into_iter().zip(probs).collect();
            transitions.push(row);
        }
    }

    let reward_key = key.tagged("rewards");
    let rewards: Vec<f64> = (0..n)
        .map(|s| reward_key.indexed(s as u64).rng().next_f64() * r_max)
        .collect();

    let feature_key = key.tagged("features");
    let features: Vec<Vec<f64>> = (0..n)
        .map(|s| {
            let mut rng = feature_key.indexed(s as u64).rng();
            (0..params.n_features).map(|_| rng.next_f64()).collect()
        })
        .collect();

    let mdp = Mdp::new(n, params.n_actions, transitions, rewards, gamma, r_max)?;
    Ok((mdp, FeatureMatrix::new(features)?))
}

/// Uniform loss and greedy distributions over the state space.
pub fn default_distributions(mdp: &Mdp) -> (Distribution, Distribution) {
    (
        Distribution::uniform(mdp.n_states()),
        Distribution::uniform(mdp.n_states()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cut_point_gaps() {
        let probs = probabilities_from_cuts(&[0.2, 0.7]);
        assert_eq!(probs, vec![0.2, 0.49999999999999994, 0.30000000000000004]);
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(probabilities_from_cuts(&[]), vec![1.0]);
    }

    #[test]
    fn branching_one_is_deterministic() {
        let params = GarnetParams::new(6, 2, 1, 2, 3).unwrap();
        let (mdp, _) = generate_garnet(&params, 0.9, 1.0).unwrap();
        for s in 0..6 {
            for a in 0..2 {
                let row = mdp.row(s, a);
                assert_eq!(row.len(), 1);
                assert_eq!(row[0].1, 1.0);
            }
        }
    }

    #[test]
    fn rows_have_branching_nonzeros_and_direct_construction_matches() {
        let params = GarnetParams::new(5, 2, 2, 1, 17).unwrap();
        let (mdp, _) = generate_garnet(&params, 0.95, 1.0).unwrap();
        let key = StreamKey::new(17).tagged("transitions");
        for s in 0..5 {
            for a in 0..2 {
                let row = mdp.row(s, a);
                assert_eq!(row.len(), 2);
                let sum: f64 = row.iter().map(|&(_, p)| p).sum();
                assert!((sum - 1.0).abs() <= 1e-12);
                // Rebuild the row straight from its stream.
                let mut rng = key.indexed((s * 2 + a) as u64).rng();
                let succ = rng.sample_distinct(5, 2);
                let cuts = rng.sorted_uniforms(1);
                let probs = probabilities_from_cuts(&cuts);
                let expect: Vec<(usize, f64)> = succ.into_iter().zip(probs).collect();
                assert_eq!(row, expect.as_slice());
            }
        }
    }

    #[test]
    fn same_seed_same_mdp_different_seed_different() {
        let params = GarnetParams::new(10, 2, 2, 1, 7).unwrap();
        let (a, fa) = generate_garnet(&params, 0.99, 1.0).unwrap();
        let (b, fb) = generate_garnet(&params, 0.99, 1.0).unwrap();
        assert_eq!(a.to_json_string(), b.to_json_string());
        assert_eq!(fa, fb);
        let other = GarnetParams::new(10, 2, 2, 1, 8).unwrap();
        let (c, _) = generate_garnet(&other, 0.99, 1.0).unwrap();
        assert_ne!(a.to_json_string(), c.to_json_string());
    }

    #[test]
    fn rewards_and_features_in_unit_interval() {
        let params = GarnetParams::new(20, 3, 2, 4, 5).unwrap();
        let (mdp, phi) = generate_garnet(&params, 0.99, 1.0).unwrap();
        assert!(mdp.rewards().iter().all(|&r| (0.0..=1.0).contains(&r)));
        assert!(phi.rows().iter().flatten().all(|&x| (0.0..=1.0).contains(&x)));
        assert_eq!(phi.n_states(), 20);
        assert_eq!(phi.n_features(), 4);
    }

    #[test]
    fn default_distributions_are_uniform() {
        let params = GarnetParams::new(4, 2, 1, 1, 1).unwrap();
        let (mdp, _) = generate_garnet(&params, 0.9, 1.0).unwrap();
        let (mu, nu) = default_distributions(&mdp);
        assert_eq!(mu.probs(), &[0.25; 4]);
        assert_eq!(nu.probs(), &[0.25; 4]);
        assert!(nu.min() > 0.0);
    }

    #[test]
    fn parse_forms() {
        let p = GarnetParams::parse("G(10,2,2,1)", 9).unwrap();
        assert_eq!((p.n_states, p.n_actions, p.branching, p.n_features, p.seed), (10, 2, 2, 1, 9));
        assert!(GarnetParams::parse("G(10,2,2)", 0).is_err());
        assert!(GarnetParams::parse("H(1,2,3,4)", 0).is_err());
        // branching > n_states is a configuration error
        assert!(GarnetParams::parse("G(3,2,4,1)", 0).is_err());
    }
}
