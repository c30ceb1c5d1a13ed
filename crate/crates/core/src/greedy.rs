//! The controllable approximate greedy operator.
//!
//! A call perturbs the input value function with per-state uniform noise,
//! projects the result onto a low-dimensional basis under the nu-weighted
//! quadratic norm, and applies the exact greedy operator to the projection.
//! The achieved error is then measured exactly against the *original* value
//! function: `epsilon = nu (T v - T_pi v)`, which is the quantity every
//! performance bound consumes. Nothing here is estimated.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::garnet::FeatureMatrix;
use crate::mdp::{exact_greedy, DeterministicPolicy, Distribution, Mdp, ValueFunction};
use crate::rng::StreamKey;

/// Basis family used for the value projection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisKind {
    /// Cosine basis; column j evaluates cos(pi * j * (s + 0.5) / n).
    Fourier,
    /// Leading columns of the Garnet feature matrix.
    RandomFeatures,
    /// Leading standard basis vectors.
    Identity,
}

impl std::str::FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fourier" => Ok(BasisKind::Fourier),
            "random-features" | "random_features" => Ok(BasisKind::RandomFeatures),
            "identity" => Ok(BasisKind::Identity),
            other => Err(Error::parse(format!("unknown basis {other:?}"))),
        }
    }
}

/// Whether the noise amplitude is relative to the value span or absolute.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseMode {
    /// Amplitude `iota * (max v - min v)`; scale-free, the default.
    #[default]
    Relative,
    /// Amplitude `iota` in value units.
    Absolute,
}

/// Configuration of the approximate greedy operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreedyConfig {
    pub basis: BasisKind,
    /// Number of basis coefficients F, in [1, n_states].
    pub n_coeffs: usize,
    /// Noise amplitude iota >= 0.
    pub noise_amplitude: f64,
    #[serde(default)]
    pub noise_mode: NoiseMode,
}

impl GreedyConfig {
    pub fn exact(n_states: usize) -> Self {
        GreedyConfig {
            basis: BasisKind::Fourier,
            n_coeffs: n_states,
            noise_amplitude: 0.0,
            noise_mode: NoiseMode::Relative,
        }
    }

    pub fn validate(&self, n_states: usize) -> Result<()> {
        if self.n_coeffs == 0 || self.n_coeffs > n_states {
            return Err(Error::config(format!(
                "n_coeffs {} outside [1, {n_states}]",
                self.n_coeffs
            )));
        }
        if !self.noise_amplitude.is_finite() || self.noise_amplitude < 0.0 {
            return Err(Error::config(format!(
                "noise amplitude {} must be finite and >= 0",
                self.noise_amplitude
            )));
        }
        Ok(())
    }
}

/// Exactly measured greedy error for one call.
#[derive(Clone, Debug)]
pub struct EpsilonMeasurement {
    /// `nu (T v - T_pi v)`.
    pub epsilon: f64,
    /// Per-state gap `(T v)(s) - (T_pi v)(s) >= 0`.
    pub error_vector: Vec<f64>,
}

/// Cosine basis matrix, `n_states x n_coeffs`; column 0 is constant one.
pub fn fourier_basis(n_states: usize, n_coeffs: usize) -> Result<DMatrix<f64>> {
    if n_coeffs == 0 || n_coeffs > n_states {
        return Err(Error::config(format!(
            "n_coeffs {n_coeffs} outside [1, {n_states}]"
        )));
    }
    let mut basis = DMatrix::<f64>::zeros(n_states, n_coeffs);
    for j in 0..n_coeffs {
        for s in 0..n_states {
            basis[(s, j)] = (std::f64::consts::PI * j as f64 * (s as f64 + 0.5) / n_states as f64).cos();
        }
    }
    Ok(basis)
}

fn identity_basis(n_states: usize, n_coeffs: usize) -> DMatrix<f64> {
    let mut basis = DMatrix::<f64>::zeros(n_states, n_coeffs);
    for j in 0..n_coeffs {
        basis[(j, j)] = 1.0;
    }
    basis
}

fn feature_basis(features: &FeatureMatrix, n_coeffs: usize) -> Result<DMatrix<f64>> {
    if n_coeffs > features.n_features() {
        return Err(Error::config(format!(
            "n_coeffs {} exceeds the {} available feature columns",
            n_coeffs,
            features.n_features()
        )));
    }
    let n = features.n_states();
    let mut basis = DMatrix::<f64>::zeros(n, n_coeffs);
    for (s, row) in features.rows().iter().enumerate() {
        for j in 0..n_coeffs {
            basis[(s, j)] = row[j];
        }
    }
    Ok(basis)
}

/// Result of a weighted projection.
#[derive(Clone, Debug)]
pub struct Projection {
    pub value: ValueFunction,
    /// Trailing basis columns dropped to reach a full-rank normal system.
    pub dropped_columns: usize,
}

/// Projection of `v` onto the basis span, minimizing the nu-weighted square
/// error. States with zero nu weight receive the extrapolated basis value.
pub fn project_weighted(
    values: &ValueFunction,
    basis: &DMatrix<f64>,
    nu: &Distribution,
) -> Result<Projection> {
    let n = basis.nrows();
    if values.len() != n || nu.len() != n {
        return Err(Error::config("projection dimension mismatch"));
    }
    let full = basis.ncols();
    let v = DVector::from_column_slice(values.values());

    // Normal system G w = rhs with G = B^T diag(nu) B. Rank deficiency shows
    // up as vanishing Cholesky pivots; drop trailing columns until the
    // smallest pivot is comfortably above rounding noise.
    for width in (1..=full).rev() {
        let b = basis.columns(0, width);
        let mut weighted = b.clone_owned();
        for s in 0..n {
            let w = nu.probs()[s];
            for j in 0..width {
                weighted[(s, j)] *= w;
            }
        }
        let gram = b.transpose() * &weighted;
        let rhs = weighted.transpose() * &v;
        let Some(chol) = gram.clone().cholesky() else {
            continue;
        };
        let l = chol.l();
        let mut min_pivot = f64::INFINITY;
        for j in 0..width {
            min_pivot = min_pivot.min(l[(j, j)]);
        }
        let gram_scale = gram.diagonal().abs().max().max(f64::MIN_POSITIVE);
        if min_pivot * min_pivot <= 1e-12 * gram_scale {
            continue;
        }
        let coeffs = chol.solve(&rhs);
        let residual = (&gram * &coeffs - &rhs).abs().max();
        let scale = gram.abs().max() * coeffs.abs().max() + rhs.abs().max() + 1.0;
        if residual > 1e-9 * scale {
            continue;
        }
        let projected = b * coeffs;
        return Ok(Projection {
            value: ValueFunction::new(projected.iter().copied().collect())?,
            dropped_columns: full - width,
        });
    }
    Err(Error::numerical(
        "projection failed for every basis width down to 1".to_string(),
    ))
}

/// Exact error measurement of a policy against a value function.
pub fn measure_epsilon(
    mdp: &Mdp,
    nu: &Distribution,
    values: &ValueFunction,
    policy: &DeterministicPolicy,
) -> EpsilonMeasurement {
    assert_eq!(values.len(), mdp.n_states(), "dimension mismatch");
    assert_eq!(nu.len(), mdp.n_states(), "dimension mismatch");
    let mut error_vector = Vec::with_capacity(mdp.n_states());
    let mut epsilon = 0.0;
    for s in 0..mdp.n_states() {
        let mut best = mdp.backup(s, 0, values);
        for a in 1..mdp.n_actions() {
            best = best.max(mdp.backup(s, a, values));
        }
        let gap = best - mdp.backup(s, policy.action(s), values);
        error_vector.push(gap);
        epsilon += nu.probs()[s] * gap;
    }
    EpsilonMeasurement { epsilon, error_vector }
}

/// A resolved approximate greedy operator bound to one MDP shape.
#[derive(Clone, Debug)]
pub struct GreedyOperator {
    config: GreedyConfig,
    basis: DMatrix<f64>,
    stream: StreamKey,
}

/// Output of one operator call.
#[derive(Clone, Debug)]
pub struct GreedyOutcome {
    pub policy: DeterministicPolicy,
    pub measurement: EpsilonMeasurement,
    pub dropped_columns: usize,
}

impl GreedyOperator {
    /// Resolve the basis for `mdp`. `features` is required for
    /// [`BasisKind::RandomFeatures`] and ignored otherwise.
    pub fn new(
        config: GreedyConfig,
        mdp: &Mdp,
        features: Option<&FeatureMatrix>,
        stream: StreamKey,
    ) -> Result<Self> {
        config.validate(mdp.n_states())?;
        let basis = match config.basis {
            BasisKind::Fourier => fourier_basis(mdp.n_states(), config.n_coeffs)?,
            BasisKind::Identity => identity_basis(mdp.n_states(), config.n_coeffs),
            BasisKind::RandomFeatures => {
                let features = features.ok_or_else(|| {
                    Error::config("random-features basis needs a feature matrix")
                })?;
                if features.n_states() != mdp.n_states() {
                    return Err(Error::config("feature matrix does not match the MDP"));
                }
                feature_basis(features, config.n_coeffs)?
            }
        };
        Ok(GreedyOperator { config, basis, stream })
    }

    pub fn config(&self) -> &GreedyConfig {
        &self.config
    }

    /// One approximately-greedy call. `call_index` addresses the noise
    /// substream so concurrent callers stay reproducible.
    pub fn call(
        &self,
        mdp: &Mdp,
        nu: &Distribution,
        values: &ValueFunction,
        call_index: u64,
    ) -> Result<GreedyOutcome> {
        if values.len() != mdp.n_states() || nu.len() != mdp.n_states() {
            return Err(Error::config("greedy call dimension mismatch"));
        }
        let amplitude = match self.config.noise_mode {
            NoiseMode::Relative => self.config.noise_amplitude * values.span(),
            NoiseMode::Absolute => self.config.noise_amplitude,
        };
        let noisy = if amplitude > 0.0 {
            let mut rng = self.stream.indexed(call_index).rng();
            let perturbed: Vec<f64> = values
                .values()
                .iter()
                .map(|&v| v + rng.symmetric(amplitude))
                .collect();
            ValueFunction::new(perturbed)?
        } else {
            values.clone()
        };
        let projection = project_weighted(&noisy, &self.basis, nu)?;
        let (policy, _) = exact_greedy(mdp, &projection.value);
        let measurement = measure_epsilon(mdp, nu, values, &policy);
        Ok(GreedyOutcome {
            policy,
            measurement,
            dropped_columns: projection.dropped_columns,
        })
    }
}

/// Convenience form mirroring the operator contract: build and call once.
pub fn approx_greedy(
    mdp: &Mdp,
    nu: &Distribution,
    values: &ValueFunction,
    config: &GreedyConfig,
    features: Option<&FeatureMatrix>,
    stream: StreamKey,
    call_index: u64,
) -> Result<GreedyOutcome> {
    GreedyOperator::new(config.clone(), mdp, features, stream)?.call(mdp, nu, values, call_index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::garnet::{generate_garnet, GarnetParams};
    use crate::mdp::policy_value;

    fn two_action() -> Mdp {
        Mdp::new(
            2,
            2,
            vec![vec![(0, 1.0)], vec![(1, 1.0)], vec![(1, 1.0)], vec![(1, 1.0)]],
            vec![0.0, 1.0],
            0.5,
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn fourier_first_column_is_constant() {
        let b = fourier_basis(8, 1).unwrap();
        for s in 0..8 {
            assert_eq!(b[(s, 0)], 1.0);
        }
    }

    #[test]
    fn fourier_full_basis_has_full_rank() {
        for n in [2usize, 5, 9, 16] {
            let b = fourier_basis(n, n).unwrap();
            assert_eq!(b.clone().svd(false, false).rank(1e-9), n);
        }
    }

    #[test]
    fn fourier_columns_orthogonal_under_uniform_weight() {
        let n = 12;
        let b = fourier_basis(n, n).unwrap();
        for j in 0..n {
            for jp in (j + 1)..n {
                let dot: f64 = (0..n).map(|s| b[(s, j)] * b[(s, jp)]).sum();
                assert!(dot.abs() < 1e-10, "columns {j},{jp} not orthogonal: {dot}");
            }
        }
    }

    #[test]
    fn projection_with_full_basis_reproduces_input() {
        let n = 10;
        let basis = fourier_basis(n, n).unwrap();
        let nu = Distribution::uniform(n);
        let v = ValueFunction::new((0..n).map(|s| (s as f64).sin() + 0.3 * s as f64).collect()).unwrap();
        let p = project_weighted(&v, &basis, &nu).unwrap();
        assert_eq!(p.dropped_columns, 0);
        assert!(p.value.linf_distance(&v) < 1e-8);
    }

    #[test]
    fn projection_reproduces_constants_and_is_idempotent() {
        let n = 9;
        let basis = fourier_basis(n, 3).unwrap();
        let nu = Distribution::uniform(n);
        let constant = ValueFunction::new(vec![2.5; n]).unwrap();
        let p = project_weighted(&constant, &basis, &nu).unwrap();
        assert!(p.value.linf_distance(&constant) < 1e-10);

        let wavy = ValueFunction::new((0..n).map(|s| (s as f64 * 0.7).cos()).collect()).unwrap();
        let once = project_weighted(&wavy, &basis, &nu).unwrap();
        let twice = project_weighted(&once.value, &basis, &nu).unwrap();
        assert!(twice.value.linf_distance(&once.value) < 1e-10);
    }

    #[test]
    fn projection_drops_columns_when_weight_support_is_small() {
        // Only two states carry weight, so at most two columns can survive.
        let n = 6;
        let basis = fourier_basis(n, 5).unwrap();
        let nu = Distribution::new(vec![0.5, 0.5, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let v = ValueFunction::new((0..n).map(|s| s as f64).collect()).unwrap();
        let p = project_weighted(&v, &basis, &nu).unwrap();
        assert!(p.dropped_columns >= 3, "dropped {}", p.dropped_columns);
    }

    #[test]
    fn unperturbed_full_pipeline_matches_exact_greedy() {
        let params = GarnetParams::new(12, 3, 2, 2, 21).unwrap();
        let (mdp, _) = generate_garnet(&params, 0.9, 1.0).unwrap();
        let nu = Distribution::uniform(12);
        let v = policy_value(&mdp, &DeterministicPolicy::constant(12, 0)).unwrap();
        let op = GreedyOperator::new(GreedyConfig::exact(12), &mdp, None, StreamKey::new(0)).unwrap();
        let out = op.call(&mdp, &nu, &v, 0).unwrap();
        let (exact, _) = exact_greedy(&mdp, &v);
        assert_eq!(out.policy, exact);
        assert!(out.measurement.epsilon.abs() < 1e-12);
    }

    #[test]
    fn single_action_mdp_has_zero_epsilon() {
        let mdp = Mdp::new(
            3,
            1,
            vec![vec![(1, 1.0)], vec![(2, 1.0)], vec![(0, 1.0)]],
            vec![0.1, 0.5, 0.9],
            0.8,
            1.0,
        )
        .unwrap();
        let nu = Distribution::uniform(3);
        let v = ValueFunction::new(vec![1.0, -1.0, 0.5]).unwrap();
        let cfg = GreedyConfig {
            basis: BasisKind::Fourier,
            n_coeffs: 2,
            noise_amplitude: 0.3,
            noise_mode: NoiseMode::Relative,
        };
        let out = approx_greedy(&mdp, &nu, &v, &cfg, None, StreamKey::new(5), 0).unwrap();
        assert_eq!(out.measurement.epsilon, 0.0);
    }

    #[test]
    fn measured_epsilon_matches_enumeration_oracle() {
        let params = GarnetParams::new(20, 2, 2, 2, 99).unwrap();
        let (mdp, _) = generate_garnet(&params, 0.95, 1.0).unwrap();
        let nu = Distribution::uniform(20);
        let v = policy_value(&mdp, &DeterministicPolicy::constant(20, 0)).unwrap();
        let cfg = GreedyConfig {
            basis: BasisKind::Fourier,
            n_coeffs: 2,
            noise_amplitude: 0.05,
            noise_mode: NoiseMode::Relative,
        };
        let out = approx_greedy(&mdp, &nu, &v, &cfg, None, StreamKey::new(7), 3).unwrap();
        assert!(out.measurement.epsilon >= 0.0);
        // Brute-force per-state enumeration of all action backups.
        let mut expect = 0.0;
        for s in 0..20 {
            let q0 = mdp.backup(s, 0, &v);
            let q1 = mdp.backup(s, 1, &v);
            let gap = q0.max(q1) - mdp.backup(s, out.policy.action(s), &v);
            assert!((gap - out.measurement.error_vector[s]).abs() < 1e-12);
            expect += nu.probs()[s] * gap;
        }
        assert!((expect - out.measurement.epsilon).abs() < 1e-12);
    }

    #[test]
    fn epsilon_from_exact_greedy_policy_is_zero() {
        let mdp = two_action();
        let nu = Distribution::uniform(2);
        let v = ValueFunction::new(vec![0.0, 1.0]).unwrap();
        let (pi, _) = exact_greedy(&mdp, &v);
        let m = measure_epsilon(&mdp, &nu, &v, &pi);
        assert_eq!(m.epsilon, 0.0);
        assert!(m.error_vector.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn epsilon_of_worst_action_matches_hand_gap() {
        let mdp = two_action();
        let nu = Distribution::new(vec![0.25, 0.75]).unwrap();
        let v = ValueFunction::new(vec![0.0, 1.0]).unwrap();
        // Worst everywhere: action 0 at state 0 loses 0.5; state 1 ties.
        let worst = DeterministicPolicy::new(vec![0, 1]);
        let m = measure_epsilon(&mdp, &nu, &v, &worst);
        assert!((m.epsilon - 0.25 * 0.5).abs() < 1e-15);
        let max_gap = m.error_vector.iter().copied().fold(0.0f64, f64::max);
        assert!(m.epsilon <= max_gap + 1e-15);
    }

    #[test]
    fn noise_is_deterministic_per_stream_and_call() {
        let params = GarnetParams::new(10, 2, 2, 2, 4).unwrap();
        let (mdp, _) = generate_garnet(&params, 0.9, 1.0).unwrap();
        let nu = Distribution::uniform(10);
        let v = policy_value(&mdp, &DeterministicPolicy::constant(10, 0)).unwrap();
        let cfg = GreedyConfig {
            basis: BasisKind::Fourier,
            n_coeffs: 3,
            noise_amplitude: 0.2,
            noise_mode: NoiseMode::Relative,
        };
        let a = approx_greedy(&mdp, &nu, &v, &cfg, None, StreamKey::new(1), 0).unwrap();
        let b = approx_greedy(&mdp, &nu, &v, &cfg, None, StreamKey::new(1), 0).unwrap();
        assert_eq!(a.policy, b.policy);
        let c = approx_greedy(&mdp, &nu, &v, &cfg, None, StreamKey::new(1), 1).unwrap();
        let d = approx_greedy(&mdp, &nu, &v, &cfg, None, StreamKey::new(2), 0).unwrap();
        // Different call or stream may change the draw; at minimum it must
        // not be forced equal. Check the measured epsilons stay valid.
        for out in [&a, &b, &c, &d] {
            assert!(out.measurement.epsilon >= 0.0);
        }
    }
}
