//! The policy-search loops: DPI, CPI (adaptive step, line search, fixed step),
//! and NSDPI, each emitting a full [`RunTrace`].
//!
//! Every loop evaluates policies exactly (linear solves, no sampling), so the
//! recorded losses and greedy errors are the true quantities the performance
//! bounds speak about. CPI mixtures stay exact as well: the mixture kernel is
//! formed explicitly and advantage estimates in `Exact` mode carry zero
//! estimation error.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::greedy::GreedyOperator;
use crate::mdp::{
    bellman_apply, discounted_occupancy_with_kernel, expected_loss, mix_policies, policy_kernel,
    policy_value, policy_value_with_kernel, DeterministicPolicy, Distribution, Kernel, Mdp,
    NonStationaryPolicy, OptimalSolution, Policy, StochasticPolicy, ValueFunction,
};
use crate::rng::{StreamKey, Xoshiro256StarStar};
use crate::trace::{Algorithm, IterationRecord, RunTrace};

pub use crate::trace::AdvantageMode;

// ── Problem instance and run metadata ────────────────────────────────────

/// A fully prepared problem: model, distributions, and the exact optimum.
#[derive(Clone, Copy)]
pub struct Instance<'a> {
    pub mdp: &'a Mdp,
    pub mu: &'a Distribution,
    pub nu: &'a Distribution,
    pub optimal: &'a OptimalSolution,
}

impl<'a> Instance<'a> {
    pub fn new(
        mdp: &'a Mdp,
        mu: &'a Distribution,
        nu: &'a Distribution,
        optimal: &'a OptimalSolution,
    ) -> Result<Self> {
        if mu.len() != mdp.n_states() || nu.len() != mdp.n_states() {
            return Err(Error::config("distribution dimensions do not match the MDP"));
        }
        if optimal.v_star.len() != mdp.n_states() {
            return Err(Error::config("optimal solution does not match the MDP"));
        }
        Ok(Instance { mdp, mu, nu, optimal })
    }

    fn loss(&self, v: &ValueFunction) -> f64 {
        expected_loss(self.mu, &self.optimal.v_star, v)
    }
}

/// Identifies one run and addresses its random substreams.
#[derive(Clone, Copy, Debug)]
pub struct RunMeta {
    pub mdp_seed: u64,
    pub run_seed: u64,
    /// Record per-iteration wall-clock times. Off by default so that traces
    /// are byte-reproducible across machines and thread counts.
    pub timings: bool,
}

impl RunMeta {
    pub fn new(mdp_seed: u64, run_seed: u64) -> Self {
        RunMeta { mdp_seed, run_seed, timings: false }
    }

    /// Stream for the approximate greedy operator of this run.
    pub fn greedy_stream(&self) -> StreamKey {
        StreamKey::new(self.run_seed).tagged("greedy")
    }

    /// Stream for synthetic advantage noise of this run.
    pub fn advantage_stream(&self) -> StreamKey {
        StreamKey::new(self.run_seed).tagged("advantage")
    }
}

struct Stopwatch {
    enabled: bool,
    stamp: Instant,
}

impl Stopwatch {
    fn new(enabled: bool) -> Self {
        Stopwatch { enabled, stamp: Instant::now() }
    }

    /// Milliseconds since the previous lap, or None when timing is off.
    fn lap(&mut self) -> Option<f64> {
        if !self.enabled {
            return None;
        }
        let now = Instant::now();
        let elapsed = now.duration_since(self.stamp).as_secs_f64() * 1e3;
        self.stamp = now;
        Some(elapsed)
    }
}

// ── CPI configuration ────────────────────────────────────────────────────

/// Step-size rule of the conservative loop.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepMode {
    /// The adaptive rule `(1-gamma)(A_hat - rho/3) / (4 gamma V_max)`.
    Adaptive,
    /// A constant step in (0, 1].
    Fixed(f64),
    /// Doubling line search over the adaptive base step, capped at 1.
    LineSearch,
}

#[derive(Clone, Debug)]
pub struct CpiConfig {
    pub rho: f64,
    pub advantage_mode: AdvantageMode,
    /// Safety cap; defaults to ten times the guaranteed stopping bound.
    pub max_iters: Option<usize>,
    pub step_mode: StepMode,
}

impl CpiConfig {
    pub fn adaptive(rho: f64) -> Self {
        CpiConfig {
            rho,
            advantage_mode: AdvantageMode::Exact,
            max_iters: None,
            step_mode: StepMode::Adaptive,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.step_mode {
            StepMode::Fixed(alpha) => {
                if !(alpha > 0.0 && alpha <= 1.0) {
                    return Err(Error::config(format!("fixed step {alpha} outside (0, 1]")));
                }
            }
            StepMode::Adaptive | StepMode::LineSearch => {
                if !self.rho.is_finite() || self.rho <= 0.0 {
                    return Err(Error::config(format!("rho must be positive, got {}", self.rho)));
                }
            }
        }
        Ok(())
    }

    /// Ten times the guaranteed stopping bound `72 gamma V_max^2 / rho^2`.
    pub fn default_max_iters(gamma: f64, v_max: f64, rho: f64) -> usize {
        let bound = 72.0 * gamma * v_max * v_max / (rho * rho);
        (10.0 * bound.ceil()) as usize
    }

    fn resolved_max_iters(&self, gamma: f64, v_max: f64) -> usize {
        self.max_iters
            .unwrap_or_else(|| Self::default_max_iters(gamma, v_max, self.rho))
    }
}

// ── CPI building blocks ──────────────────────────────────────────────────

/// The adaptive step `(1-gamma)(A_hat - rho/3) / (4 gamma V_max)`, clamped
/// into (0, 1]. Callers must only invoke this pre-stop (`A_hat > 2 rho / 3`).
pub fn cpi_step_size(advantage_hat: f64, rho: f64, gamma: f64, v_max: f64) -> Result<f64> {
    let raw = (1.0 - gamma) * (advantage_hat - rho / 3.0) / (4.0 * gamma * v_max);
    if raw <= 0.0 {
        return Err(Error::invariant(format!(
            "non-positive step {raw} from advantage {advantage_hat} and rho {rho}"
        )));
    }
    Ok(raw.min(1.0))
}

/// Exact advantage `d (T_pi' v - v)` from prepared parts.
fn advantage_exact(
    mdp: &Mdp,
    v: &ValueFunction,
    d: &Distribution,
    pi_prime: &DeterministicPolicy,
) -> Result<f64> {
    let backed = bellman_apply(mdp, pi_prime, v)?;
    let mut advantage = 0.0;
    for s in 0..mdp.n_states() {
        advantage += d.probs()[s] * (backed.values()[s] - v.values()[s]);
    }
    Ok(advantage)
}

/// Advantage estimate of `pi_prime` over `pi_k` under the occupancy of
/// `pi_k` started from `nu`. Returns `(estimate, exact)`.
pub fn estimate_advantage(
    mdp: &Mdp,
    pi_k: &impl Policy,
    pi_prime: &DeterministicPolicy,
    nu: &Distribution,
    mode: AdvantageMode,
    rho: f64,
    rng: &mut Xoshiro256StarStar,
) -> Result<(f64, f64)> {
    let kernel = policy_kernel(mdp, pi_k)?;
    let v = policy_value_with_kernel(mdp, &kernel)?;
    let d = discounted_occupancy_with_kernel(mdp, &kernel, nu)?;
    let exact = advantage_exact(mdp, &v, &d, pi_prime)?;
    let hat = match mode {
        AdvantageMode::Exact => exact,
        AdvantageMode::Noisy => exact + rng.symmetric(rho / 3.0),
    };
    Ok((hat, exact))
}

/// First iteration whose accumulated steps cross `log(V_max / eps) / (1-gamma)`
/// with `eps` the running maximum of measured errors.
fn compute_k_dagger(records: &[IterationRecord], gamma: f64, v_max: f64) -> Option<usize> {
    let mut sum_alpha = 0.0;
    let mut max_eps = 0.0f64;
    for r in records.iter().skip(1) {
        sum_alpha += r.alpha.unwrap_or(0.0);
        max_eps = max_eps.max(r.epsilon.unwrap_or(0.0));
        if max_eps > 0.0 {
            let threshold = (v_max / max_eps).ln() / (1.0 - gamma);
            if sum_alpha >= threshold {
                return Some(r.k);
            }
        }
    }
    None
}

// ── DPI ──────────────────────────────────────────────────────────────────

/// Direct policy iteration: K full approximate-greedy steps on `v_{pi_k}`.
pub fn run_dpi(
    inst: &Instance,
    pi0: &DeterministicPolicy,
    iterations: usize,
    greedy: &GreedyOperator,
    meta: &RunMeta,
) -> Result<RunTrace> {
    if iterations == 0 {
        return Err(Error::config("DPI needs at least one iteration"));
    }
    let mdp = inst.mdp;
    let mut watch = Stopwatch::new(meta.timings);
    let mut pi = pi0.clone();
    let mut records = Vec::with_capacity(iterations + 1);
    let mut formative_eps = None;
    let mut formative_alpha = None;
    for k in 0..=iterations {
        let v = policy_value(mdp, &pi)?;
        let loss = inst.loss(&v);
        if k < iterations {
            let out = greedy.call(mdp, inst.nu, &v, k as u64)?;
            records.push(IterationRecord {
                k,
                loss,
                epsilon: formative_eps,
                alpha: formative_alpha,
                wallclock_ms: watch.lap(),
                ..Default::default()
            });
            formative_eps = Some(out.measurement.epsilon);
            formative_alpha = Some(1.0);
            pi = out.policy;
        } else {
            records.push(IterationRecord {
                k,
                loss,
                epsilon: formative_eps,
                alpha: formative_alpha,
                wallclock_ms: watch.lap(),
                ..Default::default()
            });
        }
    }
    Ok(RunTrace {
        algorithm: Algorithm::Dpi,
        mdp_seed: meta.mdp_seed,
        run_seed: meta.run_seed,
        mdp_fingerprint: mdp.fingerprint(),
        gamma: mdp.gamma(),
        v_max: mdp.v_max(),
        max_iters: iterations,
        rho: None,
        fixed_alpha: None,
        advantage_mode: None,
        records,
        k_star: None,
        k_dagger: None,
        stop_epsilon: None,
        final_policy: pi.descriptor(),
    })
}

// ── NSDPI ────────────────────────────────────────────────────────────────

/// Non-stationary DPI: prepend each greedy policy to a growing sequence.
pub fn run_nsdpi(
    inst: &Instance,
    iterations: usize,
    greedy: &GreedyOperator,
    meta: &RunMeta,
) -> Result<RunTrace> {
    if iterations == 0 {
        return Err(Error::config("NSDPI needs at least one iteration"));
    }
    let mdp = inst.mdp;
    let v_max = mdp.v_max();
    let mut watch = Stopwatch::new(meta.timings);
    let mut sigma = NonStationaryPolicy::empty();
    let mut v = ValueFunction::new(mdp.rewards().to_vec())?;
    let mut records = Vec::with_capacity(iterations + 1);
    let mut formative_eps = None;
    let mut formative_alpha = None;
    for k in 0..=iterations {
        let loss = inst.loss(&v);
        // Any infinite continuation of sigma_k is worth at least
        // v_sigma - gamma^k V_max, so this column bounds all of them.
        let conservative = loss + mdp.gamma().powi(k as i32) * v_max;
        records.push(IterationRecord {
            k,
            loss,
            loss_conservative: Some(conservative),
            epsilon: formative_eps,
            alpha: formative_alpha,
            wallclock_ms: watch.lap(),
            ..Default::default()
        });
        if k == iterations {
            break;
        }
        let out = greedy.call(mdp, inst.nu, &v, k as u64)?;
        v = bellman_apply(mdp, &out.policy, &v)?;
        sigma = sigma.prepended(out.policy);
        formative_eps = Some(out.measurement.epsilon);
        formative_alpha = Some(1.0);
    }
    Ok(RunTrace {
        algorithm: Algorithm::Nsdpi,
        mdp_seed: meta.mdp_seed,
        run_seed: meta.run_seed,
        mdp_fingerprint: mdp.fingerprint(),
        gamma: mdp.gamma(),
        v_max,
        max_iters: iterations,
        rho: None,
        fixed_alpha: None,
        advantage_mode: None,
        records,
        k_star: None,
        k_dagger: None,
        stop_epsilon: None,
        final_policy: sigma.descriptor(),
    })
}

// ── CPI family ───────────────────────────────────────────────────────────

/// Conservative policy iteration under `cfg.step_mode`: adaptive steps with
/// the stopping test, a fixed step with no test, or a doubling line search.
pub fn run_cpi(
    inst: &Instance,
    pi0: &DeterministicPolicy,
    cfg: &CpiConfig,
    greedy: &GreedyOperator,
    meta: &RunMeta,
) -> Result<RunTrace> {
    cfg.validate()?;
    let mdp = inst.mdp;
    let gamma = mdp.gamma();
    let v_max = mdp.v_max();
    let max_iters = cfg.resolved_max_iters(gamma, v_max);
    if max_iters == 0 {
        return Err(Error::config("CPI needs a positive iteration cap"));
    }
    let algorithm = match cfg.step_mode {
        StepMode::Adaptive => Algorithm::Cpi,
        StepMode::Fixed(_) => Algorithm::CpiAlpha,
        StepMode::LineSearch => Algorithm::CpiPlus,
    };
    let uses_advantage = !matches!(cfg.step_mode, StepMode::Fixed(_));
    let mut watch = Stopwatch::new(meta.timings);
    let advantage_stream = meta.advantage_stream();

    let mut pi = StochasticPolicy::from_deterministic(pi0, mdp.n_actions());
    let mut kernel = policy_kernel(mdp, &pi)?;
    let mut v = policy_value_with_kernel(mdp, &kernel)?;
    let mut records = Vec::new();
    let mut formative_eps = None;
    let mut formative_alpha = None;
    let mut k_star = None;
    let mut stop_epsilon = None;

    for k in 0..=max_iters {
        let loss = inst.loss(&v);
        let eta = inst.nu.expect(&v);
        if k == max_iters {
            records.push(IterationRecord {
                k,
                loss,
                eta: Some(eta),
                epsilon: formative_eps,
                alpha: formative_alpha,
                wallclock_ms: watch.lap(),
                ..Default::default()
            });
            break;
        }
        let d = discounted_occupancy_with_kernel(mdp, &kernel, inst.nu)?;
        let out = greedy.call(mdp, &d, &v, k as u64)?;

        let (advantage_hat, advantage_true) = if uses_advantage {
            let exact = advantage_exact(mdp, &v, &d, &out.policy)?;
            let hat = match cfg.advantage_mode {
                AdvantageMode::Exact => exact,
                AdvantageMode::Noisy => {
                    exact + advantage_stream.indexed(k as u64).rng().symmetric(cfg.rho / 3.0)
                }
            };
            (Some(hat), Some(exact))
        } else {
            (None, None)
        };

        records.push(IterationRecord {
            k,
            loss,
            eta: Some(eta),
            epsilon: formative_eps,
            alpha: formative_alpha,
            advantage_hat,
            advantage_true,
            wallclock_ms: watch.lap(),
            ..Default::default()
        });

        if uses_advantage {
            let hat = advantage_hat.expect("advantage present in advantage modes");
            if hat <= 2.0 * cfg.rho / 3.0 {
                k_star = Some(k);
                stop_epsilon = Some(out.measurement.epsilon);
                break;
            }
        }

        let step = match cfg.step_mode {
            StepMode::Fixed(alpha) => {
                let next = mix_policies(&pi, &out.policy, mdp.n_actions(), alpha)?;
                let next_kernel = policy_kernel(mdp, &next)?;
                let next_v = policy_value_with_kernel(mdp, &next_kernel)?;
                (alpha, next, next_kernel, next_v)
            }
            StepMode::Adaptive => {
                let hat = advantage_hat.expect("advantage present");
                let base = cpi_step_size(hat, cfg.rho, gamma, v_max)?;
                let next = mix_policies(&pi, &out.policy, mdp.n_actions(), base)?;
                let next_kernel = policy_kernel(mdp, &next)?;
                let next_v = policy_value_with_kernel(mdp, &next_kernel)?;
                (base, next, next_kernel, next_v)
            }
            StepMode::LineSearch => {
                let hat = advantage_hat.expect("advantage present");
                let base = cpi_step_size(hat, cfg.rho, gamma, v_max)?;
                let mut candidates = Vec::new();
                let mut a = base;
                while a < 1.0 {
                    candidates.push(a);
                    a *= 2.0;
                }
                candidates.push(1.0);
                let mut best: Option<(f64, StochasticPolicy, Kernel, ValueFunction, f64)> = None;
                for &alpha in &candidates {
                    let mixed = mix_policies(&pi, &out.policy, mdp.n_actions(), alpha)?;
                    let mixed_kernel = policy_kernel(mdp, &mixed)?;
                    let mixed_v = policy_value_with_kernel(mdp, &mixed_kernel)?;
                    let mixed_eta = inst.nu.expect(&mixed_v);
                    let better = match &best {
                        None => true,
                        Some((_, _, _, _, best_eta)) => mixed_eta > *best_eta,
                    };
                    if better {
                        best = Some((alpha, mixed, mixed_kernel, mixed_v, mixed_eta));
                    }
                }
                let (alpha, next, next_kernel, next_v, _) =
                    best.expect("candidate list is never empty");
                (alpha, next, next_kernel, next_v)
            }
        };
        let (alpha, next_pi, next_kernel, next_v) = step;
        pi = next_pi;
        kernel = next_kernel;
        v = next_v;
        formative_eps = Some(out.measurement.epsilon);
        formative_alpha = Some(alpha);
    }

    let k_dagger = compute_k_dagger(&records, gamma, v_max);
    Ok(RunTrace {
        algorithm,
        mdp_seed: meta.mdp_seed,
        run_seed: meta.run_seed,
        mdp_fingerprint: mdp.fingerprint(),
        gamma,
        v_max,
        max_iters,
        rho: if uses_advantage { Some(cfg.rho) } else { None },
        fixed_alpha: match cfg.step_mode {
            StepMode::Fixed(alpha) => Some(alpha),
            _ => None,
        },
        advantage_mode: if uses_advantage { Some(cfg.advantage_mode) } else { None },
        records,
        k_star,
        k_dagger,
        stop_epsilon,
        final_policy: pi.descriptor(),
    })
}

/// CPI with a constant step and no stopping test, run for exactly `iterations`.
pub fn run_cpi_alpha(
    inst: &Instance,
    pi0: &DeterministicPolicy,
    alpha: f64,
    iterations: usize,
    greedy: &GreedyOperator,
    meta: &RunMeta,
) -> Result<RunTrace> {
    let cfg = CpiConfig {
        rho: 0.0,
        advantage_mode: AdvantageMode::Exact,
        max_iters: Some(iterations),
        step_mode: StepMode::Fixed(alpha),
    };
    run_cpi(inst, pi0, &cfg, greedy, meta)
}

/// CPI with the doubling line search over steps `{base * 2^i} ∪ {1}`.
pub fn run_cpi_plus(
    inst: &Instance,
    pi0: &DeterministicPolicy,
    rho: f64,
    iterations: usize,
    greedy: &GreedyOperator,
    meta: &RunMeta,
) -> Result<RunTrace> {
    let cfg = CpiConfig {
        rho,
        advantage_mode: AdvantageMode::Exact,
        max_iters: Some(iterations),
        step_mode: StepMode::LineSearch,
    };
    run_cpi(inst, pi0, &cfg, greedy, meta)
}
