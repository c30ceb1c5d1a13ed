//! Exact finite-MDP machinery: kernels, Bellman operators, policy evaluation,
//! exact greedy, occupancy measures, and optimal solutions.
//!
//! Everything here is exact up to dense linear-solve precision: policy values
//! come from a certified solve of `(I - gamma*P_pi) v = r`, occupancy measures
//! from the transposed system, and the optimal pair from exact policy
//! iteration. All types are immutable after construction and all operations
//! are pure, so values can be shared freely across threads.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::solve_checked;
use crate::rng::fnv1a64;

/// Tolerance for probability mass bookkeeping (row sums, distribution sums).
pub const MASS_TOL: f64 = 1e-12;
/// Tolerance for fixed-point residuals of exact solves.
pub const FIXED_POINT_TOL: f64 = 1e-10;

// ── Model ────────────────────────────────────────────────────────────────

/// A finite discounted MDP with state-dependent rewards.
///
/// Transition rows are stored sparsely as `(next_state, probability)` pairs,
/// indexed row-major by `state * n_actions + action`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mdp {
    n_states: usize,
    n_actions: usize,
    transitions: Vec<Vec<(usize, f64)>>,
    rewards: Vec<f64>,
    gamma: f64,
    r_max: f64,
}

#[derive(Serialize, Deserialize)]
struct MdpJson {
    n_states: usize,
    n_actions: usize,
    gamma: f64,
    r_max: f64,
    rewards: Vec<f64>,
    transitions: Vec<Vec<(usize, f64)>>,
}

impl Mdp {
    pub fn new(
        n_states: usize,
        n_actions: usize,
        transitions: Vec<Vec<(usize, f64)>>,
        rewards: Vec<f64>,
        gamma: f64,
        r_max: f64,
    ) -> Result<Self> {
        if n_states == 0 || n_actions == 0 {
            return Err(Error::config("MDP needs at least one state and one action"));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::config(format!("gamma must lie in (0,1), got {gamma}")));
        }
        if !r_max.is_finite() || r_max <= 0.0 {
            return Err(Error::config(format!("r_max must be positive and finite, got {r_max}")));
        }
        if transitions.len() != n_states * n_actions {
            return Err(Error::config(format!(
                "expected {} transition rows, got {}",
                n_states * n_actions,
                transitions.len()
            )));
        }
        if rewards.len() != n_states {
            return Err(Error::config(format!(
                "expected {} rewards, got {}",
                n_states,
                rewards.len()
            )));
        }
        for (s, &r) in rewards.iter().enumerate() {
            if !r.is_finite() || r.abs() > r_max {
                return Err(Error::config(format!(
                    "reward {r} at state {s} outside [-{r_max}, {r_max}]"
                )));
            }
        }
        for (row_idx, row) in transitions.iter().enumerate() {
            let mut sum = 0.0;
            for &(sp, p) in row {
                if sp >= n_states {
                    return Err(Error::config(format!(
                        "transition row {row_idx} references state {sp} >= {n_states}"
                    )));
                }
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::config(format!(
                        "transition row {row_idx} has probability {p} outside [0,1]"
                    )));
                }
                sum += p;
            }
            if (sum - 1.0).abs() > MASS_TOL {
                return Err(Error::config(format!(
                    "transition row {row_idx} sums to {sum}, expected 1"
                )));
            }
        }
        Ok(Mdp { n_states, n_actions, transitions, rewards, gamma, r_max })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn v_max(&self) -> f64 {
        self.r_max / (1.0 - self.gamma)
    }

    pub fn rewards(&self) -> &[f64] {
        &self.rewards
    }

    pub fn row(&self, state: usize, action: usize) -> &[(usize, f64)] {
        &self.transitions[state * self.n_actions + action]
    }

    /// One-step backup `r(s) + gamma * sum_s' P(s'|s,a) v(s')`.
    pub fn backup(&self, state: usize, action: usize, values: &ValueFunction) -> f64 {
        let mut acc = 0.0;
        for &(sp, p) in self.row(state, action) {
            acc += p * values.0[sp];
        }
        self.rewards[state] + self.gamma * acc
    }

    pub fn to_json_string(&self) -> String {
        let repr = MdpJson {
            n_states: self.n_states,
            n_actions: self.n_actions,
            gamma: self.gamma,
            r_max: self.r_max,
            rewards: self.rewards.clone(),
            transitions: self.transitions.clone(),
        };
        serde_json::to_string(&repr).expect("MDP serialization cannot fail")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let repr: MdpJson = serde_json::from_str(text)?;
        Mdp::new(
            repr.n_states,
            repr.n_actions,
            repr.transitions,
            repr.rewards,
            repr.gamma,
            repr.r_max,
        )
    }

    /// Content fingerprint of the canonical JSON form, as 16 hex digits.
    pub fn fingerprint(&self) -> String {
        format!("{:016x}", fnv1a64(self.to_json_string().as_bytes()))
    }
}

// ── Probability vectors and value functions ──────────────────────────────

/// A probability distribution over states.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::config("distribution over zero states"));
        }
        let mut sum = 0.0;
        for &p in &probs {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::config(format!("distribution entry {p} is invalid")));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > MASS_TOL {
            return Err(Error::config(format!("distribution sums to {sum}, expected 1")));
        }
        Ok(Distribution(probs))
    }

    pub fn uniform(n: usize) -> Self {
        Distribution(vec![1.0 / n as f64; n])
    }

    pub fn point(n: usize, state: usize) -> Self {
        let mut probs = vec![0.0; n];
        probs[state] = 1.0;
        Distribution(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Expectation of a state function under this distribution.
    pub fn expect(&self, values: &ValueFunction) -> f64 {
        assert_eq!(self.0.len(), values.0.len(), "dimension mismatch");
        self.0.iter().zip(&values.0).map(|(p, v)| p * v).sum()
    }
}

/// A real-valued function over states.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueFunction(Vec<f64>);

impl ValueFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("value function has non-finite entries"));
        }
        Ok(ValueFunction(values))
    }

    pub fn zeros(n: usize) -> Self {
        ValueFunction(vec![0.0; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn span(&self) -> f64 {
        self.max() - self.min()
    }

    pub fn linf_distance(&self, other: &ValueFunction) -> f64 {
        assert_eq!(self.0.len(), other.0.len(), "dimension mismatch");
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

// ── Policies ─────────────────────────────────────────────────────────────

/// Per-state action support of a policy.
pub enum ActionSupport<'a> {
    Single(usize),
    Weighted(&'a [f64]),
}

/// Anything that assigns each state a distribution over actions.
pub trait Policy {
    fn n_states(&self) -> usize;
    fn support(&self, state: usize) -> ActionSupport<'_>;

    fn action_prob(&self, state: usize, action: usize) -> f64 {
        match self.support(state) {
            ActionSupport::Single(a) => {
                if a == action {
                    1.0
                } else {
                    0.0
                }
            }
            ActionSupport::Weighted(w) => w.get(action).copied().unwrap_or(0.0),
        }
    }
}

/// A stationary deterministic policy: one action index per state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterministicPolicy(Vec<usize>);

impl DeterministicPolicy {
    pub fn new(actions: Vec<usize>) -> Self {
        DeterministicPolicy(actions)
    }

    pub fn constant(n_states: usize, action: usize) -> Self {
        DeterministicPolicy(vec![action; n_states])
    }

    pub fn actions(&self) -> &[usize] {
        &self.0
    }

    pub fn action(&self, state: usize) -> usize {
        self.0[state]
    }

    /// Short stable descriptor: kind plus content hash.
    pub fn descriptor(&self) -> String {
        let bytes: Vec<u8> = self.0.iter().flat_map(|a| a.to_le_bytes()).collect();
        format!("det:{:016x}", fnv1a64(&bytes))
    }
}

impl Policy for DeterministicPolicy {
    fn n_states(&self) -> usize {
        self.0.len()
    }

    fn support(&self, state: usize) -> ActionSupport<'_> {
        ActionSupport::Single(self.0[state])
    }
}

/// A stationary stochastic policy: one action distribution per state.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticPolicy(Vec<Vec<f64>>);

impl StochasticPolicy {
    pub fn new(action_probs: Vec<Vec<f64>>) -> Result<Self> {
        for (s, row) in action_probs.iter().enumerate() {
            if row.is_empty() {
                return Err(Error::config(format!("state {s} has no actions")));
            }
            let mut sum = 0.0;
            for &p in row {
                if !p.is_finite() || p < 0.0 {
                    return Err(Error::config(format!(
                        "action probability {p} at state {s} is invalid"
                    )));
                }
                sum += p;
            }
            if (sum - 1.0).abs() > MASS_TOL {
                return Err(Error::config(format!(
                    "action distribution at state {s} sums to {sum}"
                )));
            }
        }
        Ok(StochasticPolicy(action_probs))
    }

    pub fn from_deterministic(policy: &DeterministicPolicy, n_actions: usize) -> Self {
        let rows = policy
            .actions()
            .iter()
            .map(|&a| {
                let mut row = vec![0.0; n_actions];
                row[a] = 1.0;
                row
            })
            .collect();
        StochasticPolicy(rows)
    }

    pub fn action_probs(&self) -> &[Vec<f64>] {
        &self.0
    }

    pub fn descriptor(&self) -> String {
        let bytes: Vec<u8> = self
            .0
            .iter()
            .flatten()
            .flat_map(|p| p.to_bits().to_le_bytes())
            .collect();
        format!("mix:{:016x}", fnv1a64(&bytes))
    }
}

impl Policy for StochasticPolicy {
    fn n_states(&self) -> usize {
        self.0.len()
    }

    fn support(&self, state: usize) -> ActionSupport<'_> {
        ActionSupport::Weighted(&self.0[state])
    }
}

/// A finite non-stationary policy, first-executed stage first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NonStationaryPolicy {
    stages: Vec<DeterministicPolicy>,
}

impl NonStationaryPolicy {
    pub fn empty() -> Self {
        NonStationaryPolicy { stages: Vec::new() }
    }

    /// New policy that executes `head` first, then `self`.
    pub fn prepended(&self, head: DeterministicPolicy) -> Self {
        let mut stages = Vec::with_capacity(self.stages.len() + 1);
        stages.push(head);
        stages.extend(self.stages.iter().cloned());
        NonStationaryPolicy { stages }
    }

    pub fn stages(&self) -> &[DeterministicPolicy] {
        &self.stages
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn descriptor(&self) -> String {
        let bytes: Vec<u8> = self
            .stages
            .iter()
            .flat_map(|p| p.actions().iter().flat_map(|a| a.to_le_bytes()))
            .collect();
        format!("nonstat[{}]:{:016x}", self.stages.len(), fnv1a64(&bytes))
    }
}

/// Optimal value function and an optimal deterministic policy.
#[derive(Clone, Debug)]
pub struct OptimalSolution {
    pub v_star: ValueFunction,
    pub pi_star: DeterministicPolicy,
}

// ── Kernels ──────────────────────────────────────────────────────────────

/// State-to-state stochastic kernel of a policy, stored as sparse rows.
#[derive(Clone, Debug)]
pub struct Kernel {
    rows: Vec<Vec<(usize, f64)>>,
}

impl Kernel {
    pub fn n_states(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    /// `(P v)(s)` for every state.
    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(sp, p)| p * values[sp]).sum())
            .collect()
    }

    /// `mu P` for a row vector `mu`.
    pub fn apply_left(&self, mu: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows.len()];
        for (s, row) in self.rows.iter().enumerate() {
            let mass = mu[s];
            if mass == 0.0 {
                continue;
            }
            for &(sp, p) in row {
                out[sp] += mass * p;
            }
        }
        out
    }

    /// Dense `I - gamma * P`.
    pub fn to_discounted_system(&self, gamma: f64) -> DMatrix<f64> {
        let n = self.rows.len();
        let mut m = DMatrix::<f64>::identity(n, n);
        for (s, row) in self.rows.iter().enumerate() {
            for &(sp, p) in row {
                m[(s, sp)] -= gamma * p;
            }
        }
        m
    }

    /// Dense `(I - gamma * P)^T`.
    pub fn to_discounted_system_transposed(&self, gamma: f64) -> DMatrix<f64> {
        let n = self.rows.len();
        let mut m = DMatrix::<f64>::identity(n, n);
        for (s, row) in self.rows.iter().enumerate() {
            for &(sp, p) in row {
                m[(sp, s)] -= gamma * p;
            }
        }
        m
    }
}

fn check_policy_dims(mdp: &Mdp, policy: &impl Policy) -> Result<()> {
    if policy.n_states() != mdp.n_states() {
        return Err(Error::config(format!(
            "policy covers {} states, MDP has {}",
            policy.n_states(),
            mdp.n_states()
        )));
    }
    Ok(())
}

// ── Operations ───────────────────────────────────────────────────────────

/// Kernel `P_pi(s'|s) = sum_a pi(a|s) P(s'|s,a)`.
pub fn policy_kernel(mdp: &Mdp, policy: &impl Policy) -> Result<Kernel> {
    check_policy_dims(mdp, policy)?;
    let n = mdp.n_states();
    let mut rows = Vec::with_capacity(n);
    let mut buffer = vec![0.0f64; n];
    for s in 0..n {
        match policy.support(s) {
            ActionSupport::Single(a) => {
                if a >= mdp.n_actions() {
                    return Err(Error::config(format!(
                        "policy action {a} at state {s} out of range"
                    )));
                }
                rows.push(mdp.row(s, a).to_vec());
            }
            ActionSupport::Weighted(w) => {
                if w.len() != mdp.n_actions() {
                    return Err(Error::config(format!(
                        "policy at state {s} weights {} actions, MDP has {}",
                        w.len(),
                        mdp.n_actions()
                    )));
                }
                buffer.fill(0.0);
                for (a, &weight) in w.iter().enumerate() {
                    if weight == 0.0 {
                        continue;
                    }
                    for &(sp, p) in mdp.row(s, a) {
                        buffer[sp] += weight * p;
                    }
                }
                let row: Vec<(usize, f64)> = buffer
                    .iter()
                    .enumerate()
                    .filter(|&(_, &p)| p != 0.0)
                    .map(|(sp, &p)| (sp, p))
                    .collect();
                rows.push(row);
            }
        }
    }
    Ok(Kernel { rows })
}

/// One application of the Bellman operator: `T_pi v = r + gamma * P_pi v`.
pub fn bellman_apply(mdp: &Mdp, policy: &impl Policy, values: &ValueFunction) -> Result<ValueFunction> {
    check_policy_dims(mdp, policy)?;
    if values.len() != mdp.n_states() {
        return Err(Error::config("value function dimension mismatch"));
    }
    let n = mdp.n_states();
    let mut out = Vec::with_capacity(n);
    for s in 0..n {
        let v = match policy.support(s) {
            ActionSupport::Single(a) => mdp.backup(s, a, values),
            ActionSupport::Weighted(w) => {
                let mut acc = 0.0;
                for (a, &weight) in w.iter().enumerate() {
                    if weight == 0.0 {
                        continue;
                    }
                    let mut exp = 0.0;
                    for &(sp, p) in mdp.row(s, a) {
                        exp += p * values.values()[sp];
                    }
                    acc += weight * exp;
                }
                mdp.rewards()[s] + mdp.gamma() * acc
            }
        };
        out.push(v);
    }
    ValueFunction::new(out)
}

/// Greedy policy for `v` plus the optimality backup `T v`; ties break to the
/// lowest action index.
pub fn exact_greedy(mdp: &Mdp, values: &ValueFunction) -> (DeterministicPolicy, ValueFunction) {
    assert_eq!(values.len(), mdp.n_states(), "dimension mismatch");
    let mut actions = Vec::with_capacity(mdp.n_states());
    let mut backups = Vec::with_capacity(mdp.n_states());
    for s in 0..mdp.n_states() {
        let mut best_action = 0;
        let mut best_value = mdp.backup(s, 0, values);
        for a in 1..mdp.n_actions() {
            let q = mdp.backup(s, a, values);
            if q > best_value {
                best_value = q;
                best_action = a;
            }
        }
        actions.push(best_action);
        backups.push(best_value);
    }
    (
        DeterministicPolicy::new(actions),
        ValueFunction::new(backups).expect("backups of finite values are finite"),
    )
}

/// Exact policy value: the unique solution of `(I - gamma*P_pi) v = r`.
pub fn policy_value(mdp: &Mdp, policy: &impl Policy) -> Result<ValueFunction> {
    let kernel = policy_kernel(mdp, policy)?;
    policy_value_with_kernel(mdp, &kernel)
}

/// Policy value from a prebuilt kernel.
pub fn policy_value_with_kernel(mdp: &Mdp, kernel: &Kernel) -> Result<ValueFunction> {
    let a = kernel.to_discounted_system(mdp.gamma());
    let b = DVector::from_column_slice(mdp.rewards());
    let x = solve_checked(&a, &b, FIXED_POINT_TOL, "policy evaluation")?;
    let v = ValueFunction::new(x.iter().copied().collect())?;
    let bound = mdp.v_max() + 1e-6;
    if v.values().iter().any(|x| x.abs() > bound) {
        return Err(Error::invariant(format!(
            "policy value leaves [-V_max, V_max]: |v|_inf = {:.6e} > {:.6e}",
            v.values().iter().fold(0.0f64, |m, x| m.max(x.abs())),
            mdp.v_max()
        )));
    }
    Ok(v)
}

/// Value of a finite non-stationary policy; the empty policy has value `r`.
pub fn nonstationary_value(mdp: &Mdp, sigma: &NonStationaryPolicy) -> Result<ValueFunction> {
    let mut v = ValueFunction::new(mdp.rewards().to_vec())?;
    for stage in sigma.stages().iter().rev() {
        v = bellman_apply(mdp, stage, &v)?;
    }
    Ok(v)
}

/// Normalized discounted occupancy `(1-gamma) * nu * (I - gamma*P_pi)^{-1}`.
pub fn discounted_occupancy(mdp: &Mdp, policy: &impl Policy, nu: &Distribution) -> Result<Distribution> {
    let kernel = policy_kernel(mdp, policy)?;
    discounted_occupancy_with_kernel(mdp, &kernel, nu)
}

/// Occupancy from a prebuilt kernel.
pub fn discounted_occupancy_with_kernel(
    mdp: &Mdp,
    kernel: &Kernel,
    nu: &Distribution,
) -> Result<Distribution> {
    if nu.len() != mdp.n_states() {
        return Err(Error::config("distribution dimension mismatch"));
    }
    let at = kernel.to_discounted_system_transposed(mdp.gamma());
    let b = DVector::from_column_slice(nu.probs());
    let x = solve_checked(&at, &b, FIXED_POINT_TOL, "discounted occupancy")?;
    let one_minus_gamma = 1.0 - mdp.gamma();
    let mut d: Vec<f64> = x.iter().map(|v| v * one_minus_gamma).collect();

    let mut clamped = false;
    for (s, entry) in d.iter_mut().enumerate() {
        if *entry < 0.0 {
            if *entry < -MASS_TOL {
                return Err(Error::invariant(format!(
                    "occupancy entry {entry:.3e} at state {s} is negative beyond tolerance"
                )));
            }
            *entry = 0.0;
            clamped = true;
        }
    }
    let sum: f64 = d.iter().sum();
    if (sum - 1.0).abs() > FIXED_POINT_TOL {
        return Err(Error::invariant(format!("occupancy sums to {sum}, expected 1")));
    }
    if clamped || (sum - 1.0).abs() > MASS_TOL {
        for entry in &mut d {
            *entry /= sum;
        }
    }
    for (s, (&ds, &nus)) in d.iter().zip(nu.probs()).enumerate() {
        if ds + FIXED_POINT_TOL < one_minus_gamma * nus {
            return Err(Error::invariant(format!(
                "occupancy at state {s} is below (1-gamma)*nu: {ds:.3e} < {:.3e}",
                one_minus_gamma * nus
            )));
        }
    }
    Distribution::new(d)
}

/// Exact policy iteration to the optimal pair (v*, pi*).
pub fn optimal_solve(mdp: &Mdp) -> Result<OptimalSolution> {
    let cap = mdp.n_states() * mdp.n_actions() + 10;
    let mut pi = DeterministicPolicy::constant(mdp.n_states(), 0);
    for _ in 0..cap {
        let v = policy_value(mdp, &pi)?;
        let (pi_next, tv) = exact_greedy(mdp, &v);
        if tv.linf_distance(&v) <= FIXED_POINT_TOL || pi_next == pi {
            let solution = OptimalSolution { v_star: v, pi_star: pi_next };
            validate_optimal(mdp, &solution)?;
            return Ok(solution);
        }
        pi = pi_next;
    }
    Err(Error::invariant(format!(
        "exact policy iteration exceeded {cap} iterations"
    )))
}

fn validate_optimal(mdp: &Mdp, solution: &OptimalSolution) -> Result<()> {
    let t_pi = bellman_apply(mdp, &solution.pi_star, &solution.v_star)?;
    let (_, tv) = exact_greedy(mdp, &solution.v_star);
    let r1 = t_pi.linf_distance(&solution.v_star);
    let r2 = tv.linf_distance(&solution.v_star);
    if r1 > FIXED_POINT_TOL || r2 > FIXED_POINT_TOL {
        return Err(Error::invariant(format!(
            "optimal solution residuals too large: |T_pi* v* - v*| = {r1:.3e}, |T v* - v*| = {r2:.3e}"
        )));
    }
    Ok(())
}

/// Expected loss `mu (v* - v)`.
pub fn expected_loss(mu: &Distribution, v_star: &ValueFunction, v: &ValueFunction) -> f64 {
    assert_eq!(mu.len(), v_star.len(), "dimension mismatch");
    assert_eq!(mu.len(), v.len(), "dimension mismatch");
    mu.probs()
        .iter()
        .zip(v_star.values().iter().zip(v.values()))
        .map(|(p, (vs, vv))| p * (vs - vv))
        .sum()
}

/// Convex mixture `(1-alpha) * a + alpha * b` as a stochastic policy.
pub fn mix_policies(
    a: &impl Policy,
    b: &impl Policy,
    n_actions: usize,
    alpha: f64,
) -> Result<StochasticPolicy> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::config(format!("mixture weight {alpha} outside [0,1]")));
    }
    if a.n_states() != b.n_states() {
        return Err(Error::config("mixture of policies over different state counts"));
    }
    let n = a.n_states();
    let mut rows = Vec::with_capacity(n);
    for s in 0..n {
        let mut row = vec![0.0; n_actions];
        for (action, slot) in row.iter_mut().enumerate() {
            *slot = (1.0 - alpha) * a.action_prob(s, action) + alpha * b.action_prob(s, action);
        }
        rows.push(row);
    }
    StochasticPolicy::new(rows)
}
