//! Concentrability coefficients with certified truncation intervals.
//!
//! Three families are computed against a loss distribution `mu` and a greedy
//! distribution `nu`:
//!
//! * `c(i)`: worst-case mass ratio over *all* length-i policy sequences,
//!   computed by per-target backward induction (the per-state maximum
//!   decouples, so time-varying deterministic sequences attain the supremum);
//! * `c_pistar(i)`: the same ratio for powers of the optimal kernel;
//! * `C_pistar`: the occupancy ratio, computed exactly with no truncation.
//!
//! The summed constants are reported as intervals: the lower end is the
//! truncated sum, the upper end adds the geometric tail with every unseen
//! coefficient replaced by the universal cap `1 / min_s nu(s)`. Bound
//! verification always consumes the upper ends, so a pass is conservative.
//! Infinite coefficients (positive mass reaching a nu-null state) are carried
//! as tagged `"inf"` markers in serialized reports, never as float specials.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::{discounted_occupancy, policy_kernel, DeterministicPolicy, Distribution, Mdp};
use crate::parallel::map_indexed;

/// Serialize possibly-infinite reals as numbers or the string `"inf"`.
mod ext_real {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Tag(String),
    }

    pub fn serialize<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
        if value.is_infinite() {
            serializer.serialize_str(if *value > 0.0 { "inf" } else { "-inf" })
        } else {
            serializer.serialize_f64(*value)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<f64, D::Error> {
        match Repr::deserialize(deserializer)? {
            Repr::Num(x) => Ok(x),
            Repr::Tag(tag) if tag == "inf" => Ok(f64::INFINITY),
            Repr::Tag(tag) if tag == "-inf" => Ok(f64::NEG_INFINITY),
            Repr::Tag(tag) => Err(D::Error::custom(format!("expected a number or \"inf\", got {tag:?}"))),
        }
    }
}

/// Same encoding for vectors of possibly-infinite reals.
mod ext_real_vec {
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Item(#[serde(with = "super::ext_real")] f64);

    pub fn serialize<S: Serializer>(values: &[f64], serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(values.len()))?;
        for &v in values {
            seq.serialize_element(&Item(v))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Vec<f64>, D::Error> {
        let items = Vec::<Item>::deserialize(deserializer)?;
        Ok(items.into_iter().map(|Item(v)| v).collect())
    }
}

/// A certified enclosure `[lower, upper]` of a summed constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "ext_real")]
    pub lower: f64,
    #[serde(with = "ext_real")]
    pub upper: f64,
}

impl Interval {
    pub fn infinite() -> Self {
        Interval { lower: f64::INFINITY, upper: f64::INFINITY }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn is_infinite(&self) -> bool {
        self.upper.is_infinite()
    }
}

/// Everything the bound verifier needs to know about one (mdp, mu, nu) triple.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConcentrabilityReport {
    pub mdp_fingerprint: String,
    pub gamma: f64,
    /// Truncation horizon H: coefficients cover i = 0..=H.
    pub horizon: usize,
    /// Universal coefficient cap `1 / min_s nu(s)` used for interval tails.
    #[serde(with = "ext_real")]
    pub tail_cap: f64,
    pub nu_min: f64,
    /// Requested interval width; `width_flag` marks that the horizon cap was
    /// reached before meeting it.
    pub width_target: f64,
    pub width_flag: bool,
    #[serde(with = "ext_real_vec")]
    pub c: Vec<f64>,
    #[serde(with = "ext_real_vec")]
    pub c_pistar: Vec<f64>,
    pub c1: Interval,
    pub c2: Interval,
    pub c1_pistar: Interval,
    /// Exact occupancy ratio, independent of the horizon.
    #[serde(with = "ext_real")]
    pub c_pistar_exact: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ordering: Option<OrderingCheck>,
}

impl ConcentrabilityReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write_file(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }

    pub fn read_file(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

// ── Reachability ─────────────────────────────────────────────────────────

/// `max over length-i policy sequences of (mu P_1 ... P_i)(target)` for every
/// i = 0..=horizon, by backward induction from the target indicator.
pub fn max_reach_profile(mdp: &Mdp, mu: &Distribution, horizon: usize, target: usize) -> Vec<f64> {
    assert!(target < mdp.n_states(), "target state out of range");
    assert_eq!(mu.len(), mdp.n_states(), "dimension mismatch");
    let n = mdp.n_states();
    let mut h = vec![0.0f64; n];
    h[target] = 1.0;
    let dot_mu = |h: &[f64]| -> f64 { mu.probs().iter().zip(h).map(|(m, x)| m * x).sum() };
    let mut profile = Vec::with_capacity(horizon + 1);
    profile.push(dot_mu(&h));
    let mut next = vec![0.0f64; n];
    for _ in 1..=horizon {
        for (s, slot) in next.iter_mut().enumerate() {
            let mut best = f64::NEG_INFINITY;
            for a in 0..mdp.n_actions() {
                let mut acc = 0.0;
                for &(sp, p) in mdp.row(s, a) {
                    acc += p * h[sp];
                }
                if acc > best {
                    best = acc;
                }
            }
            *slot = best;
        }
        std::mem::swap(&mut h, &mut next);
        profile.push(dot_mu(&h));
    }
    profile
}

/// Single-horizon form of [`max_reach_profile`].
pub fn max_reach(mdp: &Mdp, mu: &Distribution, horizon: usize, target: usize) -> f64 {
    max_reach_profile(mdp, mu, horizon, target)[horizon]
}

/// `c(i) = max(1, max_s max_reach(i, s) / nu(s))` for i = 0..=horizon.
/// Reachable nu-null states yield infinity.
pub fn c_coefficients(
    mdp: &Mdp,
    mu: &Distribution,
    nu: &Distribution,
    horizon: usize,
    jobs: usize,
) -> Vec<f64> {
    let n = mdp.n_states();
    assert_eq!(nu.len(), n, "dimension mismatch");
    let profiles = map_indexed(n, jobs, |target| max_reach_profile(mdp, mu, horizon, target));
    fold_ratio_profiles(&profiles, nu, horizon)
}

/// `c_pistar(i) = max(1, max_s (mu P_pistar^i)(s) / nu(s))` for i = 0..=horizon.
pub fn c_pistar_coefficients(
    mdp: &Mdp,
    pi_star: &DeterministicPolicy,
    mu: &Distribution,
    nu: &Distribution,
    horizon: usize,
) -> Result<Vec<f64>> {
    let kernel = policy_kernel(mdp, pi_star)?;
    let mut mass = mu.probs().to_vec();
    let mut coefficients = Vec::with_capacity(horizon + 1);
    for i in 0..=horizon {
        coefficients.push(ratio_coefficient(&mass, nu));
        if i < horizon {
            mass = kernel.apply_left(&mass);
        }
    }
    Ok(coefficients)
}

fn ratio_coefficient(mass: &[f64], nu: &Distribution) -> f64 {
    let mut c = 1.0f64;
    for (m, &w) in mass.iter().zip(nu.probs()) {
        if w > 0.0 {
            c = c.max(m / w);
        } else if *m > 0.0 {
            return f64::INFINITY;
        }
        // 0/0: an unreachable nu-null state constrains nothing.
    }
    c
}

fn fold_ratio_profiles(profiles: &[Vec<f64>], nu: &Distribution, horizon: usize) -> Vec<f64> {
    let mut c = vec![1.0f64; horizon + 1];
    for (target, profile) in profiles.iter().enumerate() {
        let w = nu.probs()[target];
        for (i, &reach) in profile.iter().enumerate() {
            if w > 0.0 {
                let ratio = reach / w;
                if ratio > c[i] {
                    c[i] = ratio;
                }
            } else if reach > 0.0 {
                c[i] = f64::INFINITY;
            }
        }
    }
    c
}

// ── Summed constants ─────────────────────────────────────────────────────

/// Truncated sums with capped tails:
/// `C1 = (1-gamma) sum gamma^i c(i)` and
/// `C2 = (1-gamma)^2 sum (i+1) gamma^i c(i)`.
pub fn big_constants(c: &[f64], gamma: f64, nu_min: f64) -> (Interval, Interval) {
    if c.iter().any(|x| x.is_infinite()) {
        return (Interval::infinite(), Interval::infinite());
    }
    let h = c.len() - 1;
    let one_minus = 1.0 - gamma;
    let mut sum1 = 0.0;
    let mut sum2 = 0.0;
    let mut g = 1.0;
    for (i, &ci) in c.iter().enumerate() {
        sum1 += g * ci;
        sum2 += (i as f64 + 1.0) * g * ci;
        g *= gamma;
    }
    let lower1 = one_minus * sum1;
    let lower2 = one_minus * one_minus * sum2;
    // Tails with c(i) <= 1/nu_min for i > H:
    //   sum_{i>H} gamma^i            = gamma^{H+1} / (1-gamma)
    //   sum_{i>H} (i+1) gamma^i      = gamma^{H+1} (H+2 - (H+1) gamma) / (1-gamma)^2
    let g_tail = gamma.powi(h as i32 + 1);
    let tail1 = g_tail / nu_min;
    let tail2 = g_tail * ((h as f64 + 2.0) - (h as f64 + 1.0) * gamma) / nu_min;
    (
        Interval { lower: lower1, upper: lower1 + tail1 },
        Interval { lower: lower2, upper: lower2 + tail2 },
    )
}

/// Exact occupancy coefficient `max(1, max_s d_{pistar,mu}(s) / nu(s))`.
pub fn c_pistar_exact(
    mdp: &Mdp,
    pi_star: &DeterministicPolicy,
    mu: &Distribution,
    nu: &Distribution,
) -> Result<f64> {
    let d = discounted_occupancy(mdp, pi_star, mu)?;
    Ok(ratio_coefficient(d.probs(), nu))
}

/// Smallest horizon whose interval widths meet `width_target`, capped.
/// Returns the horizon and whether the cap was hit first.
pub fn choose_horizon(gamma: f64, nu_min: f64, width_target: f64, cap: usize) -> (usize, bool) {
    for h in 0..=cap {
        let g = gamma.powi(h as i32 + 1);
        let w1 = g / nu_min;
        let w2 = g * ((h as f64 + 2.0) - (h as f64 + 1.0) * gamma) / nu_min;
        if w1.max(w2) <= width_target {
            return (h, false);
        }
    }
    (cap, true)
}

/// Options for report assembly.
#[derive(Clone, Copy, Debug)]
pub struct AnalysisOptions {
    pub width_target: f64,
    pub horizon_cap: usize,
    /// Worker threads for the per-target inductions; 0 = library default.
    pub jobs: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { width_target: 1e-6, horizon_cap: 2000, jobs: 0 }
    }
}

/// Compute every coefficient and assemble the report (without ordering rows).
pub fn analyze(
    mdp: &Mdp,
    pi_star: &DeterministicPolicy,
    mu: &Distribution,
    nu: &Distribution,
    options: &AnalysisOptions,
) -> Result<ConcentrabilityReport> {
    if mu.len() != mdp.n_states() || nu.len() != mdp.n_states() {
        return Err(Error::config("distribution dimensions do not match the MDP"));
    }
    let nu_min = nu.min();
    let (horizon, width_flag) = if nu_min > 0.0 {
        choose_horizon(mdp.gamma(), nu_min, options.width_target, options.horizon_cap)
    } else {
        // Tails cannot be capped without a positive nu floor.
        (options.horizon_cap, true)
    };
    let tail_cap = if nu_min > 0.0 { 1.0 / nu_min } else { f64::INFINITY };
    let c = c_coefficients(mdp, mu, nu, horizon, options.jobs);
    let c_pistar = c_pistar_coefficients(mdp, pi_star, mu, nu, horizon)?;
    let (c1, c2) = if nu_min > 0.0 {
        big_constants(&c, mdp.gamma(), nu_min)
    } else {
        (Interval::infinite(), Interval::infinite())
    };
    let (c1_pistar, _) = if nu_min > 0.0 {
        big_constants(&c_pistar, mdp.gamma(), nu_min)
    } else {
        (Interval::infinite(), Interval::infinite())
    };
    let exact = c_pistar_exact(mdp, pi_star, mu, nu)?;
    Ok(ConcentrabilityReport {
        mdp_fingerprint: mdp.fingerprint(),
        gamma: mdp.gamma(),
        horizon,
        tail_cap,
        nu_min,
        width_target: options.width_target,
        width_flag,
        c,
        c_pistar,
        c1,
        c2,
        c1_pistar,
        c_pistar_exact: exact,
        ordering: None,
    })
}

// ── Ordering checks ──────────────────────────────────────────────────────

/// One inequality of the coefficient ordering chain.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrderingRow {
    pub id: String,
    #[serde(with = "ext_real")]
    pub lhs: f64,
    #[serde(with = "ext_real")]
    pub rhs: f64,
    pub holds: bool,
    #[serde(with = "ext_real")]
    pub slack: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrderingCheck {
    pub rows: Vec<OrderingRow>,
    pub all_hold: bool,
}

const ORDERING_TOL: f64 = 1e-9;

fn ordering_row(id: &str, lhs: f64, rhs: f64, tol: f64) -> OrderingRow {
    let holds = if rhs.is_infinite() {
        true
    } else if lhs.is_infinite() {
        false
    } else {
        lhs <= rhs + tol
    };
    let slack = if rhs.is_infinite() { f64::INFINITY } else { rhs - lhs };
    OrderingRow { id: id.to_string(), lhs, rhs, holds, slack }
}

/// Executable version of the coefficient ordering claims: the chain
/// `C_pistar <= C1_pistar <= C1 <= C2 / (1-gamma)` with interval-conservative
/// endpoints, plus the pointwise `c_pistar(i) <= c(i)`.
pub fn ordering_check(report: &ConcentrabilityReport, gamma: f64) -> OrderingCheck {
    let mut rows = Vec::new();
    rows.push(ordering_row(
        "c_pistar_le_c1_pistar",
        report.c_pistar_exact,
        report.c1_pistar.upper,
        ORDERING_TOL,
    ));
    rows.push(ordering_row(
        "c1_pistar_le_c1",
        report.c1_pistar.lower,
        report.c1.upper,
        ORDERING_TOL,
    ));
    rows.push(ordering_row(
        "c1_le_c2_over_one_minus_gamma",
        report.c1.lower,
        report.c2.upper / (1.0 - gamma),
        ORDERING_TOL,
    ));
    // Pointwise dominance: report the tightest index.
    let mut worst: Option<(usize, f64, f64)> = None;
    for (i, (&cp, &c)) in report.c_pistar.iter().zip(&report.c).enumerate() {
        let slack = if c.is_infinite() { f64::INFINITY } else { c - cp };
        let tighter = match worst {
            None => true,
            Some((_, _, w)) => slack < w,
        };
        if tighter {
            worst = Some((i, cp, slack));
        }
    }
    if let Some((i, cp, _)) = worst {
        let c = report.c[i];
        rows.push(ordering_row(&format!("c_pistar_i_le_c_i@{i}"), cp, c, 1e-12));
    }
    let all_hold = rows.iter().all(|r| r.holds);
    OrderingCheck { rows, all_hold }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::garnet::{generate_garnet, GarnetParams};
    use crate::mdp::optimal_solve;

    fn cycle(gamma: f64) -> Mdp {
        Mdp::new(2, 1, vec![vec![(1, 1.0)], vec![(0, 1.0)]], vec![1.0, 0.0], gamma, 1.0).unwrap()
    }

    #[test]
    fn reach_horizon_zero_is_mu_of_target() {
        let mdp = cycle(0.5);
        let mu = Distribution::new(vec![0.3, 0.7]).unwrap();
        assert_eq!(max_reach(&mdp, &mu, 0, 0), 0.3);
        assert_eq!(max_reach(&mdp, &mu, 0, 1), 0.7);
    }

    #[test]
    fn reach_forced_transition() {
        let mdp = cycle(0.5);
        let mu = Distribution::point(2, 0);
        assert_eq!(max_reach(&mdp, &mu, 1, 1), 1.0);
        assert_eq!(max_reach(&mdp, &mu, 1, 0), 0.0);
    }

    #[test]
    fn reach_matches_exhaustive_enumeration_small() {
        let params = GarnetParams::new(3, 2, 2, 1, 33).unwrap();
        let (mdp, _) = generate_garnet(&params, 0.9, 1.0).unwrap();
        let mu = Distribution::uniform(3);
        // Enumerate all time-varying deterministic policy sequences up to
        // length 3 and push mu through their kernels.
        for horizon in 0..=3usize {
            for target in 0..3 {
                let mut best = f64::NEG_INFINITY;
                let policies = 2usize.pow(3);
                let count = policies.pow(horizon as u32);
                for code in 0..count {
                    let mut indicator = vec![0.0; 3];
                    indicator[target] = 1.0;
                    // Apply kernels right-to-left against the indicator so
                    // the arithmetic matches the backward induction.
                    let mut h = indicator;
                    let mut rest = code;
                    for _ in 0..horizon {
                        let policy_code = rest % policies;
                        rest /= policies;
                        let mut next = vec![0.0; 3];
                        for (s, slot) in next.iter_mut().enumerate() {
                            let a = (policy_code >> s) & 1;
                            for &(sp, p) in mdp.row(s, a) {
                                *slot += p * h[sp];
                            }
                        }
                        h = next;
                    }
                    let v: f64 = mu.probs().iter().zip(&h).map(|(m, x)| m * x).sum();
                    if v > best {
                        best = v;
                    }
                }
                assert_eq!(
                    max_reach(&mdp, &mu, horizon, target),
                    best,
                    "mismatch at horizon {horizon}, target {target}"
                );
            }
        }
    }

    #[test]
    fn single_action_cycle_has_unit_coefficients() {
        let mdp = cycle(0.5);
        let mu = Distribution::uniform(2);
        let nu = Distribution::uniform(2);
        let c = c_coefficients(&mdp, &mu, &nu, 6, 1);
        assert!(c.iter().all(|&x| (x - 1.0).abs() < 1e-15));
    }

    #[test]
    fn point_mass_over_uniform_doubles() {
        let mdp = cycle(0.5);
        let mu = Distribution::point(2, 0);
        let nu = Distribution::uniform(2);
        let c = c_coefficients(&mdp, &mu, &nu, 6, 1);
        assert!(c.iter().all(|&x| (x - 2.0).abs() < 1e-15));
        // And never beyond the universal cap 1 / nu_min.
        assert!(c.iter().all(|&x| x <= 2.0 + 1e-15));
    }

    #[test]
    fn constant_coefficients_telescope() {
        let gamma = 0.9;
        let (h, _) = choose_horizon(gamma, 1.0, 1e-9, 2000);
        let ones = vec![1.0; h + 1];
        let (c1, c2) = big_constants(&ones, gamma, 1.0);
        assert!((c1.upper - 1.0).abs() < 1e-12);
        assert!(c1.lower <= 1.0 && c1.lower > 1.0 - 1e-8);
        assert!((c2.upper - 1.0).abs() < 1e-10);
        assert!(c2.lower <= 1.0 + 1e-12);

        let twos = vec![2.0; h + 1];
        let (c1, c2) = big_constants(&twos, gamma, 0.5);
        assert!((c1.upper - 2.0).abs() < 1e-11);
        assert!((c2.upper - 2.0).abs() < 1e-10);
    }

    #[test]
    fn interval_width_obeys_tail_formula() {
        let gamma = 0.95;
        let nu_min = 0.1;
        let c = vec![1.5; 41];
        let (c1, _) = big_constants(&c, gamma, nu_min);
        assert!(c1.width() <= 2.0 * gamma.powi(41) / nu_min + 1e-15);
    }

    #[test]
    fn occupancy_nu_gives_unit_c_pistar() {
        let params = GarnetParams::new(6, 2, 2, 1, 44).unwrap();
        let (mdp, _) = generate_garnet(&params, 0.9, 1.0).unwrap();
        let mu = Distribution::uniform(6);
        let solution = optimal_solve(&mdp).unwrap();
        let nu = discounted_occupancy(&mdp, &solution.pi_star, &mu).unwrap();
        let c = c_pistar_exact(&mdp, &solution.pi_star, &mu, &nu).unwrap();
        assert!((c - 1.0).abs() < 1e-9);
    }

    #[test]
    fn single_state_everything_is_one() {
        let mdp = Mdp::new(1, 1, vec![vec![(0, 1.0)]], vec![0.5], 0.9, 1.0).unwrap();
        let solution = optimal_solve(&mdp).unwrap();
        let mu = Distribution::uniform(1);
        let nu = Distribution::uniform(1);
        let report = analyze(&mdp, &solution.pi_star, &mu, &nu, &AnalysisOptions::default()).unwrap();
        assert!((report.c_pistar_exact - 1.0).abs() < 1e-12);
        assert!(report.c.iter().all(|&x| x == 1.0));
        assert!((report.c1.upper - 1.0).abs() < 1e-9);
        let ordering = ordering_check(&report, mdp.gamma());
        assert!(ordering.all_hold);
    }

    #[test]
    fn remark_chain_on_garnet() {
        let params = GarnetParams::new(4, 2, 2, 1, 55).unwrap();
        let (mdp, _) = generate_garnet(&params, 0.9, 1.0).unwrap();
        let solution = optimal_solve(&mdp).unwrap();
        let mu = Distribution::uniform(4);
        let nu = Distribution::uniform(4);
        let report = analyze(&mdp, &solution.pi_star, &mu, &nu, &AnalysisOptions::default()).unwrap();
        assert!(report.c_pistar_exact <= report.c1_pistar.upper + 1e-9);
        for (cp, c) in report.c_pistar.iter().zip(&report.c) {
            assert!(cp <= &(c + 1e-12));
        }
        let ordering = ordering_check(&report, mdp.gamma());
        assert!(ordering.all_hold, "{ordering:?}");
    }

    #[test]
    fn nu_null_reachable_state_flags_infinity_but_c_pistar_stays_finite() {
        // Two actions at state 0: stay (rewarding) or hop to state 1.
        // nu puts mass only on state 0, so c(1) is infinite, while the
        // optimal policy never leaves state 0 and keeps C_pistar finite.
        let mdp = Mdp::new(
            2,
            2,
            vec![vec![(0, 1.0)], vec![(1, 1.0)], vec![(1, 1.0)], vec![(1, 1.0)]],
            vec![1.0, 0.0],
            0.5,
            1.0,
        )
        .unwrap();
        let solution = optimal_solve(&mdp).unwrap();
        assert_eq!(solution.pi_star.action(0), 0);
        let mu = Distribution::point(2, 0);
        let nu = Distribution::new(vec![1.0, 0.0]).unwrap();
        let c = c_coefficients(&mdp, &mu, &nu, 3, 1);
        assert!(c[1].is_infinite());
        let (c1, c2) = big_constants(&c, mdp.gamma(), 0.0_f64.max(nu.min()));
        assert!(c1.is_infinite() && c2.is_infinite());
        let exact = c_pistar_exact(&mdp, &solution.pi_star, &mu, &nu).unwrap();
        assert!((exact - 1.0).abs() < 1e-9);
        let cp = c_pistar_coefficients(&mdp, &solution.pi_star, &mu, &nu, 3).unwrap();
        assert!(cp.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn report_json_round_trips_with_inf_markers() {
        let mdp = Mdp::new(
            2,
            2,
            vec![vec![(0, 1.0)], vec![(1, 1.0)], vec![(1, 1.0)], vec![(1, 1.0)]],
            vec![1.0, 0.0],
            0.5,
            1.0,
        )
        .unwrap();
        let solution = optimal_solve(&mdp).unwrap();
        let mu = Distribution::point(2, 0);
        let nu = Distribution::new(vec![1.0, 0.0]).unwrap();
        let mut report = analyze(
            &mdp,
            &solution.pi_star,
            &mu,
            &nu,
            &AnalysisOptions { width_target: 1e-6, horizon_cap: 16, jobs: 1 },
        )
        .unwrap();
        report.ordering = Some(ordering_check(&report, mdp.gamma()));
        let text = report.to_json_string();
        assert!(text.contains("\"inf\""));
        assert!(!text.contains("null"));
        let parsed = ConcentrabilityReport::from_json_str(&text).unwrap();
        assert!(parsed.c1.is_infinite());
        assert_eq!(parsed.to_json_string(), text);
    }
}
