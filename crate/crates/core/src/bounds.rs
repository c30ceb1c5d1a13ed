//! Performance-bound verification: evaluate every guarantee's right-hand side
//! with the measured per-iteration errors and certified coefficient upper
//! ends, and assert dominance over the recorded losses.
//!
//! Main inequalities are checked at *every* iteration; corollary predictions
//! only at their stated iteration, which guards against off-by-one drift in
//! the ceiling arithmetic. Verification always uses the upper end of
//! coefficient intervals and the exactly measured errors, so a pass is a true
//! certificate. Infinite coefficients make a row vacuous rather than green.

use crate::concentrability::ConcentrabilityReport;
use crate::error::{Error, Result};
use crate::trace::{AdvantageMode, Algorithm, RunTrace};

/// Numerical slack absorbing solver tolerance in comparisons.
pub const BOUND_SLACK: f64 = 1e-9;
/// Violations smaller than this are reported as marginal for triage.
pub const MARGINAL_BAND: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundStatus {
    Pass,
    Marginal,
    Fail,
    /// The right-hand side is infinite; nothing is claimed.
    VacuousPass,
    /// The trace never reaches the stated iteration of a corollary.
    Inconclusive,
    /// Checked numerically but not asserted (noisy-advantage monotonicity).
    Info,
}

impl BoundStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundStatus::Pass => "pass",
            BoundStatus::Marginal => "marginal",
            BoundStatus::Fail => "fail",
            BoundStatus::VacuousPass => "vacuous-pass",
            BoundStatus::Inconclusive => "inconclusive",
            BoundStatus::Info => "info",
        }
    }
}

/// One checked inequality `lhs <= rhs`.
#[derive(Clone, Debug)]
pub struct BoundRow {
    pub bound_id: String,
    pub k: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub status: BoundStatus,
}

/// `coefficient * factor + additive`, staying infinite (not NaN) when the
/// coefficient is infinite and the factor is zero.
fn bound_rhs(coefficient: f64, factor: f64, additive: f64) -> f64 {
    if coefficient.is_infinite() {
        f64::INFINITY
    } else {
        coefficient * factor + additive
    }
}

fn check(bound_id: &str, k: Option<usize>, lhs: f64, rhs: f64) -> BoundRow {
    let status = if rhs.is_infinite() {
        BoundStatus::VacuousPass
    } else if lhs <= rhs + BOUND_SLACK {
        BoundStatus::Pass
    } else if lhs - rhs < MARGINAL_BAND {
        BoundStatus::Marginal
    } else {
        BoundStatus::Fail
    };
    BoundRow { bound_id: bound_id.to_string(), k, lhs, rhs, slack: rhs - lhs, status }
}

fn inconclusive(bound_id: &str) -> BoundRow {
    BoundRow {
        bound_id: bound_id.to_string(),
        k: None,
        lhs: f64::NAN,
        rhs: f64::NAN,
        slack: f64::NAN,
        status: BoundStatus::Inconclusive,
    }
}

/// All rows checked against one trace.
#[derive(Clone, Debug)]
pub struct BoundReport {
    pub algorithm: Algorithm,
    pub rows: Vec<BoundRow>,
}

impl BoundReport {
    /// True when no row is a hard failure.
    pub fn all_pass(&self) -> bool {
        !self.rows.iter().any(|r| r.status == BoundStatus::Fail)
    }

    pub fn count(&self, status: BoundStatus) -> usize {
        self.rows.iter().filter(|r| r.status == status).count()
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("bound_id,k,lhs,rhs,slack,status\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.bound_id,
                r.k.map(|k| k.to_string()).unwrap_or_default(),
                if r.lhs.is_nan() { String::new() } else { r.lhs.to_string() },
                if r.rhs.is_nan() { String::new() } else { r.rhs.to_string() },
                if r.slack.is_nan() { String::new() } else { r.slack.to_string() },
                r.status.as_str(),
            ));
        }
        out
    }

    pub fn summary_json(&self) -> String {
        serde_json::json!({
            "algorithm": self.algorithm.name(),
            "rows": self.rows.len(),
            "pass": self.count(BoundStatus::Pass),
            "marginal": self.count(BoundStatus::Marginal),
            "fail": self.count(BoundStatus::Fail),
            "vacuous_pass": self.count(BoundStatus::VacuousPass),
            "inconclusive": self.count(BoundStatus::Inconclusive),
            "info": self.count(BoundStatus::Info),
            "all_pass": self.all_pass(),
        })
        .to_string()
    }
}

// ── Shared helpers ───────────────────────────────────────────────────────

fn validate_trace(trace: &RunTrace, report: &ConcentrabilityReport, gamma: f64, v_max: f64) -> Result<()> {
    if trace.mdp_fingerprint != report.mdp_fingerprint {
        return Err(Error::config(format!(
            "MDP fingerprint mismatch: trace {} vs report {}",
            trace.mdp_fingerprint, report.mdp_fingerprint
        )));
    }
    if (trace.gamma - gamma).abs() > 1e-12 || (report.gamma - gamma).abs() > 1e-12 {
        return Err(Error::config("gamma disagrees between trace, report, and arguments"));
    }
    if (trace.v_max - v_max).abs() > 1e-9 * v_max.max(1.0) {
        return Err(Error::config("v_max disagrees between trace and arguments"));
    }
    for (i, r) in trace.records.iter().enumerate() {
        if r.k != i {
            return Err(Error::config("trace iterations are not contiguous from 0"));
        }
    }
    Ok(())
}

fn epsilons(trace: &RunTrace) -> Vec<f64> {
    trace.records.iter().map(|r| r.epsilon.unwrap_or(0.0)).collect()
}

fn prefix_sums(values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    for &v in values {
        acc += v;
        out.push(acc);
    }
    out
}

/// First iteration k whose index reaches `threshold(running max epsilon at k)`.
/// Returns the iteration and that running maximum.
fn first_stated_k(trace: &RunTrace, threshold: impl Fn(f64) -> f64) -> Option<(usize, f64)> {
    let run_max = trace.running_max_epsilon();
    for (k, &eps) in run_max.iter().enumerate() {
        if eps > 0.0 && k as f64 >= threshold(eps) {
            return Some((k, eps));
        }
    }
    None
}

// ── DPI ──────────────────────────────────────────────────────────────────

/// Both displayed DPI inequalities at every iteration plus the two
/// log-horizon corollary predictions.
pub fn verify_dpi(
    trace: &RunTrace,
    report: &ConcentrabilityReport,
    gamma: f64,
    v_max: f64,
) -> Result<BoundReport> {
    if trace.algorithm != Algorithm::Dpi {
        return Err(Error::config(format!("expected a dpi trace, got {}", trace.algorithm)));
    }
    validate_trace(trace, report, gamma, v_max)?;
    let c1 = report.c1.upper;
    let c2 = report.c2.upper;
    let one_minus = 1.0 - gamma;
    let eps = epsilons(trace);
    let run_max = trace.running_max_epsilon();
    let sums = prefix_sums(&eps);
    let mut rows = Vec::new();
    for r in &trace.records {
        let decay = gamma.powi(r.k as i32) * v_max;
        rows.push(check(
            "dpi_c2",
            Some(r.k),
            r.loss,
            bound_rhs(c2 / (one_minus * one_minus), run_max[r.k], decay),
        ));
        rows.push(check(
            "dpi_c1",
            Some(r.k),
            r.loss,
            bound_rhs(c1 / one_minus, sums[r.k], decay),
        ));
    }
    match first_stated_k(trace, |e| (v_max / e).ln() / one_minus) {
        Some((k, e)) => {
            let loss = trace.records[k].loss;
            rows.push(check(
                "dpi_cor1_max",
                Some(k),
                loss,
                bound_rhs(c2 / (one_minus * one_minus) + 1.0, e, 0.0),
            ));
            rows.push(check(
                "dpi_cor1_sum",
                Some(k),
                loss,
                bound_rhs(k as f64 * c1 / one_minus + 1.0, e, 0.0),
            ));
        }
        None => {
            rows.push(inconclusive("dpi_cor1_max"));
            rows.push(inconclusive("dpi_cor1_sum"));
        }
    }
    Ok(BoundReport { algorithm: Algorithm::Dpi, rows })
}

// ── CPI (adaptive and line-search) ───────────────────────────────────────

/// Monotone improvement, the stopping bound, the final-policy guarantee, the
/// per-iteration mixture envelope, and the two corollary predictions.
pub fn verify_cpi(
    trace: &RunTrace,
    report: &ConcentrabilityReport,
    rho: f64,
    gamma: f64,
    v_max: f64,
) -> Result<BoundReport> {
    if !matches!(trace.algorithm, Algorithm::Cpi | Algorithm::CpiPlus) {
        return Err(Error::config(format!(
            "expected a cpi or cpi-plus trace, got {}",
            trace.algorithm
        )));
    }
    validate_trace(trace, report, gamma, v_max)?;
    if !rho.is_finite() || rho <= 0.0 {
        return Err(Error::config(format!("rho must be positive, got {rho}")));
    }
    let one_minus = 1.0 - gamma;
    let c1 = report.c1.upper;
    let c_pistar = report.c_pistar_exact;
    let eps = epsilons(trace);
    let run_max = trace.running_max_epsilon();
    let noisy = trace.advantage_mode == Some(AdvantageMode::Noisy);
    let mut rows = Vec::new();

    // (i) eta increments: every realized transition is pre-stop.
    let gain = rho * rho / (72.0 * gamma * v_max);
    for pair in trace.records.windows(2) {
        let (prev, next) = (&pair[0], &pair[1]);
        let (Some(eta_prev), Some(eta_next)) = (prev.eta, next.eta) else {
            return Err(Error::config("cpi trace rows are missing eta"));
        };
        let mut row = check("cpi_monotone", Some(next.k), eta_prev + gain, eta_next);
        if noisy && row.status == BoundStatus::Fail {
            row.status = BoundStatus::Info;
        }
        rows.push(row);
    }

    // (ii) stopping iteration bound.
    match trace.k_star {
        Some(k_star) => {
            rows.push(check(
                "cpi_stop",
                Some(k_star),
                k_star as f64,
                72.0 * gamma * v_max * v_max / (rho * rho),
            ));
            // (iii) final-policy guarantee; conservative over the ambiguity
            // between the stopping call's error and the formative one.
            let formative = trace.records[k_star].epsilon.unwrap_or(0.0);
            let eps_final = trace.stop_epsilon.unwrap_or(0.0).max(formative);
            let loss = trace.records[k_star].loss;
            rows.push(check(
                "cpi_final",
                Some(k_star),
                loss,
                bound_rhs(c_pistar / (one_minus * one_minus), eps_final + rho, 0.0),
            ));
            // Corollary form with rho folded into a single scale.
            let eps_all = run_max
                .last()
                .copied()
                .unwrap_or(0.0)
                .max(trace.stop_epsilon.unwrap_or(0.0));
            rows.push(check(
                "cpi_cor2",
                Some(k_star),
                loss,
                bound_rhs(2.0 * c_pistar / (one_minus * one_minus), rho.max(eps_all), 0.0),
            ));
        }
        None => {
            rows.push(inconclusive("cpi_stop"));
            rows.push(inconclusive("cpi_final"));
            rows.push(inconclusive("cpi_cor2"));
        }
    }

    // Mixture envelope at every iteration.
    let alpha_eps: Vec<f64> = trace
        .records
        .iter()
        .map(|r| r.alpha.unwrap_or(0.0) * r.epsilon.unwrap_or(0.0))
        .collect();
    let alpha_sums = prefix_sums(
        &trace
            .records
            .iter()
            .map(|r| r.alpha.unwrap_or(0.0))
            .collect::<Vec<_>>(),
    );
    let weighted_sums = prefix_sums(&alpha_eps);
    for r in &trace.records {
        rows.push(check(
            "cpi_sum_c1",
            Some(r.k),
            r.loss,
            bound_rhs(
                c1 / (one_minus * one_minus),
                weighted_sums[r.k],
                (-one_minus * alpha_sums[r.k]).exp() * v_max,
            ),
        ));
    }

    // Mixing-time corollary at the recorded crossing.
    match trace.k_dagger {
        Some(k_dagger) => {
            let e = run_max[k_dagger];
            rows.push(check(
                "cpi_cor3",
                Some(k_dagger),
                trace.records[k_dagger].loss,
                bound_rhs(c1 * alpha_sums[k_dagger] / (one_minus * one_minus) + 1.0, e, 0.0),
            ));
        }
        None => rows.push(inconclusive("cpi_cor3")),
    }
    let _ = eps;
    Ok(BoundReport { algorithm: trace.algorithm, rows })
}

// ── CPI with a fixed step ────────────────────────────────────────────────

/// The fixed-step envelope at every iteration plus the stated-iteration
/// corollary prediction.
pub fn verify_cpi_alpha(
    trace: &RunTrace,
    report: &ConcentrabilityReport,
    alpha: f64,
    gamma: f64,
    v_max: f64,
) -> Result<BoundReport> {
    if trace.algorithm != Algorithm::CpiAlpha {
        return Err(Error::config(format!(
            "expected a cpi-alpha trace, got {}",
            trace.algorithm
        )));
    }
    validate_trace(trace, report, gamma, v_max)?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::config(format!("alpha {alpha} outside (0, 1]")));
    }
    let one_minus = 1.0 - gamma;
    let c1 = report.c1.upper;
    let eps = epsilons(trace);
    let alpha_eps: Vec<f64> = trace
        .records
        .iter()
        .zip(&eps)
        .map(|(r, e)| r.alpha.unwrap_or(0.0) * e)
        .collect();
    let weighted_sums = prefix_sums(&alpha_eps);
    let mut rows = Vec::new();
    for r in &trace.records {
        rows.push(check(
            "cpi_alpha",
            Some(r.k),
            r.loss,
            bound_rhs(
                c1 / (one_minus * one_minus),
                weighted_sums[r.k],
                (-one_minus * r.k as f64 * alpha).exp() * v_max,
            ),
        ));
    }
    match first_stated_k(trace, |e| (v_max / e).ln() / (alpha * one_minus)) {
        Some((k, e)) => {
            rows.push(check(
                "cpi_alpha_cor4",
                Some(k),
                trace.records[k].loss,
                bound_rhs(alpha * (k as f64 + 1.0) * c1 / (one_minus * one_minus), e, 0.0),
            ));
        }
        None => rows.push(inconclusive("cpi_alpha_cor4")),
    }
    Ok(BoundReport { algorithm: Algorithm::CpiAlpha, rows })
}

// ── NSDPI ────────────────────────────────────────────────────────────────

/// Both non-stationary inequalities on the conservative loss column at every
/// iteration, plus the stated-iteration corollary predictions.
pub fn verify_nsdpi(
    trace: &RunTrace,
    report: &ConcentrabilityReport,
    gamma: f64,
    v_max: f64,
) -> Result<BoundReport> {
    if trace.algorithm != Algorithm::Nsdpi {
        return Err(Error::config(format!("expected an nsdpi trace, got {}", trace.algorithm)));
    }
    validate_trace(trace, report, gamma, v_max)?;
    let one_minus = 1.0 - gamma;
    let c1_pistar = report.c1_pistar.upper;
    let c_pistar = report.c_pistar_exact;
    let eps = epsilons(trace);
    let run_max = trace.running_max_epsilon();
    let sums = prefix_sums(&eps);
    let mut rows = Vec::new();
    for r in &trace.records {
        let Some(conservative) = r.loss_conservative else {
            return Err(Error::config("nsdpi trace rows are missing the conservative loss"));
        };
        let decay = 2.0 * gamma.powi(r.k as i32) * v_max;
        rows.push(check(
            "nsdpi_c1pistar",
            Some(r.k),
            conservative,
            bound_rhs(c1_pistar / one_minus, run_max[r.k], decay),
        ));
        rows.push(check(
            "nsdpi_cpistar",
            Some(r.k),
            conservative,
            bound_rhs(c_pistar / one_minus, sums[r.k], decay),
        ));
    }
    match first_stated_k(trace, |e| (2.0 * v_max / e).ln() / one_minus) {
        Some((k, e)) => {
            let conservative = trace.records[k].loss_conservative.unwrap_or(f64::NAN);
            rows.push(check(
                "nsdpi_cor5_max",
                Some(k),
                conservative,
                bound_rhs(c1_pistar / one_minus + 1.0, e, 0.0),
            ));
            rows.push(check(
                "nsdpi_cor5_sum",
                Some(k),
                conservative,
                bound_rhs(k as f64 * c_pistar / one_minus + 1.0, e, 0.0),
            ));
        }
        None => {
            rows.push(inconclusive("nsdpi_cor5_max"));
            rows.push(inconclusive("nsdpi_cor5_sum"));
        }
    }
    Ok(BoundReport { algorithm: Algorithm::Nsdpi, rows })
}

/// Dispatch on the trace's algorithm tag, pulling parameters from its header.
pub fn verify_trace(trace: &RunTrace, report: &ConcentrabilityReport) -> Result<BoundReport> {
    match trace.algorithm {
        Algorithm::Dpi => verify_dpi(trace, report, trace.gamma, trace.v_max),
        Algorithm::Cpi | Algorithm::CpiPlus => {
            let rho = trace
                .rho
                .ok_or_else(|| Error::config("cpi trace header is missing rho"))?;
            verify_cpi(trace, report, rho, trace.gamma, trace.v_max)
        }
        Algorithm::CpiAlpha => {
            let alpha = trace
                .fixed_alpha
                .ok_or_else(|| Error::config("cpi-alpha trace header is missing alpha"))?;
            verify_cpi_alpha(trace, report, alpha, trace.gamma, trace.v_max)
        }
        Algorithm::Nsdpi => verify_nsdpi(trace, report, trace.gamma, trace.v_max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concentrability::Interval;
    use crate::trace::IterationRecord;

    fn synthetic_report(gamma: f64) -> ConcentrabilityReport {
        ConcentrabilityReport {
            mdp_fingerprint: "f".repeat(16),
            gamma,
            horizon: 10,
            tail_cap: 2.0,
            nu_min: 0.5,
            width_target: 1e-6,
            width_flag: false,
            c: vec![1.0; 11],
            c_pistar: vec![1.0; 11],
            c1: Interval { lower: 1.0, upper: 1.0 },
            c2: Interval { lower: 1.0, upper: 1.0 },
            c1_pistar: Interval { lower: 1.0, upper: 1.0 },
            c_pistar_exact: 1.0,
            ordering: None,
        }
    }

    fn zero_error_dpi_trace(gamma: f64, v_max: f64, iterations: usize) -> RunTrace {
        let records = (0..=iterations)
            .map(|k| IterationRecord {
                k,
                loss: 0.9 * gamma.powi(k as i32) * v_max,
                epsilon: if k == 0 { None } else { Some(0.0) },
                alpha: if k == 0 { None } else { Some(1.0) },
                ..Default::default()
            })
            .collect();
        RunTrace {
            algorithm: Algorithm::Dpi,
            mdp_seed: 1,
            run_seed: 1,
            mdp_fingerprint: "f".repeat(16),
            gamma,
            v_max,
            max_iters: iterations,
            rho: None,
            fixed_alpha: None,
            advantage_mode: None,
            records,
            k_star: None,
            k_dagger: None,
            stop_epsilon: None,
            final_policy: "det:0".to_string(),
        }
    }

    #[test]
    fn zero_error_dpi_passes_both_bounds() {
        let trace = zero_error_dpi_trace(0.9, 10.0, 12);
        let report = synthetic_report(0.9);
        let bounds = verify_dpi(&trace, &report, 0.9, 10.0).unwrap();
        assert!(bounds.all_pass(), "{}", bounds.to_csv_string());
        // Zero errors leave the corollaries without a stated iteration.
        assert_eq!(bounds.count(BoundStatus::Inconclusive), 2);
    }

    #[test]
    fn inflated_losses_are_detected() {
        let mut trace = zero_error_dpi_trace(0.9, 10.0, 12);
        for r in &mut trace.records {
            r.loss *= 10.0;
        }
        let report = synthetic_report(0.9);
        let bounds = verify_dpi(&trace, &report, 0.9, 10.0).unwrap();
        assert!(!bounds.all_pass());
        assert!(bounds.count(BoundStatus::Fail) > 0);
        // Slack of a failing row is negative.
        assert!(bounds
            .rows
            .iter()
            .filter(|r| r.status == BoundStatus::Fail)
            .all(|r| r.slack < 0.0));
    }

    #[test]
    fn fingerprint_mismatch_is_a_config_error() {
        let trace = zero_error_dpi_trace(0.9, 10.0, 3);
        let mut report = synthetic_report(0.9);
        report.mdp_fingerprint = "0".repeat(16);
        assert!(verify_dpi(&trace, &report, 0.9, 10.0).is_err());
    }

    #[test]
    fn infinite_coefficients_give_vacuous_rows() {
        let trace = zero_error_dpi_trace(0.9, 10.0, 3);
        let mut report = synthetic_report(0.9);
        report.c1 = Interval::infinite();
        report.c2 = Interval::infinite();
        let bounds = verify_dpi(&trace, &report, 0.9, 10.0).unwrap();
        assert!(bounds.all_pass());
        assert!(bounds.count(BoundStatus::VacuousPass) > 0);
    }

    #[test]
    fn csv_includes_inf_markers_not_specials() {
        let trace = zero_error_dpi_trace(0.9, 10.0, 2);
        let mut report = synthetic_report(0.9);
        report.c2 = Interval::infinite();
        let bounds = verify_dpi(&trace, &report, 0.9, 10.0).unwrap();
        let csv = bounds.to_csv_string();
        assert!(csv.contains("inf"));
        assert!(!csv.contains("NaN"));
    }
}
