//! Run traces: per-iteration records plus stop metadata, and their CSV form.
//!
//! A trace file is a CSV body preceded by `# key=value` header lines. Row k
//! describes policy k: `loss` and `eta` are its exact evaluation, `epsilon`
//! and `alpha` describe the greedy call and step that *formed* it (empty at
//! k = 0), and the advantage columns hold the decision computed *from* it.
//! Column order is fixed; fields that do not apply to an algorithm stay
//! empty. All numbers are written with shortest round-trip formatting, so a
//! parse/serialize cycle is byte-stable.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const TRACE_COLUMNS: &str = "algorithm,mdp_seed,run_seed,iter,loss,loss_conservative,epsilon,alpha,eta,advantage_hat,advantage_true,wallclock_ms";

/// Which policy-search loop produced a trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    Dpi,
    Cpi,
    CpiPlus,
    CpiAlpha,
    Nsdpi,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Dpi => "dpi",
            Algorithm::Cpi => "cpi",
            Algorithm::CpiPlus => "cpi-plus",
            Algorithm::CpiAlpha => "cpi-alpha",
            Algorithm::Nsdpi => "nsdpi",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dpi" => Ok(Algorithm::Dpi),
            "cpi" => Ok(Algorithm::Cpi),
            "cpi-plus" => Ok(Algorithm::CpiPlus),
            "cpi-alpha" => Ok(Algorithm::CpiAlpha),
            "nsdpi" => Ok(Algorithm::Nsdpi),
            other => Err(Error::parse(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// How advantage estimates were produced in a conservative run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdvantageMode {
    /// The exact advantage (estimation accuracy zero).
    Exact,
    /// Exact advantage plus synthetic uniform noise in [-rho/3, rho/3].
    Noisy,
}

impl fmt::Display for AdvantageMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AdvantageMode::Exact => "exact",
            AdvantageMode::Noisy => "noisy",
        })
    }
}

impl FromStr for AdvantageMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(AdvantageMode::Exact),
            "noisy" => Ok(AdvantageMode::Noisy),
            other => Err(Error::parse(format!("unknown advantage mode {other:?}"))),
        }
    }
}

/// One row of a trace.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    /// Exact loss `mu (v* - v_k)`.
    pub loss: f64,
    /// Loss against the continuation lower bound (non-stationary runs only).
    pub loss_conservative: Option<f64>,
    /// Measured error of the greedy call that produced policy k.
    pub epsilon: Option<f64>,
    /// Step that formed policy k from policy k-1 (1 for full steps).
    pub alpha: Option<f64>,
    /// `nu v_k` (conservative runs only).
    pub eta: Option<f64>,
    /// Advantage estimate computed from policy k.
    pub advantage_hat: Option<f64>,
    /// Exact advantage computed from policy k.
    pub advantage_true: Option<f64>,
    pub wallclock_ms: Option<f64>,
}

/// Full record of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunTrace {
    pub algorithm: Algorithm,
    pub mdp_seed: u64,
    pub run_seed: u64,
    pub mdp_fingerprint: String,
    pub gamma: f64,
    pub v_max: f64,
    pub max_iters: usize,
    pub rho: Option<f64>,
    pub fixed_alpha: Option<f64>,
    pub advantage_mode: Option<AdvantageMode>,
    pub records: Vec<IterationRecord>,
    /// Iteration at which the stopping test fired, if it did.
    pub k_star: Option<usize>,
    /// First iteration whose accumulated steps crossed the mixing threshold.
    pub k_dagger: Option<usize>,
    /// Measured error of the greedy call made at the stopping iteration.
    pub stop_epsilon: Option<f64>,
    pub final_policy: String,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn parse_opt(field: &str, what: &str) -> Result<Option<f64>> {
    if field.is_empty() {
        return Ok(None);
    }
    field
        .parse::<f64>()
        .map(Some)
        .map_err(|_| Error::parse(format!("bad {what} value {field:?}")))
}

fn parse_req<T: FromStr>(field: &str, what: &str) -> Result<T> {
    field
        .parse::<T>()
        .map_err(|_| Error::parse(format!("bad {what} value {field:?}")))
}

impl RunTrace {
    /// Losses as a dense vector indexed by iteration.
    pub fn losses(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.loss).collect()
    }

    pub fn final_loss(&self) -> f64 {
        self.records.last().map(|r| r.loss).unwrap_or(f64::NAN)
    }

    /// Running maximum of formative epsilons: entry k is `max_{1<=i<=k} eps_i`.
    pub fn running_max_epsilon(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.records.len());
        let mut max = 0.0f64;
        for r in &self.records {
            if let Some(e) = r.epsilon {
                max = max.max(e);
            }
            out.push(max);
        }
        out
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        out.push_str("# apilab-trace v1\n");
        out.push_str(&format!("# algorithm={}\n", self.algorithm));
        out.push_str(&format!("# mdp_seed={}\n", self.mdp_seed));
        out.push_str(&format!("# run_seed={}\n", self.run_seed));
        out.push_str(&format!("# mdp_fingerprint={}\n", self.mdp_fingerprint));
        out.push_str(&format!("# gamma={}\n", self.gamma));
        out.push_str(&format!("# v_max={}\n", self.v_max));
        out.push_str(&format!("# max_iters={}\n", self.max_iters));
        if let Some(rho) = self.rho {
            out.push_str(&format!("# rho={rho}\n"));
        }
        if let Some(alpha) = self.fixed_alpha {
            out.push_str(&format!("# alpha={alpha}\n"));
        }
        if let Some(mode) = self.advantage_mode {
            out.push_str(&format!("# advantage={mode}\n"));
        }
        if let Some(k) = self.k_star {
            out.push_str(&format!("# k_star={k}\n"));
        }
        if let Some(k) = self.k_dagger {
            out.push_str(&format!("# k_dagger={k}\n"));
        }
        if let Some(e) = self.stop_epsilon {
            out.push_str(&format!("# stop_epsilon={e}\n"));
        }
        out.push_str(&format!("# final_policy={}\n", self.final_policy));
        out.push_str(TRACE_COLUMNS);
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                self.algorithm,
                self.mdp_seed,
                self.run_seed,
                r.k,
                r.loss,
                fmt_opt(r.loss_conservative),
                fmt_opt(r.epsilon),
                fmt_opt(r.alpha),
                fmt_opt(r.eta),
                fmt_opt(r.advantage_hat),
                fmt_opt(r.advantage_true),
                fmt_opt(r.wallclock_ms),
            ));
        }
        out
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut header: BTreeMap<String, String> = BTreeMap::new();
        let mut lines = text.lines().peekable();
        while let Some(line) = lines.peek() {
            let Some(rest) = line.strip_prefix('#') else {
                break;
            };
            let rest = rest.trim();
            if let Some((key, value)) = rest.split_once('=') {
                header.insert(key.trim().to_string(), value.trim().to_string());
            }
            lines.next();
        }
        let columns = lines
            .next()
            .ok_or_else(|| Error::parse("trace file has no column header".to_string()))?;
        if columns != TRACE_COLUMNS {
            return Err(Error::parse(format!("unexpected trace columns {columns:?}")));
        }
        let get = |key: &str| -> Result<&String> {
            header
                .get(key)
                .ok_or_else(|| Error::parse(format!("trace header missing {key}")))
        };
        let algorithm: Algorithm = get("algorithm")?.parse()?;
        let mdp_seed: u64 = parse_req(get("mdp_seed")?, "mdp_seed")?;
        let run_seed: u64 = parse_req(get("run_seed")?, "run_seed")?;
        let gamma: f64 = parse_req(get("gamma")?, "gamma")?;
        let v_max: f64 = parse_req(get("v_max")?, "v_max")?;
        let max_iters: usize = parse_req(get("max_iters")?, "max_iters")?;
        let mdp_fingerprint = get("mdp_fingerprint")?.clone();
        let final_policy = header.get("final_policy").cloned().unwrap_or_default();
        let rho = header.get("rho").map(|v| parse_req(v, "rho")).transpose()?;
        let fixed_alpha = header.get("alpha").map(|v| parse_req(v, "alpha")).transpose()?;
        let advantage_mode = header
            .get("advantage")
            .map(|v| v.parse::<AdvantageMode>())
            .transpose()?;
        let k_star = header.get("k_star").map(|v| parse_req(v, "k_star")).transpose()?;
        let k_dagger = header
            .get("k_dagger")
            .map(|v| parse_req(v, "k_dagger"))
            .transpose()?;
        let stop_epsilon = header
            .get("stop_epsilon")
            .map(|v| parse_req(v, "stop_epsilon"))
            .transpose()?;

        let mut records = Vec::new();
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 12 {
                return Err(Error::parse(format!(
                    "trace row has {} fields, expected 12",
                    fields.len()
                )));
            }
            records.push(IterationRecord {
                k: parse_req(fields[3], "iter")?,
                loss: parse_req(fields[4], "loss")?,
                loss_conservative: parse_opt(fields[5], "loss_conservative")?,
                epsilon: parse_opt(fields[6], "epsilon")?,
                alpha: parse_opt(fields[7], "alpha")?,
                eta: parse_opt(fields[8], "eta")?,
                advantage_hat: parse_opt(fields[9], "advantage_hat")?,
                advantage_true: parse_opt(fields[10], "advantage_true")?,
                wallclock_ms: parse_opt(fields[11], "wallclock_ms")?,
            });
        }
        Ok(RunTrace {
            algorithm,
            mdp_seed,
            run_seed,
            mdp_fingerprint,
            gamma,
            v_max,
            max_iters,
            rho,
            fixed_alpha,
            advantage_mode,
            records,
            k_star,
            k_dagger,
            stop_epsilon,
            final_policy,
        })
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        RunTrace::from_csv_str(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunTrace {
        RunTrace {
            algorithm: Algorithm::Cpi,
            mdp_seed: 7,
            run_seed: 3,
            mdp_fingerprint: "00ff00ff00ff00ff".to_string(),
            gamma: 0.95,
            v_max: 20.0,
            max_iters: 100,
            rho: Some(0.5),
            fixed_alpha: None,
            advantage_mode: Some(AdvantageMode::Exact),
            records: vec![
                IterationRecord {
                    k: 0,
                    loss: 1.5,
                    eta: Some(3.25),
                    advantage_hat: Some(0.7),
                    advantage_true: Some(0.69),
                    ..Default::default()
                },
                IterationRecord {
                    k: 1,
                    loss: 1.2000000000000002,
                    epsilon: Some(0.01),
                    alpha: Some(0.0025),
                    eta: Some(3.5),
                    advantage_hat: Some(0.1),
                    advantage_true: Some(0.11),
                    ..Default::default()
                },
            ],
            k_star: Some(1),
            k_dagger: None,
            stop_epsilon: Some(0.012),
            final_policy: "mix:abcdef0123456789".to_string(),
        }
    }

    #[test]
    fn round_trip_preserves_everything() {
        let trace = sample();
        let text = trace.to_csv_string();
        let parsed = RunTrace::from_csv_str(&text).unwrap();
        assert_eq!(parsed, trace);
        // Byte stability of a second serialization.
        assert_eq!(parsed.to_csv_string(), text);
    }

    #[test]
    fn running_max_epsilon_accumulates() {
        let trace = sample();
        assert_eq!(trace.running_max_epsilon(), vec![0.0, 0.01]);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(RunTrace::from_csv_str("").is_err());
        assert!(RunTrace::from_csv_str("# algorithm=dpi\nnot,the,columns\n").is_err());
    }
}
