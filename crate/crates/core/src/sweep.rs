//! Seeded experiment sweeps over Garnet parameter grids.
//!
//! A sweep runs every algorithm on `n_mdps` random problems per grid cell,
//! `n_runs` noise realizations each, and aggregates the loss curves the way
//! the summary statistics are consumed: first mean and standard deviation
//! over runs for a fixed problem, then the distribution of those per-problem
//! statistics across problems.
//!
//! Work items execute through [`map_indexed`], so `--jobs` only changes the
//! schedule: seeds are addressed per (cell, problem, algorithm, run) and the
//! aggregation walks collected results in index order, making every output
//! byte independent of thread count.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algorithms::{
    run_cpi, run_dpi, run_nsdpi, AdvantageMode, CpiConfig, Instance, RunMeta, StepMode,
};
use crate::error::{Error, Result};
use crate::garnet::{generate_garnet, FeatureMatrix, GarnetParams};
use crate::greedy::{BasisKind, GreedyConfig, GreedyOperator, NoiseMode};
use crate::mdp::{optimal_solve, DeterministicPolicy, Distribution, Mdp, OptimalSolution};
use crate::parallel::map_indexed;
use crate::plot::{render_line_plot, PlotConfig, Series};
use crate::rng::StreamKey;
use crate::trace::{Algorithm, RunTrace};

// ── Specification ────────────────────────────────────────────────────────

/// Greedy-operator settings shared by every run of a sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GreedySpec {
    pub basis: BasisKind,
    /// Coefficients F; defaults to the cell's feature count p.
    #[serde(default)]
    pub n_coeffs: Option<usize>,
    pub noise: f64,
    #[serde(default)]
    pub noise_mode: NoiseMode,
}

fn default_advantage() -> AdvantageMode {
    AdvantageMode::Exact
}

/// Per-algorithm configuration of a sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "alg", rename_all = "kebab-case")]
pub enum AlgorithmSpec {
    Dpi,
    Cpi {
        rho: f64,
        #[serde(default = "default_advantage")]
        advantage: AdvantageMode,
        #[serde(default)]
        max_iters: Option<usize>,
    },
    CpiPlus { rho: f64 },
    CpiAlpha { alpha: f64 },
    Nsdpi,
}

impl AlgorithmSpec {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            AlgorithmSpec::Dpi => Algorithm::Dpi,
            AlgorithmSpec::Cpi { .. } => Algorithm::Cpi,
            AlgorithmSpec::CpiPlus { .. } => Algorithm::CpiPlus,
            AlgorithmSpec::CpiAlpha { .. } => Algorithm::CpiAlpha,
            AlgorithmSpec::Nsdpi => Algorithm::Nsdpi,
        }
    }
}

fn default_r_max() -> f64 {
    1.0
}

/// Full sweep specification, JSON-loadable.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepSpec {
    pub n_states: Vec<usize>,
    pub n_actions: Vec<usize>,
    pub branching: Vec<usize>,
    pub n_features: Vec<usize>,
    pub n_mdps: usize,
    pub n_runs: usize,
    pub gamma: f64,
    #[serde(default = "default_r_max")]
    pub r_max: f64,
    pub iterations: usize,
    pub base_seed: u64,
    pub greedy: GreedySpec,
    pub algorithms: Vec<AlgorithmSpec>,
    /// Pin the y axis of the loss plots instead of auto-scaling.
    #[serde(default)]
    pub plot_y_max: Option<f64>,
}

/// One grid point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    pub index: usize,
    pub n_states: usize,
    pub n_actions: usize,
    pub branching: usize,
    pub n_features: usize,
}

impl Cell {
    pub fn label(&self) -> String {
        format!(
            "ns{}_na{}_b{}_p{}",
            self.n_states, self.n_actions, self.branching, self.n_features
        )
    }
}

impl SweepSpec {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let spec: SweepSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_states.is_empty()
            || self.n_actions.is_empty()
            || self.branching.is_empty()
            || self.n_features.is_empty()
        {
            return Err(Error::config("sweep grid lists must be non-empty"));
        }
        if self.n_mdps == 0 || self.n_runs == 0 || self.iterations == 0 {
            return Err(Error::config("sweep counts must be at least 1"));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::config(format!("gamma must lie in (0,1), got {}", self.gamma)));
        }
        if self.algorithms.is_empty() {
            return Err(Error::config("sweep needs at least one algorithm"));
        }
        if !self.greedy.noise.is_finite() || self.greedy.noise < 0.0 {
            return Err(Error::config("greedy noise must be >= 0"));
        }
        for cell in self.cells() {
            GarnetParams::new(cell.n_states, cell.n_actions, cell.branching, cell.n_features, 0)?;
        }
        Ok(())
    }

    /// Deduplicated cartesian product in grid order. The grid may name the
    /// same point twice (the paper-style `b in {1, n_s/50}` collapses for
    /// small n_s); duplicates would double-run identical work under one key.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        let mut seen = Vec::new();
        for &ns in &self.n_states {
            for &na in &self.n_actions {
                for &b in &self.branching {
                    for &p in &self.n_features {
                        let key = (ns, na, b, p);
                        if seen.contains(&key) {
                            continue;
                        }
                        seen.push(key);
                        cells.push(Cell {
                            index: cells.len(),
                            n_states: ns,
                            n_actions: na,
                            branching: b,
                            n_features: p,
                        });
                    }
                }
            }
        }
        cells
    }
}

// ── Outcome ──────────────────────────────────────────────────────────────

/// Index entry for one completed run.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub cell: Cell,
    pub algorithm: Algorithm,
    pub mdp_index: usize,
    pub run_index: usize,
    pub mdp_seed: u64,
    pub run_seed: u64,
    pub k_star: Option<usize>,
    pub rows: usize,
    pub final_loss: f64,
}

/// Per-(cell, algorithm, problem, iteration) statistics over runs.
#[derive(Clone, Debug)]
pub struct PerMdpStat {
    pub cell_index: usize,
    pub algorithm: Algorithm,
    pub mdp_index: usize,
    pub iter: usize,
    pub mean_loss: f64,
    pub std_loss: f64,
}

/// Across-problem statistics of the per-problem mean and std curves.
#[derive(Clone, Debug)]
pub struct SummaryRow {
    pub cell: Cell,
    pub algorithm: Algorithm,
    pub iter: usize,
    pub mean_loss_mean: f64,
    pub mean_loss_std: f64,
    pub std_loss_mean: f64,
    pub std_loss_std: f64,
}

pub struct SweepOutcome {
    pub cells: Vec<Cell>,
    pub summary: Vec<SummaryRow>,
    pub per_mdp: Vec<PerMdpStat>,
    pub runs: Vec<RunRecord>,
    pub traces: Vec<RunTrace>,
    pub failures: Vec<String>,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

struct Prepared {
    mdp: Mdp,
    features: FeatureMatrix,
    optimal: OptimalSolution,
    mu: Distribution,
    nu: Distribution,
    mdp_seed: u64,
}

fn run_one(
    spec: &SweepSpec,
    cell: &Cell,
    prepared: &Prepared,
    alg: &AlgorithmSpec,
    run_seed: u64,
) -> Result<RunTrace> {
    let inst = Instance::new(&prepared.mdp, &prepared.mu, &prepared.nu, &prepared.optimal)?;
    let meta = RunMeta::new(prepared.mdp_seed, run_seed);
    let greedy_cfg = GreedyConfig {
        basis: spec.greedy.basis,
        n_coeffs: spec.greedy.n_coeffs.unwrap_or(cell.n_features),
        noise_amplitude: spec.greedy.noise,
        noise_mode: spec.greedy.noise_mode,
    };
    let greedy = GreedyOperator::new(
        greedy_cfg,
        &prepared.mdp,
        Some(&prepared.features),
        meta.greedy_stream(),
    )?;
    let pi0 = DeterministicPolicy::constant(prepared.mdp.n_states(), 0);
    match alg {
        AlgorithmSpec::Dpi => run_dpi(&inst, &pi0, spec.iterations, &greedy, &meta),
        AlgorithmSpec::Nsdpi => run_nsdpi(&inst, spec.iterations, &greedy, &meta),
        AlgorithmSpec::Cpi { rho, advantage, max_iters } => {
            let cfg = CpiConfig {
                rho: *rho,
                advantage_mode: *advantage,
                max_iters: *max_iters,
                step_mode: StepMode::Adaptive,
            };
            run_cpi(&inst, &pi0, &cfg, &greedy, &meta)
        }
        AlgorithmSpec::CpiPlus { rho } => {
            let cfg = CpiConfig {
                rho: *rho,
                advantage_mode: AdvantageMode::Exact,
                max_iters: Some(spec.iterations),
                step_mode: StepMode::LineSearch,
            };
            run_cpi(&inst, &pi0, &cfg, &greedy, &meta)
        }
        AlgorithmSpec::CpiAlpha { alpha } => {
            let cfg = CpiConfig {
                rho: 0.0,
                advantage_mode: AdvantageMode::Exact,
                max_iters: Some(spec.iterations),
                step_mode: StepMode::Fixed(*alpha),
            };
            run_cpi(&inst, &pi0, &cfg, &greedy, &meta)
        }
    }
}

/// Loss curve padded to a fixed length: runs that stop early hold their final
/// policy, so the curve continues at the final loss.
fn padded_losses(trace: &RunTrace, len: usize) -> Vec<f64> {
    let mut out: Vec<f64> = trace.records.iter().map(|r| r.loss).take(len).collect();
    let last = *out.last().expect("traces always have at least one row");
    out.resize(len, last);
    out
}

/// Execute the whole grid. `jobs` follows [`map_indexed`] semantics.
pub fn run_sweep(spec: &SweepSpec, jobs: usize) -> Result<SweepOutcome> {
    spec.validate()?;
    let cells = spec.cells();
    let base = StreamKey::new(spec.base_seed);
    let n_algs = spec.algorithms.len();

    // Generate and solve every problem first; runs share these by reference.
    let n_problems = cells.len() * spec.n_mdps;
    let prepared: Vec<Result<Prepared>> = map_indexed(n_problems, jobs, |idx| {
        let cell = &cells[idx / spec.n_mdps];
        let m = idx % spec.n_mdps;
        let mdp_seed = base.tagged("mdp").indexed(cell.index as u64).indexed(m as u64).value();
        let params = GarnetParams::new(
            cell.n_states,
            cell.n_actions,
            cell.branching,
            cell.n_features,
            mdp_seed,
        )?;
        let (mdp, features) = generate_garnet(&params, spec.gamma, spec.r_max)?;
        let optimal = optimal_solve(&mdp)?;
        let mu = Distribution::uniform(mdp.n_states());
        let nu = Distribution::uniform(mdp.n_states());
        Ok(Prepared { mdp, features, optimal, mu, nu, mdp_seed })
    });
    let mut problems = Vec::with_capacity(n_problems);
    for (idx, p) in prepared.into_iter().enumerate() {
        match p {
            Ok(p) => problems.push(p),
            Err(e) => {
                return Err(Error::invariant(format!(
                    "problem {} failed to prepare: {e}",
                    idx
                )))
            }
        }
    }

    let n_items = n_problems * n_algs * spec.n_runs;
    let results: Vec<Result<RunTrace>> = map_indexed(n_items, jobs, |item| {
        let run = item % spec.n_runs;
        let rest = item / spec.n_runs;
        let alg_idx = rest % n_algs;
        let problem_idx = rest / n_algs;
        let cell = &cells[problem_idx / spec.n_mdps];
        let m = problem_idx % spec.n_mdps;
        let run_seed = base
            .tagged("run")
            .indexed(cell.index as u64)
            .indexed(m as u64)
            .indexed(alg_idx as u64)
            .indexed(run as u64)
            .value();
        run_one(spec, cell, &problems[problem_idx], &spec.algorithms[alg_idx], run_seed)
    });

    let mut traces = Vec::with_capacity(n_items);
    let mut runs = Vec::with_capacity(n_items);
    let mut failures = Vec::new();
    for (item, result) in results.into_iter().enumerate() {
        let run = item % spec.n_runs;
        let rest = item / spec.n_runs;
        let alg_idx = rest % n_algs;
        let problem_idx = rest / n_algs;
        let cell = cells[problem_idx / spec.n_mdps];
        let m = problem_idx % spec.n_mdps;
        match result {
            Ok(trace) => {
                runs.push(RunRecord {
                    cell,
                    algorithm: trace.algorithm,
                    mdp_index: m,
                    run_index: run,
                    mdp_seed: trace.mdp_seed,
                    run_seed: trace.run_seed,
                    k_star: trace.k_star,
                    rows: trace.records.len(),
                    final_loss: trace.final_loss(),
                });
                traces.push(trace);
            }
            Err(e) => {
                failures.push(format!(
                    "cell {} mdp {} alg {} run {}: {e}",
                    cell.label(),
                    m,
                    spec.algorithms[alg_idx].algorithm(),
                    run
                ));
            }
        }
    }
    if !failures.is_empty() {
        // Aggregation needs rectangular cells; return runs and failures only.
        return Ok(SweepOutcome {
            cells,
            summary: Vec::new(),
            per_mdp: Vec::new(),
            runs,
            traces,
            failures,
        });
    }

    // Aggregate. Trace index: ((problem * n_algs) + alg) * n_runs + run.
    let len = spec.iterations + 1;
    let mut per_mdp = Vec::new();
    let mut summary = Vec::new();
    for cell in &cells {
        for (alg_idx, alg) in spec.algorithms.iter().enumerate() {
            let algorithm = alg.algorithm();
            // means[m][iter], stds[m][iter]
            let mut means = vec![vec![0.0f64; len]; spec.n_mdps];
            let mut stds = vec![vec![0.0f64; len]; spec.n_mdps];
            for m in 0..spec.n_mdps {
                let problem_idx = cell.index * spec.n_mdps + m;
                let curves: Vec<Vec<f64>> = (0..spec.n_runs)
                    .map(|r| {
                        let item = (problem_idx * n_algs + alg_idx) * spec.n_runs + r;
                        padded_losses(&traces[item], len)
                    })
                    .collect();
                for iter in 0..len {
                    let column: Vec<f64> = curves.iter().map(|c| c[iter]).collect();
                    let (mean, std) = mean_std(&column);
                    means[m][iter] = mean;
                    stds[m][iter] = std;
                    per_mdp.push(PerMdpStat {
                        cell_index: cell.index,
                        algorithm,
                        mdp_index: m,
                        iter,
                        mean_loss: mean,
                        std_loss: std,
                    });
                }
            }
            for iter in 0..len {
                let mean_col: Vec<f64> = (0..spec.n_mdps).map(|m| means[m][iter]).collect();
                let std_col: Vec<f64> = (0..spec.n_mdps).map(|m| stds[m][iter]).collect();
                let (mm, ms) = mean_std(&mean_col);
                let (sm, ss) = mean_std(&std_col);
                summary.push(SummaryRow {
                    cell: *cell,
                    algorithm,
                    iter,
                    mean_loss_mean: mm,
                    mean_loss_std: ms,
                    std_loss_mean: sm,
                    std_loss_std: ss,
                });
            }
        }
    }

    Ok(SweepOutcome { cells, summary, per_mdp, runs, traces, failures })
}

// ── File emission ────────────────────────────────────────────────────────

fn algorithm_color(algorithm: Algorithm) -> &'static str {
    match algorithm {
        Algorithm::Dpi => "#d62728",
        Algorithm::Cpi => "#1f77b4",
        Algorithm::CpiPlus => "#2ca02c",
        Algorithm::CpiAlpha => "#9467bd",
        Algorithm::Nsdpi => "#ff7f0e",
    }
}

/// Write summary CSVs, per-run traces, and the per-cell SVG pairs.
pub fn write_sweep_outputs(
    spec: &SweepSpec,
    outcome: &SweepOutcome,
    out_dir: impl AsRef<Path>,
    write_traces: bool,
) -> Result<()> {
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(
        out_dir.join("spec.json"),
        serde_json::to_string_pretty(spec).expect("spec serialization cannot fail"),
    )?;

    let mut summary = String::from(
        "cell,n_states,n_actions,branching,n_features,algorithm,iter,mean_loss_mean,mean_loss_std,std_loss_mean,std_loss_std\n",
    );
    for row in &outcome.summary {
        summary.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            row.cell.label(),
            row.cell.n_states,
            row.cell.n_actions,
            row.cell.branching,
            row.cell.n_features,
            row.algorithm,
            row.iter,
            row.mean_loss_mean,
            row.mean_loss_std,
            row.std_loss_mean,
            row.std_loss_std,
        ));
    }
    std::fs::write(out_dir.join("summary.csv"), summary)?;

    let mut per_mdp = String::from("cell,algorithm,mdp_index,iter,mean_loss,std_loss\n");
    for s in &outcome.per_mdp {
        per_mdp.push_str(&format!(
            "{},{},{},{},{},{}\n",
            outcome.cells[s.cell_index].label(),
            s.algorithm,
            s.mdp_index,
            s.iter,
            s.mean_loss,
            s.std_loss
        ));
    }
    std::fs::write(out_dir.join("per_mdp.csv"), per_mdp)?;

    let mut runs = String::from(
        "cell,algorithm,mdp_index,run_index,mdp_seed,run_seed,k_star,rows,final_loss\n",
    );
    for r in &outcome.runs {
        runs.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.cell.label(),
            r.algorithm,
            r.mdp_index,
            r.run_index,
            r.mdp_seed,
            r.run_seed,
            r.k_star.map(|k| k.to_string()).unwrap_or_default(),
            r.rows,
            r.final_loss,
        ));
    }
    std::fs::write(out_dir.join("runs.csv"), runs)?;

    if !outcome.failures.is_empty() {
        std::fs::write(out_dir.join("failures.txt"), outcome.failures.join("\n") + "\n")?;
    }

    if write_traces {
        let trace_dir = out_dir.join("traces");
        for (record, trace) in outcome.runs.iter().zip(&outcome.traces) {
            let dir = trace_dir.join(record.cell.label());
            std::fs::create_dir_all(&dir)?;
            let name = format!(
                "{}_m{:02}_r{:02}.csv",
                record.algorithm, record.mdp_index, record.run_index
            );
            trace.write_file(dir.join(name))?;
        }
    }

    if !outcome.summary.is_empty() {
        let plot_dir = out_dir.join("plots");
        std::fs::create_dir_all(&plot_dir)?;
        for cell in &outcome.cells {
            let mut mean_series = Vec::new();
            let mut std_series = Vec::new();
            for alg in &spec.algorithms {
                let algorithm = alg.algorithm();
                let rows: Vec<&SummaryRow> = outcome
                    .summary
                    .iter()
                    .filter(|r| r.cell.index == cell.index && r.algorithm == algorithm)
                    .collect();
                if rows.is_empty() {
                    continue;
                }
                let mean: Vec<f64> = rows.iter().map(|r| r.mean_loss_mean).collect();
                let band_lo: Vec<f64> = rows
                    .iter()
                    .map(|r| r.mean_loss_mean - r.mean_loss_std)
                    .collect();
                let band_hi: Vec<f64> = rows
                    .iter()
                    .map(|r| r.mean_loss_mean + r.mean_loss_std)
                    .collect();
                mean_series.push(Series {
                    name: algorithm.name().to_string(),
                    color: algorithm_color(algorithm).to_string(),
                    mean,
                    band: Some((band_lo, band_hi)),
                });
                std_series.push(Series {
                    name: algorithm.name().to_string(),
                    color: algorithm_color(algorithm).to_string(),
                    mean: rows.iter().map(|r| r.std_loss_mean).collect(),
                    band: Some((
                        rows.iter().map(|r| r.std_loss_mean - r.std_loss_std).collect(),
                        rows.iter().map(|r| r.std_loss_mean + r.std_loss_std).collect(),
                    )),
                });
            }
            let y_range = spec.plot_y_max.map(|hi| (0.0, hi));
            let mean_svg = render_line_plot(
                &mean_series,
                &PlotConfig {
                    title: format!("mean loss, {}", cell.label()),
                    x_label: "iteration".to_string(),
                    y_label: "mean loss".to_string(),
                    y_range,
                },
            );
            std::fs::write(plot_dir.join(format!("{}_mean.svg", cell.label())), mean_svg)?;
            let std_svg = render_line_plot(
                &std_series,
                &PlotConfig {
                    title: format!("loss std, {}", cell.label()),
                    x_label: "iteration".to_string(),
                    y_label: "loss std".to_string(),
                    y_range,
                },
            );
            std::fs::write(plot_dir.join(format!("{}_std.svg", cell.label())), std_svg)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_spec() -> SweepSpec {
        SweepSpec {
            n_states: vec![8],
            n_actions: vec![2],
            branching: vec![1, 2],
            n_features: vec![2],
            n_mdps: 2,
            n_runs: 3,
            gamma: 0.9,
            r_max: 1.0,
            iterations: 5,
            base_seed: 42,
            greedy: GreedySpec {
                basis: BasisKind::Fourier,
                n_coeffs: None,
                noise: 0.05,
                noise_mode: NoiseMode::Relative,
            },
            algorithms: vec![
                AlgorithmSpec::Dpi,
                AlgorithmSpec::Nsdpi,
                AlgorithmSpec::CpiAlpha { alpha: 0.1 },
            ],
            plot_y_max: None,
        }
    }

    #[test]
    fn sweep_is_rectangular_and_complete() {
        let spec = tiny_spec();
        let outcome = run_sweep(&spec, 1).unwrap();
        assert!(outcome.failures.is_empty());
        assert_eq!(outcome.cells.len(), 2);
        // 2 cells x 2 mdps x 3 algorithms x 3 runs
        assert_eq!(outcome.runs.len(), 36);
        assert_eq!(outcome.traces.len(), 36);
        // Every (cell, alg, iter) summarizes exactly n_mdps problems and
        // every problem summarizes exactly n_runs runs.
        assert_eq!(outcome.summary.len(), 2 * 3 * 6);
        assert_eq!(outcome.per_mdp.len(), 2 * 3 * 2 * 6);
    }

    #[test]
    fn sweep_is_schedule_independent() {
        let spec = tiny_spec();
        let sequential = run_sweep(&spec, 1).unwrap();
        let parallel = run_sweep(&spec, 4).unwrap();
        assert_eq!(sequential.runs.len(), parallel.runs.len());
        for (a, b) in sequential.traces.iter().zip(&parallel.traces) {
            assert_eq!(a.to_csv_string(), b.to_csv_string());
        }
        for (a, b) in sequential.summary.iter().zip(&parallel.summary) {
            assert_eq!(a.mean_loss_mean.to_bits(), b.mean_loss_mean.to_bits());
            assert_eq!(a.std_loss_std.to_bits(), b.std_loss_std.to_bits());
        }
    }

    #[test]
    fn duplicate_grid_points_collapse() {
        let mut spec = tiny_spec();
        spec.branching = vec![1, 1];
        assert_eq!(spec.cells().len(), 1);
    }

    #[test]
    fn outputs_are_written_and_deterministic() {
        let spec = tiny_spec();
        let outcome = run_sweep(&spec, 0).unwrap();
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        write_sweep_outputs(&spec, &outcome, dir_a.path(), true).unwrap();
        write_sweep_outputs(&spec, &outcome, dir_b.path(), true).unwrap();
        for name in ["summary.csv", "per_mdp.csv", "runs.csv", "spec.json"] {
            let a = std::fs::read(dir_a.path().join(name)).unwrap();
            let b = std::fs::read(dir_b.path().join(name)).unwrap();
            assert_eq!(a, b, "{name} differs");
            assert!(!a.is_empty());
        }
        assert!(dir_a.path().join("plots/ns8_na2_b1_p2_mean.svg").exists());
        assert!(dir_a.path().join("plots/ns8_na2_b2_p2_std.svg").exists());
        assert!(dir_a.path().join("traces/ns8_na2_b1_p2/dpi_m00_r00.csv").exists());
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = tiny_spec();
        let text = serde_json::to_string(&spec).unwrap();
        let parsed = SweepSpec::from_json_str(&text).unwrap();
        assert_eq!(parsed.cells(), spec.cells());
        assert!(SweepSpec::from_json_str("{}").is_err());
    }
}
