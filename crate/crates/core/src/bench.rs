//! Sweep driver: depth and success-probability experiments over graph
//! families, emitted as CSV.
//!
//! Graph instance `(n, trial)` is drawn with seed [`instance_seed`], so every
//! `B` value and strategy sees the same graphs. Trials run in parallel but
//! rows are assembled in key order, so output bytes depend only on the
//! configuration.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::{build_optimized, build_traditional, AnsatzParams, CircuitError, CircuitIR};
use crate::graph::{generate_complete, generate_cycle, generate_erdos_renyi, Graph, GraphError};
use crate::scalar::Scalar;
use crate::schedule::{schedule_traditional, schedule_tree_ordered, verify_schedule, StepSchedule};
use crate::sim::{run_noisy, NoiseParams, SimError, MAX_DENSITY_QUBITS};
use crate::tree::{build_dfs_tree, build_greedy_tree, HeuristicConfig, TreeError};

/// Bumped whenever a CSV column is added, removed or reinterpreted.
pub const CSV_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("need at least two distinct x values for a line fit")]
    DegenerateFit,
    #[error("schedule audit failed for n = {n}, trial {trial}: {detail}")]
    Audit { n: usize, trial: usize, detail: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    ErdosRenyi { p_edge: f64 },
    Complete,
    Cycle,
}

impl Family {
    pub fn instance(&self, n: usize, seed: u64) -> Result<Graph, GraphError> {
        match *self {
            Family::ErdosRenyi { p_edge } => generate_erdos_renyi(n, p_edge, seed),
            Family::Complete => generate_complete(n),
            Family::Cycle => generate_cycle(n),
        }
    }

    fn min_n(&self) -> usize {
        match self {
            Family::Cycle => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::ErdosRenyi { p_edge } => write!(f, "erdos_renyi({p_edge})"),
            Family::Complete => write!(f, "complete"),
            Family::Cycle => write!(f, "cycle"),
        }
    }
}

/// How the cost layer is scheduled and built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    /// Greedy edge colouring, full CNOT blocks.
    Traditional,
    /// Depth-first tree, CNOT-reduced first layer.
    Dfs,
    /// Cost-driven greedy tree, CNOT-reduced first layer.
    Greedy,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Traditional => "traditional",
            Method::Dfs => "dfs",
            Method::Greedy => "greedy",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "traditional" => Ok(Method::Traditional),
            "dfs" => Ok(Method::Dfs),
            "greedy" => Ok(Method::Greedy),
            other => Err(format!("unknown strategy {other:?}")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub family: Family,
    /// Strictly ascending.
    pub n_values: Vec<usize>,
    pub b_values: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub strategies: Vec<Method>,
    pub noise: Option<NoiseParams<f64>>,
    /// Average every instance over all `n` roots instead of root 0.
    pub average_over_roots: bool,
    /// Run the schedule verifier on every schedule.
    pub audit: bool,
}

impl ExperimentConfig {
    /// Desk-scale defaults: 20 trials, B ∈ {3, 6, 10}, all strategies,
    /// root averaging on.
    pub fn new(family: Family, n_values: Vec<usize>) -> Self {
        ExperimentConfig {
            family,
            n_values,
            b_values: vec![3, 6, 10],
            trials: 20,
            seed: 0,
            strategies: vec![Method::Traditional, Method::Dfs, Method::Greedy],
            noise: None,
            average_over_roots: true,
            audit: false,
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: &str| Err(BenchError::Config(m.to_string()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.n_values.is_empty() {
            return bad("no n values");
        }
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return bad("n values must be strictly ascending");
        }
        if self.n_values[0] < self.family.min_n() {
            return bad("n too small for the graph family");
        }
        if self.strategies.is_empty() {
            return bad("no strategies");
        }
        if self.strategies.contains(&Method::Greedy) {
            if self.b_values.is_empty() {
                return bad("greedy strategy needs at least one B value");
            }
            if self.b_values.contains(&0) {
                return bad("B must be at least 1");
            }
        }
        if let Family::ErdosRenyi { p_edge } = self.family {
            if !(p_edge > 0.0 && p_edge <= 1.0) {
                return bad("p_edge must lie in (0, 1]");
            }
        }
        Ok(())
    }

    /// `(method, B)` pairs in output order.
    fn variants(&self) -> Vec<(Method, Option<usize>)> {
        let mut methods = self.strategies.clone();
        methods.sort();
        methods.dedup();
        let mut bs = self.b_values.clone();
        bs.sort_unstable();
        bs.dedup();
        methods
            .into_iter()
            .flat_map(|m| match m {
                Method::Greedy => bs.iter().map(|&b| (m, Some(b))).collect::<Vec<_>>(),
                _ => vec![(m, None)],
            })
            .collect()
    }

    fn roots(&self, n: usize) -> Vec<usize> {
        if self.average_over_roots {
            (0..n).collect()
        } else {
            vec![0]
        }
    }
}

/// Seed of graph instance `(n, trial)`.
pub fn instance_seed(seed: u64, n: usize, trial: usize) -> u64 {
    seed ^ ((n as u64) << 40) ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Schedule for one method at one root.
fn schedule_for(
    g: &Graph,
    method: Method,
    b: Option<usize>,
    root: usize,
) -> Result<StepSchedule, BenchError> {
    Ok(match method {
        Method::Traditional => schedule_traditional(g),
        Method::Dfs => {
            let t = build_dfs_tree(g, root)?;
            schedule_tree_ordered(g, &t).expect("tree built from g")
        }
        Method::Greedy => {
            let cfg = HeuristicConfig::new(b.expect("greedy carries B"))?;
            let t = build_greedy_tree(g, root, cfg)?;
            schedule_tree_ordered(g, &t).expect("tree built from g")
        }
    })
}

fn circuit_for<T: Scalar>(
    g: &Graph,
    sched: &StepSchedule,
    params: &AnsatzParams<T>,
) -> Result<CircuitIR<T>, BenchError> {
    Ok(match sched.tree() {
        None => build_traditional(g, params, sched)?,
        Some(t) => build_optimized(g, params, t, sched)?,
    })
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct DepthRow {
    pub schema: String,
    pub family: String,
    pub n: usize,
    #[serde(rename = "B")]
    pub b: Option<usize>,
    pub strategy: String,
    pub instances: usize,
    /// Total cost-layer steps (tree and non-tree phases).
    pub mean_steps: f64,
    /// Steps of the tree phase only; empty for the traditional strategy.
    pub mean_tree_steps: Option<f64>,
    /// Logical depth of the full p = 1 ansatz.
    pub mean_gate_depth: f64,
    pub mean_cnots: f64,
    pub stderr_steps: f64,
    pub stderr_tree_steps: Option<f64>,
}

#[derive(Clone, Copy, Default)]
struct DepthSample {
    steps: f64,
    tree_steps: f64,
    gate_depth: f64,
    cnots: f64,
}

/// Step, depth and CNOT statistics per `(n, strategy, B)`.
pub fn run_depth_experiment(cfg: &ExperimentConfig) -> Result<Vec<DepthRow>, BenchError> {
    cfg.validate()?;
    let variants = cfg.variants();
    let params = AnsatzParams::<f64>::new(vec![0.5], vec![0.5])?;
    let jobs: Vec<(usize, usize)> = cfg
        .n_values
        .iter()
        .flat_map(|&n| (0..cfg.trials).map(move |t| (n, t)))
        .collect();

    // samples[job][variant]
    let samples: Vec<Vec<DepthSample>> = jobs
        .par_iter()
        .map(|&(n, trial)| {
            let g = cfg.family.instance(n, instance_seed(cfg.seed, n, trial))?;
            variants
                .iter()
                .map(|&(method, b)| {
                    let roots = match method {
                        Method::Traditional => vec![0],
                        _ => cfg.roots(n),
                    };
                    let mut acc = DepthSample::default();
                    for &root in &roots {
                        let sched = schedule_for(&g, method, b, root)?;
                        if cfg.audit {
                            audit(&g, &sched, n, trial)?;
                        }
                        let c = circuit_for(&g, &sched, &params)?;
                        acc.steps += sched.num_steps() as f64;
                        acc.tree_steps += sched.tree_steps() as f64;
                        acc.gate_depth += c.depth() as f64;
                        acc.cnots += c.cnot_count() as f64;
                    }
                    let k = roots.len() as f64;
                    Ok(DepthSample {
                        steps: acc.steps / k,
                        tree_steps: acc.tree_steps / k,
                        gate_depth: acc.gate_depth / k,
                        cnots: acc.cnots / k,
                    })
                })
                .collect()
        })
        .collect::<Result<_, BenchError>>()?;

    let mut rows = Vec::new();
    for (ni, &n) in cfg.n_values.iter().enumerate() {
        let block = &samples[ni * cfg.trials..(ni + 1) * cfg.trials];
        for (vi, &(method, b)) in variants.iter().enumerate() {
            let col = |f: fn(&DepthSample) -> f64| -> Vec<f64> { block.iter().map(|s| f(&s[vi])).collect() };
            let (mean_steps, stderr_steps) = mean_stderr(&col(|s| s.steps));
            let (mean_tree, stderr_tree) = mean_stderr(&col(|s| s.tree_steps));
            let has_tree = method != Method::Traditional;
            rows.push(DepthRow {
                schema: format!("depth/{CSV_SCHEMA_VERSION}"),
                family: cfg.family.to_string(),
                n,
                b,
                strategy: method.to_string(),
                instances: cfg.trials,
                mean_steps,
                mean_tree_steps: has_tree.then_some(mean_tree),
                mean_gate_depth: mean_stderr(&col(|s| s.gate_depth)).0,
                mean_cnots: mean_stderr(&col(|s| s.cnots)).0,
                stderr_steps,
                stderr_tree_steps: has_tree.then_some(stderr_tree),
            });
        }
    }
    Ok(rows)
}

fn audit(g: &Graph, sched: &StepSchedule, n: usize, trial: usize) -> Result<(), BenchError> {
    let v = verify_schedule(g, sched);
    if v.is_empty() {
        Ok(())
    } else {
        Err(BenchError::Audit {
            n,
            trial,
            detail: v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "),
        })
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SuccessRow {
    pub schema: String,
    pub family: String,
    pub n: usize,
    #[serde(rename = "B")]
    pub b: Option<usize>,
    pub strategy: String,
    pub instances: usize,
    pub mean_one_minus_psuccess: f64,
    pub stderr: f64,
    pub mean_steps: f64,
    pub mean_cnots: f64,
}

/// Mean `1 - P_success` per `(n, strategy, B)` under `cfg.noise`. Each
/// instance draws one seeded `(γ, β)` shared by every strategy.
pub fn run_success_experiment(cfg: &ExperimentConfig) -> Result<Vec<SuccessRow>, BenchError> {
    cfg.validate()?;
    let noise = cfg
        .noise
        .ok_or_else(|| BenchError::Config("success experiment needs noise parameters".into()))?;
    if let Some(&n) = cfg.n_values.iter().find(|&&n| n > MAX_DENSITY_QUBITS) {
        return Err(SimError::TooManyQubits {
            n,
            max: MAX_DENSITY_QUBITS,
        }
        .into());
    }
    let variants = cfg.variants();
    let nv = variants.len();
    let jobs: Vec<(usize, usize, usize)> = cfg
        .n_values
        .iter()
        .flat_map(|&n| (0..cfg.trials).flat_map(move |t| (0..nv).map(move |v| (n, t, v))))
        .collect();

    // (1 - p, steps, cnots) per job
    let samples: Vec<(f64, f64, f64)> = jobs
        .par_iter()
        .map(|&(n, trial, vi)| {
            let seed = instance_seed(cfg.seed, n, trial);
            let g = cfg.family.instance(n, seed)?;
            let params = AnsatzParams::<f64>::random(1, &mut ChaCha8Rng::seed_from_u64(seed))?;
            let (method, b) = variants[vi];
            let roots = match method {
                Method::Traditional => vec![0],
                _ => cfg.roots(n),
            };
            let mut acc = (0.0, 0.0, 0.0);
            for &root in &roots {
                let sched = schedule_for(&g, method, b, root)?;
                if cfg.audit {
                    audit(&g, &sched, n, trial)?;
                }
                let c = circuit_for(&g, &sched, &params)?;
                let r = run_noisy(&c, &sched, &noise)?;
                acc.0 += 1.0 - r.p_success;
                acc.1 += sched.num_steps() as f64;
                acc.2 += c.cnot_count() as f64;
            }
            let k = roots.len() as f64;
            Ok((acc.0 / k, acc.1 / k, acc.2 / k))
        })
        .collect::<Result<_, BenchError>>()?;

    let mut rows = Vec::new();
    let per_n = cfg.trials * variants.len();
    for (ni, &n) in cfg.n_values.iter().enumerate() {
        for (vi, &(method, b)) in variants.iter().enumerate() {
            let pick = |f: fn(&(f64, f64, f64)) -> f64| -> Vec<f64> {
                (0..cfg.trials)
                    .map(|t| f(&samples[ni * per_n + t * variants.len() + vi]))
                    .collect()
            };
            let (mean, stderr) = mean_stderr(&pick(|s| s.0));
            rows.push(SuccessRow {
                schema: format!("success/{CSV_SCHEMA_VERSION}"),
                family: cfg.family.to_string(),
                n,
                b,
                strategy: method.to_string(),
                instances: cfg.trials,
                mean_one_minus_psuccess: mean,
                stderr,
                mean_steps: mean_stderr(&pick(|s| s.1)).0,
                mean_cnots: mean_stderr(&pick(|s| s.2)).0,
            });
        }
    }
    Ok(rows)
}

/// Ordinary least-squares line through `points`; returns `(slope, intercept)`.
pub fn fit_slope<T: Scalar>(points: &[(T, T)]) -> Result<(T, T), BenchError> {
    let k = T::lit(points.len() as f64);
    if points.len() < 2 {
        return Err(BenchError::DegenerateFit);
    }
    let (sx, sy) = points
        .iter()
        .fold((T::zero(), T::zero()), |(a, b), &(x, y)| (a + x, b + y));
    let (mx, my) = (sx / k, sy / k);
    let (sxx, sxy) = points.iter().fold((T::zero(), T::zero()), |(a, b), &(x, y)| {
        (a + (x - mx) * (x - mx), b + (x - mx) * (y - my))
    });
    if sxx == T::zero() {
        return Err(BenchError::DegenerateFit);
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SlopeRow {
    pub schema: String,
    pub family: String,
    #[serde(rename = "B")]
    pub b: Option<usize>,
    pub strategy: String,
    pub metric: String,
    pub slope: f64,
    pub intercept: f64,
}

type Metric = fn(&DepthRow) -> Option<f64>;

/// Fits mean steps, tree-phase steps and gate depth against `n` for each
/// `(strategy, B)` present in `rows`.
pub fn fit_depth_slopes(rows: &[DepthRow]) -> Result<Vec<SlopeRow>, BenchError> {
    let mut keys: Vec<(String, String, Option<usize>)> = Vec::new();
    for r in rows {
        let k = (r.family.clone(), r.strategy.clone(), r.b);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    let mut out = Vec::new();
    for (family, strategy, b) in keys {
        let group: Vec<&DepthRow> = rows
            .iter()
            .filter(|r| r.family == family && r.strategy == strategy && r.b == b)
            .collect();
        let metrics: [(&str, Metric); 3] = [
            ("steps", |r| Some(r.mean_steps)),
            ("tree_steps", |r| r.mean_tree_steps),
            ("gate_depth", |r| Some(r.mean_gate_depth)),
        ];
        for (name, get) in metrics {
            let pts: Option<Vec<(f64, f64)>> =
                group.iter().map(|r| get(r).map(|y| (r.n as f64, y))).collect();
            let Some(pts) = pts else { continue };
            if pts.len() < 2 {
                continue;
            }
            let (slope, intercept) = fit_slope(&pts)?;
            out.push(SlopeRow {
                schema: format!("slope/{CSV_SCHEMA_VERSION}"),
                family: family.clone(),
                b,
                strategy: strategy.clone(),
                metric: name.to_string(),
                slope,
                intercept,
            });
        }
    }
    Ok(out)
}

/// Writes rows as CSV with a header row.
pub fn write_csv<R: Serialize, W: Write>(rows: &[R], out: W) -> Result<(), BenchError> {
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
