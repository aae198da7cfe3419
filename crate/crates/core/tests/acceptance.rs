//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

// `!(a < b)` is deliberate: a NaN must fail the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lowdepth_qaoa::bench::{
    fit_depth_slopes, run_depth_experiment, run_success_experiment, ExperimentConfig, Family,
    Method,
};
use lowdepth_qaoa::circuit::{build_optimized, build_traditional, CircuitIR, Gate, GateTag};
use lowdepth_qaoa::graph::{generate_complete, generate_cycle, generate_erdos_renyi, Graph};
use lowdepth_qaoa::oracle::solve_exact;
use lowdepth_qaoa::schedule::{schedule_traditional, schedule_tree_ordered};
use lowdepth_qaoa::sim::{run_ideal, run_noisy, DensityMatrix, NoiseParams, StateVector};
use lowdepth_qaoa::tree::{build_dfs_tree, build_greedy_tree, HeuristicConfig, RootedSpanningTree};
use lowdepth_qaoa::Params;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn greedy3(g: &Graph, root: usize) -> RootedSpanningTree {
    build_greedy_tree(g, root, HeuristicConfig::new(3).unwrap()).unwrap()
}

fn cycle_steps() -> Outcome {
    for n in 4..=12 {
        let steps = schedule_traditional(&generate_cycle(n).unwrap()).num_steps();
        let want = if n % 2 == 0 { 2 } else { 3 };
        ensure!(steps == want, "C{n}: traditional {steps} steps, want {want}");
    }
    let c6 = generate_cycle(6).unwrap();
    let dfs = build_dfs_tree(&c6, 0).unwrap();
    ensure!(dfs.height() == 5, "DFS tree of C6 is not a path");
    let steps = schedule_tree_ordered(&c6, &dfs).unwrap().num_steps();
    ensure!(steps == 6, "C6 DFS tree-ordered: {steps} steps, want 6");
    Ok("C4..C12 traditional 2/3 steps; C6 DFS 6 steps".into())
}

fn cnot_reduction() -> Outcome {
    let mut graphs = Vec::new();
    for i in 0..200u64 {
        let n = 4 + (i as usize % 27);
        let p = [0.4, 0.6, 0.8][i as usize % 3];
        graphs.push(generate_erdos_renyi(n, p, 1000 + i).unwrap());
    }
    graphs.extend((2..=12).map(|n| generate_complete(n).unwrap()));
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (i, g) in graphs.iter().enumerate() {
        let params = Params::random(1, &mut rng).unwrap();
        let root = i % g.n();
        let trad = build_traditional(g, &params, &schedule_traditional(g)).unwrap().cnot_count();
        for t in [build_dfs_tree(g, root).unwrap(), greedy3(g, root)] {
            let s = schedule_tree_ordered(g, &t).unwrap();
            let opt = build_optimized(g, &params, &t, &s).unwrap().cnot_count();
            ensure!(trad - opt == g.n() - 1, "graph {i}: saved {} CNOTs, n = {}", trad - opt, g.n());
        }
    }
    Ok(format!("{} graphs, DFS and greedy trees, saving n-1 each", graphs.len()))
}

fn equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 1.0f64;
    let mut runs = 0;
    for i in 0..50u64 {
        let n = 4 + (i as usize % 7);
        let g = generate_erdos_renyi(n, [0.4, 0.6, 0.8][i as usize % 3], 5000 + i).unwrap();
        let params = Params::random(1, &mut rng).unwrap();
        let reference = run_ideal(&build_traditional(&g, &params, &schedule_traditional(&g)).unwrap()).unwrap();
        for root in 0..n {
            for t in [build_dfs_tree(&g, root).unwrap(), greedy3(&g, root)] {
                let s = schedule_tree_ordered(&g, &t).unwrap();
                let psi = run_ideal(&build_optimized(&g, &params, &t, &s).unwrap()).unwrap();
                let f = reference.fidelity(&psi);
                worst = worst.min(f);
                runs += 1;
                ensure!(f >= 1.0 - 1e-9, "graph {i} root {root}: fidelity {f}");
            }
        }
    }
    Ok(format!("{runs} circuits, min fidelity {worst:.15}"))
}

fn tree_from(edges: &[(usize, usize)]) -> (Graph, RootedSpanningTree) {
    let n = edges.len() + 1;
    let g = Graph::from_edges(n, edges.iter().copied()).unwrap();
    let t = RootedSpanningTree::from_discovery(&g, edges[0].0, edges.iter().copied()).unwrap();
    (g, t)
}

fn tree_labels(edges: &[(usize, usize)]) -> (usize, Vec<usize>, usize) {
    let (g, t) = tree_from(edges);
    let s = schedule_tree_ordered(&g, &t).unwrap();
    let labels = edges.iter().map(|&(a, b)| s.step_of(a, b).unwrap()).collect();
    (t.height(), labels, s.num_steps())
}

fn small_tree_fixtures() -> Outcome {
    // Two trees of different height with the same edge labels.
    let (ha, la, _) = tree_labels(&[(0, 1), (1, 2), (2, 3)]);
    let (hb, lb, _) = tree_labels(&[(0, 1), (1, 2), (1, 3)]);
    ensure!((ha, hb) == (3, 2), "heights {ha}, {hb}");
    ensure!(la == vec![1, 2, 3] && lb == vec![1, 2, 3], "labels {la:?}, {lb:?}");
    // Two trees of equal height; branching at the root saves a step.
    let (h6a, _, sa) = tree_labels(&[(0, 1), (1, 2), (1, 3)]);
    let (h6b, lb6, sb) = tree_labels(&[(0, 1), (0, 2), (1, 3)]);
    ensure!(h6a == h6b, "heights differ: {h6a} vs {h6b}");
    ensure!((sa, sb) == (3, 2), "steps {sa} vs {sb}, want 3 vs 2");
    ensure!(lb6 == vec![1, 2, 2], "labels {lb6:?}");
    Ok("path/branch pair labelled {1,2,3}; equal-height pair 3 vs 2 steps".into())
}

/// Every labelled connected graph on `n` vertices.
fn connected_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    (0u32..1 << pairs.len())
        .filter_map(|mask| {
            let edges = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e);
            Graph::from_edges(n, edges).ok()
        })
        .collect()
}

fn heuristic_vs_oracle() -> Outcome {
    let mut graphs: Vec<Graph> = (2..=6).flat_map(connected_graphs).collect();
    let exhaustive = graphs.len();
    graphs.extend((0..100u64).map(|i| generate_erdos_renyi(7, 0.5, 9000 + i).unwrap()));
    let (mut greedy_gap, mut dfs_gap) = (0usize, 0usize);
    for (i, g) in graphs.iter().enumerate() {
        let exact = solve_exact(g, 0).unwrap().best_steps;
        let h = schedule_tree_ordered(g, &greedy3(g, 0)).unwrap().num_steps();
        let d = schedule_tree_ordered(g, &build_dfs_tree(g, 0).unwrap()).unwrap().num_steps();
        ensure!(h >= exact && d >= exact, "graph {i}: greedy {h}, dfs {d}, oracle {exact}");
        greedy_gap += h - exact;
        dfs_gap += d - exact;
    }
    let k = graphs.len() as f64;
    let (mg, md) = (greedy_gap as f64 / k, dfs_gap as f64 / k);
    ensure!(mg <= md, "mean greedy gap {mg:.4} > mean DFS gap {md:.4}");
    Ok(format!(
        "{exhaustive} exhaustive + 100 random graphs; mean gap greedy {mg:.4}, DFS {md:.4}"
    ))
}

fn slope_trend() -> Outcome {
    let mut report = Vec::new();
    for family in [
        Family::ErdosRenyi { p_edge: 0.4 },
        Family::ErdosRenyi { p_edge: 0.6 },
        Family::ErdosRenyi { p_edge: 0.8 },
        Family::Complete,
    ] {
        let mut cfg = ExperimentConfig::new(family, (20..=100).step_by(10).collect());
        cfg.strategies = vec![Method::Dfs, Method::Greedy];
        cfg.seed = 6;
        let slopes = fit_depth_slopes(&run_depth_experiment(&cfg).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let get = |strategy: &str, b: Option<usize>| {
            slopes
                .iter()
                .find(|s| s.strategy == strategy && s.b == b && s.metric == "tree_steps")
                .map(|s| s.slope)
                .expect("slope row present")
        };
        let (b3, b6, b10, dfs) = (get("greedy", Some(3)), get("greedy", Some(6)), get("greedy", Some(10)), get("dfs", None));
        report.push(format!("{family}: B3 {b3:.3} B6 {b6:.3} B10 {b10:.3} DFS {dfs:.3}"));
        ensure!(b3 > b6 && b6 > b10, "{family}: slopes not ordered: {b3} {b6} {b10}");
        ensure!(b10 < 0.5, "{family}: B=10 slope {b10} not below 0.5");
        ensure!((dfs - 1.0).abs() < 0.1, "{family}: DFS slope {dfs} not near 1");
    }
    Ok(report.join("; "))
}

fn success_ordering() -> Outcome {
    let mut cfg = ExperimentConfig::new(Family::ErdosRenyi { p_edge: 0.6 }, (4..=10).collect());
    cfg.trials = 10;
    cfg.seed = 7;
    cfg.noise = Some(NoiseParams::default());
    let rows = run_success_experiment(&cfg).map_err(|e| e.to_string())?;
    let mut report = Vec::new();
    let mut b3_behind_dfs = Vec::new();
    for n in 4..=10 {
        let get = |s: &str, b: Option<usize>| {
            rows.iter()
                .find(|r| r.n == n && r.strategy == s && r.b == b)
                .map(|r| r.mean_one_minus_psuccess)
                .expect("row present")
        };
        let (trad, dfs) = (get("traditional", None), get("dfs", None));
        let (b3, b6, b10) = (get("greedy", Some(3)), get("greedy", Some(6)), get("greedy", Some(10)));
        report.push(format!("n={n} {trad:.4}/{dfs:.4}/{b10:.4} (B3 {b3:.4}, B6 {b6:.4})"));
        ensure!(b10 < trad, "n={n}: greedy {b10} not below traditional {trad}");
        ensure!(b10 <= dfs, "n={n}: greedy {b10} above DFS {dfs}");
        if b3 > dfs {
            b3_behind_dfs.push(n);
        }
    }
    Ok(format!(
        "1-P traditional/dfs/greedy(B=10): {}; B=3 above DFS at n = {:?}",
        report.join(", "),
        b3_behind_dfs
    ))
}

fn three_qubit_circuits() -> Vec<CircuitIR<f64>> {
    let mut out = Vec::new();
    let angles = [0.0, 0.3, -1.1, std::f64::consts::PI, 5.0];
    for q in 0..3 {
        let mut gates = vec![Gate::H(q)];
        for &a in &angles {
            gates.extend([Gate::Rx(q, a), Gate::Rz(q, a)]);
        }
        for g in gates {
            // start from a generic state so every gate acts non-trivially
            let mut c = CircuitIR::new(3);
            for p in 0..3 {
                c.push(Gate::H(p), GateTag::Init);
                c.push(Gate::Rz(p, 0.4 + p as f64), GateTag::Init);
            }
            c.push(g, GateTag::Init);
            out.push(c);
        }
    }
    for control in 0..3 {
        for target in 0..3 {
            if control != target {
                let mut c = CircuitIR::new(3);
                c.push(Gate::H(control), GateTag::Init);
                c.push(Gate::Rx(target, 0.7), GateTag::Init);
                c.push(Gate::Cx { control, target }, GateTag::Init);
                out.push(c);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let mut c = CircuitIR::new(3);
        for _ in 0..30 {
            let q = rng.gen_range(0..3);
            let a = rng.gen_range(-4.0..4.0);
            let g = match rng.gen_range(0..4) {
                0 => Gate::H(q),
                1 => Gate::Rx(q, a),
                2 => Gate::Rz(q, a),
                _ => Gate::Cx { control: q, target: (q + 1 + rng.gen_range(0..2)) % 3 },
            };
            c.push(g, GateTag::Init);
        }
        out.push(c);
    }
    for edges in [vec![(0, 1), (1, 2)], vec![(0, 1), (1, 2), (0, 2)]] {
        let g = Graph::from_edges(3, edges).unwrap();
        for p in 1..=2 {
            let params = Params::random(p, &mut rng).unwrap();
            out.push(build_traditional(&g, &params, &schedule_traditional(&g)).unwrap());
            for root in 0..3 {
                let t = greedy3(&g, root);
                let s = schedule_tree_ordered(&g, &t).unwrap();
                out.push(build_optimized(&g, &params, &t, &s).unwrap());
            }
        }
    }
    out
}

fn simulator_oracles() -> Outcome {
    let circuits = three_qubit_circuits();
    let mut worst_amp = 0.0f64;
    for (i, c) in circuits.iter().enumerate() {
        let got = run_ideal(c).unwrap();
        for (a, b) in got.amplitudes().iter().zip(common::dense_run(c)) {
            worst_amp = worst_amp.max((a - b).norm());
        }
        ensure!(worst_amp <= 1e-12, "circuit {i}: amplitude error {worst_amp:e}");
    }

    let noise = NoiseParams::<f64>::default();
    let mut worst_trace = 0.0f64;
    for c in circuits.iter().step_by(7) {
        let mut rho = DensityMatrix::from_pure(&StateVector::basis(3, 0));
        for g in c.gates() {
            rho.apply(g);
            let qs: Vec<usize> = g.qubits().collect();
            rho.depolarize(&qs, if g.is_cx() { noise.p_cx } else { noise.p_1q });
            for q in 0..3 {
                rho.depolarize(&[q], noise.p_idle);
            }
            worst_trace = worst_trace.max((rho.trace() - 1.0).norm());
        }
    }
    ensure!(worst_trace <= 1e-9, "trace drift {worst_trace:e}");

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..20u64 {
        let g = generate_erdos_renyi(3 + (i as usize % 6), 0.6, 100 + i).unwrap();
        let params = Params::random(1, &mut rng).unwrap();
        let t = greedy3(&g, 0);
        let s = schedule_tree_ordered(&g, &t).unwrap();
        let c = build_optimized(&g, &params, &t, &s).unwrap();
        let p = run_noisy(&c, &s, &NoiseParams::noiseless()).unwrap().p_success;
        ensure!(p == 1.0, "graph {i}: noiseless P_success {p}");
        let p = run_noisy(&c, &s, &noise).unwrap().p_success;
        ensure!(p > 0.0 && p < 1.0, "graph {i}: noisy P_success {p}");
    }
    Ok(format!(
        "{} circuits, max amplitude error {worst_amp:.1e}, max trace drift {worst_trace:.1e}",
        circuits.len()
    ))
}

fn cli_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_lowdepth-qaoa");
    let work = tempfile::tempdir().map_err(|e| e.to_string())?;
    let graph = work.path().join("g.txt");
    let gen = |out: &std::path::Path| -> Vec<String> {
        ["gen", "--family", "er", "--n", "7", "--p-edge", "0.5", "--seed", "11", "--out"]
            .iter()
            .map(|s| s.to_string())
            .chain([out.to_str().unwrap().to_string()])
            .collect()
    };
    let status = Command::new(bin).args(gen(&graph)).status().map_err(|e| e.to_string())?;
    ensure!(status.success(), "gen failed");
    let g = graph.to_str().unwrap();

    let runs: Vec<(&str, Vec<&str>)> = vec![
        ("gen", vec!["gen", "--family", "er", "--n", "12", "--p-edge", "0.4", "--seed", "3"]),
        ("tree", vec!["tree", "--graph", g, "--strategy", "greedy", "--root", "2"]),
        ("schedule", vec!["schedule", "--graph", g, "--strategy", "greedy", "--B", "2"]),
        ("circuit", vec!["circuit", "--graph", g, "--strategy", "dfs", "--p", "2", "--seed", "5"]),
        ("simulate", vec!["simulate", "--graph", g, "--strategy", "greedy", "--seed", "5"]),
        ("bench-depth", vec!["bench-depth", "--n", "8,10,12", "--trials", "4", "--seed", "1"]),
        ("bench-success", vec!["bench-success", "--n", "4,5", "--trials", "3", "--seed", "1"]),
        ("oracle", vec!["oracle", "--graph", g, "--root", "1"]),
    ];
    let mut checked = Vec::new();
    for (name, args) in runs {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let dir = work.path().join(format!("{name}-{rep}"));
            fs::create_dir(&dir).map_err(|e| e.to_string())?;
            let out = dir.join("out");
            let slopes = dir.join("slopes");
            let mut cmd = Command::new(bin);
            cmd.args(&args).arg("--out").arg(&out);
            if name == "bench-depth" {
                cmd.arg("--slopes").arg(&slopes);
            }
            let res = cmd.output().map_err(|e| e.to_string())?;
            ensure!(res.status.success(), "{name}: {}", String::from_utf8_lossy(&res.stderr));
            let mut bytes = fs::read(&out).map_err(|e| e.to_string())?;
            if name == "bench-depth" {
                bytes.extend(fs::read(&slopes).map_err(|e| e.to_string())?);
            }
            ensure!(!bytes.is_empty(), "{name}: empty output");
            outputs.push(bytes);
        }
        ensure!(outputs[0] == outputs[1], "{name}: reruns differ");
        checked.push(name);
    }
    Ok(format!("byte-identical reruns: {}", checked.join(", ")))
}

fn greedy_scaling() -> Outcome {
    let time = |n: usize| {
        let g = generate_complete(n).unwrap();
        let cfg = HeuristicConfig::new(3).unwrap();
        (0..3)
            .map(|_| {
                let start = Instant::now();
                let t = build_greedy_tree(&g, 0, cfg).unwrap();
                std::hint::black_box(t);
                start.elapsed()
            })
            .min()
            .unwrap()
    };
    let small = time(250);
    let large = time(500);
    let ratio = large.as_secs_f64() / small.as_secs_f64().max(1e-9);
    ensure!(ratio <= 32.0, "runtime ratio {ratio:.2} exceeds 32");
    Ok(format!("K250 {small:.2?}, K500 {large:.2?}, ratio {ratio:.2}"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("cycle steps", cycle_steps, Duration::from_secs(1)),
        ("CNOT reduction", cnot_reduction, Duration::from_secs(10)),
        ("functional equivalence", equivalence, Duration::from_secs(120)),
        ("small-tree step counts", small_tree_fixtures, Duration::from_secs(1)),
        ("heuristic vs oracle", heuristic_vs_oracle, Duration::from_secs(300)),
        ("slope trend", slope_trend, Duration::from_secs(600)),
        ("success ordering", success_ordering, Duration::from_secs(600)),
        ("simulator oracles", simulator_oracles, Duration::from_secs(60)),
        ("CLI determinism", cli_determinism, Duration::from_secs(120)),
        ("greedy scaling", greedy_scaling, Duration::from_secs(60)),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.into_iter().enumerate() {
        let id = (i + 1).to_string();
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => {
                Err(format!("{detail}; took {elapsed:.1?}, budget {budget:?}"))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {id:>2} {name} ({elapsed:.2?}): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {id:>2} {name} ({elapsed:.2?}): {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
