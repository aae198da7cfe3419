use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lowdepth_qaoa::bench::{
    fit_depth_slopes, run_depth_experiment, run_success_experiment, write_csv, ExperimentConfig,
    Family, Method,
};
use lowdepth_qaoa::circuit::{build_optimized, build_traditional};
use lowdepth_qaoa::graph::{
    generate_complete, generate_cycle, generate_erdos_renyi, read_edge_list, write_edge_list, Graph,
};
use lowdepth_qaoa::oracle::solve_exact;
use lowdepth_qaoa::schedule::{schedule_traditional, schedule_tree_ordered, write_schedule};
use lowdepth_qaoa::sim::{expected_cut, run_ideal, run_noisy, NoiseParams};
use lowdepth_qaoa::tree::{
    build_bfs_tree, build_dfs_tree, build_greedy_tree, write_tree, HeuristicConfig,
    RootedSpanningTree,
};
use lowdepth_qaoa::{Circuit, Noise, Params, StepSchedule};

#[derive(Parser)]
#[command(name = "lowdepth-qaoa", version, about = "Low-depth CNOT-reduced QAOA Max-Cut ansatz synthesis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph in edge-list format.
    Gen(GenArgs),
    /// Build a rooted spanning tree and dump it.
    Tree(TreeArgs),
    /// Schedule the cost layer and dump the edge steps.
    Schedule(PlanArgs),
    /// Emit the ansatz circuit, one gate per line.
    Circuit(CircuitArgs),
    /// Simulate one circuit with and without noise.
    Simulate(SimulateArgs),
    /// Depth sweep over n and B.
    BenchDepth(BenchArgs),
    /// Success-probability sweep under depolarizing noise.
    BenchSuccess(BenchArgs),
    /// Exact minimum steps for a tiny graph.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    #[value(alias = "er")]
    ErdosRenyi,
    Complete,
    Cycle,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TreeKind {
    Dfs,
    Bfs,
    Greedy,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Traditional,
    Dfs,
    Greedy,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    n: usize,
    #[arg(long = "p-edge", default_value_t = 0.5)]
    p_edge: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TreeArgs {
    /// Edge-list file.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 0)]
    root: usize,
    #[arg(long, value_enum, default_value = "greedy")]
    strategy: TreeKind,
    /// Branching parameter of the greedy builder (B = f + 1 targets branching f).
    #[arg(long = "B", default_value_t = 3)]
    b: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum, default_value = "greedy")]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 0)]
    root: usize,
    #[arg(long = "B", default_value_t = 3)]
    b: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CircuitArgs {
    #[command(flatten)]
    plan: PlanArgs,
    /// QAOA layer count.
    #[arg(long, default_value_t = 1)]
    p: usize,
    /// Seed for the random (γ, β).
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    plan: PlanArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Depolarizing probabilities `p_cx,p_1q,p_idle`.
    #[arg(long, default_value = "0.01,0.001,0.002")]
    noise: String,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "erdos-renyi")]
    family: FamilyArg,
    #[arg(long = "p-edge", default_value_t = 0.6)]
    p_edge: f64,
    /// Vertex counts, comma separated and ascending.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long = "B", value_delimiter = ',', default_value = "3,6,10")]
    b: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "traditional,dfs,greedy")]
    strategy: Vec<String>,
    /// Depolarizing probabilities `p_cx,p_1q,p_idle` (bench-success only).
    #[arg(long, default_value = "0.01,0.001,0.002")]
    noise: String,
    /// Use root 0 only instead of averaging over every root.
    #[arg(long)]
    root_zero: bool,
    /// Verify every schedule while running.
    #[arg(long)]
    audit: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write least-squares slopes against n (bench-depth only).
    #[arg(long)]
    slopes: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 0)]
    root: usize,
    #[arg(long = "B", default_value_t = 3)]
    b: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => io::stdout().write_all(text.as_bytes()).context("writing stdout"),
    }
}

fn load_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    read_edge_list(&text).with_context(|| format!("parsing {}", path.display()))
}

fn parse_noise(s: &str) -> Result<Noise> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("bad --noise {s:?}"))?;
    let [p_cx, p_1q, p_idle] = parts[..] else {
        bail!("--noise expects three comma-separated values");
    };
    Ok(NoiseParams::new(p_cx, p_1q, p_idle)?)
}

fn family(arg: FamilyArg, p_edge: f64) -> Family {
    match arg {
        FamilyArg::ErdosRenyi => Family::ErdosRenyi { p_edge },
        FamilyArg::Complete => Family::Complete,
        FamilyArg::Cycle => Family::Cycle,
    }
}

fn plan(g: &Graph, args: &PlanArgs) -> Result<(Option<RootedSpanningTree>, StepSchedule)> {
    let tree = match args.strategy {
        StrategyArg::Traditional => return Ok((None, schedule_traditional(g))),
        StrategyArg::Dfs => build_dfs_tree(g, args.root)?,
        StrategyArg::Greedy => build_greedy_tree(g, args.root, HeuristicConfig::new(args.b)?)?,
    };
    let sched = schedule_tree_ordered(g, &tree)?;
    Ok((Some(tree), sched))
}

fn circuit(
    g: &Graph,
    tree: Option<&RootedSpanningTree>,
    sched: &StepSchedule,
    params: &Params,
) -> Result<Circuit> {
    Ok(match tree {
        None => build_traditional(g, params, sched)?,
        Some(t) => build_optimized(g, params, t, sched)?,
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(a) => {
            let g = match a.family {
                FamilyArg::ErdosRenyi => generate_erdos_renyi(a.n, a.p_edge, a.seed)?,
                FamilyArg::Complete => generate_complete(a.n)?,
                FamilyArg::Cycle => generate_cycle(a.n)?,
            };
            emit(a.out.as_deref(), &write_edge_list(&g))
        }
        Command::Tree(a) => {
            let g = load_graph(&a.graph)?;
            let t = match a.strategy {
                TreeKind::Dfs => build_dfs_tree(&g, a.root)?,
                TreeKind::Bfs => build_bfs_tree(&g, a.root)?,
                TreeKind::Greedy => build_greedy_tree(&g, a.root, HeuristicConfig::new(a.b)?)?,
            };
            emit(a.out.as_deref(), &write_tree(&t))
        }
        Command::Schedule(a) => {
            let g = load_graph(&a.graph)?;
            let (_, sched) = plan(&g, &a)?;
            emit(a.out.as_deref(), &write_schedule(&sched))
        }
        Command::Circuit(a) => {
            let g = load_graph(&a.plan.graph)?;
            let (tree, sched) = plan(&g, &a.plan)?;
            let params = Params::random(a.p, &mut ChaCha8Rng::seed_from_u64(a.seed))?;
            let c = circuit(&g, tree.as_ref(), &sched, &params)?;
            emit(a.plan.out.as_deref(), &c.to_string())
        }
        Command::Simulate(a) => {
            let g = load_graph(&a.plan.graph)?;
            let noise = parse_noise(&a.noise)?;
            let (tree, sched) = plan(&g, &a.plan)?;
            let params = Params::random(1, &mut ChaCha8Rng::seed_from_u64(a.seed))?;
            let c = circuit(&g, tree.as_ref(), &sched, &params)?;
            let result = run_noisy(&c, &sched, &noise)?;
            let reference = build_traditional(&g, &params, &schedule_traditional(&g))?;
            let fidelity = run_ideal(&reference)?.fidelity(&result.ideal_state);
            let cut = expected_cut(&result.ideal_state, &g)?;
            let m = &result.metadata;
            let text = format!(
                "n,m,gates,cnots,depth,steps,expected_cut,fidelity_vs_traditional,p_success,one_minus_psuccess\n\
                 {},{},{},{},{},{},{},{},{},{}\n",
                g.n(),
                g.m(),
                m.gates,
                m.cnots,
                m.depth,
                m.num_steps,
                cut,
                fidelity,
                result.p_success,
                1.0 - result.p_success
            );
            emit(a.plan.out.as_deref(), &text)
        }
        Command::BenchDepth(a) => {
            let cfg = bench_config(&a, false)?;
            let rows = run_depth_experiment(&cfg)?;
            if let Some(path) = &a.slopes {
                let mut buf = Vec::new();
                write_csv(&fit_depth_slopes(&rows)?, &mut buf)?;
                fs::write(path, buf).with_context(|| format!("writing {}", path.display()))?;
            }
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf)?;
            emit(a.out.as_deref(), std::str::from_utf8(&buf)?)
        }
        Command::BenchSuccess(a) => {
            let cfg = bench_config(&a, true)?;
            let rows = run_success_experiment(&cfg)?;
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf)?;
            emit(a.out.as_deref(), std::str::from_utf8(&buf)?)
        }
        Command::Oracle(a) => {
            let g = load_graph(&a.graph)?;
            let exact = solve_exact(&g, a.root)?;
            let greedy = build_greedy_tree(&g, a.root, HeuristicConfig::new(a.b)?)?;
            let dfs = build_dfs_tree(&g, a.root)?;
            let text = format!(
                "best_steps {}\ngreedy_steps {}\ndfs_steps {}\ntraditional_steps {}\ntrees_enumerated {}\n{}{}",
                exact.best_steps,
                schedule_tree_ordered(&g, &greedy)?.num_steps(),
                schedule_tree_ordered(&g, &dfs)?.num_steps(),
                schedule_traditional(&g).num_steps(),
                exact.trees_enumerated,
                write_tree(&exact.witness_tree),
                write_schedule(&exact.witness_schedule),
            );
            emit(a.out.as_deref(), &text)
        }
    }
}

fn bench_config(a: &BenchArgs, with_noise: bool) -> Result<ExperimentConfig> {
    let strategies = a
        .strategy
        .iter()
        .map(|s| s.parse::<Method>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(anyhow::Error::msg)?;
    let cfg = ExperimentConfig {
        family: family(a.family, a.p_edge),
        n_values: a.n.clone(),
        b_values: a.b.clone(),
        trials: a.trials,
        seed: a.seed,
        strategies,
        noise: if with_noise { Some(parse_noise(&a.noise)?) } else { None },
        average_over_roots: !a.root_zero,
        audit: a.audit,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn main() {
    env_logger::init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
