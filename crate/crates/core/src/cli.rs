//! Command-line front end.
//!
//! Every command produces text: CSV (or an edge list for `generate`)
//! preceded by a `# ---` comment block that records the configuration, so
//! any output file can be regenerated from its own header.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{
    complete_graph, parse_edge_list, path_graph, random_connected_graph, ring_lattice, small_world_graph, star_graph,
    write_edge_list, Graph,
};
use crate::optimizer::{candidates_csv, grid_search, refine, Objective, SearchSpec};
use crate::reference::{
    sdmem_two_tap_scheme, NINE_NODE_EDGE_PROB, NINE_NODE_LAMBDA2, NINE_NODE_LAMBDA_N, NINE_NODE_SEED,
};
use crate::scheme::{best_constant, optimal_one_tap, sdmem_one_tap, star_two_tap, worst_case_scheme, MemoryScheme};
use crate::sim::{
    convergence_time, default_horizon, empirical_rate, simulate, simulate_disagreement, uniform_initial_state,
};
use crate::spectral::laplacian_eigenvalues;
use crate::stability::{radius_profile, rate_report_for_eigenvalues, CONNECTIVITY_TOLERANCE};

pub const DEFAULT_EPSILON: f64 = 1e-5;
/// Star sizes listed by `experiment table2`.
pub const TABLE2_SIZES: [usize; 5] = [5, 10, 20, 50, 100];

#[derive(Debug, Parser)]
#[command(
    name = "memconsensus",
    version,
    about = "Optimal memory schemes for average consensus"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a network and print it as an edge list.
    Generate(GenerateArgs),
    /// Print the gains and predicted rate of a scheme.
    Params(ParamsArgs),
    /// Spectral radius of a scheme at every eigenvalue.
    Rate(RateArgs),
    /// Simulate the protocol on a network.
    Simulate(SimulateArgs),
    /// Brute-force grid search over scheme gains.
    Sweep(SweepArgs),
    /// Reproduce one of the built-in experiments.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphKind {
    Star,
    Path,
    Complete,
    Ring,
    Random,
    Smallworld,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    pub kind: GraphKind,
    pub size: usize,
    /// Neighbours per node for `ring` and `smallworld` (even).
    #[arg(long)]
    pub k: Option<usize>,
    /// Edge probability (`random`) or rewiring probability (`smallworld`).
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Where the eigenvalues come from.
#[derive(Debug, Clone, Default, Args)]
pub struct SpectrumArgs {
    /// Edge-list file; its full Laplacian spectrum is used.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub lambda2: Option<f64>,
    #[arg(long = "lambdaN")]
    pub lambda_n: Option<f64>,
    /// Lower end of an eigenvalue interval.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Star network with this many nodes.
    #[arg(long)]
    pub star: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeKind {
    /// Memoryless best constant gain.
    Bc,
    /// Optimal one-tap node memory.
    Optmem,
    /// One-tap state-deviation memory.
    Sdmem1,
    /// Two-tap state-deviation memory from the reference gains.
    Sdmem2,
    /// Optimal worst-case scheme for an eigenvalue interval.
    Worstcase,
    /// Two-tap scheme for star networks.
    Twotap,
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    #[command(flatten)]
    pub spectrum: SpectrumArgs,
    pub scheme: SchemeKind,
    /// Memory depth for `worstcase`.
    #[arg(long = "depth", short = 'M', default_value_t = 1)]
    pub depth: usize,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    #[command(flatten)]
    pub spectrum: SpectrumArgs,
    /// Named scheme; omit to give `--eps` and `--theta` directly.
    pub scheme: Option<SchemeKind>,
    #[arg(long = "depth", short = 'M', default_value_t = 1)]
    pub depth: usize,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub eps: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta: Vec<f64>,
    /// λ-grid size when an interval is given.
    #[arg(long, default_value_t = 401)]
    pub grid_points: usize,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Edge-list file.
    #[arg(long)]
    pub graph: PathBuf,
    pub scheme: SchemeKind,
    /// Seed of the uniform [-10, 10] initial state.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of steps; defaults to a horizon derived from the predicted rate.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub spectrum: SpectrumArgs,
    #[arg(long = "depth", short = 'M', default_value_t = 1)]
    pub depth: usize,
    /// Grid step for every gain.
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    /// λ-grid size for interval objectives.
    #[arg(long, default_value_t = 61)]
    pub grid_points: usize,
    #[arg(long, default_value_t = 10)]
    pub top_k: usize,
    /// Refinement rounds after the first search.
    #[arg(long, default_value_t = 0)]
    pub refine: usize,
    #[arg(long, default_value_t = 0.1)]
    pub shrink: f64,
    #[arg(long, default_value_t = crate::optimizer::DEFAULT_BUDGET)]
    pub budget: u128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentId {
    Table1,
    Table2,
    Fig2,
    Fig4,
    Fig5,
    Custom,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    pub id: ExperimentId,
    #[command(flatten)]
    pub spectrum: SpectrumArgs,
    /// Graph seed (`fig4`) or first graph seed (`fig5`).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Seed of the initial state.
    #[arg(long, default_value_t = 1)]
    pub x0_seed: u64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 401)]
    pub grid_points: usize,
    /// Number of graphs for `fig5`.
    #[arg(long, default_value_t = 80)]
    pub seeds: usize,
    /// Node count of generated graphs.
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Graphs of `fig5` whose rate is also measured by simulation.
    #[arg(long, default_value_t = 10)]
    pub simulate: usize,
    /// Simulation length for `fig5`.
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
}

/// `# ---` header recording the configuration of a run.
#[derive(Debug, Default)]
struct FrontMatter(Vec<(String, String)>);

impl FrontMatter {
    fn new(command: &str) -> Self {
        let mut fm = Self::default();
        fm.set("command", command);
        fm
    }

    fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.0.push((key.to_string(), value.to_string()));
        self
    }

    fn render(&self, body: &str) -> String {
        let mut out = String::from("# ---\n");
        for (k, v) in &self.0 {
            let _ = writeln!(out, "# {k}: {v}");
        }
        out.push_str("# ---\n");
        out.push_str(body);
        out
    }
}

/// Runs the parsed command and returns its output, also writing it to
/// `--out` when given.
pub fn run(cli: &Cli) -> Result<String> {
    let text = match &cli.command {
        Command::Generate(a) => cmd_generate(a)?,
        Command::Params(a) => cmd_params(a)?,
        Command::Rate(a) => cmd_rate(a)?,
        Command::Simulate(a) => cmd_simulate(a)?,
        Command::Sweep(a) => cmd_sweep(a)?,
        Command::Experiment(a) => cmd_experiment(a)?,
    };
    if let Some(path) = &cli.out {
        std::fs::write(path, &text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(text)
}

/// Process exit code for an error: 3 for numerical non-convergence, 2 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_numeric() {
        3
    } else {
        2
    }
}

fn read_graph(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_edge_list(&text)
}

fn fmt4(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

pub fn cmd_generate(a: &GenerateArgs) -> Result<String> {
    let mut fm = FrontMatter::new("generate");
    fm.set("kind", format!("{:?}", a.kind).to_lowercase())
        .set("nodes", a.size);
    let g = match a.kind {
        GraphKind::Star => star_graph(a.size)?,
        GraphKind::Path => path_graph(a.size)?,
        GraphKind::Complete => complete_graph(a.size)?,
        GraphKind::Ring => {
            let k = a.k.unwrap_or(2);
            fm.set("k", k);
            ring_lattice(a.size, k)?
        }
        GraphKind::Random => {
            let p = a.p.unwrap_or(NINE_NODE_EDGE_PROB);
            fm.set("p", p).set("seed", a.seed);
            random_connected_graph(a.size, p, a.seed)?
        }
        GraphKind::Smallworld => {
            let (k, p) = (a.k.unwrap_or(6), a.p.unwrap_or(0.7));
            fm.set("k", k).set("p", p).set("seed", a.seed);
            small_world_graph(a.size, k, p, a.seed)?
        }
    };
    fm.set("edges", g.edge_count());
    Ok(fm.render(&write_edge_list(&g)))
}

/// Resolved eigenvalue source.
#[derive(Debug, Clone, PartialEq)]
enum Source {
    /// Full ascending spectrum of a graph.
    Spectrum(Vec<f64>),
    Extremes(f64, f64),
    Interval(f64, f64),
    Star(usize),
}

impl Source {
    fn from_args(a: &SpectrumArgs) -> Result<Self> {
        let given = [
            a.graph.is_some(),
            a.lambda2.is_some() || a.lambda_n.is_some(),
            a.alpha.is_some() || a.beta.is_some(),
            a.star.is_some(),
        ];
        if given.iter().filter(|&&g| g).count() != 1 {
            return Err(Error::InvalidParameter(
                "give exactly one of --graph, --lambda2/--lambdaN, --alpha/--beta or --star".into(),
            ));
        }
        let pair = |x: Option<f64>, y: Option<f64>, names: &str| {
            x.zip(y)
                .ok_or_else(|| Error::InvalidParameter(format!("{names} must be given together")))
        };
        if let Some(path) = &a.graph {
            let g = read_graph(path)?;
            let ev = laplacian_eigenvalues(&g.laplacian())?;
            if ev[1] <= CONNECTIVITY_TOLERANCE {
                return Err(Error::Disconnected(ev[1]));
            }
            return Ok(Source::Spectrum(ev));
        }
        if let Some(n) = a.star {
            if n < 3 {
                return Err(Error::InvalidSize(format!(
                    "star network needs at least 3 nodes, got {n}"
                )));
            }
            return Ok(Source::Star(n));
        }
        if a.alpha.is_some() || a.beta.is_some() {
            let (lo, hi) = pair(a.alpha, a.beta, "--alpha and --beta")?;
            return Ok(Source::Interval(lo, hi));
        }
        let (l2, ln) = pair(a.lambda2, a.lambda_n, "--lambda2 and --lambdaN")?;
        Ok(Source::Extremes(l2, ln))
    }

    fn extremes(&self) -> (f64, f64) {
        match self {
            Source::Spectrum(ev) => (ev[1], ev[ev.len() - 1]),
            Source::Extremes(a, b) | Source::Interval(a, b) => (*a, *b),
            Source::Star(n) => (1.0, *n as f64),
        }
    }

    /// Eigenvalues a rate is evaluated on.
    fn lambdas(&self, grid_points: usize) -> Result<Vec<f64>> {
        Ok(match self {
            Source::Spectrum(ev) => ev[1..].to_vec(),
            Source::Extremes(a, b) => vec![*a, *b],
            Source::Star(n) => vec![1.0, *n as f64],
            Source::Interval(a, b) => crate::stability::lambda_grid(*a, *b, grid_points)?,
        })
    }

    fn describe(&self, fm: &mut FrontMatter) {
        match self {
            Source::Spectrum(ev) => {
                fm.set("nodes", ev.len())
                    .set("lambda2", ev[1])
                    .set("lambdaN", ev[ev.len() - 1]);
            }
            Source::Extremes(a, b) => {
                fm.set("lambda2", a).set("lambdaN", b);
            }
            Source::Interval(a, b) => {
                fm.set("alpha", a).set("beta", b);
            }
            Source::Star(n) => {
                fm.set("star", n);
            }
        }
    }
}

fn scheme_name(kind: SchemeKind) -> &'static str {
    match kind {
        SchemeKind::Bc => "bc",
        SchemeKind::Optmem => "optmem",
        SchemeKind::Sdmem1 => "sdmem1",
        SchemeKind::Sdmem2 => "sdmem2",
        SchemeKind::Worstcase => "worstcase",
        SchemeKind::Twotap => "twotap",
    }
}

/// Scheme of the given kind for a source, with its rate on that source.
fn build_scheme(kind: SchemeKind, source: &Source, depth: usize) -> Result<(MemoryScheme, f64)> {
    let (l2, ln) = source.extremes();
    let predicted = match kind {
        SchemeKind::Bc => best_constant(l2, ln)?,
        SchemeKind::Optmem => optimal_one_tap(l2, ln)?,
        SchemeKind::Sdmem1 => sdmem_one_tap(l2, ln)?,
        SchemeKind::Worstcase => worst_case_scheme(l2, ln, depth)?,
        SchemeKind::Twotap => match source {
            Source::Star(n) => star_two_tap(*n)?,
            _ => return Err(Error::InvalidParameter("twotap needs --star".into())),
        },
        SchemeKind::Sdmem2 => {
            let scheme = sdmem_two_tap_scheme(ln)?;
            let rate = rate_report_for_eigenvalues(&scheme, &[l2, ln])?.rate;
            return Ok((scheme, rate));
        }
    };
    Ok((predicted.scheme, predicted.rate))
}

fn gains_header(depth: usize) -> String {
    let mut h = String::new();
    for m in 0..=depth {
        let _ = write!(h, ",eps_{m}");
    }
    for m in 0..=depth {
        let _ = write!(h, ",theta_{m}");
    }
    h
}

fn gains_row(scheme: &MemoryScheme, depth: usize, fmt: fn(f64) -> String) -> String {
    let padded = scheme.padded(depth);
    padded
        .eps()
        .iter()
        .chain(padded.theta())
        .map(|&v| format!(",{}", fmt(v)))
        .collect()
}

fn full(v: f64) -> String {
    format!("{v:?}")
}

pub fn cmd_params(a: &ParamsArgs) -> Result<String> {
    let source = Source::from_args(&a.spectrum)?;
    let (scheme, rate) = build_scheme(a.scheme, &source, a.depth)?;
    let mut fm = FrontMatter::new("params");
    fm.set("scheme", scheme_name(a.scheme));
    source.describe(&mut fm);
    let mut body = String::from("parameter,value\n");
    let _ = writeln!(body, "rate,{}", full(rate));
    for (m, v) in scheme.eps().iter().enumerate() {
        let _ = writeln!(body, "eps_{m},{}", full(*v));
    }
    for (m, v) in scheme.theta().iter().enumerate() {
        let _ = writeln!(body, "theta_{m},{}", full(*v));
    }
    Ok(fm.render(&body))
}

pub fn cmd_rate(a: &RateArgs) -> Result<String> {
    let source = Source::from_args(&a.spectrum)?;
    let mut fm = FrontMatter::new("rate");
    let scheme = match a.scheme {
        Some(kind) => {
            fm.set("scheme", scheme_name(kind));
            build_scheme(kind, &source, a.depth)?.0
        }
        None => {
            if a.eps.is_empty() {
                return Err(Error::InvalidParameter("give a scheme name or --eps/--theta".into()));
            }
            let theta = if a.theta.is_empty() {
                vec![0.0; a.eps.len()]
            } else {
                a.theta.clone()
            };
            MemoryScheme::new(a.eps.clone(), theta)?
        }
    };
    source.describe(&mut fm);
    let report = rate_report_for_eigenvalues(&scheme, &source.lambdas(a.grid_points)?)?;
    fm.set("rate", full(report.rate))
        .set("argmax_lambda", full(report.argmax_lambda));
    let mut body = String::from("lambda,radius\n");
    for (l, r) in &report.per_lambda {
        let _ = writeln!(body, "{l:?},{r:?}");
    }
    Ok(fm.render(&body))
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<String> {
    let g = read_graph(&a.graph)?;
    let ev = laplacian_eigenvalues(&g.laplacian())?;
    if ev[1] <= CONNECTIVITY_TOLERANCE {
        return Err(Error::Disconnected(ev[1]));
    }
    let source = Source::Spectrum(ev);
    let (scheme, predicted) = build_scheme(a.scheme, &source, 1)?;
    let rate = rate_report_for_eigenvalues(&scheme, &source.lambdas(0)?)?.rate;
    let steps = a.steps.unwrap_or_else(|| default_horizon(rate, a.epsilon));
    let x0 = uniform_initial_state(g.node_count(), a.seed);
    let traj = simulate(&g, &scheme, &x0, steps)?;
    let t = convergence_time(&traj, a.epsilon)?;
    let measured = empirical_rate(&simulate_disagreement(&g, &scheme, &x0, steps)?);

    let mut fm = FrontMatter::new("simulate");
    fm.set("graph", a.graph.display())
        .set("scheme", scheme_name(a.scheme))
        .set("seed", a.seed)
        .set("steps", steps)
        .set("epsilon", a.epsilon)
        .set("design_rate", full(predicted))
        .set("rate", full(rate))
        .set("average", full(traj.average()))
        .set(
            "convergence_time",
            t.map_or("not-converged".to_string(), |k| k.to_string()),
        );
    match measured {
        Ok(r) => fm.set("empirical_rate", full(r)),
        Err(e) => fm.set("empirical_rate", format!("n/a ({e})")),
    };
    Ok(fm.render(&traj.to_csv()))
}

pub fn cmd_sweep(a: &SweepArgs) -> Result<String> {
    let source = Source::from_args(&a.spectrum)?;
    let objective = match &source {
        Source::Interval(lo, hi) => Objective::Interval {
            alpha: *lo,
            beta: *hi,
            grid_points: a.grid_points,
        },
        other => Objective::Spectrum(other.lambdas(0)?),
    };
    let spec = SearchSpec::with_default_bounds(a.depth, objective, a.step)?
        .with_budget(a.budget)
        .with_top_k(a.top_k);
    let mut result = grid_search(&spec)?;
    for _ in 0..a.refine {
        result = refine(&result.scheme, &spec, a.shrink)?;
    }
    let mut fm = FrontMatter::new("sweep");
    source.describe(&mut fm);
    fm.set("depth", a.depth)
        .set("step", a.step)
        .set("refine", a.refine)
        .set("shrink", a.shrink)
        .set("grid_size", spec.grid_size())
        .set("best_rate", full(result.rate));
    Ok(fm.render(&candidates_csv(&result, a.depth)))
}

pub fn cmd_experiment(a: &ExperimentArgs) -> Result<String> {
    if !(a.epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive, got {}",
            a.epsilon
        )));
    }
    match a.id {
        ExperimentId::Table1 => table1(a),
        ExperimentId::Table2 => table2(),
        ExperimentId::Fig2 => fig2(a),
        ExperimentId::Fig4 => fig4(a),
        ExperimentId::Fig5 => fig5(a),
        ExperimentId::Custom => custom(a),
    }
}

const COMPARED: [SchemeKind; 4] = [
    SchemeKind::Optmem,
    SchemeKind::Bc,
    SchemeKind::Sdmem1,
    SchemeKind::Sdmem2,
];

fn table1(a: &ExperimentArgs) -> Result<String> {
    let spectrum = &a.spectrum;
    let source = if spectrum.graph.is_none() && spectrum.lambda2.is_none() && spectrum.lambda_n.is_none() {
        Source::Extremes(NINE_NODE_LAMBDA2, NINE_NODE_LAMBDA_N)
    } else {
        Source::from_args(spectrum)?
    };
    let mut fm = FrontMatter::new("experiment table1");
    source.describe(&mut fm);
    let mut body = format!("scheme,depth,rate{}\n", gains_header(2));
    for kind in COMPARED {
        let (scheme, rate) = build_scheme(kind, &source, 1)?;
        let _ = writeln!(
            body,
            "{},{},{}{}",
            scheme_name(kind),
            scheme.depth(),
            fmt4(rate),
            gains_row(&scheme, 2, fmt4)
        );
    }
    Ok(fm.render(&body))
}

fn table2() -> Result<String> {
    let fm = FrontMatter::new("experiment table2");
    let mut body = String::from("n,r1,r2\n");
    for n in TABLE2_SIZES {
        let one = optimal_one_tap(1.0, n as f64)?;
        let two = star_two_tap(n)?;
        let _ = writeln!(body, "{n},{},{}", fmt4(one.rate), fmt4(two.rate));
    }
    Ok(fm.render(&body))
}

fn fig2(a: &ExperimentArgs) -> Result<String> {
    let n = a.spectrum.star.unwrap_or(5);
    let two = star_two_tap(n)?;
    let one = optimal_one_tap(1.0, n as f64)?;
    let mut fm = FrontMatter::new("experiment fig2");
    fm.set("star", n)
        .set("grid_points", a.grid_points)
        .set("r1", full(one.rate))
        .set("r2", full(two.rate));
    let mut body = String::from("lambda,radius\n");
    for (l, r) in radius_profile(&two.scheme, 1.0, n as f64, a.grid_points)? {
        let _ = writeln!(body, "{l:?},{r:?}");
    }
    Ok(fm.render(&body))
}

/// Rate and ε-convergence time of every compared scheme on one graph.
fn compare_on_graph(g: &Graph, x0_seed: u64, epsilon: f64, fm: &mut FrontMatter) -> Result<String> {
    let ev = laplacian_eigenvalues(&g.laplacian())?;
    if ev[1] <= CONNECTIVITY_TOLERANCE {
        return Err(Error::Disconnected(ev[1]));
    }
    let source = Source::Spectrum(ev);
    source.describe(fm);
    fm.set("x0_seed", x0_seed).set("epsilon", epsilon);
    let x0 = uniform_initial_state(g.node_count(), x0_seed);
    let mut body = String::from("scheme,rate,convergence_time\n");
    for kind in COMPARED {
        let (scheme, _) = build_scheme(kind, &source, 1)?;
        let rate = rate_report_for_eigenvalues(&scheme, &source.lambdas(0)?)?.rate;
        let traj = simulate(g, &scheme, &x0, default_horizon(rate, epsilon))?;
        let t = convergence_time(&traj, epsilon)?;
        let _ = writeln!(
            body,
            "{},{},{}",
            scheme_name(kind),
            full(rate),
            t.map_or("not-converged".to_string(), |k| k.to_string())
        );
    }
    Ok(body)
}

fn fig4(a: &ExperimentArgs) -> Result<String> {
    let n = a.nodes.unwrap_or(9);
    let p = a.p.unwrap_or(NINE_NODE_EDGE_PROB);
    let seed = a.seed.unwrap_or(NINE_NODE_SEED);
    let g = random_connected_graph(n, p, seed)?;
    let mut fm = FrontMatter::new("experiment fig4");
    fm.set("graph", "random").set("p", p).set("seed", seed);
    let body = compare_on_graph(&g, a.x0_seed, a.epsilon, &mut fm)?;
    Ok(fm.render(&body))
}

fn custom(a: &ExperimentArgs) -> Result<String> {
    let path = a
        .spectrum
        .graph
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("custom experiment needs --graph".into()))?;
    let g = read_graph(path)?;
    let mut fm = FrontMatter::new("experiment custom");
    fm.set("graph", path.display());
    let body = compare_on_graph(&g, a.x0_seed, a.epsilon, &mut fm)?;
    Ok(fm.render(&body))
}

/// One row of `experiment fig5`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig5Row {
    pub seed: u64,
    pub lambda2: f64,
    pub lambda_n: f64,
    /// Best memoryless rate.
    pub r0: f64,
    /// Optimal one-tap rate.
    pub r1: f64,
    /// Rate measured by simulation, for the simulated subsample.
    pub empirical: Option<f64>,
}

/// Small-world graphs with seeds `first_seed..first_seed + count`; the
/// first `simulated` are also simulated under the optimal one-tap scheme.
pub fn fig5_rows(
    count: usize,
    first_seed: u64,
    nodes: usize,
    k: usize,
    p: f64,
    simulated: usize,
    steps: usize,
) -> Result<Vec<Fig5Row>> {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let seed = first_seed + i as u64;
            let g = small_world_graph(nodes, k, p, seed)?;
            let ev = laplacian_eigenvalues(&g.laplacian())?;
            let (l2, ln) = (ev[1], ev[ev.len() - 1]);
            let opt = optimal_one_tap(l2, ln)?;
            let empirical = if i < simulated {
                let x0 = uniform_initial_state(nodes, seed);
                Some(empirical_rate(&simulate_disagreement(&g, &opt.scheme, &x0, steps)?)?)
            } else {
                None
            };
            Ok(Fig5Row {
                seed,
                lambda2: l2,
                lambda_n: ln,
                r0: best_constant(l2, ln)?.rate,
                r1: opt.rate,
                empirical,
            })
        })
        .collect()
}

fn fig5(a: &ExperimentArgs) -> Result<String> {
    let nodes = a.nodes.unwrap_or(500);
    let k = a.k.unwrap_or(6);
    let p = a.p.unwrap_or(0.7);
    let seed = a.seed.unwrap_or(1);
    let rows = fig5_rows(a.seeds, seed, nodes, k, p, a.simulate, a.steps)?;
    let mut fm = FrontMatter::new("experiment fig5");
    fm.set("graphs", a.seeds)
        .set("first_seed", seed)
        .set("nodes", nodes)
        .set("k", k)
        .set("p", p)
        .set("simulated", a.simulate.min(a.seeds))
        .set("steps", a.steps);
    let mut body = String::from("seed,lambda2,lambdaN,r0,r1,empirical\n");
    for r in rows {
        let _ = writeln!(
            body,
            "{},{:?},{:?},{:?},{:?},{}",
            r.seed,
            r.lambda2,
            r.lambda_n,
            r.r0,
            r.r1,
            r.empirical.map_or(String::new(), full)
        );
    }
    Ok(fm.render(&body))
}
