use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use tdtsp_core::branch::{write_training_data, BranchingRule, ScoringModel};
use tdtsp_core::cuts::CutFamily;
use tdtsp_core::driver::{benchmark, solve, write_csv, PricingStrategy, SolverConfig};
use tdtsp_core::instgen::{generate, tighten_horizon};
use tdtsp_core::master::Formulation;
use tdtsp_core::oracle::{solve_bruteforce, solve_dp};
use tdtsp_core::prop::PropagationRule;
use tdtsp_core::{GenConfig, Instance, TimeExpandedGraph, Tour};

/// Exact and heuristic solver for the time-dependent traveling salesman problem.
#[derive(Parser)]
#[command(name = "tdtsp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random instances.
    Generate(GenerateArgs),
    /// Solve one instance file.
    Solve(SolveArgs),
    /// Solve a set of instances and write a CSV report.
    Benchmark(BenchmarkArgs),
    /// Record strong-branching scores as ranking training data.
    ExportBranchingData(ExportArgs),
}

#[derive(Args, Clone)]
struct GenArgs {
    /// Number of vertices including the source.
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    theta_max: u32,
    /// Slope changes per arc.
    #[arg(long, default_value_t = 100)]
    breakpoints: usize,
    /// Maximum relative slowdown.
    #[arg(long, default_value_t = 3.0)]
    lambda: f64,
    #[arg(long, default_value_t = 100)]
    coord_range: u32,
}

impl GenArgs {
    fn config(&self, seed: u64) -> GenConfig {
        GenConfig {
            n: self.n,
            theta_max: self.theta_max,
            breakpoints: self.breakpoints,
            lambda: self.lambda,
            coord_range: self.coord_range,
            seed,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    gen: GenArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Instances to generate with seeds `seed, seed + 1, ...`; more than one
    /// writes a directory.
    #[arg(long, default_value_t = 1)]
    count: u64,
    /// Shrink the horizon to a heuristic tour's arrival time.
    #[arg(long)]
    tighten_horizon: bool,
    /// Output file, or directory when `--count` exceeds one; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

impl From<Switch> for bool {
    fn from(s: Switch) -> bool {
        s == Switch::On
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BranchingArg {
    Mostfrac,
    Strong,
    Learned,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Strengthened,
    Literal,
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// Master formulation: arc or path.
    #[arg(long, default_value = "arc")]
    formulation: Formulation,
    /// Column generation: full, arc, path or 2cf.
    #[arg(long, default_value = "2cf")]
    pricing: PricingStrategy,
    /// Cut families separated, comma separated, or `none` / `all`.
    #[arg(long, default_value = "LSEC", value_delimiter = ',')]
    cuts: Vec<String>,
    #[arg(long, value_enum, default_value_t = Switch::On)]
    heuristics: Switch,
    #[arg(long, value_enum, default_value_t = Switch::On)]
    propagation: Switch,
    #[arg(long, value_enum, default_value_t = RuleArg::Strengthened)]
    propagation_rule: RuleArg,
    #[arg(long, value_enum, default_value_t = BranchingArg::Mostfrac)]
    branching: BranchingArg,
    /// Scoring model for `--branching learned`.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Deterministic limit in work units; overrides `--time-limit`.
    #[arg(long)]
    work_limit: Option<u64>,
    #[arg(long)]
    node_limit: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig> {
        let cuts = if self.cuts.iter().any(|c| c.eq_ignore_ascii_case("none")) {
            Vec::new()
        } else if self.cuts.iter().any(|c| c.eq_ignore_ascii_case("all")) {
            CutFamily::ALL.to_vec()
        } else {
            self.cuts
                .iter()
                .map(|c| c.parse::<CutFamily>().map_err(anyhow::Error::msg))
                .collect::<Result<_>>()?
        };
        let branching = match (self.branching, &self.model) {
            (BranchingArg::Mostfrac, _) => BranchingRule::MostFractional,
            (BranchingArg::Strong, _) => BranchingRule::Strong,
            (BranchingArg::Learned, Some(path)) => BranchingRule::Learned(
                ScoringModel::load(path).with_context(|| format!("loading {}", path.display()))?,
            ),
            (BranchingArg::Learned, None) => bail!("--branching learned needs --model <file>"),
        };
        let config = SolverConfig {
            formulation: self.formulation,
            pricing: self.pricing,
            cuts,
            heuristics: self.heuristics.into(),
            propagation: self.propagation.into(),
            propagation_rule: match self.propagation_rule {
                RuleArg::Strengthened => PropagationRule::Strengthened,
                RuleArg::Literal => PropagationRule::Literal,
            },
            branching,
            time_limit: self.time_limit.map(Duration::from_secs_f64),
            work_limit: self.work_limit,
            node_limit: self.node_limit,
            seed: self.seed,
            ..SolverConfig::default()
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Dp,
    Brute,
    Bnp,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Bnp)]
    method: Method,
    #[command(flatten)]
    solver: SolverArgs,
    /// Write the time-expanded graph as `u v theta theta'` lines.
    #[arg(long)]
    dump_expansion: Option<PathBuf>,
}

#[derive(Args)]
struct InstanceSource {
    /// Directory of instance files; generated instances are used if absent.
    #[arg(long)]
    instances: Option<PathBuf>,
    #[command(flatten)]
    gen: GenArgs,
    /// Instances to generate.
    #[arg(long, default_value_t = 10)]
    count: u64,
    /// Shrink generated horizons to a heuristic tour's arrival time.
    #[arg(long)]
    tighten_horizon: bool,
}

impl InstanceSource {
    /// Named instances; generated ones use seeds `seed, seed + 1, ...`.
    fn load(&self, seed: u64) -> Result<Vec<(String, Instance)>> {
        if let Some(dir) = &self.instances {
            return read_dir(dir);
        }
        (seed..seed + self.count)
            .map(|s| {
                let mut inst = generate(&self.gen.config(s))?;
                if self.tighten_horizon {
                    inst = tighten_horizon(&inst);
                }
                Ok((format!("n{}_s{s}", self.gen.n), inst))
            })
            .collect()
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// The master and pricing variants.
    Formulations,
    /// Plain branch-and-price, each cut family, and LSEC with heuristics.
    Cuts,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[command(flatten)]
    source: InstanceSource,
    #[command(flatten)]
    solver: SolverArgs,
    /// Compare a predefined set of configurations instead of the one given
    /// by the solver flags; limits and seed still apply.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// CSV destination; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    source: InstanceSource,
    #[command(flatten)]
    solver: SolverArgs,
    /// Training data destination; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_dir(dir: &Path) -> Result<Vec<(String, Instance)>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<io::Result<_>>()?;
    paths.retain(|p| p.is_file());
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            Ok((name, read_instance(&p)?))
        })
        .collect()
}

fn read_instance(path: &Path) -> Result<Instance> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Instance::read_from(BufReader::new(file)).with_context(|| format!("parsing {}", path.display()))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn print_tour(tour: Option<&Tour>) {
    match tour {
        Some(t) => {
            let order: Vec<String> = t.order().iter().map(ToString::to_string).collect();
            println!("tour {}", order.join(" "));
            println!("arrival {}", t.arrival());
        }
        None => println!("infeasible"),
    }
}

fn run_generate(args: GenerateArgs) -> Result<()> {
    let make = |seed: u64| -> Result<Instance> {
        let inst = generate(&args.gen.config(seed))?;
        Ok(if args.tighten_horizon { tighten_horizon(&inst) } else { inst })
    };
    if args.count == 1 {
        let mut out = output(args.out.as_deref())?;
        make(args.seed)?.write_to(&mut out)?;
        out.flush()?;
        return Ok(());
    }
    let Some(dir) = &args.out else { bail!("--count above one needs --out <dir>") };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for seed in args.seed..args.seed + args.count {
        let path = dir.join(format!("n{}_s{seed}.tdtsp", args.gen.n));
        let mut out = output(Some(&path))?;
        make(seed)?.write_to(&mut out)?;
        out.flush()?;
    }
    Ok(())
}

fn run_solve(args: SolveArgs) -> Result<()> {
    let inst = read_instance(&args.instance)?;
    if let Some(path) = &args.dump_expansion {
        let g = TimeExpandedGraph::build(&inst)?;
        let mut out = output(Some(path))?;
        g.dump(&mut out)?;
        out.flush()?;
    }
    match args.method {
        Method::Dp => print_tour(solve_dp(&inst)?.as_ref()),
        Method::Brute => print_tour(solve_bruteforce(&inst)?.as_ref()),
        Method::Bnp => {
            let out = solve(&inst, &args.solver.config()?)?;
            print_tour(out.tour.as_ref());
            let s = &out.stats;
            println!("solved {}", s.solved);
            println!("dual {}", s.dual);
            println!("gap {:.6}", s.gap);
            println!("nodes {}", s.nodes);
            println!("time {:.3}", s.time);
            println!("work {}", s.work);
        }
    }
    Ok(())
}

fn run_benchmark(args: BenchmarkArgs) -> Result<()> {
    let base = args.solver.config()?;
    let configs = match args.preset {
        None => vec![base],
        Some(preset) => {
            let presets = match preset {
                Preset::Formulations => SolverConfig::formulation_presets(),
                Preset::Cuts => SolverConfig::cut_presets(),
            };
            presets
                .into_iter()
                .map(|c| SolverConfig {
                    time_limit: base.time_limit,
                    work_limit: base.work_limit,
                    node_limit: base.node_limit,
                    seed: base.seed,
                    ..c
                })
                .collect()
        }
    };
    let instances = args.source.load(args.solver.seed)?;
    let rows = benchmark(&instances, &configs)?;
    let mut out = output(args.out.as_deref())?;
    write_csv(&mut out, &rows)?;
    out.flush()?;
    Ok(())
}

fn run_export(args: ExportArgs) -> Result<()> {
    let config = SolverConfig { branching: BranchingRule::Strong, record_branching: true, ..args.solver.config()? };
    let instances = args.source.load(args.solver.seed)?;
    let mut out = output(args.out.as_deref())?;
    let mut qid = 0;
    for (name, inst) in &instances {
        let mut samples = solve(inst, &config)?.samples;
        log::info!("{name}: {} branching nodes", samples.len());
        for s in &mut samples {
            s.node = qid;
            qid += 1;
        }
        write_training_data(&samples, &mut out)?;
    }
    out.flush()?;
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Generate(a) => run_generate(a),
        Command::Solve(a) => run_solve(a),
        Command::Benchmark(a) => run_benchmark(a),
        Command::ExportBranchingData(a) => run_export(a),
    }
}
