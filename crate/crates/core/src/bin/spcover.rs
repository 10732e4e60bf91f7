use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sp_covers::covers::{
    classify_cover, encode_covers_as_cnf, is_cover, star_propagate, write_covers, GeneralizedAssignment, PeelOrder,
};
use sp_covers::experiments::{
    default_alpha_grid, run_decimation_bench, run_growth, run_peeling, run_scatter, run_transition, BenchSpec,
    GrowthSpec, PeelingSpec, ScatterKind, ScatterSpec, TransitionSpec,
};
use sp_covers::formula::{
    generate_random_ksat, generate_random_tree, parse_dimacs, parse_model, write_dimacs, Formula,
};
use sp_covers::pipelines::{bp_marginals, decimate, enumerate_covers, sp_marginals, CoverMethod, DecimationConfig};
use sp_covers::propagation::{write_residuals_csv, Init, RunConfig};
use sp_covers::solver::{cdcl_solve, dpll_solve, enumerate_models, walksat, Status, WalkSatConfig, UNLIMITED};

type Res<T> = Result<T, Box<dyn std::error::Error>>;

#[derive(Parser)]
#[command(name = "spcover", version, about = "Survey propagation, belief propagation and covers of CNF formulas")]
struct Cli {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; all cores when absent.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Wall-clock budget. Experiments stop scheduling new work when it is spent.
    #[arg(long, global = true)]
    budget_seconds: Option<f64>,
    /// More log output; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Random k-SAT or tree formula as DIMACS.
    Gen(GenArgs),
    /// Satisfiability by clause learning (default), DPLL or WalkSAT.
    Solve(SolveArgs),
    /// Survey propagation biases as CSV.
    Sp(PropArgs),
    /// Plain belief propagation marginals as CSV.
    Bp(PropArgs),
    /// Enumerate, check, peel or encode covers.
    #[command(subcommand)]
    Covers(CoversCommand),
    /// SP-guided decimation with a WalkSAT endgame.
    Decimate(DecimateArgs),
    /// Seeded experiments writing CSV with a `# key=value` header.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    /// Clause-to-variable ratio; ignored when --m is given.
    #[arg(long, default_value_t = 4.2)]
    alpha: f64,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// A random tree formula on n variables instead.
    #[arg(long)]
    tree: bool,
}

#[derive(Args)]
struct SolveArgs {
    file: PathBuf,
    /// List every model.
    #[arg(long)]
    enumerate: bool,
    #[arg(long)]
    walksat: bool,
    /// Chronological DPLL instead of clause learning.
    #[arg(long)]
    dpll: bool,
    #[arg(long, default_value_t = 10_000_000)]
    max_flips: u64,
    #[arg(long, default_value_t = 0.5)]
    noise: f64,
}

#[derive(Args)]
struct PropArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 1e-3)]
    epsilon: f64,
    /// Defaults to 1000 for SP and 10000 for BP.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Defaults to 0 for SP and 0.5 for BP.
    #[arg(long)]
    damping: Option<f64>,
    /// Start every message at this value instead of a seeded random draw.
    #[arg(long)]
    uniform_init: Option<f64>,
    /// Per-sweep residuals go here.
    #[arg(long)]
    residuals: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CoversCommand {
    /// Every cover, classified as TRUE, FALSE or TRIVIAL.
    Enum {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Sat)]
        method: MethodArg,
    },
    /// Whether a {0,1,*} string is a cover, and of which kind.
    Check { file: PathBuf, assignment: String },
    /// *-propagation from a solution, printing the trace as CSV.
    Peel {
        file: PathBuf,
        /// 0/1 string or DIMACS `v` lines; a WalkSAT solution when absent.
        #[arg(long)]
        model: Option<String>,
        #[arg(long, value_enum, default_value_t = OrderArg::Lowest)]
        order: OrderArg,
    },
    /// DIMACS formula whose models are the covers.
    Encode {
        file: PathBuf,
        /// Writes the variable-role table here.
        #[arg(long)]
        decode_map: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Sat,
    Brute,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Lowest,
    Queue,
    Random,
}

impl OrderArg {
    fn order(self, seed: u64) -> PeelOrder {
        match self {
            OrderArg::Lowest => PeelOrder::LowestIndex,
            OrderArg::Queue => PeelOrder::Queue,
            OrderArg::Random => PeelOrder::Random(seed),
        }
    }
}

#[derive(Args)]
struct DecimateArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 0.01)]
    fix_fraction: f64,
    #[arg(long, default_value_t = 0.0)]
    extreme_threshold: f64,
    #[arg(long, default_value_t = 0.01)]
    trivial_threshold: f64,
    #[arg(long, default_value_t = 2)]
    sp_retries: usize,
    #[arg(long, default_value_t = 10_000_000)]
    max_flips: u64,
    /// Writes the satisfying assignment as DIMACS `v` lines.
    #[arg(long)]
    solution: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Peeling trajectories of sampled solutions.
    Peeling {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 4.2)]
        alpha: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        formulas: usize,
        #[arg(long, value_enum, default_value_t = OrderArg::Lowest)]
        order: OrderArg,
        #[arg(long, default_value_t = 10_000_000)]
        max_flips: u64,
        /// Draws per formula before it is given up as unsolvable.
        #[arg(long, default_value_t = 100)]
        max_attempts: u64,
        /// Averaged curves by terminal label go here.
        #[arg(long)]
        curves: Option<PathBuf>,
    },
    /// Non-trivial cover statistics along an alpha grid.
    Transition {
        #[arg(long, default_value_t = 50)]
        n: usize,
        /// Comma-separated; 1.0 to 6.0 in steps of 0.25 when absent.
        #[arg(long, value_delimiter = ',')]
        alphas: Vec<f64>,
        #[arg(long, default_value_t = 500)]
        formulas: usize,
        #[arg(long, default_value_t = 1_000_000)]
        cover_limit: usize,
        #[arg(long, default_value_t = 50_000_000)]
        conflict_budget: u64,
        #[arg(long, default_value_t = 1000)]
        max_attempts: u64,
    },
    /// Fraction of peeled samples reaching non-trivial covers versus N.
    Growth {
        #[arg(long, value_delimiter = ',', default_values_t = [100, 200, 400, 800, 1600])]
        ns: Vec<usize>,
        #[arg(long, default_value_t = 4.2)]
        alpha: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 10)]
        formulas: usize,
        #[arg(long, value_enum, default_value_t = OrderArg::Lowest)]
        order: OrderArg,
        #[arg(long, default_value_t = 100)]
        max_attempts: u64,
    },
    /// Per-variable magnetizations of two estimators.
    Scatter {
        #[arg(long, default_value = "sp-vs-cover")]
        which: ScatterKind,
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 4.2)]
        alpha: f64,
        /// Peeled and sampled estimates instead of exact enumeration.
        #[arg(long)]
        sampled: bool,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 10_000)]
        bp_max_iters: usize,
        #[arg(long, default_value_t = 0.5)]
        bp_damping: f64,
    },
    /// Decimation on a batch of random formulas.
    DecimationBench {
        #[arg(long, default_value_t = 5000)]
        n: usize,
        #[arg(long, default_value_t = 4.2)]
        alpha: f64,
        #[arg(long, default_value_t = 5)]
        instances: usize,
        /// Per-instance limit.
        #[arg(long, default_value_t = 600.0)]
        instance_seconds: f64,
    },
}

fn read_formula(path: &Path) -> Res<Formula> {
    let parsed = parse_dimacs(&fs::read_to_string(path)?)?;
    for w in &parsed.warnings {
        log::warn!("{}: {w:?}", path.display());
    }
    Ok(parsed.formula)
}

fn open_out(out: &Option<PathBuf>) -> Res<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn prop_config(base: RunConfig, a: &PropArgs, seed: u64) -> RunConfig {
    RunConfig {
        init: a.uniform_init.map(Init::Uniform).unwrap_or(Init::Random(seed)),
        epsilon: a.epsilon,
        max_iters: a.max_iters.unwrap_or(base.max_iters),
        damping: a.damping.unwrap_or(base.damping),
    }
}

fn print_model(w: &mut dyn Write, values: &[i64]) -> io::Result<()> {
    let body: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    writeln!(w, "v {} 0", body.join(" "))
}

fn run(cli: Cli) -> Res<ExitCode> {
    let budget = cli.budget_seconds.map(Duration::from_secs_f64);
    let seed = cli.seed;
    let mut out = open_out(&cli.out)?;
    match cli.command {
        Command::Gen(a) => {
            let f = if a.tree {
                generate_random_tree(a.n, seed)?
            } else {
                let m = a.m.unwrap_or((a.alpha * a.n as f64).round() as usize);
                generate_random_ksat(a.n, m, a.k, seed)?
            };
            writeln!(out, "c seed={seed}")?;
            write_dimacs(&f, &mut out)?;
        }
        Command::Solve(a) => {
            let f = read_formula(&a.file)?;
            if a.enumerate {
                let list = enumerate_models(&f, usize::MAX);
                for m in &list.models {
                    print_model(&mut out, &m.to_dimacs_literals())?;
                }
                writeln!(out, "c models={}", list.models.len())?;
                return Ok(ExitCode::SUCCESS);
            }
            let r = if a.walksat {
                walksat(&f, &WalkSatConfig { max_flips: a.max_flips, noise: a.noise, seed, ..Default::default() })?
            } else if a.dpll {
                dpll_solve(&f, UNLIMITED)
            } else {
                cdcl_solve(&f, UNLIMITED)
            };
            match r.status {
                Status::Sat => {
                    writeln!(out, "s SATISFIABLE")?;
                    print_model(&mut out, &r.model.unwrap().to_dimacs_literals())?;
                }
                Status::Unsat => writeln!(out, "s UNSATISFIABLE")?,
                Status::Unknown => writeln!(out, "s UNKNOWN")?,
            }
            log::info!("{:?}", r.stats);
        }
        Command::Sp(a) => {
            let f = read_formula(&a.file)?;
            let (table, run) = sp_marginals(&f, &prop_config(RunConfig::sp(), &a, seed))?;
            log::info!("sp: {:?} after {} sweeps", run.status, run.state.iterations);
            writeln!(out, "# converged={} sweeps={}", run.converged(), run.state.iterations)?;
            table.write_csv(&mut out)?;
            if let Some(p) = &a.residuals {
                write_residuals_csv(&run.residuals, fs::File::create(p)?)?;
            }
        }
        Command::Bp(a) => {
            let f = read_formula(&a.file)?;
            let (table, run) = bp_marginals(&f, &prop_config(RunConfig::bp(), &a, seed))?;
            log::info!("bp: {:?} after {} sweeps", run.status, run.state.iterations);
            writeln!(out, "# converged={} sweeps={}", run.converged(), run.state.iterations)?;
            table.write_csv(&mut out)?;
            if let Some(p) = &a.residuals {
                write_residuals_csv(&run.residuals, fs::File::create(p)?)?;
            }
        }
        Command::Covers(c) => return covers(c, seed, &mut out),
        Command::Decimate(a) => {
            let f = read_formula(&a.file)?;
            let cfg = DecimationConfig {
                fix_fraction: a.fix_fraction,
                extreme_threshold: a.extreme_threshold,
                trivial_threshold: a.trivial_threshold,
                sp_retries: a.sp_retries,
                walksat: WalkSatConfig { max_flips: a.max_flips, ..Default::default() },
                seed,
                time_budget: budget,
                ..Default::default()
            };
            let outcome = decimate(&f, &cfg)?;
            writeln!(out, "# status={} seed={seed}", outcome.status.label())?;
            outcome.write_log_csv(&mut out)?;
            eprintln!("{}", outcome.status.label());
            match (&outcome.assignment, &a.solution) {
                (Some(m), Some(p)) => print_model(&mut fs::File::create(p)?, &m.to_dimacs_literals())?,
                (None, _) => return Ok(ExitCode::from(1)),
                _ => {}
            }
        }
        Command::Experiment(e) => experiment(e, seed, budget, &mut out)?,
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn covers(c: CoversCommand, seed: u64, out: &mut Box<dyn Write>) -> Res<ExitCode> {
    match c {
        CoversCommand::Enum { file, method } => {
            let f = read_formula(&file)?;
            let method = match method {
                MethodArg::Sat => CoverMethod::Sat,
                MethodArg::Brute => CoverMethod::BruteForce,
            };
            let e = enumerate_covers(&f, method)?;
            write_covers(&e.covers, &mut *out)?;
            log::info!("{} covers, {} non-trivial, {} false", e.covers.len(), e.num_non_trivial(), e.num_false());
        }
        CoversCommand::Check { file, assignment } => {
            let f = read_formula(&file)?;
            let sigma = GeneralizedAssignment::parse(&assignment)?;
            if sigma.len() != f.num_vars() {
                return Err(format!(
                    "assignment has {} values but the formula has {} variables",
                    sigma.len(),
                    f.num_vars()
                )
                .into());
            }
            if !is_cover(&f, &sigma) {
                writeln!(out, "NOT_A_COVER")?;
                out.flush()?;
                return Ok(ExitCode::from(1));
            }
            writeln!(out, "{}", classify_cover(&f, &sigma, UNLIMITED)?.kind.label())?;
        }
        CoversCommand::Peel { file, model, order } => {
            let f = read_formula(&file)?;
            let start = match model {
                Some(text) if text.chars().all(|c| c == '0' || c == '1') => {
                    sp_covers::formula::Assignment::from_bits(&text)?
                }
                Some(text) => parse_model(&text, f.num_vars())?,
                None => walksat(&f, &WalkSatConfig { seed, ..Default::default() })?
                    .model
                    .ok_or("walksat found no solution")?,
            };
            if start.len() != f.num_vars() || !f.evaluate(&start) {
                return Err("the starting assignment does not satisfy the formula".into());
            }
            let p = star_propagate(&f, &(&start).into(), order.order(seed), true)?;
            writeln!(out, "# cover={}", p.cover)?;
            writeln!(out, "# trivial={}", p.cover.is_trivial())?;
            writeln!(out, "step,stars,unsupported")?;
            for (i, (s, u)) in p.trace.iter().enumerate() {
                writeln!(out, "{i},{s},{u}")?;
            }
        }
        CoversCommand::Encode { file, decode_map } => {
            let f = read_formula(&file)?;
            let enc = encode_covers_as_cnf(&f);
            write_dimacs(&enc.formula, &mut *out)?;
            if let Some(p) = decode_map {
                enc.write_decode_map(fs::File::create(p)?)?;
            }
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn experiment(e: ExperimentCommand, seed: u64, budget: Option<Duration>, out: &mut Box<dyn Write>) -> Res<()> {
    match e {
        ExperimentCommand::Peeling { n, alpha, samples, formulas, order, max_flips, max_attempts, curves } => {
            let spec = PeelingSpec {
                n,
                alpha,
                samples,
                formulas,
                seed,
                order: order.order(seed),
                walksat: WalkSatConfig { max_flips, ..Default::default() },
                max_attempts,
                budget,
            };
            let r = run_peeling(&spec)?;
            r.write_csv(&mut *out)?;
            if let Some(p) = curves {
                r.write_curves_csv(fs::File::create(p)?)?;
            }
            eprintln!("trivial fraction {:.4} over {} traces", r.trivial_fraction(), r.traces.len());
        }
        ExperimentCommand::Transition { n, alphas, formulas, cover_limit, conflict_budget, max_attempts } => {
            let spec = TransitionSpec {
                n,
                alphas: if alphas.is_empty() { default_alpha_grid() } else { alphas },
                formulas_per_point: formulas,
                seed,
                cover_limit,
                conflict_budget,
                max_attempts,
                budget,
            };
            let t = run_transition(&spec)?;
            t.write_csv(&mut *out)?;
            if let Some(a) = t.crossing() {
                eprintln!("existence probability crosses 0.5 near alpha {a:.3}");
            }
        }
        ExperimentCommand::Growth { ns, alpha, samples, formulas, order, max_attempts } => {
            let spec = GrowthSpec {
                ns,
                alpha,
                samples_per_formula: samples,
                formulas,
                seed,
                order: order.order(seed),
                walksat: WalkSatConfig::default(),
                max_attempts,
                budget,
            };
            let g = run_growth(&spec)?;
            g.write_csv(&mut *out)?;
        }
        ExperimentCommand::Scatter { which, n, alpha, sampled, samples, bp_max_iters, bp_damping } => {
            let spec = ScatterSpec {
                n,
                alpha,
                seed,
                kind: which,
                exact: !sampled,
                samples,
                sp: RunConfig::sp().with_seed(seed),
                bp: RunConfig { max_iters: bp_max_iters, damping: bp_damping, ..RunConfig::bp().with_seed(seed) },
            };
            run_scatter(&spec)?.write_csv(&mut *out)?;
        }
        ExperimentCommand::DecimationBench { n, alpha, instances, instance_seconds } => {
            let spec = BenchSpec {
                n,
                alpha,
                instances,
                seed,
                config: DecimationConfig {
                    time_budget: Some(Duration::from_secs_f64(instance_seconds)),
                    ..Default::default()
                },
                budget,
            };
            let b = run_decimation_bench(&spec)?;
            b.write_csv(&mut *out)?;
            eprintln!("solved {} of {}", b.solved(), b.rows.len());
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
