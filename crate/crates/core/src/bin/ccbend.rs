use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ccbend::baseline::solve_baseline;
use ccbend::bench::{run_bench, BenchConfig};
use ccbend::decomposition::{decompose, CoverMode};
use ccbend::generate::{generate_instance, GeneratorConfig, Topology};
use ccbend::graph::{
    brute_force_optimal, cc_cost, components_of, induced_cut, parse_instance, write_instance, Instance,
};
use ccbend::io::{format_real, read_solution, write_solution};
use ccbend::master::{bdcc, Clock, SolveResult, SolverConfig};
use ccbend::rounding::{round, RoundingMethod};
use ccbend::subproblem::MwrObjective;

#[derive(Parser)]
#[command(name = "ccbend", version, about = "Exact correlation clustering by Benders decomposition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance with Benders decomposition.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Solve with the cutting-plane baseline.
    Baseline {
        instance: PathBuf,
        #[arg(long, default_value_t = 600.0)]
        time_limit: f64,
        #[arg(long, value_enum, default_value_t = ClockArg::Work)]
        clock: ClockArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Exhaustive search over partitions (small instances only).
    Brute {
        instance: PathBuf,
        #[arg(long)]
        solution: Option<PathBuf>,
    },
    /// Round a fractional labeling to a feasible clustering.
    Round {
        instance: PathBuf,
        fractional: PathBuf,
        #[arg(long, value_enum, default_value_t = RoundingArg::Threshold)]
        method: RoundingArg,
        #[arg(long, value_enum, default_value_t = CoverArg::Exact)]
        cover: CoverArg,
        #[arg(long)]
        solution: Option<PathBuf>,
    },
    /// Generate a random instance.
    Gen {
        #[arg(long, default_value_t = 10)]
        nodes: usize,
        #[arg(long, default_value_t = 0.5)]
        prob: f64,
        /// Grid topology, e.g. `8x8`; overrides --nodes and --prob.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
        wmin: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        wmax: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run BDCC over a sweep of tau plus the baseline on each instance.
    Bench {
        instances: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "0,0.5")]
        taus: Vec<f64>,
        #[arg(long, default_value_t = 0.1)]
        time_scale: f64,
        #[arg(long)]
        no_baseline: bool,
        /// Instances solved concurrently.
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Per-instance CSV; stdout when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Gap-percentage table; stdout when omitted.
        #[arg(long)]
        summary: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 0.5)]
    tau: f64,
    /// Same as --tau 0.
    #[arg(long)]
    no_mwr: bool,
    #[arg(long, default_value_t = 600.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Overridden by CCBEND_THREADS.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, value_enum, default_value_t = CoverArg::Exact)]
    cover: CoverArg,
    #[arg(long, value_enum, default_value_t = MwrArg::Random)]
    mwr_objective: MwrArg,
    /// Rounding used for the per-iteration upper bound.
    #[arg(long, value_enum, default_value_t = RoundingArg::Threshold)]
    rounding: RoundingArg,
    #[arg(long, value_enum, default_value_t = ClockArg::Work)]
    clock: ClockArg,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    solution: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CoverArg {
    Exact,
    Greedy,
}

#[derive(Clone, Copy, ValueEnum)]
enum MwrArg {
    Random,
    InverseWeight,
}

#[derive(Clone, Copy, ValueEnum)]
enum RoundingArg {
    Threshold,
    Parallel,
    Serial,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClockArg {
    Work,
    Wall,
}

impl From<CoverArg> for CoverMode {
    fn from(c: CoverArg) -> Self {
        match c {
            CoverArg::Exact => CoverMode::Exact,
            CoverArg::Greedy => CoverMode::Greedy,
        }
    }
}

impl From<RoundingArg> for RoundingMethod {
    fn from(r: RoundingArg) -> Self {
        match r {
            RoundingArg::Threshold => RoundingMethod::Threshold,
            RoundingArg::Parallel => RoundingMethod::Parallel,
            RoundingArg::Serial => RoundingMethod::Serial,
        }
    }
}

impl From<ClockArg> for Clock {
    fn from(c: ClockArg) -> Self {
        match c {
            ClockArg::Work => Clock::Work,
            ClockArg::Wall => Clock::Wall,
        }
    }
}

fn threads_from_env(flag: usize) -> Result<usize> {
    match std::env::var("CCBEND_THREADS") {
        Ok(v) => v.trim().parse().with_context(|| format!("CCBEND_THREADS must be a positive integer, got {v:?}")),
        Err(_) => Ok(flag),
    }
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig> {
        let cfg = SolverConfig {
            tau: if self.no_mwr { 0.0 } else { self.tau },
            time_limit_s: self.time_limit,
            seed: self.seed,
            threads: threads_from_env(self.threads)?,
            cover_mode: self.cover.into(),
            mwr_objective: match self.mwr_objective {
                MwrArg::Random => MwrObjective::Random,
                MwrArg::InverseWeight => MwrObjective::InverseWeight,
            },
            rounding: self.rounding.into(),
            clock: self.clock.into(),
            ..SolverConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn load_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn report(inst: &Instance, r: &SolveResult, out: &OutputArgs) -> Result<()> {
    println!("status {}", r.status.as_str());
    println!("cost {}", format_real(r.cost));
    println!("lower_bound {}", format_real(r.lower_bound));
    println!("gap {}", format_real(r.gap()));
    println!("iterations {}", r.iterations);
    println!("clusters {}", r.partition.component_count());
    println!("serial_ms {}", format_real(r.trace.serial_total_ms()));
    println!("parallel_ms {}", format_real(r.trace.parallel_total_ms()));
    if let Some(p) = &out.trace {
        write_file(p, &r.trace.to_csv())?;
    }
    if let Some(p) = &out.solution {
        write_file(p, &write_solution(inst, &r.x, &r.partition))?;
    }
    Ok(())
}

fn parse_grid(s: &str) -> Result<(usize, usize)> {
    let (w, h) = s.split_once(['x', 'X']).with_context(|| format!("grid must look like WxH, got {s:?}"))?;
    Ok((w.trim().parse().context("grid width")?, h.trim().parse().context("grid height")?))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve { instance, solver, out } => {
            let inst = load_instance(&instance)?;
            let r = bdcc(&inst, &solver.config()?)?;
            report(&inst, &r, &out)
        }
        Command::Baseline { instance, time_limit, clock, out } => {
            let inst = load_instance(&instance)?;
            let cfg = SolverConfig { time_limit_s: time_limit, clock: clock.into(), ..SolverConfig::default() };
            let r = solve_baseline(&inst, &cfg)?;
            println!("constraints {}", r.constraints.len());
            report(&inst, &r.result, &out)
        }
        Command::Brute { instance, solution } => {
            let inst = load_instance(&instance)?;
            let (cost, p) = brute_force_optimal(&inst)?;
            println!("cost {}", format_real(cost));
            println!("clusters {}", p.component_count());
            if let Some(path) = solution {
                let x = induced_cut(&inst, &p)?;
                write_file(&path, &write_solution(&inst, &x, &p))?;
            }
            Ok(())
        }
        Command::Round { instance, fractional, method, cover, solution } => {
            let inst = load_instance(&instance)?;
            let text = fs::read_to_string(&fractional).with_context(|| format!("reading {}", fractional.display()))?;
            let sol = read_solution(&inst, &text)?;
            let decomp = decompose(&inst, cover.into())?;
            let x = round(&inst, &decomp, &sol.x, method.into());
            let p = components_of(&inst, &x)?;
            println!("cost {}", format_real(cc_cost(&inst, &x)?));
            println!("clusters {}", p.component_count());
            match solution {
                Some(path) => write_file(&path, &write_solution(&inst, &x, &p)),
                None => {
                    print!("{}", write_solution(&inst, &x, &p));
                    Ok(())
                }
            }
        }
        Command::Gen { nodes, prob, grid, wmin, wmax, seed, output } => {
            let topology = match grid {
                Some(g) => {
                    let (width, height) = parse_grid(&g)?;
                    Topology::Grid { width, height }
                }
                None => Topology::ErdosRenyi { nodes, probability: prob },
            };
            let inst = generate_instance(&GeneratorConfig { topology, weight_min: wmin, weight_max: wmax, seed })?;
            let text = write_instance(&inst);
            match output {
                Some(p) => write_file(&p, &text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
        Command::Bench { instances, taus, time_scale, no_baseline, workers, report, summary, solver } => {
            if !(time_scale > 0.0) {
                bail!("--time-scale must be positive");
            }
            let mut set = Vec::with_capacity(instances.len());
            for path in &instances {
                set.push((path.display().to_string(), load_instance(path)?));
            }
            let cfg =
                BenchConfig { taus, solver: solver.config()?, time_scale, include_baseline: !no_baseline, workers };
            let r = run_bench(&set, &cfg);
            for row in r.rows.iter().filter(|row| row.error.is_some()) {
                eprintln!("{} {}: {}", row.instance, row.config_label(), row.error.as_deref().unwrap_or(""));
            }
            match report {
                Some(p) => write_file(&p, &r.to_csv())?,
                None => print!("{}", r.to_csv()),
            }
            match summary {
                Some(p) => write_file(&p, &r.summary_csv()),
                None => {
                    println!();
                    print!("{}", r.summary_csv());
                    Ok(())
                }
            }
        }
    }
}

fn main() -> Result<()> {
    run(Cli::parse())
}
