mod bench;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use flowdec_core::flowdec::{self, Planner};
use flowdec_core::homogeneous;
use flowdec_core::io::{
    assignment_from_json, assignment_to_json, instance_from_json, instance_to_json,
};
use flowdec_core::oracle;
use flowdec_core::scenario::{self, ScenarioParams};
use flowdec_core::{total_reward, validate, Instance, REWARD_TOLERANCE};

#[derive(Parser)]
#[command(
    name = "flowdec",
    version,
    about = "Multi-fleet task allocation on time-expanded graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random grid instance as JSON
    Generate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve an instance and print its reward
    Solve {
        #[arg(long = "in", value_name = "PATH")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Algorithm::Flowdec)]
        algorithm: Algorithm,
        /// Where to write the assignment JSON
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write Graphviz files of the flow networks into this directory
        #[arg(long, value_name = "DIR")]
        debug_network: Option<PathBuf>,
    },
    /// Check a solution against every constraint
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Time the planners over a sweep of horizons and fleet counts
    Benchmark(bench::BenchArgs),
    /// Run the receding-horizon simulation
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_parser = positive)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = PlannerArg::Flowdec)]
        planner: PlannerArg,
        /// Report JSON path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the per-step records as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    #[arg(long, value_parser = positive)]
    rows: usize,
    #[arg(long, value_parser = positive)]
    cols: usize,
    #[arg(long, value_parser = positive)]
    horizon: usize,
    #[arg(long, value_parser = positive)]
    fleets: usize,
    #[arg(long, value_parser = positive)]
    fleet_size: usize,
    /// Objects per reward type
    #[arg(long, value_parser = positive)]
    objects: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ScenarioArgs {
    fn params(&self) -> ScenarioParams {
        ScenarioParams {
            rows: self.rows,
            cols: self.cols,
            horizon: self.horizon,
            fleets: self.fleets,
            fleet_size: self.fleet_size,
            objects: self.objects,
            seed: self.seed,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Algorithm {
    Flowdec,
    PrivateFirst,
    SharedFirst,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
pub(crate) enum PlannerArg {
    Flowdec,
    PrivateFirst,
    SharedFirst,
}

impl PlannerArg {
    pub(crate) fn planner(self) -> Planner {
        match self {
            PlannerArg::Flowdec => Planner::FlowDec,
            PlannerArg::PrivateFirst => Planner::PrivateFirst,
            PlannerArg::SharedFirst => Planner::SharedFirst,
        }
    }
}

/// Failure with its process exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn usage(error: anyhow::Error) -> Self {
        Self { code: 2, error }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Self::usage(error)
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::Generate { scenario, out } => cmd_generate(&scenario, &out),
        Command::Solve {
            input,
            algorithm,
            out,
            debug_network,
        } => cmd_solve(&input, algorithm, out.as_deref(), debug_network.as_deref()),
        Command::Verify { instance, solution } => cmd_verify(&instance, &solution),
        Command::Benchmark(args) => bench::run(&args).map_err(Failure::usage),
        Command::Simulate {
            scenario,
            steps,
            planner,
            out,
            csv,
        } => cmd_simulate(&scenario, steps, planner, out.as_deref(), csv.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

/// Caps rayon's global pool at `FLOWDEC_THREADS` when set.
fn configure_threads() -> anyhow::Result<()> {
    let Ok(value) = std::env::var("FLOWDEC_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| anyhow!("FLOWDEC_THREADS must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("configuring the thread pool")
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn load_instance(path: &Path) -> anyhow::Result<Instance> {
    instance_from_json(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn cmd_generate(args: &ScenarioArgs, out: &Path) -> CmdResult {
    let instance = scenario::generate(&args.params()).map_err(|e| anyhow!(e))?;
    write(out, &instance_to_json(&instance))?;
    Ok(())
}

fn cmd_solve(
    input: &Path,
    algorithm: Algorithm,
    out: Option<&Path>,
    debug: Option<&Path>,
) -> CmdResult {
    let instance = load_instance(input)?;
    if let Some(dir) = debug {
        dump_networks(&instance, dir)?;
    }
    let assignment = match algorithm {
        Algorithm::Oracle => {
            let res = oracle::exact_solve(&instance).map_err(|e| Failure {
                code: 3,
                error: anyhow!(e),
            })?;
            println!("shared: {}", res.shared_part);
            println!("private: {}", res.private_part);
            res.assignment
        }
        Algorithm::Flowdec => flowdec::flowdec(&instance).map_err(|e| anyhow!(e))?,
        Algorithm::PrivateFirst => flowdec::private_first(&instance).map_err(|e| anyhow!(e))?,
        Algorithm::SharedFirst => flowdec::shared_first(&instance).map_err(|e| anyhow!(e))?,
    };
    let report = validate(&assignment, &instance).map_err(|e| anyhow!(e))?;
    if !report.is_feasible() {
        print!("{report}");
        return Err(Failure {
            code: 1,
            error: anyhow!("solver produced an infeasible assignment"),
        });
    }
    let reward = total_reward(&assignment, &instance).map_err(|e| anyhow!(e))?;
    if let Some(path) = out {
        write(
            path,
            &assignment_to_json(&assignment, &instance).map_err(|e| anyhow!(e))?,
        )?;
    }
    println!("reward: {reward}");
    Ok(())
}

fn dump_networks(instance: &Instance, dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let network = |rewards: &flowdec_core::RewardTable, start: &[usize], pool: usize| {
        homogeneous::build_network(rewards, start, instance.graph(), instance.horizon(), pool)
            .map(|b| b.network.to_dot())
            .map_err(|e| anyhow!(e))
    };
    let pooled = network(
        instance.shared_rewards(),
        &instance.pooled_initial_positions(),
        instance.total_agents(),
    )?;
    write(&dir.join("pooled.dot"), &pooled)?;

    let share = 1.0 / instance.fleet_count() as f64;
    let stage = flowdec::pooled_shared_stage(instance).map_err(|e| anyhow!(e))?;
    for f in 0..instance.fleet_count() {
        let start = instance.initial_positions(f);
        let size = instance.fleet_size(f);
        let pf = instance
            .private_rewards(f)
            .add_scaled(instance.shared_rewards(), share);
        write(
            &dir.join(format!("private-first-fleet-{}.dot", f + 1)),
            &network(&pf, start, size)?,
        )?;
        let sf = stage.attribution.combined_rewards(instance, f);
        write(
            &dir.join(format!("shared-first-fleet-{}.dot", f + 1)),
            &network(&sf, start, size)?,
        )?;
    }
    Ok(())
}

fn cmd_verify(instance_path: &Path, solution_path: &Path) -> CmdResult {
    let instance = load_instance(instance_path)?;
    let (assignment, recorded) = assignment_from_json(&read(solution_path)?, &instance)
        .with_context(|| format!("parsing {}", solution_path.display()))?;
    let report = validate(&assignment, &instance).map_err(|e| anyhow!(e))?;
    let reward = total_reward(&assignment, &instance).map_err(|e| anyhow!(e))?;
    if !report.is_feasible() {
        print!("{report}");
        return Err(Failure {
            code: 1,
            error: anyhow!("{} constraint violation(s)", report.violations.len()),
        });
    }
    if (recorded - reward).abs() > REWARD_TOLERANCE {
        eprintln!("warning: file records reward {recorded}, evaluated {reward}");
    }
    println!("feasible");
    println!("reward: {reward}");
    Ok(())
}

fn cmd_simulate(
    args: &ScenarioArgs,
    steps: usize,
    planner: PlannerArg,
    out: Option<&Path>,
    csv_path: Option<&Path>,
) -> CmdResult {
    let report =
        scenario::simulate(&args.params(), steps, planner.planner()).map_err(|e| anyhow!(e))?;
    let json = serde_json::to_string_pretty(&report).context("serializing the report")?;
    match out {
        Some(path) => write(path, &json)?,
        None => println!("{json}"),
    }
    if let Some(path) = csv_path {
        let mut w =
            csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
        for record in &report.records {
            w.serialize(record).context("writing CSV")?;
        }
        w.flush().context("writing CSV")?;
    }
    eprintln!(
        "total realized reward: {} over {} steps",
        report.total_realized_reward,
        report.records.len()
    );
    Ok(())
}

pub(crate) fn positive(s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err("must be a positive integer".to_string()),
    }
}
