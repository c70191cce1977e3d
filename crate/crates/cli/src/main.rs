use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use stylus::automaton::parse_nba;
use stylus::harness::{self, ExperimentConfig, ExperimentMode, Report};
use stylus::model::{Team, Wts};
use stylus::planner::{synthesize, BiasSchedule, PlannerConfig, TargetPolicy};

const NO_PLAN_EXISTS: u8 = 2;
const BUDGET_EXHAUSTED: u8 = 3;
const INPUT_ERROR: u8 = 4;

#[derive(Parser)]
#[command(name = "stylus", version, about = "Sampling-based prefix-suffix planning for robot teams")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Synthesize one plan from a team and an automaton.
    Synth(SynthArgs),
    /// One synthesis per instance and trial.
    Bench(ExpArgs),
    /// Goal and witness detection rates against the iteration budget.
    SuccessCurve(ExpArgs),
    /// Biased against uniform sampling on shared seeds.
    CompareBias(ExpArgs),
    /// Synthesized costs against the exact optimum.
    OracleCheck(ExpArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// One transition system per robot, in robot order.
    #[arg(long, num_args = 1.., required = true)]
    wts: Vec<PathBuf>,
    #[arg(long)]
    nba: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    #[arg(long = "n-pre", default_value_t = 1000)]
    n_pre: usize,
    #[arg(long = "n-suf", default_value_t = 1000)]
    n_suf: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "p-rand", default_value_t = 0.9)]
    p_rand: f64,
    #[arg(long = "p-new", default_value_t = 0.9)]
    p_new: f64,
    /// sequential, uniform, or fixed:<state> to steer towards one final.
    #[arg(long, default_value = "sequential")]
    bias: String,
    /// Wall-clock limit for the whole run.
    #[arg(long = "time-limit-ms")]
    time_limit_ms: Option<u64>,
    /// Plan file; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExpArgs {
    #[arg(long)]
    config: PathBuf,
    /// CSV file; overrides the config's output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn synth(args: SynthArgs) -> Result<ExitCode> {
    let robots = args
        .wts
        .iter()
        .map(|p| Wts::from_json(&read(p)?).with_context(|| p.display().to_string()))
        .collect::<Result<Vec<_>>>()?;
    let team = Team::new(robots)?;
    let nba = parse_nba(&read(&args.nba)?).with_context(|| args.nba.display().to_string())?;

    let mut cfg = PlannerConfig {
        beta: args.beta,
        n_max_pre: args.n_pre,
        n_max_suf: args.n_suf,
        time_limit_ms: args.time_limit_ms,
        ..Default::default()
    };
    cfg.sampler.rng_seed = args.seed;
    cfg.sampler.p_rand = args.p_rand;
    cfg.sampler.p_new = args.p_new;
    match args.bias.as_str() {
        "sequential" => cfg.sampler.target_policy = TargetPolicy::Sequential,
        "uniform" => cfg.sampler.bias_schedule = BiasSchedule::Uniform,
        other => {
            let Some(q) = other.strip_prefix("fixed:") else {
                bail!("unknown bias mode {other:?}");
            };
            let Some(name) = nba.names().iter().find(|n| n.to_string() == q) else {
                bail!("fixed bias: automaton has no state {q:?}");
            };
            cfg.sampler.target_policy = TargetPolicy::Fixed(name.clone());
        }
    }
    cfg.validate()?;

    let s = synthesize(&team, &nba, &cfg)?;
    let Some(plan) = s.plan else {
        if s.feasible_roots == 0 {
            eprintln!("no plan exists: no accepting state is reachable on a cycle");
            return Ok(ExitCode::from(NO_PLAN_EXISTS));
        }
        let why = if s.timed_out { "time limit" } else { "iteration budget" };
        eprintln!("{why} exhausted after {} iterations without a plan", s.total_iters);
        return Ok(ExitCode::from(BUDGET_EXHAUSTED));
    };
    let text = serde_json::to_string_pretty(&plan.to_json(&team, &nba))?;
    match &args.out {
        Some(p) => std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => println!("{text}"),
    }
    eprintln!(
        "J = {} (prefix {}, suffix {}), {} iterations",
        plan.j_total, plan.j_pre, plan.j_suf, s.total_iters
    );
    Ok(ExitCode::SUCCESS)
}

fn experiment(mode: ExperimentMode, args: ExpArgs) -> Result<ExitCode> {
    let mut cfg = ExperimentConfig::from_json(&read(&args.config)?)
        .with_context(|| args.config.display().to_string())?;
    cfg.mode = mode;
    let base = args.config.parent().unwrap_or(Path::new("."));
    let report = harness::run(&cfg, base)?;
    match args.out.or(cfg.output) {
        Some(out) => report.write(&out)?,
        None => {
            let stdout = std::io::stdout().lock();
            match &report {
                Report::Benchmark(r) => harness::write_csv(r, stdout)?,
                Report::SuccessCurve(r) => harness::write_csv(r, stdout)?,
                Report::CompareBias(r) => harness::write_csv(&r.summary, stdout)?,
                Report::OracleCheck(r) => harness::write_csv(r, stdout)?,
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(INPUT_ERROR) } else { ExitCode::SUCCESS };
        }
    };
    let res = match cli.cmd {
        Cmd::Synth(a) => synth(a),
        Cmd::Bench(a) => experiment(ExperimentMode::Benchmark, a),
        Cmd::SuccessCurve(a) => experiment(ExperimentMode::SuccessCurve, a),
        Cmd::CompareBias(a) => experiment(ExperimentMode::CompareBias, a),
        Cmd::OracleCheck(a) => experiment(ExperimentMode::OracleCheck, a),
    };
    res.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(INPUT_ERROR)
    })
}
