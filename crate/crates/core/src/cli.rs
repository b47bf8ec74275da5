//! Command-line front end: `run`, `serve`, `replay` and `report`.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::EpisodeConfig;
use crate::engine::Episode;
use crate::error::{Error, Result};
use crate::metrics::{self, TokenJudge};
use crate::policy::{self, Agent, HeuristicAgent, ScriptedAgent};
use crate::protocol::{self, ServeOutcome};
use crate::trajectory::{self, Trajectory, TrajectoryWriter};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_PROTOCOL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "storesim", version, about = "Long-horizon supermarket simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one episode with a built-in agent or an external one on stdio.
    Run(RunArgs),
    /// Run one episode driven by an external agent over stdin/stdout.
    Serve(EpisodeArgs),
    /// Re-execute a trajectory and check it reproduces byte for byte.
    Replay { trajectory: PathBuf },
    /// Compute metrics for one or more trajectories.
    Report {
        #[arg(required = true)]
        trajectories: Vec<PathBuf>,
        /// Write the summary table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct EpisodeArgs {
    /// TOML config laid over the preset.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "easy")]
    pub preset: String,
    /// Master seed; defaults to the config's.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_days: Option<u32>,
    /// Trajectory output path.
    #[arg(long, default_value = "trajectory.jsonl")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub episode: EpisodeArgs,
    /// heuristic, null, scripted:<path> or serve.
    #[arg(long, default_value = "heuristic")]
    pub agent: String,
}

pub fn init_logging() {
    let env = env_logger::Env::new().filter_or("SIM_LOG_LEVEL", "warn");
    let _ = env_logger::Builder::from_env(env)
        .target(env_logger::Target::Stderr)
        .try_init();
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    init_logging();
    match cli.command {
        Command::Run(a) => run_command(&a.episode, &a.agent),
        Command::Serve(a) => run_command(&a, "serve"),
        Command::Replay { trajectory } => replay_command(&trajectory),
        Command::Report { trajectories, out } => report_command(&trajectories, out.as_deref()),
    }
}

pub fn resolve_config(args: &EpisodeArgs) -> Result<(EpisodeConfig, u64)> {
    let mut config = match &args.config {
        Some(p) => EpisodeConfig::load(p, &args.preset)?,
        None => EpisodeConfig::preset(&args.preset)?,
    };
    if let Some(m) = args.max_days {
        config.max_days = m;
    }
    config.validate()?;
    let seed = args.seed.unwrap_or(config.seed);
    config.seed = seed;
    Ok((config, seed))
}

enum AgentSpec {
    Native(Box<dyn Agent>, String),
    Serve,
}

fn parse_agent(spec: &str) -> Result<AgentSpec> {
    match spec {
        "heuristic" => Ok(AgentSpec::Native(
            Box::new(HeuristicAgent::default()),
            "heuristic".into(),
        )),
        "null" => Ok(AgentSpec::Native(Box::new(ScriptedAgent::null()), "null".into())),
        "serve" => Ok(AgentSpec::Serve),
        s => match s.strip_prefix("scripted:") {
            Some(path) => {
                let agent = ScriptedAgent::load(Path::new(path))
                    .map_err(|e| Error::Config(format!("cannot load script {path}: {e}")))?;
                Ok(AgentSpec::Native(Box::new(agent), "scripted".into()))
            }
            None => Err(Error::Config(format!(
                "unknown agent {s:?}; expected heuristic, null, scripted:<path> or serve"
            ))),
        },
    }
}

fn summary_path(out: &Path) -> PathBuf {
    let mut name = out.file_stem().unwrap_or_default().to_os_string();
    name.push(".summary.csv");
    out.with_file_name(name)
}

fn run_command(args: &EpisodeArgs, agent: &str) -> i32 {
    let setup = resolve_config(args).and_then(|(config, seed)| {
        let agent = parse_agent(agent)?;
        let ep = Episode::new(config, seed)?;
        Ok((ep, agent))
    });
    let (mut ep, agent) = match setup {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    match execute(&mut ep, agent, &args.out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

fn execute(ep: &mut Episode, agent: AgentSpec, out: &Path) -> Result<i32> {
    let name = match &agent {
        AgentSpec::Native(_, n) => n.clone(),
        AgentSpec::Serve => "serve".into(),
    };
    let file = BufWriter::new(File::create(out)?);
    let mut writer = TrajectoryWriter::new(file, &trajectory::header_for(ep, &name))?;
    let outcome = match agent {
        AgentSpec::Native(mut a, _) => policy::run_episode(a.as_mut(), ep, |r| writer.write_day(r))?,
        AgentSpec::Serve => {
            let stdin = io::stdin();
            let stdout = io::stdout();
            match protocol::serve(ep, stdin.lock(), stdout.lock(), Some(&mut writer))? {
                ServeOutcome::Finished(o) => o,
                ServeOutcome::Broken { days, message } => {
                    eprintln!("protocol error after {days} days: {message}");
                    return Ok(EXIT_PROTOCOL);
                }
            }
        }
    };
    writer.finish(&outcome)?;
    let traj = Trajectory::load(out)?;
    let report = metrics::episode_report(&traj.days, &TokenJudge)?;
    let summary = summary_path(out);
    metrics::write_summary_csv(File::create(&summary)?, &[(out.display().to_string(), report.clone())])?;
    eprintln!(
        "episode ended ({}) after {} days; avg daily sales {:.2}, avg daily income {:.2}; summary in {}",
        outcome.reason.as_str(),
        outcome.days,
        report.metrics.avg_daily_sales,
        report.metrics.avg_daily_income,
        summary.display()
    );
    Ok(EXIT_OK)
}

fn replay_command(path: &Path) -> i32 {
    let traj = match Trajectory::load(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FAILURE;
        }
    };
    match trajectory::replay(&traj) {
        Ok(report) => {
            println!("{}", serde_json::to_string(&report).expect("serializable"));
            match report.divergence {
                None => {
                    eprintln!("verified {} days, no divergence", report.days_checked);
                    EXIT_OK
                }
                Some(d) => {
                    eprintln!("divergence on day {} at {}", d.day, d.path);
                    EXIT_FAILURE
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

fn report_command(paths: &[PathBuf], out: Option<&Path>) -> i32 {
    let mut rows = Vec::new();
    let mut failed = 0;
    for p in paths {
        let r = Trajectory::load(p).and_then(|t| metrics::episode_report(&t.days, &TokenJudge));
        match r {
            Ok(r) => rows.push((p.display().to_string(), r)),
            Err(e) => {
                failed += 1;
                eprintln!("{}: {e}", p.display());
            }
        }
    }
    if rows.is_empty() {
        return EXIT_FAILURE;
    }
    let written = match out {
        Some(path) => File::create(path)
            .map_err(Error::from)
            .and_then(|f| metrics::write_summary_csv(f, &rows)),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            metrics::write_summary_csv(&mut lock, &rows).and_then(|()| Ok(lock.flush()?))
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return EXIT_FAILURE;
    }
    if failed > 0 {
        EXIT_FAILURE
    } else {
        EXIT_OK
    }
}
