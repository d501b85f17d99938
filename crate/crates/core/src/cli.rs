//! Command-line front end.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand};

use crate::geometry::Point;
use crate::io::{cmd_constants, load_workspace, run_batch, simulate, write_batch_csv, BatchSpec, SimulationConfig};
use crate::motion::Pose;
use crate::policy::PolicyKind;
use crate::service;
use crate::trace::write_jsonl;

pub const EXIT_CAPTURED: i32 = 0;
pub const EXIT_INPUT_ERROR: i32 = 1;
pub const EXIT_BOUND_EXCEEDED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "chordguard", version, about = "Differential drive pursuer vs. evader in convex arenas")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derive the strategy constants and compare them with the reference values.
    Constants {
        #[arg(long)]
        json: bool,
    },
    /// Play one game and write its trace.
    Simulate {
        #[arg(long)]
        workspace: PathBuf,
        #[arg(long, default_value = "greedy_runner")]
        policy: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        /// Round limit; defaults to the capture bound.
        #[arg(long)]
        max_steps: Option<u64>,
        /// JSON-lines trace output.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Pursuer start as X,Y,THETA.
        #[arg(long, value_parser = parse_pose, allow_hyphen_values = true)]
        pursuer: Option<Pose>,
        /// Evader start as X,Y.
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        evader: Option<Point>,
    },
    /// Run a batch spec and write one CSV row per game.
    Batch {
        spec: PathBuf,
        /// CSV output; overrides the spec's output path. Standard output if neither is set.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Serve interactive sessions over HTTP.
    Serve {
        #[arg(long, default_value = service::DEFAULT_ADDR)]
        addr: SocketAddr,
        /// Seconds before an idle session is dropped.
        #[arg(long, default_value_t = service::DEFAULT_IDLE_TIMEOUT.as_secs())]
        idle_timeout: u64,
    },
}

fn parse_numbers<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let values: Vec<f64> = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("'{v}': {e}")))
        .collect::<Result<_, _>>()?;
    values.try_into().map_err(|v: Vec<f64>| format!("expected {N} comma-separated numbers, got {}", v.len()))
}

fn parse_pose(s: &str) -> Result<Pose, String> {
    let [x, y, theta] = parse_numbers::<3>(s)?;
    Ok(Pose::new(x, y, theta))
}

fn parse_point(s: &str) -> Result<Point, String> {
    let [x, y] = parse_numbers::<2>(s)?;
    Ok(Point::new(x, y))
}

pub fn init_logging() {
    let env = env_logger::Env::new().filter_or("CHORDGUARD_LOG", "warn");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT_ERROR } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            EXIT_INPUT_ERROR
        }
    }
}

fn execute(command: Command) -> Result<i32, String> {
    match command {
        Command::Constants { json } => {
            let report = cmd_constants().map_err(|e| e.to_string())?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?);
            } else {
                print!("{report}");
            }
            Ok(0)
        }
        Command::Simulate { workspace, policy, seed, epsilon, max_steps, trace, pursuer, evader } => {
            let ws = load_workspace(&workspace).map_err(|e| e.to_string())?;
            let policy: PolicyKind = policy.parse().map_err(|e| format!("{e}"))?;
            if policy == PolicyKind::External {
                return Err("the external policy is only available through `serve`".into());
            }
            if max_steps == Some(0) {
                return Err("--max-steps must be positive".into());
            }
            let config = SimulationConfig {
                workspace: ws.polygon,
                policy,
                seed,
                epsilon,
                max_rounds: max_steps,
                pursuer,
                evader,
            };
            let (game, outcome) = simulate(&config).map_err(|e| e.to_string())?;
            if let Some(path) = trace {
                write_trace(&path, &game.event_log).map_err(|e| format!("{}: {e}", path.display()))?;
            }
            println!(
                "{} rounds={} half_turns={} establishment={} zigzags={} follows={} violations={}",
                if outcome.captured { "captured" } else { "bound-exceeded" },
                outcome.rounds,
                game.step,
                game.establishment_rounds().map_or("-".to_string(), |n| n.to_string()),
                game.stats.zigzag_count,
                game.stats.follow_count,
                game.violations.len(),
            );
            Ok(if outcome.captured { EXIT_CAPTURED } else { EXIT_BOUND_EXCEEDED })
        }
        Command::Batch { spec, output } => {
            let bytes = std::fs::read(&spec).map_err(|e| format!("{}: {e}", spec.display()))?;
            let parsed = BatchSpec::from_json(&bytes).map_err(|e| e.to_string())?;
            let base = spec.parent().unwrap_or(Path::new("."));
            let records = run_batch(&parsed, base).map_err(|e| e.to_string())?;
            match output.or(parsed.output.map(|p| base.join(p))) {
                Some(path) => {
                    let file = File::create(&path).map_err(|e| format!("{}: {e}", path.display()))?;
                    write_batch_csv(BufWriter::new(file), &records).map_err(|e| e.to_string())?;
                }
                None => write_batch_csv(std::io::stdout().lock(), &records).map_err(|e| e.to_string())?,
            }
            let failed = records.iter().filter(|r| !r.captured).count();
            if failed > 0 {
                eprintln!("{failed} of {} games ended without capture", records.len());
            }
            Ok(0)
        }
        Command::Serve { addr, idle_timeout } => {
            let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
            runtime
                .block_on(service::serve(addr, Duration::from_secs(idle_timeout)))
                .map_err(|e| e.to_string())?;
            Ok(0)
        }
    }
}

fn write_trace(path: &Path, records: &[crate::trace::TraceRecord]) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_jsonl(&mut out, records)?;
    out.flush()
}
