//! Workspace files, the constants report, single-game runs and batch
//! experiments.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{new_game, theoretical_step_bound, GameError, GameState, RunOutcome};
use crate::geometry::{erode, ConvexPolygon, GeometryError, Point};
use crate::motion::Pose;
use crate::policy::{random_starts, EvaderPolicy, PolicyKind, UnknownPolicy};
use crate::strategy::{derive_constants, StrategyConstants, StrategyError};

/// Minimum start separation for generated starts.
pub const START_SEPARATION: f64 = 3.0;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("workspace parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("workspace is not convex at vertex {index}")]
    NotConvex { index: usize },
    #[error("invalid workspace: {0}")]
    Geometry(GeometryError),
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error("batch spec has no rows")]
    EmptyBatch,
    #[error("batch row {row}: {message}")]
    BadBatchRow { row: usize, message: String },
    #[error(transparent)]
    Policy(#[from] UnknownPolicy),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// On-disk workspace document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkspaceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub vertices: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedWorkspace {
    pub name: String,
    pub polygon: ConvexPolygon,
}

fn polygon_from_vertices(mut vertices: Vec<Point>) -> Result<ConvexPolygon, IoError> {
    let n = vertices.len();
    let twice_area: f64 = (0..n).map(|i| vertices[i].cross(vertices[(i + 1) % n])).sum();
    let reversed = twice_area < 0.0;
    if reversed {
        log::warn!("workspace vertices are clockwise; reversing to counter-clockwise");
        vertices.reverse();
    }
    ConvexPolygon::new(vertices).map_err(|e| match e {
        GeometryError::NotConvex { index } => IoError::NotConvex { index: if reversed { n - 1 - index } else { index } },
        other => IoError::Geometry(other),
    })
}

/// Parses a workspace document into a counter-clockwise convex polygon.
pub fn parse_workspace(bytes: &[u8]) -> Result<ConvexPolygon, IoError> {
    Ok(parse_named_workspace(bytes)?.polygon)
}

pub fn parse_named_workspace(bytes: &[u8]) -> Result<NamedWorkspace, IoError> {
    let file: WorkspaceFile = serde_json::from_slice(bytes).map_err(|e| IoError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let polygon = polygon_from_vertices(file.vertices.into_iter().map(Point::from).collect())?;
    Ok(NamedWorkspace { name: file.name.unwrap_or_default(), polygon })
}

pub fn serialize_workspace(polygon: &ConvexPolygon, name: Option<&str>) -> String {
    let file = WorkspaceFile {
        name: name.map(str::to_string),
        vertices: polygon.vertices().iter().map(|&v| v.into()).collect(),
    };
    serde_json::to_string(&file).expect("workspace documents always serialize")
}

/// Loads a workspace file; the name defaults to the file stem.
pub fn load_workspace(path: &Path) -> Result<NamedWorkspace, IoError> {
    let bytes = std::fs::read(path).map_err(|source| IoError::File { path: path.to_path_buf(), source })?;
    let mut ws = parse_named_workspace(&bytes)?;
    if ws.name.is_empty() {
        ws.name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    }
    Ok(ws)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantRow {
    pub name: &'static str,
    pub derived: f64,
    pub reference: f64,
    pub tolerance: f64,
}

impl ConstantRow {
    pub fn delta(&self) -> f64 {
        self.derived - self.reference
    }

    pub fn within_tolerance(&self) -> bool {
        self.delta().abs() <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantsReport {
    pub rows: Vec<ConstantRow>,
}

impl ConstantsReport {
    pub fn get(&self, name: &str) -> Option<&ConstantRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn all_within_tolerance(&self) -> bool {
        self.rows.iter().all(ConstantRow::within_tolerance)
    }
}

impl fmt::Display for ConstantsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<18} {:>12} {:>12} {:>12} {:>6}", "constant", "derived", "reference", "delta", "ok")?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<18} {:>12.6} {:>12.6} {:>12.2e} {:>6}",
                r.name,
                r.derived,
                r.reference,
                r.delta(),
                if r.within_tolerance() { "yes" } else { "NO" }
            )?;
        }
        Ok(())
    }
}

/// Derives the unit-turn constants and sets them against the reference values.
pub fn cmd_constants() -> Result<ConstantsReport, IoError> {
    let d = derive_constants(1.0)?;
    let k = StrategyConstants::default();
    Ok(ConstantsReport {
        rows: vec![
            ConstantRow { name: "alpha_star", derived: d.alpha_star, reference: k.alpha_star, tolerance: 1e-3 },
            ConstantRow { name: "k_v", derived: d.k_v, reference: k.k_v, tolerance: 5e-4 },
            ConstantRow { name: "k_h", derived: d.k_h, reference: k.k_h, tolerance: 1e-3 },
            ConstantRow { name: "alpha_kh", derived: d.alpha_kh, reference: k.alpha_kh, tolerance: 1e-3 },
            ConstantRow { name: "second_derivative", derived: d.second_derivative, reference: -1.9999, tolerance: 0.05 },
        ],
    })
}

/// One game's setup. Missing starts are drawn from the seed.
#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub workspace: ConvexPolygon,
    pub policy: PolicyKind,
    pub seed: u64,
    pub epsilon: f64,
    /// Round limit; defaults to the capture bound.
    pub max_rounds: Option<u64>,
    pub pursuer: Option<Pose>,
    pub evader: Option<Point>,
}

pub fn simulate(config: &SimulationConfig) -> Result<(GameState, RunOutcome), GameError> {
    let q = erode(&config.workspace, crate::engine::PLAYER_RADIUS)?;
    let (p0, e0) = random_starts(&q, START_SEPARATION, config.seed);
    let pursuer = config.pursuer.unwrap_or(p0);
    let evader = config.evader.unwrap_or(e0);
    let policy = EvaderPolicy::new(config.policy.clone(), config.seed);
    let mut game = new_game(config.workspace.clone(), pursuer, evader, policy, config.epsilon, config.seed)?;
    let limit = config
        .max_rounds
        .unwrap_or_else(|| theoretical_step_bound(&game.q, &StrategyConstants::default(), config.epsilon));
    let outcome = game.run(limit)?;
    Ok((game, outcome))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchRow {
    pub workspace: PathBuf,
    pub policy: String,
    /// Inclusive seed range `[first, last]`.
    pub seeds: [u64; 2],
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

fn default_epsilon() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchSpec {
    pub rows: Vec<BatchRow>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl BatchSpec {
    pub fn from_json(bytes: &[u8]) -> Result<Self, IoError> {
        let spec: BatchSpec = serde_json::from_slice(bytes).map_err(|e| IoError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), IoError> {
        if self.rows.is_empty() {
            return Err(IoError::EmptyBatch);
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.seeds[0] > row.seeds[1] {
                return Err(IoError::BadBatchRow { row: i, message: format!("empty seed range {:?}", row.seeds) });
            }
            row.policy.parse::<PolicyKind>()?;
        }
        Ok(())
    }
}

/// One CSV row. Empty numeric cells mark values that do not exist for the game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchRecord {
    pub workspace: String,
    pub policy: String,
    pub seed: u64,
    pub epsilon: f64,
    pub diam: Option<f64>,
    pub bound: Option<u64>,
    /// Total rounds until capture.
    pub steps_to_capture: Option<u64>,
    /// Rounds from reaching the longest chord to establishment or capture.
    pub establishment_steps: Option<u64>,
    pub zigzag_count: Option<u64>,
    pub follow_count: Option<u64>,
    pub captured: bool,
}

struct Job<'a> {
    row: &'a BatchRow,
    seed: u64,
}

/// Runs every game of `spec` in parallel; records come back in spec order.
/// Relative workspace paths are resolved against `base_dir`.
pub fn run_batch(spec: &BatchSpec, base_dir: &Path) -> Result<Vec<BatchRecord>, IoError> {
    spec.validate()?;
    let mut workspaces: HashMap<&Path, Result<NamedWorkspace, String>> = HashMap::new();
    for row in &spec.rows {
        workspaces
            .entry(row.workspace.as_path())
            .or_insert_with(|| load_workspace(&base_dir.join(&row.workspace)).map_err(|e| e.to_string()));
    }
    let jobs: Vec<Job> = spec
        .rows
        .iter()
        .flat_map(|row| (row.seeds[0]..=row.seeds[1]).map(move |seed| Job { row, seed }))
        .collect();
    Ok(jobs.par_iter().map(|job| run_job(job, &workspaces[job.row.workspace.as_path()])).collect())
}

fn run_job(job: &Job, workspace: &Result<NamedWorkspace, String>) -> BatchRecord {
    let mut record = BatchRecord {
        workspace: job.row.workspace.display().to_string(),
        policy: job.row.policy.clone(),
        seed: job.seed,
        epsilon: job.row.epsilon,
        diam: None,
        bound: None,
        steps_to_capture: None,
        establishment_steps: None,
        zigzag_count: None,
        follow_count: None,
        captured: false,
    };
    let ws = match workspace {
        Ok(ws) => ws,
        Err(e) => {
            log::error!("{}: {e}", record.workspace);
            return record;
        }
    };
    record.workspace = ws.name.clone();
    let config = SimulationConfig {
        workspace: ws.polygon.clone(),
        policy: job.row.policy.parse().expect("validated"),
        seed: job.seed,
        epsilon: job.row.epsilon,
        max_rounds: None,
        pursuer: None,
        evader: None,
    };
    match simulate(&config) {
        Ok((game, outcome)) => {
            record.diam = Some(game.diameter());
            record.bound = Some(theoretical_step_bound(&game.q, &StrategyConstants::default(), game.epsilon));
            record.steps_to_capture = outcome.captured.then_some(outcome.rounds);
            record.establishment_steps = game.establishment_rounds();
            record.zigzag_count = Some(game.stats.zigzag_count);
            record.follow_count = Some(game.stats.follow_count);
            record.captured = outcome.captured;
        }
        Err(e) => log::error!("{} / {} / seed {}: {e}", record.workspace, record.policy, record.seed),
    }
    record
}

pub fn write_batch_csv<W: Write>(out: W, records: &[BatchRecord]) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
