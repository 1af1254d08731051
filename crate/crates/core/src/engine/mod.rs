//! Multi-shot sessions over one fixed program.

mod compare;
mod persist;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::grounder::{evict, Budget, EvictionPolicy, Grounder, GroundingError, GroundingReport, OvergroundedState};
use crate::model::{AnswerSet, FactSet, GroundProgram, Interner, NonGroundProgram};
use crate::solver::{brute_force_answer_sets, solve, SolveStats, SolverError, ORACLE_LIMIT};

pub use compare::{compare_modes, ComparisonReport, ShotComparison};
pub use persist::STATE_HEADER;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Incremental,
    Scratch,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "incremental" => Ok(Mode::Incremental),
            "scratch" => Ok(Mode::Scratch),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvictionConfig {
    pub policy: EvictionPolicy,
    pub budget: Budget,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionConfig {
    pub mode: Mode,
    /// `None` enumerates every answer set.
    pub max_models: Option<usize>,
    pub eviction: Option<EvictionConfig>,
    /// Cross-check every shot against the brute-force oracle.
    pub oracle_check: bool,
    pub oracle_limit: usize,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            mode: Mode::Incremental,
            max_models: None,
            eviction: None,
            oracle_check: false,
            oracle_limit: ORACLE_LIMIT,
        }
    }
}

impl SessionConfig {
    pub fn with_mode(mode: Mode) -> Self {
        SessionConfig { mode, ..SessionConfig::default() }
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid configuration: {0}")]
    Config(#[source] GroundingError),
    #[error("shot {shot}: {source}")]
    Grounding {
        shot: u64,
        #[source]
        source: GroundingError,
    },
    #[error("shot {shot}: {source}")]
    Oracle {
        shot: u64,
        #[source]
        source: SolverError,
    },
    #[error("shot {shot}: solver disagrees with oracle (solver only: {solver_only:?}, oracle only: {oracle_only:?})")]
    OracleMismatch { shot: u64, solver_only: Vec<String>, oracle_only: Vec<String> },
    #[error("shot {shot}: answer sets differ between modes (incremental only: {incremental_only:?}, scratch only: {scratch_only:?})")]
    ModeMismatch { shot: u64, incremental_only: Vec<String>, scratch_only: Vec<String> },
    #[error("program changed since the state was saved")]
    ProgramChanged,
    #[error("unsupported state version `{0}`")]
    UnsupportedVersion(String),
    #[error("malformed state file, line {line}: {message}")]
    MalformedState { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl EngineError {
    /// True for failures that indicate a bug rather than bad input.
    pub fn is_invariant_failure(&self) -> bool {
        matches!(self, EngineError::OracleMismatch { .. } | EngineError::ModeMismatch { .. })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StageTimings {
    pub evict: Duration,
    pub ground: Duration,
    pub project: Duration,
    pub solve: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotResult {
    pub shot_index: u64,
    pub answer_sets: Vec<AnswerSet>,
    /// Canonical text of each answer set, in enumeration order.
    pub rendered: Vec<String>,
    pub exhausted: bool,
    pub grounding: GroundingReport,
    pub evicted: usize,
    /// Rules in the program handed to the solver.
    pub solved_rules: usize,
    pub solve_stats: SolveStats,
    pub timings: StageTimings,
    pub wall_time_total: Duration,
}

impl ShotResult {
    pub fn answer_set_texts(&self) -> BTreeSet<String> {
        self.rendered.iter().cloned().collect()
    }
}

/// Digest of the canonical program text; comments and layout do not count.
pub fn program_digest(program: &NonGroundProgram) -> String {
    hex::encode(Sha256::digest(program.pretty().as_bytes()))
}

/// One program, one interner, one overgrounded cache, many shots.
#[derive(Debug, Clone)]
pub struct Session {
    grounder: Grounder,
    state: OvergroundedState,
    interner: Interner,
    config: SessionConfig,
}

impl Session {
    pub fn new(program: NonGroundProgram, config: SessionConfig) -> Result<Self, EngineError> {
        if let Some(e) = &config.eviction {
            e.budget.validate().map_err(EngineError::Config)?;
        }
        Ok(Session {
            grounder: Grounder::new(program),
            state: OvergroundedState::new(),
            interner: Interner::new(),
            config,
        })
    }

    pub fn program(&self) -> &NonGroundProgram {
        self.grounder.program()
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn state(&self) -> &OvergroundedState {
        &self.state
    }

    pub fn interner(&self) -> &Interner {
        &self.interner
    }

    pub fn grounder(&self) -> &Grounder {
        &self.grounder
    }

    pub fn shots_processed(&self) -> u64 {
        self.state.shot_counter()
    }

    /// Cache rules rendered as text, in insertion order.
    pub fn cache_rules_text(&self) -> Vec<String> {
        self.state.rules().map(|c| c.rule.display(&self.interner).to_string()).collect()
    }

    /// Runs one shot: evict (if configured), ground, project, solve in
    /// incremental mode; ground from scratch and solve in scratch mode.
    pub fn process_shot(&mut self, facts: &FactSet) -> Result<ShotResult, EngineError> {
        let start = Instant::now();
        let mut timings = StageTimings::default();
        let shot = self.state.shot_counter() + 1;
        let mut evicted = 0;

        let (program, report) = match self.config.mode {
            Mode::Incremental => {
                if let Some(e) = self.config.eviction {
                    let t = Instant::now();
                    evicted = evict(&mut self.state, e.policy, e.budget).map_err(EngineError::Config)?;
                    timings.evict = t.elapsed();
                }
                let report = self
                    .grounder
                    .ground_incremental(&mut self.state, facts, &mut self.interner)
                    .map_err(|source| EngineError::Grounding { shot, source })?;
                timings.ground = report.elapsed;
                let t = Instant::now();
                let projected = self.grounder.project_for_shot(&mut self.state, facts, &mut self.interner);
                timings.project = t.elapsed();
                (projected, report)
            }
            Mode::Scratch => {
                let (grounded, report) = self
                    .grounder
                    .ground_from_scratch_with_report(facts, &mut self.interner)
                    .map_err(|source| EngineError::Grounding { shot, source })?;
                timings.ground = report.elapsed;
                self.state.shot_counter += 1;
                (grounded, report)
            }
        };
        self.finish(shot, program, report, evicted, timings, start)
    }

    fn finish(
        &mut self,
        shot: u64,
        program: GroundProgram,
        grounding: GroundingReport,
        evicted: usize,
        mut timings: StageTimings,
        start: Instant,
    ) -> Result<ShotResult, EngineError> {
        let t = Instant::now();
        let solved = solve(&program, self.config.max_models);
        timings.solve = t.elapsed();

        if self.config.oracle_check {
            let oracle = brute_force_answer_sets(&program, self.config.oracle_limit)
                .map_err(|source| EngineError::Oracle { shot, source })?;
            let mine: BTreeSet<AnswerSet> = solved.answer_sets.iter().cloned().collect();
            let complete = solved.exhausted;
            let agree = if complete { mine == oracle } else { mine.is_subset(&oracle) };
            if !agree {
                let show = |s: &BTreeSet<AnswerSet>| s.iter().map(|a| a.render(&self.interner)).collect::<Vec<_>>();
                return Err(EngineError::OracleMismatch {
                    shot,
                    solver_only: show(&mine.difference(&oracle).cloned().collect()),
                    oracle_only: show(&oracle.difference(&mine).cloned().collect()),
                });
            }
        }

        let rendered = solved.answer_sets.iter().map(|a| a.render(&self.interner)).collect();
        Ok(ShotResult {
            shot_index: shot,
            answer_sets: solved.answer_sets,
            rendered,
            exhausted: solved.exhausted,
            grounding,
            evicted,
            solved_rules: program.rules.len(),
            solve_stats: solved.stats,
            timings,
            wall_time_total: start.elapsed(),
        })
    }
}

#[cfg(test)]
mod tests;
