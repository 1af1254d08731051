//! Answer set enumeration.
//!
//! The main solver enumerates classical models of the program's Clark
//! completion with a deterministic DPLL search and keeps the ones that pass
//! the reduct stability test. Every total assignment it reaches, stable or
//! not, is excluded afterwards with a blocking clause. A brute-force subset
//! enumerator serves as a test oracle for small programs.

mod search;
mod stable;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::model::{AnswerSet, GroundAtomId, GroundProgram};

pub use search::{Completion, CompletionClause, Lit};
pub use stable::{is_stable_model, least_model};

use search::{Search, Step};

/// Default universe bound for [`brute_force_answer_sets`].
pub const ORACLE_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("least model requested for a program with negation: {0}")]
    NegationInPositiveProgram(String),
    #[error("oracle infeasible: {atoms} atoms exceed the limit of {limit}")]
    OracleInfeasible { atoms: usize, limit: usize },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    pub decisions: u64,
    pub propagations: u64,
    pub stability_rejections: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub answer_sets: Vec<AnswerSet>,
    /// False when enumeration stopped at `max_models` before proving there
    /// are no further answer sets.
    pub exhausted: bool,
    pub stats: SolveStats,
}

/// Enumerates the stable models of `program`, at most `max_models` of them
/// when a bound is given. Enumeration order is fixed by the branching rule
/// (lowest atom id first, true before false).
pub fn solve(program: &GroundProgram, max_models: Option<usize>) -> SolveResult {
    let start = Instant::now();
    let completion = Completion::build(program);
    let mut search = Search::new(&completion);
    let mut answer_sets = Vec::new();
    let mut rejections = 0;
    let mut exhausted = true;

    if max_models != Some(0) {
        while let Step::Model(values) = search.next_model() {
            let candidate: BTreeSet<GroundAtomId> =
                completion.atoms.iter().zip(&values).filter(|(_, &v)| v).map(|(&a, _)| a).collect();
            if is_stable_model(program, &candidate) {
                answer_sets.push(AnswerSet { atoms: candidate });
            } else {
                rejections += 1;
            }
            let blocking =
                values.iter().enumerate().map(|(v, &val)| if val { Lit::neg(v) } else { Lit::pos(v) }).collect();
            search.add_blocking_clause(blocking);
            if max_models.is_some_and(|m| answer_sets.len() >= m) {
                exhausted = false;
                break;
            }
        }
    } else {
        exhausted = false;
    }

    SolveResult {
        answer_sets,
        exhausted,
        stats: SolveStats {
            decisions: search.stats.decisions,
            propagations: search.stats.propagations,
            stability_rejections: rejections,
            elapsed: start.elapsed(),
        },
    }
}

/// Exhaustive stable model search over every superset of the facts within
/// the atom universe. Exponential; refuses universes above `limit` atoms.
pub fn brute_force_answer_sets(program: &GroundProgram, limit: usize) -> Result<BTreeSet<AnswerSet>, SolverError> {
    let universe = program.atoms();
    if universe.len() > limit {
        return Err(SolverError::OracleInfeasible { atoms: universe.len(), limit });
    }
    let free: Vec<GroundAtomId> = universe.iter().copied().filter(|a| !program.facts.contains(a)).collect();
    let mut out = BTreeSet::new();
    for mask in 0u64..(1u64 << free.len()) {
        let mut candidate = program.facts.clone();
        candidate.extend(free.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &a)| a));
        if is_stable_model(program, &candidate) {
            out.insert(AnswerSet { atoms: candidate });
        }
    }
    Ok(out)
}
