use serde::Serialize;

use crate::model::{FactSet, NonGroundProgram};

use super::{EngineError, Mode, Session, SessionConfig};

fn micros(d: std::time::Duration) -> f64 {
    d.as_secs_f64() * 1e6
}

#[derive(Debug, Clone, Serialize)]
pub struct ShotComparison {
    pub shot: u64,
    pub answer_sets: usize,
    pub incremental_ground_us: f64,
    pub scratch_ground_us: f64,
    pub incremental_total_us: f64,
    pub scratch_total_us: f64,
    pub new_rules: usize,
    pub cache_size_rules: usize,
    pub cache_size_bytes_estimate: usize,
    pub scratch_rules: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub shots: usize,
    pub answer_sets_equal: bool,
    pub incremental_ground_us: f64,
    pub scratch_ground_us: f64,
    pub incremental_total_us: f64,
    pub scratch_total_us: f64,
    /// Incremental grounding time over scratch grounding time.
    pub ground_ratio: f64,
    pub per_shot: Vec<ShotComparison>,
}

/// Runs every shot through an incremental and a scratch session, shot by
/// shot, and fails at the first shot whose answer sets differ.
///
/// Grounding time is the grounding stage only; projection and solving are
/// in the totals.
pub fn compare_modes(
    program: &NonGroundProgram,
    shots: &[FactSet],
    base: &SessionConfig,
) -> Result<ComparisonReport, EngineError> {
    let mut inc = Session::new(program.clone(), SessionConfig { mode: Mode::Incremental, ..base.clone() })?;
    let mut scr = Session::new(program.clone(), SessionConfig { mode: Mode::Scratch, ..base.clone() })?;

    let mut per_shot = Vec::with_capacity(shots.len());
    for facts in shots {
        let a = inc.process_shot(facts)?;
        let b = scr.process_shot(facts)?;
        let (sa, sb) = (a.answer_set_texts(), b.answer_set_texts());
        if sa != sb {
            return Err(EngineError::ModeMismatch {
                shot: a.shot_index,
                incremental_only: sa.difference(&sb).cloned().collect(),
                scratch_only: sb.difference(&sa).cloned().collect(),
            });
        }
        per_shot.push(ShotComparison {
            shot: a.shot_index,
            answer_sets: sa.len(),
            incremental_ground_us: micros(a.timings.ground),
            scratch_ground_us: micros(b.timings.ground),
            incremental_total_us: micros(a.wall_time_total),
            scratch_total_us: micros(b.wall_time_total),
            new_rules: a.grounding.new_rules,
            cache_size_rules: a.grounding.cache_size_rules,
            cache_size_bytes_estimate: a.grounding.cache_size_bytes_estimate,
            scratch_rules: b.solved_rules,
        });
    }

    let sum = |f: fn(&ShotComparison) -> f64| per_shot.iter().map(f).sum::<f64>();
    let incremental_ground_us = sum(|s| s.incremental_ground_us);
    let scratch_ground_us = sum(|s| s.scratch_ground_us);
    Ok(ComparisonReport {
        shots: per_shot.len(),
        answer_sets_equal: true,
        incremental_ground_us,
        scratch_ground_us,
        incremental_total_us: sum(|s| s.incremental_total_us),
        scratch_total_us: sum(|s| s.scratch_total_us),
        ground_ratio: if scratch_ground_us > 0.0 { incremental_ground_us / scratch_ground_us } else { 0.0 },
        per_shot,
    })
}
