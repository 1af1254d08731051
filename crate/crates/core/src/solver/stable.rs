use std::collections::{BTreeSet, HashMap};

use crate::model::{AnswerSet, GroundAtomId, GroundProgram, GroundRule};

use super::SolverError;

/// Fixpoint of the immediate-consequence operator over definite rules.
/// `rules` yields (head, positive body) pairs; constraints are skipped by
/// the caller.
pub(crate) fn definite_closure<'a>(
    facts: impl IntoIterator<Item = GroundAtomId>,
    rules: impl IntoIterator<Item = (GroundAtomId, &'a [GroundAtomId])>,
) -> BTreeSet<GroundAtomId> {
    let mut heads = Vec::new();
    let mut missing = Vec::new();
    let mut watchers: HashMap<GroundAtomId, Vec<usize>> = HashMap::new();
    let mut model = BTreeSet::new();
    let mut queue: Vec<GroundAtomId> = Vec::new();

    for f in facts {
        if model.insert(f) {
            queue.push(f);
        }
    }
    for (head, body) in rules {
        let idx = heads.len();
        heads.push(head);
        missing.push(body.len());
        if body.is_empty() {
            if model.insert(head) {
                queue.push(head);
            }
        } else {
            for &b in body {
                watchers.entry(b).or_default().push(idx);
            }
        }
    }
    // Bodies are duplicate-free, so each (atom, rule) pair decrements once.
    while let Some(atom) = queue.pop() {
        let Some(rules) = watchers.get(&atom) else { continue };
        for &r in rules {
            missing[r] -= 1;
            if missing[r] == 0 && model.insert(heads[r]) {
                queue.push(heads[r]);
            }
        }
    }
    model
}

/// The least model of a program without default negation.
pub fn least_model(program: &GroundProgram) -> Result<AnswerSet, SolverError> {
    if let Some(r) = program.rules.iter().find(|r| !r.negative.is_empty()) {
        return Err(SolverError::NegationInPositiveProgram(format!("{r:?}")));
    }
    let rules = program.rules.iter().filter_map(|r| r.head.map(|h| (h, r.positive.as_slice())));
    Ok(AnswerSet { atoms: definite_closure(program.facts.iter().copied(), rules) })
}

fn blocked_by(rule: &GroundRule, candidate: &BTreeSet<GroundAtomId>) -> bool {
    rule.negative.iter().any(|a| candidate.contains(a))
}

/// Reduct-and-least-model stability test.
pub fn is_stable_model(program: &GroundProgram, candidate: &BTreeSet<GroundAtomId>) -> bool {
    if !program.facts.is_subset(candidate) {
        return false;
    }
    let violated = program
        .rules
        .iter()
        .any(|r| r.head.is_none() && r.positive.iter().all(|a| candidate.contains(a)) && !blocked_by(r, candidate));
    if violated {
        return false;
    }
    let reduct = program
        .rules
        .iter()
        .filter(|r| !blocked_by(r, candidate))
        .filter_map(|r| r.head.map(|h| (h, r.positive.as_slice())));
    definite_closure(program.facts.iter().copied(), reduct) == *candidate
}
