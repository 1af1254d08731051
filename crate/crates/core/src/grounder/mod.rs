//! Bottom-up instantiation of a non-ground program.
//!
//! The same semi-naive saturation serves both grounding modes. From
//! scratch, it starts from an empty domain and the shot's facts. In
//! incremental mode it resumes from the overgrounded state, seeding only
//! the facts not yet in the domain, and appends every new instance to the
//! cache. Cached rules are never simplified: negative literals are kept and
//! never restrict instantiation, so the cache stays valid for any later
//! fact set. Simplification against a concrete shot happens only in
//! [`Grounder::project_for_shot`], which builds a transient program for the
//! solver.

mod domain;
mod instantiate;
mod state;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::model::{
    EvalError, FactSet, GroundAtomId, GroundProgram, GroundRule, Interner, NonGroundProgram, PredicateDependencyGraph,
    Rule, Substitution,
};

pub use domain::Domain;
pub use instantiate::{instantiate_rule_seminaive, Instances};
pub use state::{CachedRule, OvergroundedState, RuleMeta, ID_WIDTH};

use instantiate::ground_with;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroundingError {
    #[error("while grounding `{rule}` with {substitution}: {source}")]
    Eval {
        rule: String,
        substitution: String,
        #[source]
        source: EvalError,
    },
    #[error("budget infeasible: {0}")]
    BudgetInfeasible(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GroundingReport {
    pub new_rules: usize,
    pub new_domain_atoms: usize,
    pub rule_firings_attempted: usize,
    #[serde(skip)]
    pub elapsed: Duration,
    pub cache_size_rules: usize,
    pub cache_size_bytes_estimate: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvictionPolicy {
    Oldest,
    LeastTriggered,
}

impl FromStr for EvictionPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "oldest" => Ok(EvictionPolicy::Oldest),
            "least-triggered" | "least_triggered" => Ok(EvictionPolicy::LeastTriggered),
            other => Err(format!("unknown eviction policy `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    Rules(usize),
    Bytes(usize),
}

impl Budget {
    /// Rejects budgets that cannot hold even one rule.
    pub fn validate(self) -> Result<(), GroundingError> {
        match self {
            Budget::Rules(0) => Err(GroundingError::BudgetInfeasible("a rule budget must be at least 1".into())),
            Budget::Bytes(b) if b < ID_WIDTH => {
                Err(GroundingError::BudgetInfeasible(format!("a byte budget must be at least {ID_WIDTH}")))
            }
            _ => Ok(()),
        }
    }

    fn satisfied_by(self, state: &OvergroundedState) -> bool {
        match self {
            Budget::Rules(n) => state.len() <= n,
            Budget::Bytes(b) => state.size_bytes_estimate() <= b,
        }
    }
}

/// Rule indices grouped by dependency component, in evaluation order.
#[derive(Debug, Clone)]
struct Plan {
    strata: Vec<Vec<usize>>,
    constraints: Vec<usize>,
}

impl Plan {
    fn new(program: &NonGroundProgram, graph: &PredicateDependencyGraph) -> Self {
        let mut strata = vec![Vec::new(); graph.components.len()];
        let mut constraints = Vec::new();
        for (i, rule) in program.rules.iter().enumerate() {
            match &rule.head {
                Some(h) => strata[graph.component_of(&h.signature()).expect("head predicate in graph")].push(i),
                None => constraints.push(i),
            }
        }
        strata.retain(|s| !s.is_empty());
        Plan { strata, constraints }
    }
}

fn record(head: Option<GroundAtomId>, interner: &Interner, domain: &mut Domain, fresh: &mut Domain) {
    if let Some(h) = head {
        let atom = interner.resolve(h);
        if domain.insert(h, atom) {
            fresh.insert(h, atom);
        }
    }
}

#[derive(Debug, Default)]
struct SaturationStats {
    new_atoms: usize,
    attempts: usize,
}

/// A non-ground program prepared for repeated instantiation.
#[derive(Debug, Clone)]
pub struct Grounder {
    program: NonGroundProgram,
    graph: PredicateDependencyGraph,
    plan: Plan,
}

impl Grounder {
    pub fn new(program: NonGroundProgram) -> Self {
        let graph = PredicateDependencyGraph::build(&program);
        let plan = Plan::new(&program, &graph);
        Grounder { program, graph, plan }
    }

    pub fn program(&self) -> &NonGroundProgram {
        &self.program
    }

    pub fn graph(&self) -> &PredicateDependencyGraph {
        &self.graph
    }

    fn has_positive_atom(rule: &Rule) -> bool {
        rule.positive_atoms().next().is_some()
    }

    fn pending_once_rules(&self, once: &BTreeSet<usize>) -> bool {
        self.program.rules.iter().enumerate().any(|(i, r)| !Self::has_positive_atom(r) && !once.contains(&i))
    }

    /// Semi-naive saturation of `domain` from `seed`. Every rule instance
    /// whose positive body lies in the final domain and uses at least one
    /// atom added by this call is passed to `emit`.
    fn saturate(
        &self,
        interner: &mut Interner,
        domain: &mut Domain,
        once: &mut BTreeSet<usize>,
        seed: &[GroundAtomId],
        emit: &mut dyn FnMut(GroundRule),
    ) -> Result<SaturationStats, GroundingError> {
        let mut stats = SaturationStats::default();
        let mut added = Domain::new();
        for &id in seed {
            let atom = interner.resolve(id);
            if domain.insert(id, atom) {
                added.insert(id, atom);
            }
        }

        let strata = self.plan.strata.iter().map(|s| (s, true)).chain(std::iter::once((&self.plan.constraints, false)));
        for (rules, iterate) in strata {
            let mut fresh = Domain::new();

            for &ri in rules {
                let rule = &self.program.rules[ri];
                if Self::has_positive_atom(rule) || !once.insert(ri) {
                    continue;
                }
                stats.attempts += 1;
                if let Some(g) = ground_with(rule, &Substitution::new(), interner)? {
                    record(g.head, interner, domain, &mut fresh);
                    emit(g);
                }
            }

            let mut delta_is_added = true;
            let mut delta = Domain::new();
            loop {
                for &ri in rules {
                    let rule = &self.program.rules[ri];
                    if !Self::has_positive_atom(rule) {
                        continue;
                    }
                    let d = if delta_is_added { &added } else { &delta };
                    let out = instantiate_rule_seminaive(rule, domain, d, interner)?;
                    stats.attempts += out.attempts;
                    for g in out.rules {
                        record(g.head, interner, domain, &mut fresh);
                        emit(g);
                    }
                }
                for id in fresh.sorted() {
                    added.insert(id, interner.resolve(id));
                }
                if !iterate || fresh.is_empty() {
                    break;
                }
                delta = std::mem::take(&mut fresh);
                delta_is_added = false;
            }
        }
        stats.new_atoms = added.len();
        Ok(stats)
    }

    fn intern_facts(facts: &FactSet, interner: &mut Interner) -> Vec<GroundAtomId> {
        facts.iter().map(|a| interner.intern(a.clone())).collect()
    }

    /// Instantiates the program for one fact set, independent of any cache.
    /// Rules with an empty body become facts.
    pub fn ground_from_scratch(
        &self,
        facts: &FactSet,
        interner: &mut Interner,
    ) -> Result<GroundProgram, GroundingError> {
        self.ground_from_scratch_with_report(facts, interner).map(|(g, _)| g)
    }

    /// [`Grounder::ground_from_scratch`] plus the work it did. Every rule
    /// counts as new; the cache fields stay zero.
    pub fn ground_from_scratch_with_report(
        &self,
        facts: &FactSet,
        interner: &mut Interner,
    ) -> Result<(GroundProgram, GroundingReport), GroundingError> {
        let start = Instant::now();
        let seed = Self::intern_facts(facts, interner);
        let mut domain = Domain::new();
        let mut once = BTreeSet::new();
        let mut seen = HashSet::new();
        let mut rules = Vec::new();
        let mut emit = |g: GroundRule| {
            if seen.insert(g.clone()) {
                rules.push(g);
            }
        };
        let stats = self.saturate(interner, &mut domain, &mut once, &seed, &mut emit)?;

        let report = GroundingReport {
            new_rules: rules.len(),
            new_domain_atoms: stats.new_atoms,
            rule_firings_attempted: stats.attempts,
            ..GroundingReport::default()
        };
        let mut out = GroundProgram { rules: Vec::new(), facts: seed.into_iter().collect() };
        for r in rules {
            match r.head {
                Some(h) if r.positive.is_empty() && r.negative.is_empty() => {
                    out.facts.insert(h);
                }
                _ => out.rules.push(r),
            }
        }
        Ok((out, GroundingReport { elapsed: start.elapsed(), ..report }))
    }

    /// Grounds the next shot into the overgrounded cache.
    pub fn ground_incremental(
        &self,
        state: &mut OvergroundedState,
        facts: &FactSet,
        interner: &mut Interner,
    ) -> Result<GroundingReport, GroundingError> {
        let start = Instant::now();
        state.shot_counter += 1;
        let shot = state.shot_counter;
        let all = Self::intern_facts(facts, interner);
        let seed: Vec<GroundAtomId> = if std::mem::take(&mut state.reseed_full) {
            all
        } else {
            all.into_iter().filter(|&id| !state.domain.contains(id)).collect()
        };

        let mut report = GroundingReport::default();
        if !seed.is_empty() || self.pending_once_rules(&state.once) {
            let mut new_rules = 0;
            let mut fresh_rules = Vec::new();
            let mut domain = std::mem::take(&mut state.domain);
            let mut once = std::mem::take(&mut state.once);
            let result = {
                let mut emit = |g: GroundRule| fresh_rules.push(g);
                self.saturate(interner, &mut domain, &mut once, &seed, &mut emit)
            };
            state.domain = domain;
            state.once = once;
            let stats = result?;
            for g in fresh_rules {
                if state.insert(g, shot) {
                    new_rules += 1;
                }
            }
            report.new_rules = new_rules;
            report.new_domain_atoms = stats.new_atoms;
            report.rule_firings_attempted = stats.attempts;
        }
        report.cache_size_rules = state.len();
        report.cache_size_bytes_estimate = state.size_bytes_estimate();
        report.elapsed = start.elapsed();
        Ok(report)
    }

    /// Simplifies the cache against one shot's facts without touching it.
    /// Only input-predicate literals are decided: a rule is dropped when a
    /// positive input atom is absent or a negated one is present, and
    /// satisfied input literals are deleted. Surviving rules have their
    /// trigger count bumped.
    pub fn project_for_shot(
        &self,
        state: &mut OvergroundedState,
        facts: &FactSet,
        interner: &mut Interner,
    ) -> GroundProgram {
        let fact_ids: BTreeSet<GroundAtomId> = Self::intern_facts(facts, interner).into_iter().collect();
        let mut input_memo: HashMap<GroundAtomId, bool> = HashMap::new();
        let mut is_input = |id: GroundAtomId| {
            *input_memo.entry(id).or_insert_with(|| self.program.is_input(&interner.resolve(id).signature()))
        };

        let mut seen = HashSet::new();
        let mut rules = Vec::new();
        for cached in state.rules.values_mut() {
            let r = &cached.rule;
            let mut positive = Vec::with_capacity(r.positive.len());
            let mut negative = Vec::with_capacity(r.negative.len());
            let mut dropped = false;
            for &a in &r.positive {
                if is_input(a) {
                    if !fact_ids.contains(&a) {
                        dropped = true;
                        break;
                    }
                } else {
                    positive.push(a);
                }
            }
            if dropped {
                continue;
            }
            for &a in &r.negative {
                if is_input(a) {
                    if fact_ids.contains(&a) {
                        dropped = true;
                        break;
                    }
                } else {
                    negative.push(a);
                }
            }
            if dropped {
                continue;
            }
            cached.meta.trigger_count += 1;
            let simplified = GroundRule { head: r.head, positive, negative };
            if seen.insert(simplified.clone()) {
                rules.push(simplified);
            }
        }
        GroundProgram { rules, facts: fact_ids }
    }
}

/// Shrinks the cache to `budget`, dropping the lowest-ranked rules first:
/// smallest `shot_added` for [`EvictionPolicy::Oldest`], smallest
/// `trigger_count` for [`EvictionPolicy::LeastTriggered`], ties by rule id.
///
/// After any eviction the domain and once-flags are reset and the next
/// shot is grounded from its full fact set, so evicted instances come back
/// whenever that shot needs them.
pub fn evict(state: &mut OvergroundedState, policy: EvictionPolicy, budget: Budget) -> Result<usize, GroundingError> {
    budget.validate()?;
    if budget.satisfied_by(state) {
        return Ok(0);
    }
    let mut ranked: Vec<(u64, u64)> = state
        .rules
        .iter()
        .map(|(&id, c)| {
            let key = match policy {
                EvictionPolicy::Oldest => c.meta.shot_added,
                EvictionPolicy::LeastTriggered => c.meta.trigger_count,
            };
            (key, id)
        })
        .collect();
    ranked.sort_unstable();
    let mut evicted = 0;
    for (_, id) in ranked {
        if budget.satisfied_by(state) {
            break;
        }
        state.remove(id);
        evicted += 1;
    }
    if evicted > 0 {
        state.domain.clear();
        state.once.clear();
        state.reseed_full = true;
    }
    Ok(evicted)
}

pub fn ground_from_scratch(
    program: &NonGroundProgram,
    facts: &FactSet,
    interner: &mut Interner,
) -> Result<GroundProgram, GroundingError> {
    Grounder::new(program.clone()).ground_from_scratch(facts, interner)
}

#[cfg(test)]
mod tests;
