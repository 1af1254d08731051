use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::model::{GroundAtomId, GroundRule};

use super::domain::Domain;

/// Bytes per atom slot in the cache size estimate.
pub const ID_WIDTH: usize = std::mem::size_of::<GroundAtomId>();

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleMeta {
    pub shot_added: u64,
    pub trigger_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CachedRule {
    pub rule: GroundRule,
    pub meta: RuleMeta,
}

/// The overgrounded program: every ground rule instantiated so far, never
/// simplified, together with the instantiation domain it was built over.
#[derive(Debug, Clone, Default)]
pub struct OvergroundedState {
    pub(crate) rules: BTreeMap<u64, CachedRule>,
    pub(crate) lookup: HashMap<GroundRule, u64>,
    pub(crate) next_rule_id: u64,
    pub(crate) domain: Domain,
    /// Program rule indices whose single positive-body-free instance has
    /// already been emitted.
    pub(crate) once: BTreeSet<usize>,
    pub(crate) shot_counter: u64,
    /// Set by eviction: the next shot re-derives from its full fact set.
    pub(crate) reseed_full: bool,
}

impl OvergroundedState {
    pub fn new() -> Self {
        OvergroundedState::default()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn shot_counter(&self) -> u64 {
        self.shot_counter
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn once_flags(&self) -> &BTreeSet<usize> {
        &self.once
    }

    pub fn needs_full_reseed(&self) -> bool {
        self.reseed_full
    }

    pub fn contains(&self, rule: &GroundRule) -> bool {
        self.lookup.contains_key(rule)
    }

    /// Cached rules in rule-id (insertion) order.
    pub fn rules(&self) -> impl Iterator<Item = &CachedRule> {
        self.rules.values()
    }

    pub fn rule_set(&self) -> BTreeSet<GroundRule> {
        self.rules.values().map(|c| c.rule.clone()).collect()
    }

    pub fn size_bytes_estimate(&self) -> usize {
        self.rules.values().map(|c| c.rule.width() * ID_WIDTH).sum()
    }

    /// Adds a rule unless a structurally equal one is cached.
    pub(crate) fn insert(&mut self, rule: GroundRule, shot: u64) -> bool {
        if self.lookup.contains_key(&rule) {
            return false;
        }
        let id = self.next_rule_id;
        self.next_rule_id += 1;
        self.lookup.insert(rule.clone(), id);
        self.rules.insert(id, CachedRule { rule, meta: RuleMeta { shot_added: shot, trigger_count: 0 } });
        true
    }

    pub(crate) fn remove(&mut self, id: u64) -> Option<CachedRule> {
        let c = self.rules.remove(&id)?;
        self.lookup.remove(&c.rule);
        Some(c)
    }
}
