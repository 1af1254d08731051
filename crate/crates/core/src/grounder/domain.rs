use std::collections::{HashMap, HashSet};

use crate::model::{GroundAtom, GroundAtomId, Predicate, Value};

/// A set of ground atoms indexed by predicate and by (predicate, argument
/// position, value) for joins. Index lists are kept in ascending id order so
/// that join order depends only on the set's contents.
#[derive(Debug, Clone, Default)]
pub struct Domain {
    members: HashSet<GroundAtomId>,
    by_pred: HashMap<Predicate, Vec<GroundAtomId>>,
    by_arg: HashMap<(Predicate, usize, Value), Vec<GroundAtomId>>,
}

impl Domain {
    pub fn new() -> Self {
        Domain::default()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, id: GroundAtomId) -> bool {
        self.members.contains(&id)
    }

    /// Returns false if the atom was already present.
    pub fn insert(&mut self, id: GroundAtomId, atom: &GroundAtom) -> bool {
        if !self.members.insert(id) {
            return false;
        }
        let pred = atom.signature();
        for (pos, v) in atom.args.iter().enumerate() {
            insert_sorted(self.by_arg.entry((pred.clone(), pos, v.clone())).or_default(), id);
        }
        insert_sorted(self.by_pred.entry(pred).or_default(), id);
        true
    }

    pub fn has_predicate(&self, pred: &Predicate) -> bool {
        self.by_pred.get(pred).is_some_and(|v| !v.is_empty())
    }

    pub fn of_predicate(&self, pred: &Predicate) -> &[GroundAtomId] {
        self.by_pred.get(pred).map_or(&[], Vec::as_slice)
    }

    /// Atoms of `pred` whose argument at `pos` equals `value`.
    pub fn with_arg(&self, pred: &Predicate, pos: usize, value: &Value) -> &[GroundAtomId] {
        self.by_arg.get(&(pred.clone(), pos, value.clone())).map_or(&[], Vec::as_slice)
    }

    /// Members in ascending id order.
    pub fn sorted(&self) -> Vec<GroundAtomId> {
        let mut v: Vec<GroundAtomId> = self.members.iter().copied().collect();
        v.sort_unstable();
        v
    }

    pub fn clear(&mut self) {
        self.members.clear();
        self.by_pred.clear();
        self.by_arg.clear();
    }
}

fn insert_sorted(list: &mut Vec<GroundAtomId>, id: GroundAtomId) {
    match list.last() {
        Some(&last) if last > id => {
            let at = list.partition_point(|&x| x < id);
            list.insert(at, id);
        }
        _ => list.push(id),
    }
}
