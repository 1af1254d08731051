//! Clause store and chronological DPLL used to enumerate the classical
//! models of a program's completion.

use std::collections::{BTreeSet, HashMap};

use crate::model::{GroundAtomId, GroundProgram};

use super::stable::definite_closure;

/// A propositional literal: variable index in the high bits, sign in bit 0
/// (set means negated).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn pos(var: usize) -> Lit {
        Lit((var as u32) << 1)
    }

    pub fn neg(var: usize) -> Lit {
        Lit(((var as u32) << 1) | 1)
    }

    pub fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_neg(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn negate(self) -> Lit {
        Lit(self.0 ^ 1)
    }

    fn code(self) -> usize {
        self.0 as usize
    }
}

/// A disjunction of literals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletionClause {
    pub lits: Vec<Lit>,
}

/// Completion of a ground program over a dense variable numbering: atom
/// variables come first, in id order, followed by one auxiliary variable per
/// rule body with two or more literals.
#[derive(Debug, Clone)]
pub struct Completion {
    pub atoms: Vec<GroundAtomId>,
    pub var_count: usize,
    pub clauses: Vec<CompletionClause>,
}

impl Completion {
    pub fn build(program: &GroundProgram) -> Self {
        let atoms: Vec<GroundAtomId> = program.atoms().into_iter().collect();
        let index: HashMap<GroundAtomId, usize> = atoms.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let mut var_count = atoms.len();
        let mut clauses = Vec::new();
        let mut support: Vec<Vec<Lit>> = vec![Vec::new(); atoms.len()];
        let mut is_fact = vec![false; atoms.len()];

        for f in &program.facts {
            let v = index[f];
            is_fact[v] = true;
            clauses.push(CompletionClause { lits: vec![Lit::pos(v)] });
        }

        for rule in &program.rules {
            let body: Vec<Lit> = rule
                .positive
                .iter()
                .map(|a| Lit::pos(index[a]))
                .chain(rule.negative.iter().map(|a| Lit::neg(index[a])))
                .collect();
            match rule.head {
                None => clauses.push(CompletionClause { lits: body.iter().map(|l| l.negate()).collect() }),
                Some(h) => {
                    let hv = index[&h];
                    match body.len() {
                        0 => {
                            is_fact[hv] = true;
                            clauses.push(CompletionClause { lits: vec![Lit::pos(hv)] });
                        }
                        1 => {
                            clauses.push(CompletionClause { lits: vec![body[0].negate(), Lit::pos(hv)] });
                            support[hv].push(body[0]);
                        }
                        _ => {
                            let aux = var_count;
                            var_count += 1;
                            for &l in &body {
                                clauses.push(CompletionClause { lits: vec![Lit::neg(aux), l] });
                            }
                            let mut def: Vec<Lit> = body.iter().map(|l| l.negate()).collect();
                            def.push(Lit::pos(aux));
                            clauses.push(CompletionClause { lits: def });
                            clauses.push(CompletionClause { lits: vec![Lit::neg(aux), Lit::pos(hv)] });
                            support[hv].push(Lit::pos(aux));
                        }
                    }
                }
            }
        }

        for (v, sup) in support.into_iter().enumerate() {
            if is_fact[v] {
                continue;
            }
            let mut lits = vec![Lit::neg(v)];
            lits.extend(sup);
            clauses.push(CompletionClause { lits });
        }

        // No stable model contains an atom outside the least model of the
        // program with negative literals dropped.
        let possible: BTreeSet<GroundAtomId> = definite_closure(
            program.facts.iter().copied(),
            program.rules.iter().filter_map(|r| r.head.map(|h| (h, r.positive.as_slice()))),
        );
        for (v, a) in atoms.iter().enumerate() {
            if !possible.contains(a) {
                clauses.push(CompletionClause { lits: vec![Lit::neg(v)] });
            }
        }

        Completion { atoms, var_count, clauses }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub decisions: u64,
    pub propagations: u64,
}

/// Outcome of advancing the search to its next total assignment.
pub enum Step {
    Model(Vec<bool>),
    Exhausted,
}

pub struct Search {
    atom_vars: usize,
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    value: Vec<Option<bool>>,
    level: Vec<usize>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    // One entry per open decision level: the decided literal and whether
    // it is already the second branch.
    decisions: Vec<(Lit, bool)>,
    qhead: usize,
    unsat: bool,
    pending_conflict: bool,
    pub stats: SearchStats,
}

impl Search {
    pub fn new(completion: &Completion) -> Self {
        let n = completion.var_count;
        let mut s = Search {
            atom_vars: completion.atoms.len(),
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * n],
            value: vec![None; n],
            level: vec![0; n],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            decisions: Vec::new(),
            qhead: 0,
            unsat: false,
            pending_conflict: false,
            stats: SearchStats::default(),
        };
        for c in &completion.clauses {
            s.add_root_clause(c.lits.clone());
        }
        s
    }

    fn lit_value(&self, l: Lit) -> Option<bool> {
        self.value[l.var()].map(|v| v != l.is_neg())
    }

    fn assign(&mut self, l: Lit) {
        self.value[l.var()] = Some(!l.is_neg());
        self.level[l.var()] = self.decisions.len();
        self.trail.push(l);
    }

    fn add_root_clause(&mut self, mut lits: Vec<Lit>) {
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0].var() == w[1].var()) {
            return; // tautology
        }
        match lits.len() {
            0 => self.unsat = true,
            1 => match self.lit_value(lits[0]) {
                Some(true) => {}
                Some(false) => self.unsat = true,
                None => self.assign(lits[0]),
            },
            _ => {
                let idx = self.clauses.len();
                self.watches[lits[0].negate().code()].push(idx);
                self.watches[lits[1].negate().code()].push(idx);
                self.clauses.push(lits);
            }
        }
    }

    /// Adds a clause falsified by the current total assignment and marks
    /// the search for backtracking. Watches go to the two deepest literals
    /// so that the clause becomes active again once the search leaves them.
    pub fn add_blocking_clause(&mut self, mut lits: Vec<Lit>) {
        if lits.is_empty() {
            self.unsat = true;
            return;
        }
        lits.sort_by_key(|l| std::cmp::Reverse(self.level[l.var()]));
        if lits.len() == 1 {
            // Only reachable with a single atom variable; handled as a root
            // unit after backtracking.
            let idx = self.clauses.len();
            self.watches[lits[0].negate().code()].push(idx);
            self.clauses.push(vec![lits[0], lits[0]]);
        } else {
            let idx = self.clauses.len();
            self.watches[lits[0].negate().code()].push(idx);
            self.watches[lits[1].negate().code()].push(idx);
            self.clauses.push(lits);
        }
        self.pending_conflict = true;
    }

    /// Unit propagation; returns false on conflict.
    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = p.negate();
            let mut watchers = std::mem::take(&mut self.watches[p.code()]);
            let mut i = 0;
            let mut conflict = false;
            while i < watchers.len() {
                let ci = watchers[i];
                let clause = &mut self.clauses[ci];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let other = clause[0];
                let other_val = self.value[other.var()].map(|v| v != other.is_neg());
                if other_val == Some(true) {
                    i += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..clause.len() {
                    let l = clause[k];
                    if self.value[l.var()].map(|v| v != l.is_neg()) != Some(false) {
                        clause.swap(1, k);
                        let new_watch = clause[1].negate().code();
                        self.watches[new_watch].push(ci);
                        watchers.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                i += 1;
                match other_val {
                    None => {
                        self.stats.propagations += 1;
                        self.assign(other);
                    }
                    _ => {
                        conflict = true;
                        break;
                    }
                }
            }
            let restored = std::mem::replace(&mut self.watches[p.code()], watchers);
            self.watches[p.code()].extend(restored);
            if conflict {
                return false;
            }
        }
        true
    }

    fn undo_to(&mut self, level: usize) {
        let keep = self.trail_lim[level];
        for l in self.trail.drain(keep..) {
            self.value[l.var()] = None;
        }
        self.trail_lim.truncate(level);
        self.decisions.truncate(level);
        self.qhead = keep;
    }

    /// Flips the deepest decision that has not been flipped yet.
    fn backtrack(&mut self) -> bool {
        while let Some(&(lit, flipped)) = self.decisions.last() {
            let lvl = self.decisions.len() - 1;
            self.undo_to(lvl);
            if !flipped {
                self.trail_lim.push(self.trail.len());
                self.decisions.push((lit.negate(), true));
                self.assign(lit.negate());
                return true;
            }
        }
        false
    }

    fn next_unassigned_atom(&self) -> Option<usize> {
        (0..self.atom_vars).find(|&v| self.value[v].is_none())
    }

    /// Runs until the next total assignment of the atom variables or
    /// exhaustion. Branches on the lowest unassigned atom, true first.
    pub fn next_model(&mut self) -> Step {
        if self.unsat {
            return Step::Exhausted;
        }
        if std::mem::take(&mut self.pending_conflict) && !self.backtrack() {
            self.unsat = true;
            return Step::Exhausted;
        }
        loop {
            if !self.propagate() {
                if !self.backtrack() {
                    self.unsat = true;
                    return Step::Exhausted;
                }
                continue;
            }
            match self.next_unassigned_atom() {
                Some(v) => {
                    self.stats.decisions += 1;
                    self.trail_lim.push(self.trail.len());
                    self.decisions.push((Lit::pos(v), false));
                    self.assign(Lit::pos(v));
                }
                None => {
                    let model = (0..self.atom_vars).map(|v| self.value[v] == Some(true)).collect();
                    return Step::Model(model);
                }
            }
        }
    }
}
