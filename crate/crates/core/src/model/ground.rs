use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::rule::{Atom, Predicate};
use super::term::{Symbol, Term, Value};
use super::ModelError;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub predicate: Symbol,
    pub args: Vec<Value>,
}

impl GroundAtom {
    pub fn new(predicate: impl Into<Symbol>, args: Vec<Value>) -> Self {
        GroundAtom { predicate: predicate.into(), args }
    }

    pub fn signature(&self) -> Predicate {
        Predicate { name: self.predicate.clone(), arity: self.args.len() }
    }

    pub fn to_atom(&self) -> Atom {
        Atom::new(self.predicate.clone(), self.args.iter().cloned().map(Term::from).collect())
    }
}

impl TryFrom<&Atom> for GroundAtom {
    type Error = ModelError;

    fn try_from(atom: &Atom) -> Result<Self, ModelError> {
        let args = atom
            .args
            .iter()
            .map(|t| t.as_value().ok_or_else(|| ModelError::NonGround(atom.to_string())))
            .collect::<Result<_, _>>()?;
        Ok(GroundAtom { predicate: atom.predicate.clone(), args })
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, arg) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{arg}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Dense handle for an interned ground atom. The first atom gets id 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtomId(pub u32);

impl GroundAtomId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for GroundAtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Session-owned bijection between ground atoms and ids.
#[derive(Debug, Clone, Default)]
pub struct Interner {
    ids: HashMap<GroundAtom, GroundAtomId>,
    // atoms[0] is unused so that ids index directly.
    atoms: Vec<GroundAtom>,
}

impl Interner {
    pub fn new() -> Self {
        Interner::default()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn intern(&mut self, atom: GroundAtom) -> GroundAtomId {
        if let Some(&id) = self.ids.get(&atom) {
            return id;
        }
        if self.atoms.is_empty() {
            self.atoms.push(GroundAtom::new("", Vec::new()));
        }
        let id = GroundAtomId(self.atoms.len() as u32);
        self.atoms.push(atom.clone());
        self.ids.insert(atom, id);
        id
    }

    /// Interns a syntactic atom; fails if it mentions a variable or arithmetic.
    pub fn intern_atom(&mut self, atom: &Atom) -> Result<GroundAtomId, ModelError> {
        Ok(self.intern(GroundAtom::try_from(atom)?))
    }

    pub fn get(&self, atom: &GroundAtom) -> Option<GroundAtomId> {
        self.ids.get(atom).copied()
    }

    pub fn resolve(&self, id: GroundAtomId) -> &GroundAtom {
        &self.atoms[id.index()]
    }

    pub fn contains_id(&self, id: GroundAtomId) -> bool {
        id.0 >= 1 && id.index() < self.atoms.len()
    }

    /// All (id, atom) pairs in id order.
    pub fn iter(&self) -> impl Iterator<Item = (GroundAtomId, &GroundAtom)> {
        self.atoms.iter().enumerate().skip(1).map(|(i, a)| (GroundAtomId(i as u32), a))
    }
}

/// A propositional rule. Bodies are kept sorted and duplicate-free so that
/// structural equality is canonical.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundRule {
    pub head: Option<GroundAtomId>,
    pub positive: Vec<GroundAtomId>,
    pub negative: Vec<GroundAtomId>,
}

impl GroundRule {
    pub fn new(head: Option<GroundAtomId>, mut positive: Vec<GroundAtomId>, mut negative: Vec<GroundAtomId>) -> Self {
        positive.sort_unstable();
        positive.dedup();
        negative.sort_unstable();
        negative.dedup();
        GroundRule { head, positive, negative }
    }

    pub fn fact(head: GroundAtomId) -> Self {
        GroundRule { head: Some(head), positive: Vec::new(), negative: Vec::new() }
    }

    pub fn is_constraint(&self) -> bool {
        self.head.is_none()
    }

    pub fn atoms(&self) -> impl Iterator<Item = GroundAtomId> + '_ {
        self.head.iter().copied().chain(self.positive.iter().copied()).chain(self.negative.iter().copied())
    }

    /// Number of atom slots the rule occupies (head slot counted even when empty).
    pub fn width(&self) -> usize {
        1 + self.positive.len() + self.negative.len()
    }

    pub fn display<'a>(&'a self, interner: &'a Interner) -> DisplayRule<'a> {
        DisplayRule { rule: self, interner }
    }
}

pub struct DisplayRule<'a> {
    rule: &'a GroundRule,
    interner: &'a Interner,
}

impl fmt::Display for DisplayRule<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.rule;
        if let Some(h) = r.head {
            write!(f, "{}", self.interner.resolve(h))?;
        }
        if !r.positive.is_empty() || !r.negative.is_empty() {
            if r.head.is_some() {
                f.write_str(" ")?;
            }
            f.write_str(":- ")?;
            let pos = r.positive.iter().map(|&a| self.interner.resolve(a).to_string());
            let neg = r.negative.iter().map(|&a| format!("not {}", self.interner.resolve(a)));
            let body: Vec<String> = pos.chain(neg).collect();
            f.write_str(&body.join(", "))?;
        } else if r.head.is_none() {
            f.write_str(":-")?;
        }
        f.write_str(".")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundProgram {
    pub rules: Vec<GroundRule>,
    pub facts: BTreeSet<GroundAtomId>,
}

impl GroundProgram {
    /// Every atom mentioned by a fact or a rule.
    pub fn atoms(&self) -> BTreeSet<GroundAtomId> {
        let mut out = self.facts.clone();
        for r in &self.rules {
            out.extend(r.atoms());
        }
        out
    }

    pub fn is_positive(&self) -> bool {
        self.rules.iter().all(|r| r.negative.is_empty())
    }

    /// Rules and facts as text, one per line, in stored order (facts first).
    pub fn render(&self, interner: &Interner) -> String {
        let mut out = String::new();
        for &f in &self.facts {
            out.push_str(&format!("{}.\n", interner.resolve(f)));
        }
        for r in &self.rules {
            out.push_str(&format!("{}\n", r.display(interner)));
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AnswerSet {
    pub atoms: BTreeSet<GroundAtomId>,
}

impl AnswerSet {
    pub fn new(atoms: impl IntoIterator<Item = GroundAtomId>) -> Self {
        AnswerSet { atoms: atoms.into_iter().collect() }
    }

    pub fn contains(&self, id: GroundAtomId) -> bool {
        self.atoms.contains(&id)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Printed atoms in lexicographic order of their printed form.
    pub fn sorted_atoms(&self, interner: &Interner) -> Vec<String> {
        let mut v: Vec<String> = self.atoms.iter().map(|&a| interner.resolve(a).to_string()).collect();
        v.sort();
        v
    }

    /// Canonical one-line form `{a, b(1)}`.
    pub fn render(&self, interner: &Interner) -> String {
        format!("{{{}}}", self.sorted_atoms(interner).join(", "))
    }
}

/// One shot's input: a duplicate-free set of ground atoms.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct FactSet {
    atoms: BTreeSet<GroundAtom>,
}

impl FactSet {
    pub fn new() -> Self {
        FactSet::default()
    }

    pub fn insert(&mut self, atom: GroundAtom) -> bool {
        self.atoms.insert(atom)
    }

    pub fn contains(&self, atom: &GroundAtom) -> bool {
        self.atoms.contains(atom)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &GroundAtom> {
        self.atoms.iter()
    }

    /// Facts file text, one fact per line in sorted order.
    pub fn render(&self) -> String {
        self.atoms.iter().map(|a| format!("{a}.\n")).collect()
    }
}

impl FromIterator<GroundAtom> for FactSet {
    fn from_iter<I: IntoIterator<Item = GroundAtom>>(iter: I) -> Self {
        FactSet { atoms: iter.into_iter().collect() }
    }
}

impl<'a> IntoIterator for &'a FactSet {
    type Item = &'a GroundAtom;
    type IntoIter = std::collections::btree_set::Iter<'a, GroundAtom>;

    fn into_iter(self) -> Self::IntoIter {
        self.atoms.iter()
    }
}
