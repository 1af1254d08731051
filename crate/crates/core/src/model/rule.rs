use std::collections::BTreeSet;
use std::fmt;

use super::term::{Symbol, Term};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Predicate {
    pub name: Symbol,
    pub arity: usize,
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub predicate: Symbol,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<Symbol>, args: Vec<Term>) -> Self {
        Atom { predicate: predicate.into(), args }
    }

    pub fn signature(&self) -> Predicate {
        Predicate { name: self.predicate.clone(), arity: self.args.len() }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn collect_vars<'a>(&'a self, out: &mut Vec<&'a Symbol>) {
        for arg in &self.args {
            arg.collect_vars(out);
        }
    }
}

impl fmt::Display for Atom {
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

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn as_str(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Literal {
    Pos(Atom),
    /// Default negation (`not a`).
    Neg(Atom),
    Cmp(CmpOp, Term, Term),
}

impl Literal {
    pub fn collect_vars<'a>(&'a self, out: &mut Vec<&'a Symbol>) {
        match self {
            Literal::Pos(a) | Literal::Neg(a) => a.collect_vars(out),
            Literal::Cmp(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Pos(a) => write!(f, "{a}"),
            Literal::Neg(a) => write!(f, "not {a}"),
            Literal::Cmp(op, l, r) => write!(f, "{l}{}{r}", op.as_str()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    /// `None` for an integrity constraint.
    pub head: Option<Atom>,
    pub body: Vec<Literal>,
}

impl Rule {
    pub fn is_fact(&self) -> bool {
        self.body.is_empty() && self.head.as_ref().is_some_and(Atom::is_ground)
    }

    pub fn positive_atoms(&self) -> impl Iterator<Item = &Atom> {
        self.body.iter().filter_map(|l| match l {
            Literal::Pos(a) => Some(a),
            _ => None,
        })
    }

    pub fn negative_atoms(&self) -> impl Iterator<Item = &Atom> {
        self.body.iter().filter_map(|l| match l {
            Literal::Neg(a) => Some(a),
            _ => None,
        })
    }

    pub fn comparisons(&self) -> impl Iterator<Item = &Literal> {
        self.body.iter().filter(|l| matches!(l, Literal::Cmp(..)))
    }

    /// Variables that occur in the rule but in no positive body atom,
    /// in order of first occurrence.
    pub fn unsafe_vars(&self) -> Vec<Symbol> {
        let mut bound = Vec::new();
        for atom in self.positive_atoms() {
            atom.collect_vars(&mut bound);
        }
        let mut all = Vec::new();
        if let Some(h) = &self.head {
            h.collect_vars(&mut all);
        }
        for lit in &self.body {
            lit.collect_vars(&mut all);
        }
        let mut out: Vec<Symbol> = Vec::new();
        for v in all {
            if !bound.contains(&v) && !out.contains(v) {
                out.push(v.clone());
            }
        }
        out
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(h) = &self.head {
            write!(f, "{h}")?;
            if !self.body.is_empty() {
                f.write_str(" ")?;
            }
        }
        if !self.body.is_empty() {
            f.write_str(":- ")?;
            for (i, lit) in self.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{lit}")?;
            }
        }
        f.write_str(".")
    }
}

/// A safe non-ground program. Input predicates are computed: those that
/// occur in no rule head.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonGroundProgram {
    pub rules: Vec<Rule>,
    input_predicates: BTreeSet<Predicate>,
    head_predicates: BTreeSet<Predicate>,
}

impl NonGroundProgram {
    pub fn new(rules: Vec<Rule>) -> Self {
        let head_predicates: BTreeSet<Predicate> =
            rules.iter().filter_map(|r| r.head.as_ref().map(Atom::signature)).collect();
        let input_predicates = rules
            .iter()
            .flat_map(|r| r.positive_atoms().chain(r.negative_atoms()))
            .map(Atom::signature)
            .filter(|p| !head_predicates.contains(p))
            .collect();
        NonGroundProgram { rules, input_predicates, head_predicates }
    }

    pub fn input_predicates(&self) -> &BTreeSet<Predicate> {
        &self.input_predicates
    }

    pub fn head_predicates(&self) -> &BTreeSet<Predicate> {
        &self.head_predicates
    }

    /// True for any predicate that never heads a rule, including predicates
    /// the program does not mention at all.
    pub fn is_input(&self, p: &Predicate) -> bool {
        !self.head_predicates.contains(p)
    }

    /// Canonical text form: one rule per line.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        for r in &self.rules {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }
}
