//! Shared test support: a seeded random program generator and an
//! independent Herbrand-base grounder feeding the brute-force oracle.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use overground::model::{
    eval_comparison, FactSet, GroundAtom, GroundProgram, GroundRule, Interner, Literal, NonGroundProgram, Rule,
    Substitution, Symbol, Value,
};
use overground::solver::{brute_force_answer_sets, ORACLE_LIMIT};
use overground::syntax::{parse_facts, parse_program};
use rand::seq::SliceRandom;
use rand::Rng;

pub const POOL: [&str; 4] = ["1", "2", "3", "a"];
const VARS: [&str; 2] = ["X", "Y"];
const CMP: [&str; 6] = ["=", "!=", "<", "<=", ">", ">="];

/// One random multi-shot scenario, kept as text so failures are readable.
#[derive(Debug, Clone)]
pub struct Instance {
    pub program: String,
    pub shots: Vec<String>,
}

impl Instance {
    pub fn parsed(&self) -> (NonGroundProgram, Vec<FactSet>) {
        let program = parse_program(&self.program).unwrap_or_else(|e| panic!("{e}\n{}", self.program));
        let shots = self.shots.iter().map(|s| parse_facts(s).unwrap()).collect();
        (program, shots)
    }
}

fn atom_text(name: &str, args: &[String]) -> String {
    if args.is_empty() {
        name.to_string()
    } else {
        format!("{name}({})", args.join(","))
    }
}

fn term<R: Rng>(rng: &mut R, vars: &[&str]) -> String {
    if !vars.is_empty() && rng.gen_bool(0.7) {
        vars.choose(rng).unwrap().to_string()
    } else {
        POOL.choose(rng).unwrap().to_string()
    }
}

/// A random safe program: at most 6 predicates of arity at most 2, at most
/// 8 rules, at most 2 variables per rule, constants from [`POOL`], plus a
/// stream of `shots` random fact sets over the input predicates.
pub fn random_instance<R: Rng>(rng: &mut R, shots: usize) -> Instance {
    let n_preds = rng.gen_range(2..=6);
    let preds: Vec<(String, usize)> = (0..n_preds).map(|i| (format!("p{i}"), rng.gen_range(0..=2))).collect();
    let n_inputs = rng.gen_range(1..n_preds.min(3) + 1).min(n_preds - 1).max(1);
    let (inputs, derived) = preds.split_at(n_inputs);

    let mut rules = Vec::new();
    let n_rules = rng.gen_range(1..=8);
    if n_rules >= 2 && rng.gen_bool(0.6) {
        rules.extend(choice_pair(rng, &preds, derived));
    }
    while rules.len() < n_rules {
        let mut body = Vec::new();
        let mut bound: Vec<&str> = Vec::new();
        for _ in 0..rng.gen_range(0..=2) {
            let (name, arity) = preds.choose(rng).unwrap();
            let args: Vec<String> = (0..*arity).map(|_| term(rng, &VARS)).collect();
            for a in &args {
                if let Some(v) = VARS.iter().find(|v| **v == a) {
                    if !bound.contains(v) {
                        bound.push(v);
                    }
                }
            }
            body.push(atom_text(name, &args));
        }
        if rng.gen_bool(0.6) {
            // Mostly derived predicates, so negative cycles (choices) occur.
            let pool = if rng.gen_bool(0.75) { derived } else { &preds[..] };
            let (name, arity) = pool.choose(rng).unwrap();
            let args: Vec<String> = (0..*arity).map(|_| term(rng, &bound)).collect();
            body.push(format!("not {}", atom_text(name, &args)));
        }
        if !bound.is_empty() && rng.gen_bool(0.3) {
            let (l, r) = (term(rng, &bound), term(rng, &bound));
            body.push(format!("{l} {} {r}", CMP.choose(rng).unwrap()));
        }
        let head = if body.is_empty() || rng.gen_bool(0.9) {
            let (name, arity) = derived.choose(rng).unwrap();
            let args: Vec<String> = (0..*arity).map(|_| term(rng, &bound)).collect();
            Some(atom_text(name, &args))
        } else {
            None
        };
        rules.push(match (head, body.is_empty()) {
            (Some(h), true) => format!("{h}."),
            (Some(h), false) => format!("{h} :- {}.", body.join(", ")),
            (None, _) => format!(":- {}.", body.join(", ")),
        });
    }

    let base: Vec<String> = inputs
        .iter()
        .flat_map(|(name, arity)| match arity {
            0 => vec![atom_text(name, &[])],
            1 => POOL.iter().map(|c| atom_text(name, &[c.to_string()])).collect(),
            _ => POOL
                .iter()
                .flat_map(|a| POOL.iter().map(move |b| atom_text(name, &[a.to_string(), b.to_string()])))
                .collect(),
        })
        .collect();
    let shots = (0..shots)
        .map(|_| base.iter().filter(|_| rng.gen_bool(0.35)).map(|a| format!("{a}.")).collect::<Vec<_>>().join(" "))
        .collect();
    Instance { program: rules.join("\n"), shots }
}

/// Two rules on a shared body that block each other through negation,
/// so the program has a genuine choice.
fn choice_pair<R: Rng>(rng: &mut R, preds: &[(String, usize)], derived: &[(String, usize)]) -> [String; 2] {
    let (name, arity) = preds.choose(rng).unwrap();
    let args: Vec<String> = (0..*arity).map(|_| term(rng, &VARS[..1])).collect();
    let bound: &[&str] = if args.iter().any(|a| a == "X") { &VARS[..1] } else { &[] };
    let body =
        if args.is_empty() && rng.gen_bool(0.5) { String::new() } else { format!("{}, ", atom_text(name, &args)) };
    let mut head = || {
        let (name, arity) = derived.choose(rng).unwrap();
        let args: Vec<String> = (0..*arity).map(|_| term(rng, bound)).collect();
        atom_text(name, &args)
    };
    let a = head();
    let b = (0..8).map(|_| head()).find(|b| *b != a).unwrap_or_else(|| a.clone());
    [format!("{a} :- {body}not {b}."), format!("{b} :- {body}not {a}.")]
}

fn all_substitutions(vars: &[&Symbol], universe: &[Value]) -> Vec<Substitution> {
    let mut out = vec![Substitution::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|s| {
                universe.iter().map(move |c| {
                    let mut s = s.clone();
                    s.bind((*v).clone(), c.clone());
                    s
                })
            })
            .collect();
    }
    out
}

/// Grounds every rule over every assignment of its variables to constants
/// of the program and facts, then keeps only what can possibly be true:
/// rules whose positive body lies in the least model of the program with
/// negation dropped. Negative literals on atoms outside that model are
/// certainly satisfied and are removed.
pub fn naive_ground(program: &NonGroundProgram, facts: &FactSet, interner: &mut Interner) -> GroundProgram {
    let mut universe: BTreeSet<Value> = facts.iter().flat_map(|a| a.args.iter().cloned()).collect();
    for rule in &program.rules {
        let mut text = Vec::new();
        if let Some(h) = &rule.head {
            text.extend(h.args.iter().filter_map(|t| t.as_value()));
        }
        for lit in &rule.body {
            match lit {
                Literal::Pos(a) | Literal::Neg(a) => text.extend(a.args.iter().filter_map(|t| t.as_value())),
                Literal::Cmp(_, l, r) => text.extend([l, r].into_iter().filter_map(|t| t.as_value())),
            }
        }
        universe.extend(text);
    }
    let universe: Vec<Value> = universe.into_iter().collect();

    let ground = |rule: &Rule, s: &Substitution| -> Option<(Option<GroundAtom>, Vec<GroundAtom>, Vec<GroundAtom>)> {
        for lit in rule.comparisons() {
            if !eval_comparison(lit, s).ok()? {
                return None;
            }
        }
        let head = rule.head.as_ref().map(|h| s.ground_atom(h).unwrap());
        let pos = rule.positive_atoms().map(|a| s.ground_atom(a).unwrap()).collect();
        let neg = rule.negative_atoms().map(|a| s.ground_atom(a).unwrap()).collect();
        Some((head, pos, neg))
    };
    let mut instances = Vec::new();
    for rule in &program.rules {
        let mut vars = Vec::new();
        for a in rule.positive_atoms() {
            a.collect_vars(&mut vars);
        }
        let mut seen = HashSet::new();
        vars.retain(|v| seen.insert(*v));
        for s in all_substitutions(&vars, &universe) {
            if let Some(i) = ground(rule, &s) {
                instances.push(i);
            }
        }
    }

    let mut possible: HashSet<GroundAtom> = facts.iter().cloned().collect();
    loop {
        let before = possible.len();
        for (head, pos, _) in &instances {
            if let Some(h) = head {
                if pos.iter().all(|a| possible.contains(a)) {
                    possible.insert(h.clone());
                }
            }
        }
        if possible.len() == before {
            break;
        }
    }

    let mut out = GroundProgram::default();
    for f in facts.iter() {
        out.facts.insert(interner.intern(f.clone()));
    }
    for (head, pos, neg) in instances {
        if !pos.iter().all(|a| possible.contains(a)) {
            continue;
        }
        let head = head.map(|h| interner.intern(h));
        let pos = pos.into_iter().map(|a| interner.intern(a)).collect();
        let neg = neg.into_iter().filter(|a| possible.contains(a)).map(|a| interner.intern(a)).collect();
        out.rules.push(GroundRule::new(head, pos, neg));
    }
    out
}

/// Oracle answer sets as printed text, or `None` when the instance is too
/// large for exhaustive enumeration.
pub fn oracle_answer_sets(program: &NonGroundProgram, facts: &FactSet) -> Option<BTreeSet<String>> {
    let mut interner = Interner::new();
    let ground = naive_ground(program, facts, &mut interner);
    let sets = brute_force_answer_sets(&ground, ORACLE_LIMIT).ok()?;
    Some(sets.into_iter().map(|s| s.render(&interner)).collect())
}

/// Random instances whose every shot fits the oracle.
pub fn oracle_sized_instances<R: Rng>(rng: &mut R, count: usize) -> Vec<(Instance, Vec<BTreeSet<String>>)> {
    let mut out = Vec::with_capacity(count);
    let mut tried = 0;
    while out.len() < count {
        tried += 1;
        assert!(tried < count * 20, "generator rarely fits the oracle");
        let inst = random_instance(rng, 3);
        let (program, shots) = inst.parsed();
        let expected: Option<Vec<_>> = shots.iter().map(|f| oracle_answer_sets(&program, f)).collect();
        if let Some(expected) = expected {
            out.push((inst, expected));
        }
    }
    out
}
