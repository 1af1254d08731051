use std::collections::HashSet;

use crate::model::{
    eval_comparison, Atom, GroundAtomId, GroundRule, Interner, Literal, Predicate, Rule, Substitution, Term,
};

use super::domain::Domain;
use super::GroundingError;

/// Candidate atoms for `atom` under `subst`: narrowed through the argument
/// index when some argument is already fixed.
fn candidates<'d>(atom: &Atom, pred: &Predicate, subst: &Substitution, source: &'d Domain) -> &'d [GroundAtomId] {
    for (pos, term) in atom.args.iter().enumerate() {
        let fixed = match term {
            Term::Var(v) => subst.get(v).cloned(),
            t => t.as_value(),
        };
        if let Some(value) = fixed {
            return source.with_arg(pred, pos, &value);
        }
    }
    source.of_predicate(pred)
}

struct Join<'a> {
    positives: Vec<(&'a Atom, Predicate)>,
    full: &'a Domain,
    interner: &'a Interner,
}

impl Join<'_> {
    /// Extends `subst` over `order[depth..]`, collecting complete matches.
    fn extend(&self, order: &[usize], depth: usize, subst: &mut Substitution, out: &mut Vec<Substitution>) {
        let Some(&lit) = order.get(depth) else {
            out.push(subst.clone());
            return;
        };
        let (atom, pred) = &self.positives[lit];
        for &cand in candidates(atom, pred, subst, self.full) {
            let mark = subst.len();
            if subst.match_into(atom, self.interner.resolve(cand)) {
                self.extend(order, depth + 1, subst, out);
                subst.truncate(mark);
            }
        }
    }
}

/// Result of instantiating one rule against a delta.
#[derive(Debug, Default)]
pub struct Instances {
    pub rules: Vec<GroundRule>,
    /// Complete positive-body matches, before comparison filtering.
    pub attempts: usize,
}

/// Ground instances of `rule` with at least one positive body atom taken
/// from `delta` and the others from `full`, which must include `delta`.
/// Comparisons are evaluated and dropped; negative literals are kept as is.
/// Rules without positive atoms yield nothing here.
pub fn instantiate_rule_seminaive(
    rule: &Rule,
    full: &Domain,
    delta: &Domain,
    interner: &mut Interner,
) -> Result<Instances, GroundingError> {
    let positives: Vec<(&Atom, Predicate)> = rule.positive_atoms().map(|a| (a, a.signature())).collect();
    let mut matches = Vec::new();
    {
        let join = Join { positives, full, interner };
        for (j, (atom, pred)) in join.positives.iter().enumerate() {
            if !delta.has_predicate(pred) {
                continue;
            }
            let rest: Vec<usize> = (0..join.positives.len()).filter(|&k| k != j).collect();
            let mut subst = Substitution::new();
            for &cand in delta.of_predicate(pred) {
                if subst.match_into(atom, join.interner.resolve(cand)) {
                    join.extend(&rest, 0, &mut subst, &mut matches);
                    subst.truncate(0);
                }
            }
        }
    }

    let attempts = matches.len();
    let mut seen = HashSet::new();
    let mut rules = Vec::new();
    for subst in matches {
        if let Some(g) = ground_with(rule, &subst, interner)? {
            if seen.insert(g.clone()) {
                rules.push(g);
            }
        }
    }
    Ok(Instances { rules, attempts })
}

/// Applies a complete substitution: `None` if a comparison fails.
pub(crate) fn ground_with(
    rule: &Rule,
    subst: &Substitution,
    interner: &mut Interner,
) -> Result<Option<GroundRule>, GroundingError> {
    let fail = |source| GroundingError::Eval { rule: rule.to_string(), substitution: subst.to_string(), source };
    for lit in rule.comparisons() {
        if !eval_comparison(lit, subst).map_err(fail)? {
            return Ok(None);
        }
    }
    // Head first: atom ids, and so solver branching order, follow rule text.
    let head = match &rule.head {
        Some(h) => Some(interner.intern(subst.ground_atom(h).map_err(fail)?)),
        None => None,
    };
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    for lit in &rule.body {
        match lit {
            Literal::Pos(a) => positive.push(interner.intern(subst.ground_atom(a).map_err(fail)?)),
            Literal::Neg(a) => negative.push(interner.intern(subst.ground_atom(a).map_err(fail)?)),
            Literal::Cmp(..) => {}
        }
    }
    Ok(Some(GroundRule::new(head, positive, negative)))
}
