use std::collections::BTreeSet;

use super::*;
use crate::model::AnswerSet;
use crate::solver::{brute_force_answer_sets, solve, ORACLE_LIMIT};
use crate::syntax::{parse_facts, parse_program};

const EF: &str = "r(X) :- e(X), not s(X). s(X) :- e(X), f(X).";

fn grounder(src: &str) -> Grounder {
    Grounder::new(parse_program(src).unwrap())
}

fn facts(src: &str) -> FactSet {
    parse_facts(src).unwrap()
}

fn shown_rules(rules: &[GroundRule], i: &Interner) -> Vec<String> {
    rules.iter().map(|r| r.display(i).to_string()).collect()
}

fn cache_text(state: &OvergroundedState, i: &Interner) -> Vec<String> {
    state.rules().map(|c| c.rule.display(i).to_string()).collect()
}

fn rendered(sets: impl IntoIterator<Item = AnswerSet>, i: &Interner) -> BTreeSet<String> {
    sets.into_iter().map(|s| s.render(i)).collect()
}

#[test]
fn fact_program_from_scratch() {
    let g = grounder("a.");
    let mut i = Interner::new();
    let out = g.ground_from_scratch(&FactSet::new(), &mut i).unwrap();
    assert!(out.rules.is_empty());
    assert_eq!(out.facts.iter().map(|&f| i.resolve(f).to_string()).collect::<Vec<_>>(), ["a"]);
}

#[test]
fn scratch_skips_unsupported_rule() {
    let g = grounder(EF);
    let mut i = Interner::new();
    let out = g.ground_from_scratch(&facts("e(1)."), &mut i).unwrap();
    assert_eq!(shown_rules(&out.rules, &i), ["r(1) :- e(1), not s(1)."]);
    let oracle = brute_force_answer_sets(&out, ORACLE_LIMIT).unwrap();
    assert_eq!(rendered(oracle, &i), BTreeSet::from(["{e(1), r(1)}".to_string()]));
}

#[test]
fn scratch_filters_by_comparison() {
    let g = grounder("p(X) :- e(X), X < 2.");
    let mut i = Interner::new();
    let out = g.ground_from_scratch(&facts("e(1). e(5)."), &mut i).unwrap();
    assert_eq!(shown_rules(&out.rules, &i), ["p(1) :- e(1)."]);
}

#[test]
fn incremental_shots_grow_then_stay() {
    let g = grounder(EF);
    let mut i = Interner::new();
    let mut st = OvergroundedState::new();

    let r1 = g.ground_incremental(&mut st, &facts("e(1)."), &mut i).unwrap();
    assert_eq!(r1.new_rules, 1);
    assert_eq!(cache_text(&st, &i), ["r(1) :- e(1), not s(1)."]);

    let r2 = g.ground_incremental(&mut st, &facts("e(1). f(1)."), &mut i).unwrap();
    assert_eq!(r2.new_rules, 1);
    assert_eq!(r2.new_domain_atoms, 2, "f(1) and s(1)");
    assert_eq!(cache_text(&st, &i), ["r(1) :- e(1), not s(1).", "s(1) :- e(1), f(1)."]);

    let r3 = g.ground_incremental(&mut st, &facts("e(1)."), &mut i).unwrap();
    assert_eq!((r3.new_rules, r3.new_domain_atoms, r3.rule_firings_attempted), (0, 0, 0));
    assert_eq!(r3.cache_size_rules, 2);
    assert_eq!(st.shot_counter(), 3);
}

#[test]
fn replayed_shot_adds_nothing() {
    let g = grounder("reach(X,Y) :- edge(X,Y). reach(X,Z) :- reach(X,Y), edge(Y,Z).");
    let mut i = Interner::new();
    let mut st = OvergroundedState::new();
    let f = facts("edge(1,2). edge(2,3). edge(3,1).");
    let first = g.ground_incremental(&mut st, &f, &mut i).unwrap();
    assert!(first.new_rules > 0);
    let again = g.ground_incremental(&mut st, &f, &mut i).unwrap();
    assert_eq!((again.new_rules, again.new_domain_atoms), (0, 0));
}

#[test]
fn once_rules_fire_only_once() {
    let g = grounder("a :- not b.");
    let mut i = Interner::new();
    let mut st = OvergroundedState::new();
    let r1 = g.ground_incremental(&mut st, &FactSet::new(), &mut i).unwrap();
    assert_eq!(r1.new_rules, 1);
    assert_eq!(cache_text(&st, &i), ["a :- not b."]);
    let r2 = g.ground_incremental(&mut st, &FactSet::new(), &mut i).unwrap();
    assert_eq!((r2.new_rules, r2.rule_firings_attempted), (0, 0));
    assert_eq!(st.once_flags().len(), 1);
}

#[test]
fn projection_examples() {
    let g = grounder(EF);
    let mut i = Interner::new();
    let mut st = OvergroundedState::new();
    g.ground_incremental(&mut st, &facts("e(1)."), &mut i).unwrap();
    g.ground_incremental(&mut st, &facts("e(1). f(1)."), &mut i).unwrap();

    let f2 = facts("e(1). f(1).");
    let p2 = g.project_for_shot(&mut st, &f2, &mut i);
    assert_eq!(shown_rules(&p2.rules, &i), ["r(1) :- not s(1).", "s(1)."]);
    assert_eq!(rendered(solve(&p2, None).answer_sets, &i), BTreeSet::from(["{e(1), f(1), s(1)}".to_string()]));

    g.ground_incremental(&mut st, &facts("e(1)."), &mut i).unwrap();
    let p3 = g.project_for_shot(&mut st, &facts("e(1)."), &mut i);
    assert_eq!(shown_rules(&p3.rules, &i), ["r(1) :- not s(1)."]);
    assert_eq!(rendered(solve(&p3, None).answer_sets, &i), BTreeSet::from(["{e(1), r(1)}".to_string()]));

    let triggers: Vec<u64> = st.rules().map(|c| c.meta.trigger_count).collect();
    assert_eq!(triggers, [2, 1]);
}

#[test]
fn projection_of_empty_cache() {
    let g = grounder("p(X) :- q(X).");
    let mut i = Interner::new();
    let mut st = OvergroundedState::new();
    g.ground_incremental(&mut st, &FactSet::new(), &mut i).unwrap();
    let p = g.project_for_shot(&mut st, &FactSet::new(), &mut i);
    assert!(p.rules.is_empty() && p.facts.is_empty());
    assert_eq!(solve(&p, None).answer_sets, vec![AnswerSet::default()]);
}

#[test]
fn projection_drops_rules_blocked_by_negated_input() {
    let g = grounder("p(X) :- q(X), not blocked(X).");
    let mut i = Interner::new();
    let mut st = OvergroundedState::new();
    g.ground_incremental(&mut st, &facts("q(1). q(2)."), &mut i).unwrap();
    let p = g.project_for_shot(&mut st, &facts("q(1). q(2). blocked(2)."), &mut i);
    assert_eq!(shown_rules(&p.rules, &i), ["p(1)."]);
}

#[test]
fn eviction_repairs_and_rederives() {
    let g = grounder(EF);
    let mut i = Interner::new();
    let mut st = OvergroundedState::new();
    g.ground_incremental(&mut st, &facts("e(1)."), &mut i).unwrap();
    g.ground_incremental(&mut st, &facts("e(1). f(1)."), &mut i).unwrap();
    assert_eq!(st.len(), 2);

    assert_eq!(evict(&mut st, EvictionPolicy::Oldest, Budget::Rules(1)).unwrap(), 1);
    assert_eq!(cache_text(&st, &i), ["s(1) :- e(1), f(1)."]);
    assert!(st.needs_full_reseed());

    let f = facts("e(1).");
    let report = g.ground_incremental(&mut st, &f, &mut i).unwrap();
    assert_eq!(report.new_rules, 1);
    let projected = g.project_for_shot(&mut st, &f, &mut i);
    let scratch = g.ground_from_scratch(&f, &mut i).unwrap();
    let a: BTreeSet<AnswerSet> = solve(&projected, None).answer_sets.into_iter().collect();
    assert_eq!(a, brute_force_answer_sets(&scratch, ORACLE_LIMIT).unwrap());
}

#[test]
fn eviction_within_budget_is_a_no_op() {
    let g = grounder(EF);
    let mut i = Interner::new();
    let mut st = OvergroundedState::new();
    g.ground_incremental(&mut st, &facts("e(1). f(1)."), &mut i).unwrap();
    assert_eq!(evict(&mut st, EvictionPolicy::Oldest, Budget::Rules(5)).unwrap(), 0);
    assert!(!st.needs_full_reseed());
    assert_eq!(st.len(), 2);
    let bytes = st.size_bytes_estimate();
    assert_eq!(bytes, (3 + 3) * ID_WIDTH);
    assert_eq!(evict(&mut st, EvictionPolicy::Oldest, Budget::Bytes(bytes)).unwrap(), 0);
}

#[test]
fn least_triggered_ties_fall_back_to_rule_order() {
    let g = grounder("p(X) :- q(X).");
    let mut i = Interner::new();
    let mut st = OvergroundedState::new();
    g.ground_incremental(&mut st, &facts("q(1). q(2). q(3)."), &mut i).unwrap();
    assert_eq!(evict(&mut st, EvictionPolicy::LeastTriggered, Budget::Rules(1)).unwrap(), 2);
    assert_eq!(cache_text(&st, &i), ["p(3) :- q(3)."]);
}

#[test]
fn least_triggered_keeps_busy_rules() {
    let g = grounder("p(X) :- q(X).");
    let mut i = Interner::new();
    let mut st = OvergroundedState::new();
    g.ground_incremental(&mut st, &facts("q(1). q(2)."), &mut i).unwrap();
    g.project_for_shot(&mut st, &facts("q(1)."), &mut i);
    assert_eq!(evict(&mut st, EvictionPolicy::LeastTriggered, Budget::Rules(1)).unwrap(), 1);
    assert_eq!(cache_text(&st, &i), ["p(1) :- q(1)."]);
}

#[test]
fn infeasible_budgets() {
    let mut st = OvergroundedState::new();
    assert!(matches!(
        evict(&mut st, EvictionPolicy::Oldest, Budget::Rules(0)),
        Err(GroundingError::BudgetInfeasible(_))
    ));
    assert!(matches!(
        evict(&mut st, EvictionPolicy::Oldest, Budget::Bytes(1)),
        Err(GroundingError::BudgetInfeasible(_))
    ));
}

#[test]
fn eviction_repair_restores_derivations_without_input_support() {
    // `c :- b.` has a body made of derived atoms only; after evicting it,
    // re-deriving from the next fact set must bring it back.
    let g = grounder("a :- not b. b :- not a. c :- a. c :- b.");
    let mut i = Interner::new();
    let mut st = OvergroundedState::new();
    g.ground_incremental(&mut st, &FactSet::new(), &mut i).unwrap();
    assert_eq!(st.len(), 4);
    evict(&mut st, EvictionPolicy::Oldest, Budget::Rules(3)).unwrap();
    g.ground_incremental(&mut st, &FactSet::new(), &mut i).unwrap();
    assert_eq!(st.len(), 4);
    let p = g.project_for_shot(&mut st, &FactSet::new(), &mut i);
    assert_eq!(rendered(solve(&p, None).answer_sets, &i), BTreeSet::from(["{a, c}".to_string(), "{b, c}".to_string()]));
}

#[test]
fn idb_facts_in_shot_are_head_facts() {
    let g = grounder("q(X) :- p(X). p(X) :- e(X).");
    let mut i = Interner::new();
    let out = g.ground_from_scratch(&facts("p(7)."), &mut i).unwrap();
    assert_eq!(shown_rules(&out.rules, &i), ["q(7) :- p(7)."]);
    let mut st = OvergroundedState::new();
    g.ground_incremental(&mut st, &facts("p(7)."), &mut i).unwrap();
    let proj = g.project_for_shot(&mut st, &facts("p(7)."), &mut i);
    assert_eq!(rendered(solve(&proj, None).answer_sets, &i), BTreeSet::from(["{p(7), q(7)}".to_string()]));
}

#[test]
fn grounding_errors_propagate() {
    let g = grounder("p(X) :- e(X), X + 1 > 0.");
    let mut i = Interner::new();
    let err = g.ground_from_scratch(&facts("e(a)."), &mut i).unwrap_err();
    assert!(matches!(err, GroundingError::Eval { source: EvalError::NonInteger(_), .. }));
}
