use super::*;
use crate::grounder::{Budget, EvictionPolicy};
use crate::syntax::{parse_facts, parse_program};

const EF: &str = "r(X) :- e(X), not s(X). s(X) :- e(X), f(X).";
const REACH: &str = "reach(X,Y) :- edge(X,Y). reach(X,Z) :- reach(X,Y), edge(Y,Z).";

fn session(src: &str, config: SessionConfig) -> Session {
    Session::new(parse_program(src).unwrap(), config).unwrap()
}

fn facts(src: &str) -> FactSet {
    parse_facts(src).unwrap()
}

fn checked(mode: Mode) -> SessionConfig {
    SessionConfig { oracle_check: true, ..SessionConfig::with_mode(mode) }
}

#[test]
fn shots_in_both_modes() {
    let shots = ["e(1).", "e(1). f(1).", "e(1)."];
    let expected = ["{e(1), r(1)}", "{e(1), f(1), s(1)}", "{e(1), r(1)}"];
    for mode in [Mode::Incremental, Mode::Scratch] {
        let mut s = session(EF, checked(mode));
        for (i, (shot, want)) in shots.iter().zip(expected).enumerate() {
            let r = s.process_shot(&facts(shot)).unwrap();
            assert_eq!(r.shot_index, i as u64 + 1);
            assert_eq!(r.rendered, [want], "{mode:?} shot {}", i + 1);
            assert!(r.exhausted);
        }
    }
}

#[test]
fn cache_persists_only_incrementally() {
    let mut inc = session(EF, SessionConfig::with_mode(Mode::Incremental));
    let mut scr = session(EF, SessionConfig::with_mode(Mode::Scratch));
    for shot in ["e(1).", "e(1). f(1).", "e(1)."] {
        inc.process_shot(&facts(shot)).unwrap();
        let r = scr.process_shot(&facts(shot)).unwrap();
        assert_eq!(r.grounding.cache_size_rules, 0);
    }
    assert_eq!(inc.state().len(), 2);
    assert!(scr.state().is_empty());
}

#[test]
fn max_models_caps_enumeration() {
    let mut s = session("a :- not b. b :- not a.", SessionConfig { max_models: Some(1), ..SessionConfig::default() });
    let r = s.process_shot(&FactSet::new()).unwrap();
    assert_eq!(r.rendered, ["{a}"]);
    assert!(!r.exhausted);
}

#[test]
fn unsatisfiable_shot_has_no_answer_sets() {
    let mut s = session(":- e(X), not f(X).", checked(Mode::Incremental));
    assert!(s.process_shot(&facts("e(1).")).unwrap().rendered.is_empty());
    assert_eq!(s.process_shot(&facts("e(1). f(1).")).unwrap().rendered, ["{e(1), f(1)}"]);
}

#[test]
fn infeasible_budget_rejected_at_construction() {
    let config = SessionConfig {
        eviction: Some(EvictionConfig { policy: EvictionPolicy::Oldest, budget: Budget::Rules(0) }),
        ..SessionConfig::default()
    };
    let err = Session::new(parse_program(EF).unwrap(), config).unwrap_err();
    assert!(err.to_string().contains("budget infeasible"), "{err}");
}

#[test]
fn eviction_keeps_answers_correct() {
    let config = SessionConfig {
        eviction: Some(EvictionConfig { policy: EvictionPolicy::Oldest, budget: Budget::Rules(2) }),
        oracle_check: true,
        ..SessionConfig::default()
    };
    let mut evicting = session(REACH, config);
    let mut plain = session(REACH, SessionConfig::with_mode(Mode::Scratch));
    let shots = ["edge(1,2). edge(2,3).", "edge(2,3). edge(3,4).", "edge(1,2). edge(3,4).", "edge(1,2). edge(2,3)."];
    let mut evicted = 0;
    for shot in shots {
        let a = evicting.process_shot(&facts(shot)).unwrap();
        let b = plain.process_shot(&facts(shot)).unwrap();
        assert_eq!(a.answer_set_texts(), b.answer_set_texts(), "{shot}");
        evicted += a.evicted;
    }
    assert!(evicted > 0);
}

#[test]
fn grounding_error_names_the_shot() {
    let mut s = session("p(X) :- e(X), X / 0 > 1.", SessionConfig::default());
    s.process_shot(&FactSet::new()).unwrap();
    let err = s.process_shot(&facts("e(1).")).unwrap_err();
    assert!(err.to_string().starts_with("shot 2:"), "{err}");
    assert!(!err.is_invariant_failure());
}

#[test]
fn oracle_check_reports_infeasible_universe() {
    let config = SessionConfig { oracle_check: true, oracle_limit: 1, ..SessionConfig::default() };
    let mut s = session("a :- not b. b :- not a.", config);
    let err = s.process_shot(&FactSet::new()).unwrap_err();
    assert!(err.to_string().contains("oracle infeasible"), "{err}");
}

fn saved(s: &Session) -> String {
    let mut buf = Vec::new();
    s.save_state(&mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

#[test]
fn save_load_round_trip_continues_identically() {
    let shots = ["e(1). e(2).", "e(1). f(1).", "e(2). e(3). f(3).", "e(1)."];
    let mut straight = session(EF, SessionConfig::default());
    let mut first = session(EF, SessionConfig::default());
    for shot in &shots[..2] {
        straight.process_shot(&facts(shot)).unwrap();
        first.process_shot(&facts(shot)).unwrap();
    }
    let text = saved(&first);
    assert!(text.starts_with("overground-state v1\n"));
    let mut resumed =
        Session::load_state(parse_program(EF).unwrap(), SessionConfig::default(), text.as_bytes()).unwrap();
    assert_eq!(saved(&resumed), text);
    assert_eq!(resumed.shots_processed(), 2);
    for shot in &shots[2..] {
        let a = straight.process_shot(&facts(shot)).unwrap();
        let b = resumed.process_shot(&facts(shot)).unwrap();
        assert_eq!(a.rendered, b.rendered);
        assert_eq!(a.grounding.new_rules, b.grounding.new_rules);
        assert_eq!(a.grounding.cache_size_rules, b.grounding.cache_size_rules);
    }
    assert_eq!(straight.cache_rules_text(), resumed.cache_rules_text());
}

#[test]
fn round_trip_preserves_metadata_and_flags() {
    let src = "go. a :- not b. b :- not a. p(X) :- e(X), X < 0.";
    let mut s = session(src, SessionConfig::default());
    s.process_shot(&facts("e(-1). e(2).")).unwrap();
    s.process_shot(&facts("e(-1).")).unwrap();
    let text = saved(&s);
    let back = Session::load_state(parse_program(src).unwrap(), SessionConfig::default(), text.as_bytes()).unwrap();
    let meta = |s: &Session| s.state().rules().map(|c| (c.rule.clone(), c.meta)).collect::<Vec<_>>();
    assert_eq!(meta(&back), meta(&s));
    assert_eq!(back.state().once_flags(), s.state().once_flags());
    assert_eq!(back.state().domain().sorted(), s.state().domain().sorted());
}

#[test]
fn load_rejects_changed_program() {
    let mut s = session(EF, SessionConfig::default());
    s.process_shot(&facts("e(1).")).unwrap();
    let text = saved(&s);
    let other = parse_program("r(X) :- e(X).").unwrap();
    let err = Session::load_state(other, SessionConfig::default(), text.as_bytes()).unwrap_err();
    assert!(err.to_string().contains("program changed"), "{err}");
}

#[test]
fn load_ignores_layout_and_comments() {
    let s = session(EF, SessionConfig::default());
    let text = saved(&s);
    let relaid = parse_program("% same rules\nr(X) :- e(X),   not s(X).\n\ns(X) :- e(X), f(X).").unwrap();
    assert!(Session::load_state(relaid, SessionConfig::default(), text.as_bytes()).is_ok());
}

#[test]
fn load_rejects_unknown_version_and_garbage() {
    let s = session(EF, SessionConfig::default());
    let text = saved(&s).replacen("v1", "v9", 1);
    let err = Session::load_state(parse_program(EF).unwrap(), SessionConfig::default(), text.as_bytes()).unwrap_err();
    assert!(err.to_string().contains("unsupported state version"), "{err}");

    let truncated: String = saved(&s).lines().take(3).map(|l| format!("{l}\n")).collect();
    let err =
        Session::load_state(parse_program(EF).unwrap(), SessionConfig::default(), truncated.as_bytes()).unwrap_err();
    assert!(matches!(err, EngineError::MalformedState { .. }), "{err}");
}

#[test]
fn compare_modes_agrees_and_reports_growth() {
    let program = parse_program(REACH).unwrap();
    let shots: Vec<FactSet> =
        ["edge(1,2). edge(2,3).", "edge(1,2). edge(2,3). edge(3,1).", "edge(1,2)."].iter().map(|s| facts(s)).collect();
    let report = compare_modes(&program, &shots, &SessionConfig::default()).unwrap();
    assert!(report.answer_sets_equal);
    assert_eq!(report.shots, 3);
    let growth: Vec<usize> = report.per_shot.iter().map(|s| s.cache_size_rules).collect();
    assert!(growth.windows(2).all(|w| w[0] <= w[1]), "{growth:?}");
    let json = serde_json::to_value(&report).unwrap();
    assert_eq!(json["per_shot"].as_array().unwrap().len(), 3);
}

#[test]
fn single_shot_does_the_same_grounding_work_in_both_modes() {
    let src = "go. a :- not b. b :- not a. reach(X,Y) :- edge(X,Y). reach(X,Z) :- reach(X,Y), edge(Y,Z).";
    let f = facts("edge(1,2). edge(2,3). edge(3,1).");
    let a = session(src, SessionConfig::with_mode(Mode::Incremental)).process_shot(&f).unwrap();
    let b = session(src, SessionConfig::with_mode(Mode::Scratch)).process_shot(&f).unwrap();
    assert_eq!(a.grounding.rule_firings_attempted, b.grounding.rule_firings_attempted);
    assert_eq!(a.grounding.new_rules, b.grounding.new_rules);
    assert_eq!(a.grounding.new_domain_atoms, b.grounding.new_domain_atoms);
    assert_eq!(a.rendered, b.rendered);
}

#[test]
fn empty_shot_after_others_adds_nothing() {
    let mut s = session(REACH, checked(Mode::Incremental));
    s.process_shot(&facts("edge(1,2). edge(2,3).")).unwrap();
    let r = s.process_shot(&FactSet::new()).unwrap();
    assert_eq!(r.grounding.new_rules, 0);
    assert_eq!(r.grounding.rule_firings_attempted, 0);
    assert_eq!(r.rendered, ["{}"]);
    assert!(r.solved_rules == 0);
}

#[test]
fn reach_shots() {
    let mut s = session(REACH, checked(Mode::Incremental));
    assert_eq!(s.process_shot(&facts("edge(1,2).")).unwrap().rendered, ["{edge(1,2), reach(1,2)}"]);
    assert_eq!(
        s.process_shot(&facts("edge(1,2). edge(2,3).")).unwrap().rendered,
        ["{edge(1,2), edge(2,3), reach(1,2), reach(1,3), reach(2,3)}"]
    );
}
