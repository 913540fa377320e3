use ctc_core::semantics::{build_plts, Bounds, Config, Engine, Record, Status};
use ctc_core::syntax::{parse_definitions, parse_process, pretty, Action, Definitions, Key};
use ctc_core::{Prob, StateModel};

fn two_states() -> StateModel {
    StateModel::parse("atoms: p\nstate s0:\nstate s1: p\neffect a s0 -> s1\neffect a s1 -> s0\n").unwrap()
}

fn term(s: &str) -> ctc_core::Process {
    parse_process(s, &Definitions::new()).unwrap()
}

fn resolved(text: &str) -> Vec<(Prob, String)> {
    let m = StateModel::trivial();
    let d = Definitions::new();
    let e = Engine::new(&m, &d, Bounds::default());
    e.prob_resolve(&Config::new(term(text), 0))
        .unwrap()
        .into_iter()
        .map(|(p, c)| (p, pretty(&c.process)))
        .collect()
}

#[test]
fn prefix_resolves_to_its_mark() {
    assert_eq!(resolved("a.nil"), vec![(Prob::from_integer(1), "@a.nil".to_string())]);
}

#[test]
fn box_sum_weights() {
    let d = resolved("a.nil [+1/3] b.nil");
    assert_eq!(d, vec![(Prob::new(1, 3), "@a.nil".into()), (Prob::new(2, 3), "@b.nil".into())]);
}

#[test]
fn sum_resolves_jointly() {
    let d = resolved("(a.nil [+1/2] b.nil) + c.nil");
    assert_eq!(d, vec![(Prob::new(1, 2), "@a.nil + @c.nil".into()), (Prob::new(1, 2), "@b.nil + @c.nil".into())]);
}

#[test]
fn single_prefix_over_two_states() {
    let m = two_states();
    let g = build_plts(&term("a.nil"), 0, &m, &Definitions::new(), Bounds::default()).unwrap();
    assert_eq!(g.len(), 3);
    assert_eq!(g.prob[0], vec![(Prob::from_integer(1), 1)]);
    assert_eq!(g.fwd[1].len(), 1);
    let after = g.fwd[1][0].target;
    assert_eq!(pretty(&g.config(after).process), "nil.a[1]");
    assert_eq!(g.config(after).state, 1);
    assert_eq!(g.rev[after].len(), 1);
    assert_eq!(g.rev[after][0].target, 1);
    assert!(g.terminated(after));
}

#[test]
fn nil_is_one_terminated_config() {
    let g = build_plts(&term("nil"), 0, &StateModel::trivial(), &Definitions::new(), Bounds::default()).unwrap();
    assert_eq!(g.len(), 1);
    assert!(g.terminated(0));
    assert!(g.prob[0].is_empty() && g.fwd[0].is_empty() && g.rev[0].is_empty());
}

#[test]
fn reverse_of_recorded_event() {
    let m = two_states();
    let d = Definitions::new();
    let e = Engine::new(&m, &d, Bounds::default());
    let mut c = Config::new(term("nil.a[1]"), 1);
    c.history.push(Record { key: Key(1), from: 0, label: vec![Action::label("a")] });
    let back = e.reverse_steps(&c).unwrap();
    assert_eq!(back.len(), 1);
    assert_eq!(pretty(&back[0].target.process), "@a.nil");
    assert_eq!(back[0].target.state, 0);
    // without history the inverse effect decides
    let back = e.reverse_steps(&Config::new(term("nil.a[1]"), 1)).unwrap();
    assert_eq!(back[0].target.state, 0);
}

#[test]
fn undoing_an_earlier_event_replays_the_later_ones() {
    let m = ctc_core::laws::law_model();
    let d = Definitions::new();
    let e = Engine::new(&m, &d, Bounds::default());
    let start = e.prob_resolve(&Config::new(term("a.nil || b.nil"), 0)).unwrap().remove(0).1;
    let after_a = e.forward_steps(&start).unwrap().into_iter().find(|s| pretty(&s.target.process).contains("a[1]")).unwrap();
    let ready = e.prob_resolve(&after_a.target).unwrap().remove(0).1;
    let after_b = e.forward_steps(&ready).unwrap().into_iter().find(|s| s.label == [Action::label("b")]).unwrap().target;
    assert_eq!(m.state(after_b.state).id, "s3");
    let undo_a = e.reverse_steps(&after_b).unwrap().into_iter().find(|s| s.key == Some(Key(1))).unwrap().target;
    // only b's effect remains
    assert_eq!(m.state(undo_a.state).id, "s2");
    assert_eq!(undo_a.history.len(), 1);
    assert_eq!(undo_a.history[0].from, 0);
}

#[test]
fn standard_terms_cannot_reverse() {
    let m = StateModel::trivial();
    let d = Definitions::new();
    let e = Engine::new(&m, &d, Bounds::default());
    assert!(e.reverse_steps(&Config::new(term("a.b.nil || c.nil"), 0)).unwrap().is_empty());
}

#[test]
fn synchronised_pair_undoes_as_tau() {
    let m = StateModel::trivial();
    let d = Definitions::new();
    let e = Engine::new(&m, &d, Bounds::default());
    let back = e.reverse_steps(&Config::new(term("nil.a[3] || nil.'a[3]"), 0)).unwrap();
    assert_eq!(back.len(), 1);
    assert_eq!(back[0].label, vec![ctc_core::Action::Tau]);
    assert_eq!(back[0].key, Some(Key(3)));
}

#[test]
fn communication_and_concurrency() {
    let m = StateModel::trivial();
    let g = build_plts(&term("a.nil || 'a.nil"), 0, &m, &Definitions::new(), Bounds::default()).unwrap();
    // `a`, `'a` and their synchronisation; redo edges may repeat a label under another key
    let labels: std::collections::BTreeSet<String> = g.fwd[1].iter().map(|e| format!("{:?}", e.label)).collect();
    assert_eq!(labels.len(), 3, "{labels:?}");
    assert!(g.fwd[1].iter().any(|e| e.key == Some(ctc_core::Key(1)) && e.label == [ctc_core::Action::Tau]));
    let restricted =
        build_plts(&term("(a.nil || 'a.nil) \\ {a}"), 0, &m, &Definitions::new(), Bounds::default()).unwrap();
    assert_eq!(restricted.fwd[1].len(), 1);
    assert_eq!(restricted.fwd[1][0].label, vec![ctc_core::Action::Tau]);
}

#[test]
fn guards_and_status() {
    let m = two_states();
    let d = Definitions::new();
    let e = Engine::new(&m, &d, Bounds::default());
    assert_eq!(e.status(&term("<p>"), 0).unwrap(), Status::Dead);
    assert_eq!(e.status(&term("<p>"), 1).unwrap(), Status::Done);
    assert_eq!(e.status(&term("<p> + <!p>"), 0).unwrap(), Status::Done);
    assert_eq!(e.status(&term("delta || a.nil"), 0).unwrap(), Status::Dead);
    assert_eq!(e.status(&term("eps || a.nil"), 0).unwrap(), Status::Pending);
    let g = build_plts(&term("<p>.a.nil"), 0, &m, &d, Bounds::default()).unwrap();
    assert_eq!(g.len(), 1);
    let g = build_plts(&term("<!p>.a.nil"), 0, &m, &d, Bounds::default()).unwrap();
    assert_eq!(g.len(), 3);
}

#[test]
fn recursion_and_bounds() {
    let defs = parse_definitions("A := a.A").unwrap();
    let m = StateModel::trivial();
    let mut b = Bounds::default();
    b.features.reversibility = false;
    let g = build_plts(&parse_process("A", &defs).unwrap(), 0, &m, &defs, b).unwrap();
    assert!(g.len() <= 3);
    assert!(!g.is_forward_acyclic());
    let err = build_plts(&parse_process("A", &defs).unwrap(), 0, &m, &defs, Bounds { max_configs: 20, ..Bounds::default() });
    assert!(matches!(err, Err(ctc_core::Error::StateSpaceBoundExceeded(20))));
}

#[test]
fn faithful_parallel_resolution_is_a_choice() {
    let m = StateModel::trivial();
    let d = Definitions::new();
    let e = Engine::new(&m, &d, Bounds { faithful_pcomp: true, ..Bounds::default() });
    let r = e.prob_resolve(&Config::new(term("a.nil || b.nil"), 0)).unwrap();
    assert_eq!(pretty(&r[0].1.process), "@a.nil + @b.nil");
}
