use ctc_core::equiv::{check_step_bisim, Mode, Strength};
use ctc_core::laws::{
    check_law, expansion_nf, find_law, gen_term, law_model, laws, Binding, CheckOptions, Ctx, GenConfig, Law,
};
use ctc_core::syntax::{parse_process, pretty, Definitions, Process};
use ctc_core::{build_plts, Bounds, StateModel};

fn term(s: &str) -> Process {
    parse_process(s, &Definitions::new()).unwrap()
}

fn quick(trials: usize) -> CheckOptions {
    CheckOptions { trials, ..CheckOptions::default() }
}

#[test]
fn generator_is_deterministic_per_seed() {
    let cfg = |seed| GenConfig { seed, ..GenConfig::default() };
    for seed in 0..20 {
        assert_eq!(gen_term(&cfg(seed)), gen_term(&cfg(seed)));
    }
    let distinct: std::collections::BTreeSet<String> = (0..20).map(|s| pretty(&gen_term(&cfg(s)))).collect();
    assert!(distinct.len() > 10);
}

#[test]
fn depth_one_terms_are_leaves() {
    for seed in 0..200 {
        let p = gen_term(&GenConfig { max_depth: 1, seed, ..GenConfig::default() });
        let ok = match &p {
            Process::Nil => true,
            Process::Prefix(_, body) | Process::Seq(_, body) => **body == Process::Nil,
            _ => false,
        };
        assert!(ok, "unexpected leaf {}", pretty(&p));
    }
}

#[test]
fn generated_terms_survive_a_print_parse_round_trip() {
    for seed in 0..1000 {
        let p = gen_term(&GenConfig { seed, ..GenConfig::default() });
        let text = pretty(&p);
        assert_eq!(term(&text), p, "round trip of {text}");
    }
}

#[test]
fn catalog_ids_are_unique_and_findable() {
    let all = laws();
    let ids: std::collections::BTreeSet<&str> = all.iter().map(|l| l.id).collect();
    assert_eq!(ids.len(), all.len());
    assert!(find_law("monoid.1").is_some());
    assert!(find_law("no.such.law").is_none());
}

#[test]
fn basic_laws_hold() {
    let m = law_model();
    for id in ["monoid.1", "monoid.2", "monoid2.1", "static.1", "static.3", "tau.1"] {
        let law = find_law(id).unwrap();
        let r = check_law(&law, &quick(15), &m).unwrap();
        assert!(r.holds(), "{id}: {:?}", r.counterexample);
        assert!(r.checked > 0);
    }
}

#[test]
fn nil_unit_fails_for_a_dead_summand() {
    // `P + nil ~ P` with P = delta: nil is Done, delta is Dead
    let m = law_model();
    let d = Definitions::new();
    let b = Bounds::default();
    let lhs = build_plts(&term("delta + nil"), 0, &m, &d, b).unwrap();
    let rhs = build_plts(&term("delta"), 0, &m, &d, b).unwrap();
    assert!(!check_step_bisim(&lhs, &rhs, Mode::ForwardReverse, Strength::Strong).unwrap().equivalent);
    let live = build_plts(&term("a.nil + nil"), 0, &m, &d, b).unwrap();
    let plain = build_plts(&term("a.nil"), 0, &m, &d, b).unwrap();
    assert!(check_step_bisim(&live, &plain, Mode::ForwardReverse, Strength::Strong).unwrap().equivalent);
}

#[test]
fn guarded_deadlock_is_deadlock() {
    let m = law_model();
    let d = Definitions::new();
    let b = Bounds::default();
    let lhs = build_plts(&term("<p>.delta"), 0, &m, &d, b).unwrap();
    let rhs = build_plts(&term("delta"), 0, &m, &d, b).unwrap();
    assert!(check_step_bisim(&lhs, &rhs, Mode::ForwardReverse, Strength::Strong).unwrap().equivalent);
}

#[test]
fn a_false_law_is_refuted_and_shrunk() {
    let bogus = Law {
        id: "bogus.1",
        text: "P + Q ~ P",
        mode: Mode::Forward,
        strength: Strength::Strong,
        build: |b: &Binding, _: &Ctx| Some((Process::sum(b.p.clone(), b.q.clone()), b.p.clone())),
    };
    let r = check_law(&bogus, &quick(100), &law_model()).unwrap();
    let cex = r.counterexample.expect("P + Q ~ P is false");
    assert!(cex.check.starts_with("step"));
    assert!(cex.lhs.len() < 80, "shrinking keeps the witness small: {}", cex.lhs);
}

#[test]
fn expansion_of_two_independent_prefixes() {
    let m = StateModel::trivial();
    let d = Definitions::new();
    let nf = expansion_nf(&term("a.nil || b.nil"), &m, &d, Bounds::default()).unwrap();
    assert_eq!(pretty(&nf), "b.a.nil + a.b.nil + (a||b).nil");
}

#[test]
fn expansion_of_a_handshake() {
    let m = StateModel::trivial();
    let d = Definitions::new();
    let hidden = expansion_nf(&term("(a.nil || 'a.nil) \\ {a}"), &m, &d, Bounds::default()).unwrap();
    assert_eq!(pretty(&hidden), "tau.nil");
    let open = expansion_nf(&term("a.nil || 'a.nil"), &m, &d, Bounds::default()).unwrap();
    assert_eq!(pretty(&open), "'a.a.nil + a.'a.nil + tau.nil");
}

#[test]
fn expansion_keeps_probabilistic_choice() {
    let m = StateModel::trivial();
    let d = Definitions::new();
    let p = term("(a.nil [+1/3] b.nil) || c.nil");
    let nf = expansion_nf(&p, &m, &d, Bounds::default()).unwrap();
    assert!(matches!(nf, Process::BoxSum(..)));
    let b = Bounds::default();
    let x = build_plts(&p, 0, &m, &d, b).unwrap();
    let y = build_plts(&nf, 0, &m, &d, b).unwrap();
    assert!(check_step_bisim(&x, &y, Mode::Forward, Strength::Strong).unwrap().equivalent);
}

#[test]
fn expansion_rejects_guards_and_histories() {
    let m = law_model();
    let d = Definitions::new();
    assert!(expansion_nf(&term("a.nil || <p>.nil"), &m, &d, Bounds::default()).is_err());
    assert!(expansion_nf(&term("nil.a[1] || b.nil"), &m, &d, Bounds::default()).is_err());
}
