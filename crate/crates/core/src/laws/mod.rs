//! Algebraic laws: a catalog of equations, a randomized checker with
//! shrinking, and the expansion normal form.

mod catalog;
mod expand;
mod gen;

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use expand::{expansion_nf, forget};
pub use gen::{
    fresh_key, gen_action, gen_guard, gen_labels, gen_past, gen_prob, gen_relabel, gen_system, gen_term, GenConfig,
};

use crate::equiv::{check_hp_bisim, check_pomset_bisim, check_step_bisim, HpBounds, Mode, Strength};
use crate::error::{Error, Result};
use crate::semantics::{build_plts, Bounds, Plts};
use crate::state::{StateId, StateModel};
use crate::syntax::{pretty, pretty_guard, Action, Definitions, Guard, Key, LabelSet, Process, RelabelFn};
use crate::Prob;

/// An equation between two templates. `build` instantiates both sides,
/// returning `None` when a side condition rules the binding out.
pub struct Law {
    pub id: &'static str,
    pub text: &'static str,
    pub mode: Mode,
    pub strength: Strength,
    pub build: fn(&Binding, &Ctx) -> Option<(Process, Process)>,
}

impl fmt::Debug for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{} {}] {}", self.id, self.mode, self.strength, self.text)
    }
}

/// Everything a template may consult besides the binding.
pub struct Ctx<'a> {
    pub model: &'a StateModel,
    pub defs: &'a Definitions,
    pub bounds: Bounds,
    /// Action names in play, for preimages and total relabellings.
    pub universe: BTreeSet<String>,
}

/// One instantiation of every metavariable a law may use. `p..s` are
/// standard terms, `pp..sp` are terms whose actions have all happened.
#[derive(Clone, Debug)]
pub struct Binding {
    pub p: Process,
    pub q: Process,
    pub r: Process,
    pub s: Process,
    pub pp: Process,
    pub qp: Process,
    pub rp: Process,
    pub sp: Process,
    pub alpha: Action,
    pub alphas: Vec<Action>,
    pub phi: Guard,
    pub psi: Guard,
    pub phis: Vec<Guard>,
    pub pi: Prob,
    pub rho: Prob,
    pub k: LabelSet,
    pub l: LabelSet,
    pub f: RelabelFn,
    pub g: RelabelFn,
    pub key: Key,
    pub key2: Key,
}

const TERM_NAMES: [&str; 8] = ["P", "Q", "R", "S", "P'", "Q'", "R'", "S'"];

impl Binding {
    pub fn random(cfg: &GenConfig, rng: &mut ChaCha8Rng) -> Binding {
        let term = |rng: &mut ChaCha8Rng| {
            let depth = rng.gen_range(1..=cfg.max_depth.max(1));
            gen_term(&GenConfig { max_depth: depth, seed: rng.gen(), allow_recursion: false, ..cfg.clone() })
        };
        let (p, q, r, s) = (term(rng), term(rng), term(rng), term(rng));
        let mut next = 1;
        let pcfg = GenConfig { max_depth: cfg.max_depth.min(3), ..cfg.clone() };
        let pp = gen_past(&pcfg, rng, &mut next);
        let qp = gen_past(&pcfg, rng, &mut next);
        let rp = gen_past(&pcfg, rng, &mut next);
        let sp = gen_past(&pcfg, rng, &mut next);
        let alpha = loop {
            let a = gen_action(cfg, rng);
            if a != Action::Tau {
                break a;
            }
        };
        let mut alphas: Vec<Action> = cfg.actions.iter().filter(|_| rng.gen_bool(0.6)).map(|n| Action::label(n)).collect();
        if alphas.is_empty() {
            alphas.push(alpha.clone());
        }
        let n = rng.gen_range(2..=3);
        let phis = (0..n).map(|_| gen_guard(cfg, rng, 2)).collect();
        let key = Key(next.max(1));
        Binding {
            p,
            q,
            r,
            s,
            pp,
            qp,
            rp,
            sp,
            alpha,
            alphas,
            phi: gen_guard(cfg, rng, 3),
            psi: gen_guard(cfg, rng, 3),
            phis,
            pi: gen_prob(rng),
            rho: gen_prob(rng),
            k: gen_labels(cfg, rng),
            l: gen_labels(cfg, rng),
            f: gen_relabel(cfg, rng),
            g: gen_relabel(cfg, rng),
            key,
            key2: Key(key.0 + 1),
        }
    }

    fn terms(&self) -> [&Process; 8] {
        [&self.p, &self.q, &self.r, &self.s, &self.pp, &self.qp, &self.rp, &self.sp]
    }

    fn term_mut(&mut self, i: usize) -> &mut Process {
        match i {
            0 => &mut self.p,
            1 => &mut self.q,
            2 => &mut self.r,
            3 => &mut self.s,
            4 => &mut self.pp,
            5 => &mut self.qp,
            6 => &mut self.rp,
            _ => &mut self.sp,
        }
    }

    /// Readable metavariable assignments.
    pub fn describe(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> =
            TERM_NAMES.iter().zip(self.terms()).map(|(n, p)| (n.to_string(), pretty(p))).collect();
        out.push(("phi".into(), pretty_guard(&self.phi)));
        out.push(("psi".into(), pretty_guard(&self.psi)));
        out.push(("pi".into(), self.pi.to_string()));
        out.push(("rho".into(), self.rho.to_string()));
        out
    }
}

pub fn laws() -> Vec<Law> {
    catalog::catalog()
}

pub fn find_law(id: &str) -> Option<Law> {
    laws().into_iter().find(|l| l.id == id)
}

/// Four states covering every valuation of `p` and `q`. `a` toggles `p`,
/// `b` toggles `q`, other actions leave the state alone. Every effect is a
/// bijection, so events without a recorded history can always be undone.
pub fn law_model() -> StateModel {
    StateModel::builder(&["p", "q"])
        .state("s0", &[])
        .state("s1", &["p"])
        .state("s2", &["q"])
        .state("s3", &["p", "q"])
        .effect("a", "s0", "s1")
        .effect("a", "s1", "s0")
        .effect("a", "s2", "s3")
        .effect("a", "s3", "s2")
        .effect("b", "s0", "s2")
        .effect("b", "s2", "s0")
        .effect("b", "s1", "s3")
        .effect("b", "s3", "s1")
        .build()
        .expect("law model is well formed")
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub trials: usize,
    pub gen: GenConfig,
    pub bounds: Bounds,
    /// Pomset and hp checks run when both sides have at most this many
    /// configurations.
    pub extra_limit: usize,
    /// Draws per trial before giving up on a side condition.
    pub attempts: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            trials: 50,
            gen: GenConfig { max_depth: 4, ..GenConfig::default() },
            bounds: Bounds { max_configs: 3000, ..Bounds::default() },
            extra_limit: 10,
            attempts: 60,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub check: String,
    pub state: String,
    pub lhs: String,
    pub rhs: String,
    pub bindings: Vec<(String, String)>,
}

#[derive(Clone, Debug)]
pub struct LawReport {
    pub id: &'static str,
    pub trials: usize,
    /// Trials that reached a verdict (side condition met, within bounds).
    pub checked: usize,
    /// Of those, trials small enough for the pomset and hp checks.
    pub extra_checked: usize,
    pub counterexample: Option<Counterexample>,
}

impl LawReport {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

enum Outcome {
    Holds { extra: bool },
    Skip,
    Fails(String),
}

fn seed_for(base: u64, id: &str, trial: usize) -> u64 {
    // FNV-1a keeps per-law streams stable across platforms and releases
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in id.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h ^ base.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ (trial as u64).wrapping_mul(0xbf58_476d_1ce4_e5b9)
}

fn bounded<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::StateSpaceBoundExceeded(_) | Error::UnguardedRecursion(_) | Error::BoundExceeded(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn run(law: &Law, lhs: &Process, rhs: &Process, s0: StateId, ctx: &Ctx, opts: &CheckOptions) -> Result<Outcome> {
    let build = |p: &Process| bounded(build_plts(p, s0, ctx.model, ctx.defs, ctx.bounds));
    let (Some(a), Some(b)) = (build(lhs)?, build(rhs)?) else {
        return Ok(Outcome::Skip);
    };
    let (mode, strength) = (law.mode, law.strength);
    if !check_step_bisim(&a, &b, mode, strength)?.equivalent {
        return Ok(Outcome::Fails(format!("step {mode} {strength}")));
    }
    if a.len() > opts.extra_limit || b.len() > opts.extra_limit {
        return Ok(Outcome::Holds { extra: false });
    }
    if !check_pomset_bisim(&a, &b, mode, strength, 2)?.equivalent {
        return Ok(Outcome::Fails(format!("pomset {mode} {strength}")));
    }
    if let Some(false) = hp(&a, &b, mode, strength)? {
        return Ok(Outcome::Fails(format!("hp {mode} {strength}")));
    }
    Ok(Outcome::Holds { extra: true })
}

fn hp(a: &Plts, b: &Plts, mode: Mode, strength: Strength) -> Result<Option<bool>> {
    match check_hp_bisim(a, b, mode, strength, false, HpBounds::default()) {
        Ok(v) => Ok(Some(v)),
        Err(Error::BoundExceeded(_) | Error::FeatureDisabled { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn ctx<'a>(model: &'a StateModel, defs: &'a Definitions, opts: &CheckOptions) -> Ctx<'a> {
    Ctx { model, defs, bounds: opts.bounds, universe: opts.gen.actions.iter().cloned().collect() }
}

/// Tries `law` on `opts.trials` random instances, each from a random state
/// of `model`. The first failure is shrunk and reported.
pub fn check_law(law: &Law, opts: &CheckOptions, model: &StateModel) -> Result<LawReport> {
    let defs = Definitions::new();
    let ctx = ctx(model, &defs, opts);
    let mut report = LawReport { id: law.id, trials: opts.trials, checked: 0, extra_checked: 0, counterexample: None };
    for trial in 0..opts.trials {
        let mut rng: ChaCha8Rng = rand::SeedableRng::seed_from_u64(seed_for(opts.gen.seed, law.id, trial));
        let drawn = (0..opts.attempts).find_map(|_| {
            let b = Binding::random(&opts.gen, &mut rng);
            (law.build)(&b, &ctx).map(|pair| (b, pair))
        });
        let Some((binding, (lhs, rhs))) = drawn else { continue };
        let s0 = rng.gen_range(0..model.len());
        match run(law, &lhs, &rhs, s0, &ctx, opts)? {
            Outcome::Skip => {}
            Outcome::Holds { extra } => {
                report.checked += 1;
                report.extra_checked += extra as usize;
            }
            Outcome::Fails(check) => {
                report.checked += 1;
                let (binding, lhs, rhs, check) = shrink(law, binding, lhs, rhs, check, s0, &ctx, opts)?;
                report.counterexample = Some(Counterexample {
                    check,
                    state: model.state(s0).id.clone(),
                    lhs: pretty(&lhs),
                    rhs: pretty(&rhs),
                    bindings: binding.describe(),
                });
                break;
            }
        }
    }
    Ok(report)
}

/// Replaces subterms of the term metavariables by `nil` while the law
/// still fails, until no single replacement keeps it failing.
#[allow(clippy::too_many_arguments)]
fn shrink(
    law: &Law,
    mut binding: Binding,
    mut lhs: Process,
    mut rhs: Process,
    mut check: String,
    s0: StateId,
    ctx: &Ctx,
    opts: &CheckOptions,
) -> Result<(Binding, Process, Process, String)> {
    'outer: loop {
        for t in 0..TERM_NAMES.len() {
            let size = binding.terms()[t].size();
            for pos in 0..size {
                let Some(smaller) = replace_at(binding.terms()[t], pos) else { continue };
                let mut cand = binding.clone();
                *cand.term_mut(t) = smaller;
                let Some((l, r)) = (law.build)(&cand, ctx) else { continue };
                if let Outcome::Fails(c) = run(law, &l, &r, s0, ctx, opts)? {
                    binding = cand;
                    lhs = l;
                    rhs = r;
                    check = c;
                    continue 'outer;
                }
            }
        }
        return Ok((binding, lhs, rhs, check));
    }
}

/// The term with its `pos`-th subterm (preorder) replaced by `nil`, or
/// `None` when that subterm is already `nil`.
fn replace_at(p: &Process, pos: usize) -> Option<Process> {
    if pos == 0 {
        return (*p != Process::Nil).then_some(Process::Nil);
    }
    let kids = p.children();
    let mut off = pos - 1;
    for (i, k) in kids.iter().enumerate() {
        let n = k.size();
        if off < n {
            let mut all: Vec<Process> = kids.iter().map(|c| (*c).clone()).collect();
            all[i] = replace_at(k, off)?;
            return Some(rebuild(p, all));
        }
        off -= n;
    }
    None
}

fn rebuild(p: &Process, kids: Vec<Process>) -> Process {
    let mut it = kids.into_iter();
    let mut next = || Box::new(it.next().expect("arity"));
    match p {
        Process::Prefix(a, _) => Process::Prefix(a.clone(), next()),
        Process::Past(_, a, k) => Process::Past(next(), a.clone(), *k),
        Process::Seq(..) => Process::Seq(next(), next()),
        Process::Sum(..) => Process::Sum(next(), next()),
        Process::BoxSum(pi, ..) => Process::BoxSum(*pi, next(), next()),
        Process::Par(..) => Process::Par(next(), next()),
        Process::Restrict(_, l) => Process::Restrict(next(), l.clone()),
        Process::Relabel(_, f) => Process::Relabel(next(), f.clone()),
        Process::Breve(_) => Process::Breve(next()),
        leaf => leaf.clone(),
    }
}
