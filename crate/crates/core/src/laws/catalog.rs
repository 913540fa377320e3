//! The law catalog. Each entry instantiates both sides from a binding of
//! the metavariables, or declines when a side condition fails.

use std::collections::BTreeSet;

use num_traits::One;

use super::{Ctx, Law};
use crate::equiv::{Mode, Strength};
use crate::syntax::{is_nstd, sort, Action, Guard, Key, Label, Process, RelabelFn};
use crate::Prob;

type Pair = Option<(Process, Process)>;

fn g(x: &Guard) -> Process {
    Process::guard(x.clone())
}
fn sq(a: Process, b: Process) -> Process {
    Process::seq(a, b)
}
fn sm(a: Process, b: Process) -> Process {
    Process::sum(a, b)
}
fn bx(pi: Prob, a: Process, b: Process) -> Process {
    Process::boxsum(pi, a, b)
}
fn pr(a: Process, b: Process) -> Process {
    Process::par(a, b)
}
fn not(x: &Guard) -> Guard {
    Guard::not(x.clone())
}
fn past(body: Process, acts: Vec<Action>, k: Key) -> Process {
    Process::past(body, acts, k.0)
}
fn eps() -> Process {
    Process::eps()
}
fn delta() -> Process {
    Process::delta()
}
fn nil() -> Process {
    Process::Nil
}
/// `P.X` in history notation: `X` happened after everything in `P`.
fn then(p: &Process, acts: Vec<Action>, k: Key) -> Process {
    sq(p.clone(), past(nil(), acts, k))
}
fn names(ls: &BTreeSet<Label>) -> BTreeSet<String> {
    ls.iter().map(|l| l.name.clone()).collect()
}
fn nstd(ps: &[&Process]) -> bool {
    ps.iter().all(|p| is_nstd(p))
}
fn when(cond: bool, pair: (Process, Process)) -> Pair {
    cond.then_some(pair)
}
fn sorted(c: &Ctx, p: &Process) -> BTreeSet<Label> {
    sort(p, c.defs).unwrap_or_default()
}
/// The states satisfying `holds`, as a formula: a disjunction of full
/// atom valuations.
fn states_where(c: &Ctx, holds: impl Fn(usize) -> bool) -> Guard {
    let mut out: Option<Guard> = None;
    for s in (0..c.model.len()).filter(|&s| holds(s)) {
        let here = c.model.state(s);
        let cube = c
            .model
            .atoms()
            .iter()
            .map(|a| if here.atoms.contains(a) { Guard::atom(a) } else { Guard::not(Guard::atom(a)) })
            .reduce(Guard::prod)
            .unwrap_or(Guard::Epsilon);
        out = Some(match out {
            Some(g) => Guard::sum(g, cube),
            None => cube,
        });
    }
    out.unwrap_or(Guard::Delta)
}
/// Pointwise weakest precondition: the states from which `a` leads into `phi`.
fn wp(c: &Ctx, a: &Action, phi: &Guard) -> Guard {
    states_where(c, |s| c.model.effect(a, s).and_then(|t| c.model.test(phi, t)).unwrap_or(false))
}
/// Reverse counterpart: the states from which undoing `a` leads into `phi`.
fn wp_past(c: &Ctx, a: &Action, phi: &Guard) -> Guard {
    states_where(c, |t| match c.model.inverse(a, t) {
        Some(s) => c.model.test(phi, s).unwrap_or(false),
        None => true,
    })
}
fn valid_everywhere(c: &Ctx, phi: &Guard) -> bool {
    (0..c.model.len()).all(|s| c.model.test(phi, s).unwrap_or(false))
}
fn neg_somewhere(c: &Ctx, phis: &[Guard], s: usize) -> bool {
    phis.iter().any(|p| c.model.test(&Guard::not(p.clone()), s).unwrap_or(false))
}

const FR: Mode = Mode::ForwardReverse;
const F: Mode = Mode::Forward;
const R: Mode = Mode::Reverse;
const S: Strength = Strength::Strong;
const W: Strength = Strength::Weak;

macro_rules! law {
    ($id:expr, $text:expr, $mode:expr, $strength:expr, $build:expr) => {
        Law { id: $id, text: $text, mode: $mode, strength: $strength, build: $build }
    };
}

pub(super) fn catalog() -> Vec<Law> {
    let mut v = monoid();
    v.extend(static_laws());
    v.extend(guards());
    v.extend(guards_parallel());
    v.extend(tau());
    v.push(law!("expansion.1", "P || Q ~ expansion_nf(P || Q)", F, S, |b, c| {
        let p = pr(b.p.clone(), b.q.clone());
        super::expand::expansion_nf(&p, c.model, c.defs, c.bounds).ok().map(|n| (p, n))
    }));
    v
}

fn monoid() -> Vec<Law> {
    vec![
        law!("monoid.1", "P + Q ~ Q + P", FR, S, |b, _| Some((sm(b.p.clone(), b.q.clone()), sm(b.q.clone(), b.p.clone())))),
        law!("monoid.2", "P + (Q + R) ~ (P + Q) + R", FR, S, |b, _| {
            Some((sm(b.p.clone(), sm(b.q.clone(), b.r.clone())), sm(sm(b.p.clone(), b.q.clone()), b.r.clone())))
        }),
        law!("monoid.3", "P + P ~ P", FR, S, |b, _| Some((sm(b.p.clone(), b.p.clone()), b.p.clone()))),
        law!("monoid.4", "P + nil ~ P", FR, S, |b, _| Some((sm(b.p.clone(), nil()), b.p.clone()))),
        law!("monoid2.1", "P [+pi] Q ~ Q [+1-pi] P", FR, S, |b, _| {
            Some((bx(b.pi, b.p.clone(), b.q.clone()), bx(Prob::one() - b.pi, b.q.clone(), b.p.clone())))
        }),
        law!("monoid2.2", "P [+pi] (Q [+rho] R) ~ (P [+pi/(pi+rho-pi*rho)] Q) [+pi+rho-pi*rho] R", FR, S, |b, _| {
            let w = b.pi + b.rho - b.pi * b.rho;
            Some((
                bx(b.pi, b.p.clone(), bx(b.rho, b.q.clone(), b.r.clone())),
                bx(w, bx(b.pi / w, b.p.clone(), b.q.clone()), b.r.clone()),
            ))
        }),
        law!("monoid2.3", "P [+pi] P ~ P", FR, S, |b, _| Some((bx(b.pi, b.p.clone(), b.p.clone()), b.p.clone()))),
        law!("monoid2.4", "P [+pi] nil ~ P", FR, S, |b, _| Some((bx(b.pi, b.p.clone(), nil()), b.p.clone()))),
    ]
}

fn static_laws() -> Vec<Law> {
    vec![
        law!("static.1", "P || Q ~ Q || P", FR, S, |b, _| Some((pr(b.p.clone(), b.q.clone()), pr(b.q.clone(), b.p.clone())))),
        law!("static.2", "P || (Q || R) ~ (P || Q) || R", FR, S, |b, _| {
            Some((pr(b.p.clone(), pr(b.q.clone(), b.r.clone())), pr(pr(b.p.clone(), b.q.clone()), b.r.clone())))
        }),
        law!("static.3", "P || nil ~ P", FR, S, |b, _| Some((pr(b.p.clone(), nil()), b.p.clone()))),
        law!("static.4", "P \\ L ~ P if sort(P) avoids L", FR, S, |b, c| {
            let hit = names(&sorted(c, &b.p)).iter().any(|n| b.l.0.contains(n));
            when(!hit, (Process::restrict(b.p.clone(), b.l.clone()), b.p.clone()))
        }),
        law!("static.5", "P \\ K \\ L ~ P \\ (K u L)", FR, S, |b, _| {
            Some((
                Process::restrict(Process::restrict(b.p.clone(), b.k.clone()), b.l.clone()),
                Process::restrict(b.p.clone(), b.k.union(&b.l)),
            ))
        }),
        law!("static.6", "P[f] \\ L ~ (P \\ f^-1(L))[f]", FR, S, |b, c| {
            let pre = b.f.preimage(&b.l, &c.universe);
            Some((
                Process::restrict(Process::relabel(b.p.clone(), b.f.clone()), b.l.clone()),
                Process::relabel(Process::restrict(b.p.clone(), pre), b.f.clone()),
            ))
        }),
        law!("static.7", "(P || Q) \\ L ~ P \\ L || Q \\ L if no hidden communication", FR, S, |b, c| {
            let lp = sorted(c, &b.p);
            let lq: BTreeSet<Label> = sorted(c, &b.q).iter().map(Label::complement).collect();
            let clash = lp.intersection(&lq).any(|l| b.l.hides(l));
            when(
                !clash,
                (
                    Process::restrict(pr(b.p.clone(), b.q.clone()), b.l.clone()),
                    pr(Process::restrict(b.p.clone(), b.l.clone()), Process::restrict(b.q.clone(), b.l.clone())),
                ),
            )
        }),
        law!("static.8", "P[Id] ~ P", FR, S, |b, _| Some((Process::relabel(b.p.clone(), RelabelFn::identity()), b.p.clone()))),
        law!("static.9", "P[f] ~ P[f'] if f and f' agree on sort(P)", FR, S, |b, c| {
            let used = names(&sorted(c, &b.p));
            let agree = RelabelFn::from_pairs(c.universe.iter().map(|n| {
                let src = if used.contains(n) { &b.f } else { &b.g };
                (n.clone(), src.apply_label(&Label::new(n.clone())))
            }));
            Some((Process::relabel(b.p.clone(), b.f.clone()), Process::relabel(b.p.clone(), agree)))
        }),
        law!("static.10", "P[f][f'] ~ P[f' o f]", FR, S, |b, _| {
            Some((
                Process::relabel(Process::relabel(b.p.clone(), b.f.clone()), b.g.clone()),
                Process::relabel(b.p.clone(), b.g.compose_after(&b.f)),
            ))
        }),
        law!("static.11", "(P || Q)[f] ~ P[f] || Q[f] if f is injective on their sorts", FR, S, |b, c| {
            let mut used = names(&sorted(c, &b.p));
            used.extend(names(&sorted(c, &b.q)));
            let images: BTreeSet<String> = used.iter().map(|n| b.f.apply_label(&Label::new(n.clone())).name).collect();
            when(
                images.len() == used.len(),
                (
                    Process::relabel(pr(b.p.clone(), b.q.clone()), b.f.clone()),
                    pr(Process::relabel(b.p.clone(), b.f.clone()), Process::relabel(b.q.clone(), b.f.clone())),
                ),
            )
        }),
    ]
}

fn guards() -> Vec<Law> {
    vec![
        law!("guards.1", "P + delta ~ P", FR, S, |b, _| Some((sm(b.p.clone(), delta()), b.p.clone()))),
        law!("guards.2", "delta.P ~ delta", FR, S, |b, _| Some((sq(delta(), b.p.clone()), delta()))),
        law!("guards.3", "eps.P ~ P", FR, S, |b, _| Some((sq(eps(), b.p.clone()), b.p.clone()))),
        law!("guards.4", "P.eps ~ P", FR, S, |b, _| Some((sq(b.p.clone(), eps()), b.p.clone()))),
        law!("guards.5", "phi.!phi ~ delta", FR, S, |b, _| Some((sq(g(&b.phi), g(&not(&b.phi))), delta()))),
        law!("guards.6", "phi + !phi ~ eps", FR, S, |b, _| Some((sm(g(&b.phi), g(&not(&b.phi))), eps()))),
        law!("guards.7", "phi [+pi] !phi ~ eps", FR, S, |b, _| Some((bx(b.pi, g(&b.phi), g(&not(&b.phi))), eps()))),
        law!("guards.8", "phi.delta ~ delta", FR, S, |b, _| Some((sq(g(&b.phi), delta()), delta()))),
        law!("guards.9", "phi.(P + Q) ~ phi.P + phi.Q", FR, S, |b, _| {
            Some((
                sq(g(&b.phi), sm(b.p.clone(), b.q.clone())),
                sm(sq(g(&b.phi), b.p.clone()), sq(g(&b.phi), b.q.clone())),
            ))
        }),
        law!("guards.10", "(P + Q).phi ~ P.phi + Q.phi for past P, Q", FR, S, |b, _| {
            when(
                nstd(&[&b.pp, &b.qp]),
                (
                    sq(sm(b.pp.clone(), b.qp.clone()), g(&b.phi)),
                    sm(sq(b.pp.clone(), g(&b.phi)), sq(b.qp.clone(), g(&b.phi))),
                ),
            )
        }),
        law!("guards.11", "phi.(P [+pi] Q) ~ phi.P [+pi] phi.Q", FR, S, |b, _| {
            Some((
                sq(g(&b.phi), bx(b.pi, b.p.clone(), b.q.clone())),
                bx(b.pi, sq(g(&b.phi), b.p.clone()), sq(g(&b.phi), b.q.clone())),
            ))
        }),
        law!("guards.12", "(P [+pi] Q).phi ~ P.phi [+pi] Q.phi for past P, Q", FR, S, |b, _| {
            when(
                nstd(&[&b.pp, &b.qp]),
                (
                    sq(bx(b.pi, b.pp.clone(), b.qp.clone()), g(&b.phi)),
                    bx(b.pi, sq(b.pp.clone(), g(&b.phi)), sq(b.qp.clone(), g(&b.phi))),
                ),
            )
        }),
        law!("guards.13", "phi.(P.Q) ~ (phi.P).Q", FR, S, |b, _| {
            Some((sq(g(&b.phi), sq(b.p.clone(), b.q.clone())), sq(sq(g(&b.phi), b.p.clone()), b.q.clone())))
        }),
        law!("guards.14", "(P.Q).phi ~ P.(Q.phi) for past P, Q", FR, S, |b, _| {
            when(
                nstd(&[&b.pp, &b.qp]),
                (sq(sq(b.pp.clone(), b.qp.clone()), g(&b.phi)), sq(b.pp.clone(), sq(b.qp.clone(), g(&b.phi)))),
            )
        }),
        law!("guards.15", "(phi + psi).P ~ phi.P + psi.P", FR, S, |b, _| {
            Some((
                sq(sm(g(&b.phi), g(&b.psi)), b.p.clone()),
                sm(sq(g(&b.phi), b.p.clone()), sq(g(&b.psi), b.p.clone())),
            ))
        }),
        law!("guards.16", "P.(phi + psi) ~ P.phi + P.psi for past P", FR, S, |b, _| {
            when(
                nstd(&[&b.pp]),
                (
                    sq(b.pp.clone(), sm(g(&b.phi), g(&b.psi))),
                    sm(sq(b.pp.clone(), g(&b.phi)), sq(b.pp.clone(), g(&b.psi))),
                ),
            )
        }),
        law!("guards.17", "(phi [+pi] psi).P ~ phi.P [+pi] psi.P", FR, S, |b, _| {
            Some((
                sq(bx(b.pi, g(&b.phi), g(&b.psi)), b.p.clone()),
                bx(b.pi, sq(g(&b.phi), b.p.clone()), sq(g(&b.psi), b.p.clone())),
            ))
        }),
        law!("guards.18", "P.(phi [+pi] psi) ~ P.phi [+pi] P.psi for past P", FR, S, |b, _| {
            when(
                nstd(&[&b.pp]),
                (
                    sq(b.pp.clone(), bx(b.pi, g(&b.phi), g(&b.psi))),
                    bx(b.pi, sq(b.pp.clone(), g(&b.phi)), sq(b.pp.clone(), g(&b.psi))),
                ),
            )
        }),
        law!("guards.19", "(phi.psi).P ~ phi.(psi.P)", FR, S, |b, _| {
            Some((sq(sq(g(&b.phi), g(&b.psi)), b.p.clone()), sq(g(&b.phi), sq(g(&b.psi), b.p.clone()))))
        }),
        law!("guards.20", "P.(phi.psi) ~ (P.phi).psi for past P", FR, S, |b, _| {
            when(
                nstd(&[&b.pp]),
                (sq(b.pp.clone(), sq(g(&b.phi), g(&b.psi))), sq(sq(b.pp.clone(), g(&b.phi)), g(&b.psi))),
            )
        }),
        law!("guards.21", "phi ~ eps if phi holds in every state", FR, S, |b, c| {
            when(valid_everywhere(c, &b.phi), (g(&b.phi), eps()))
        }),
        law!("guards.22", "phi0.....phin ~ delta if some !phii holds in every state", FR, S, |b, c| {
            let all = (0..c.model.len()).all(|s| neg_somewhere(c, &b.phis, s));
            let chain = b.phis.iter().rev().fold(None, |acc: Option<Process>, p| {
                Some(match acc {
                    None => g(p),
                    Some(rest) => sq(g(p), rest),
                })
            });
            when(all, (chain.unwrap_or_else(eps), delta()))
        }),
        law!("guards.23", "wp(a,phi).a.phi ~ wp(a,phi).a", FR, S, |b, c| {
            let w = wp(c, &b.alpha, &b.phi);
            Some((
                sq(g(&w), Process::prefix(b.alpha.clone(), g(&b.phi))),
                sq(g(&w), Process::prefix(b.alpha.clone(), nil())),
            ))
        }),
        law!("guards.24", "phi.a[m].wp(a[m],phi) ~ a[m].wp(a[m],phi)", FR, S, |b, c| {
            let w = wp_past(c, &b.alpha, &b.phi);
            Some((sq(g(&b.phi), past(g(&w), vec![b.alpha.clone()], b.key)), past(g(&w), vec![b.alpha.clone()], b.key)))
        }),
        law!("guards.25", "!wp(a,phi).a.!phi ~ !wp(a,phi).a", FR, S, |b, c| {
            let w = not(&wp(c, &b.alpha, &b.phi));
            Some((
                sq(g(&w), Process::prefix(b.alpha.clone(), g(&not(&b.phi)))),
                sq(g(&w), Process::prefix(b.alpha.clone(), nil())),
            ))
        }),
        law!("guards.26", "!phi.a[m].!wp(a[m],phi) ~ a[m].!wp(a[m],phi)", FR, S, |b, c| {
            let w = not(&wp_past(c, &b.alpha, &b.phi));
            Some((
                sq(g(&not(&b.phi)), past(g(&w), vec![b.alpha.clone()], b.key)),
                past(g(&w), vec![b.alpha.clone()], b.key),
            ))
        }),
    ]
}

fn guards_parallel() -> Vec<Law> {
    vec![
        law!("guards.27", "delta || P ~ delta", FR, S, |b, _| Some((pr(delta(), b.p.clone()), delta()))),
        law!("guards.28", "P || delta ~ delta", FR, S, |b, _| Some((pr(b.p.clone(), delta()), delta()))),
        law!("guards.29", "eps || P ~ P", FR, S, |b, _| Some((pr(eps(), b.p.clone()), b.p.clone()))),
        law!("guards.30", "P || eps ~ P", FR, S, |b, _| Some((pr(b.p.clone(), eps()), b.p.clone()))),
        law!("guards.31", "phi.(P || Q) ~ phi.P || phi.Q", FR, S, |b, _| {
            Some((
                sq(g(&b.phi), pr(b.p.clone(), b.q.clone())),
                pr(sq(g(&b.phi), b.p.clone()), sq(g(&b.phi), b.q.clone())),
            ))
        }),
        law!("guards.32", "phi || delta ~ delta", FR, S, |b, _| Some((pr(g(&b.phi), delta()), delta()))),
        law!("guards.33", "delta || phi ~ delta", FR, S, |b, _| Some((pr(delta(), g(&b.phi)), delta()))),
        law!("guards.34", "phi || eps ~ phi", FR, S, |b, _| Some((pr(g(&b.phi), eps()), g(&b.phi)))),
        law!("guards.35", "eps || phi ~ phi", FR, S, |b, _| Some((pr(eps(), g(&b.phi)), g(&b.phi)))),
        law!("guards.36", "phi || !phi ~ delta", FR, S, |b, _| Some((pr(g(&b.phi), g(&not(&b.phi))), delta()))),
        law!("guards.37", "phi0 || ... || phin ~ delta if every joined state refutes some phii", FR, S, |b, c| {
            // a parallel guard observes the join of the component states; the
            // model's states are closed under atom union
            let joined: Vec<usize> = (0..c.model.len())
                .flat_map(|x| (0..c.model.len()).map(move |y| (x, y)))
                .filter_map(|(x, y)| {
                    let mut atoms = c.model.state(x).atoms.clone();
                    atoms.extend(c.model.state(y).atoms.iter().cloned());
                    c.model.states().iter().position(|s| s.atoms == atoms)
                })
                .collect();
            let all = joined.iter().all(|&s| neg_somewhere(c, &b.phis, s));
            let par = b.phis.iter().map(g).reduce(pr).unwrap_or_else(eps);
            when(all, (par, delta()))
        }),
    ]
}

fn tau() -> Vec<Law> {
    vec![
        law!("tau.1", "P ~ tau.P", F, W, |b, _| Some((b.p.clone(), Process::prefix(Action::Tau, b.p.clone())))),
        law!("tau.2", "P ~ P.tau for past P", R, W, |b, _| {
            when(nstd(&[&b.pp]), (b.pp.clone(), then(&b.pp, vec![Action::Tau], b.key)))
        }),
        law!("tau.3", "a.tau.P ~ a.P", F, W, |b, _| {
            Some((
                Process::prefix(b.alpha.clone(), Process::prefix(Action::Tau, b.p.clone())),
                Process::prefix(b.alpha.clone(), b.p.clone()),
            ))
        }),
        law!("tau.4", "P.tau.a[m] ~ P.a[m] for past P", R, W, |b, _| {
            let a = vec![b.alpha.clone()];
            when(
                nstd(&[&b.pp]),
                (
                    sq(b.pp.clone(), past(past(nil(), a.clone(), b.key2), vec![Action::Tau], b.key)),
                    then(&b.pp, a, b.key2),
                ),
            )
        }),
        law!("tau.5", "(a1 || ... || an).tau.P ~ (a1 || ... || an).P", F, W, |b, _| {
            Some((
                Process::vprefix(b.alphas.clone(), Process::prefix(Action::Tau, b.p.clone())),
                Process::vprefix(b.alphas.clone(), b.p.clone()),
            ))
        }),
        law!("tau.6", "P.tau.(a1[m] || ... || an[m]) ~ P.(a1[m] || ... || an[m]) for past P", R, W, |b, _| {
            when(
                nstd(&[&b.pp]),
                (
                    sq(b.pp.clone(), past(past(nil(), b.alphas.clone(), b.key2), vec![Action::Tau], b.key)),
                    then(&b.pp, b.alphas.clone(), b.key2),
                ),
            )
        }),
        law!("tau.7", "P + tau.P ~ tau.P", F, W, |b, _| {
            let tp = Process::prefix(Action::Tau, b.p.clone());
            Some((sm(b.p.clone(), tp.clone()), tp))
        }),
        law!("tau.8", "P + P.tau ~ P.tau for past P", R, W, |b, _| {
            let pt = then(&b.pp, vec![Action::Tau], b.key);
            when(nstd(&[&b.pp]), (sm(b.pp.clone(), pt.clone()), pt))
        }),
        law!("tau.9", "P.((Q + tau.(Q + R)) [+pi] S) ~ P.((Q + R) [+pi] S)", F, W, |b, _| {
            let qr = sm(b.q.clone(), b.r.clone());
            Some((
                sq(b.p.clone(), bx(b.pi, sm(b.q.clone(), Process::prefix(Action::Tau, qr.clone())), b.s.clone())),
                sq(b.p.clone(), bx(b.pi, qr, b.s.clone())),
            ))
        }),
        law!("tau.10", "((Q + (Q + R).tau) [+pi] S).P ~ ((Q + R) [+pi] S).P for past P, Q, R, S", R, W, |b, _| {
            let qr = sm(b.qp.clone(), b.rp.clone());
            when(
                nstd(&[&b.pp, &b.qp, &b.rp, &b.sp]),
                (
                    sq(bx(b.pi, sm(b.qp.clone(), then(&qr, vec![Action::Tau], b.key)), b.sp.clone()), b.pp.clone()),
                    sq(bx(b.pi, qr, b.sp.clone()), b.pp.clone()),
                ),
            )
        }),
        law!("tau.11", "P ~ tau || P", FR, W, |b, _| {
            Some((b.p.clone(), pr(Process::prefix(Action::Tau, nil()), b.p.clone())))
        }),
    ]
}
