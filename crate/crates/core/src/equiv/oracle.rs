//! Reference decision procedure for tiny systems: a naive greatest fixed
//! point over pairs of configurations, with its own closure and path code.
//! Only the pomset canonical form is shared with the fast checkers.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use super::hp::{check_preconditions, hp_fixpoint, HpBounds};
use super::moves::{pomset_of, Events, Pomset};
use super::{Mode, Strength, Union};
use crate::error::{Error, Result};
use crate::semantics::{Plts, Status};
use crate::syntax::Action;
use crate::Prob;

/// Largest combined size the oracle accepts.
pub const ORACLE_LIMIT: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Definition {
    Step(Mode, Strength),
    Pomset(Mode, Strength, usize),
    Hp(Mode, Strength, bool),
}

pub fn brute_oracle(a: &Plts, b: &Plts, def: Definition) -> Result<bool> {
    if a.len() + b.len() > ORACLE_LIMIT {
        return Err(Error::TooLarge(a.len() + b.len()));
    }
    let u = Union::new(a, b)?;
    match def {
        Definition::Step(mode, strength) => Ok(pairs(&u, mode, strength, 1)),
        Definition::Pomset(mode, strength, k) => Ok(pairs(&u, mode, strength, k.max(1))),
        Definition::Hp(mode, strength, hereditary) => {
            check_preconditions(a, b)?;
            hp_fixpoint(&u, mode, strength, hereditary, HpBounds::default(), None)
        }
    }
}

fn warshall(n: usize, step: impl Fn(usize, usize) -> bool) -> Vec<Vec<bool>> {
    let mut r: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j || step(i, j)).collect()).collect();
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

struct Paths<'u> {
    u: &'u Union,
    weak: bool,
    close_f: Vec<Vec<bool>>,
    close_r: Vec<Vec<bool>>,
}

impl Paths<'_> {
    fn forward(&self, from: usize, k: usize, ev: &mut Events, out: &mut BTreeSet<(Pomset, usize)>) {
        let u = self.u;
        for c in (0..u.n).filter(|&c| self.close_f[from][c]) {
            for e in &u.fwd[c] {
                if self.weak && e.label == [Action::Tau] {
                    continue;
                }
                ev.push((e.key, e.label.clone()));
                for t in (0..u.n).filter(|&t| self.close_f[e.target][t]) {
                    out.insert((pomset_of(u, ev, t), t));
                }
                if ev.len() < k {
                    self.forward(e.target, k, ev, out);
                }
                ev.pop();
            }
        }
    }

    fn backward(&self, origin: usize, from: usize, k: usize, ev: &mut Events, out: &mut BTreeSet<(Pomset, usize)>) {
        let u = self.u;
        for c in (0..u.n).filter(|&c| self.close_r[from][c]) {
            for e in &u.rev[c] {
                if self.weak && e.label == [Action::Tau] {
                    continue;
                }
                ev.push((e.key, e.label.clone()));
                for t in (0..u.n).filter(|&t| self.close_r[e.target][t]) {
                    out.insert((pomset_of(u, ev, origin), t));
                }
                if ev.len() < k {
                    self.backward(origin, e.target, k, ev, out);
                }
                ev.pop();
            }
        }
    }
}

fn pairs(u: &Union, mode: Mode, strength: Strength, k: usize) -> bool {
    let u = &*u.weakened(strength);
    let n = u.n;
    let weak = strength == Strength::Weak;
    let tau = |l: &Vec<Action>| l.as_slice() == [Action::Tau];
    let close_f = warshall(n, |i, j| {
        (weak && u.fwd[i].iter().any(|e| tau(&e.label) && e.target == j)) || u.prob[i].iter().any(|&(_, t)| t == j)
    });
    let close_r = warshall(n, |i, j| weak && u.rev[i].iter().any(|e| tau(&e.label) && e.target == j));
    let paths = Paths { u, weak, close_f, close_r };
    let moves: Vec<(Vec<(Pomset, usize)>, Vec<(Pomset, usize)>)> = (0..n)
        .map(|i| {
            let mut f = BTreeSet::new();
            let mut r = BTreeSet::new();
            if mode.forward() {
                paths.forward(i, k, &mut Vec::new(), &mut f);
            }
            if mode.reverse() {
                paths.backward(i, i, k, &mut Vec::new(), &mut r);
            }
            (f.into_iter().collect(), r.into_iter().collect())
        })
        .collect();
    let reach_f = |i: usize| (0..n).filter(|&j| paths.close_f[i][j]).collect::<Vec<_>>();
    let reach_r = |i: usize| (0..n).filter(|&j| paths.close_r[i][j]).collect::<Vec<_>>();
    let obs = |i: usize| {
        if !mode.forward() {
            (u.obs[i].0, None, None)
        } else if weak {
            let done = reach_f(i).into_iter().any(|j| u.obs[j].1 == Status::Done);
            let dead = reach_f(i).into_iter().any(|j| u.obs[j].1 == Status::Dead);
            (u.obs[i].0, Some((done, dead)), None)
        } else {
            (u.obs[i].0, None, Some(u.obs[i].1))
        }
    };
    let mut rel: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| obs(i) == obs(j)).collect()).collect();
    loop {
        // classes of the equivalence closure, for the probabilistic clause
        let eq = warshall(n, |i, j| rel[i][j] || rel[j][i]);
        let class: Vec<usize> = (0..n).map(|i| (0..n).find(|&j| eq[i][j]).unwrap()).collect();
        let masses = |d: usize| {
            let mut m: BTreeMap<usize, Prob> = BTreeMap::new();
            for (p, t) in &u.prob[d] {
                *m.entry(class[*t]).or_insert_with(Prob::zero) += p;
            }
            m
        };
        let matches = |x: &[(Pomset, usize)], y: &[(Pomset, usize)]| {
            x.iter().all(|(p, t)| y.iter().any(|(q, s)| p == q && rel[*t][*s]))
        };
        let mut changed = false;
        let mut next = rel.clone();
        for i in 0..n {
            for j in 0..n {
                if !rel[i][j] {
                    continue;
                }
                let mut ok = matches(&moves[i].0, &moves[j].0)
                    && matches(&moves[j].0, &moves[i].0)
                    && matches(&moves[i].1, &moves[j].1)
                    && matches(&moves[j].1, &moves[i].1);
                {
                    let internal = |x: usize, y: usize, r: &dyn Fn(usize) -> Vec<usize>| {
                        r(x).into_iter().all(|t| r(y).into_iter().any(|s| rel[t][s]))
                    };
                    if mode.forward() {
                        ok &= internal(i, j, &reach_f) && internal(j, i, &reach_f);
                    }
                    if mode.reverse() {
                        ok &= internal(i, j, &reach_r) && internal(j, i, &reach_r);
                    }
                    let dists = |x: usize| {
                        reach_f(x)
                            .into_iter()
                            .map(masses)
                            .filter(|m| m.len() > 1)
                            .collect::<BTreeSet<_>>()
                    };
                    ok &= dists(i) == dists(j);
                }
                if !ok {
                    next[i][j] = false;
                    changed = true;
                }
            }
        }
        rel = next;
        if !changed {
            return rel[u.roots.0][u.roots.1];
        }
    }
}
