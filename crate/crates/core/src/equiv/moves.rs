//! Labelled moves shared by the step and pomset checkers: bounded sequences
//! of steps carrying their causal order, optionally saturated with internal
//! moves.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;

use super::{Mode, Strength, Union};
use crate::semantics::causal_order;
use crate::syntax::{Action, Key};
use crate::Prob;

/// A finite labelled partial order in canonical form: two pomsets are
/// isomorphic iff their encodings are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pomset {
    pub labels: Vec<Vec<Action>>,
    pub order: Vec<(usize, usize)>,
}

impl Pomset {
    pub fn new(labels: Vec<Vec<Action>>, order: &BTreeSet<(usize, usize)>) -> Pomset {
        let n = labels.len();
        let mut best: Option<Pomset> = None;
        let mut perm: Vec<usize> = (0..n).collect();
        loop {
            // perm[i] is the new position of event i
            let mut l = vec![Vec::new(); n];
            for (i, lab) in labels.iter().enumerate() {
                l[perm[i]] = lab.clone();
            }
            let mut o: Vec<(usize, usize)> = order.iter().map(|&(a, b)| (perm[a], perm[b])).collect();
            o.sort();
            let cand = Pomset { labels: l, order: o };
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        best.unwrap_or(Pomset { labels: vec![], order: vec![] })
    }

    pub fn is_tau(&self) -> bool {
        self.labels.len() == 1 && self.labels[0] == [Action::Tau]
    }
}

pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Events along a path: key (when reversible) and step label.
pub(crate) type Events = Vec<(Option<Key>, Vec<Action>)>;

/// Builds the pomset of `events`, reading the causal order from the term of
/// the configuration where all of them are present. Without keys, events are
/// ordered as they occurred.
pub(crate) fn pomset_of(u: &Union, events: &Events, witness: usize) -> Pomset {
    let labels: Vec<Vec<Action>> = events.iter().map(|(_, l)| l.clone()).collect();
    let mut order = BTreeSet::new();
    if events.iter().all(|(k, _)| k.is_some()) {
        let co = causal_order(&u.procs[witness]);
        for (i, (ki, _)) in events.iter().enumerate() {
            for (j, (kj, _)) in events.iter().enumerate() {
                if co.contains(&(ki.unwrap(), kj.unwrap())) {
                    order.insert((i, j));
                }
            }
        }
    } else {
        for i in 0..events.len() {
            for j in i + 1..events.len() {
                order.insert((i, j));
            }
        }
    }
    Pomset::new(labels, &order)
}

fn dirac(u: &Union, i: usize) -> Option<usize> {
    match u.prob[i].as_slice() {
        [(p, t)] if p.is_one() => Some(*t),
        _ => None,
    }
}

pub(crate) fn closure(n: usize, succ: impl Fn(usize) -> Vec<usize>) -> Vec<Vec<usize>> {
    (0..n)
        .map(|i| {
            let mut seen = BTreeSet::from([i]);
            let mut stack = vec![i];
            while let Some(x) = stack.pop() {
                for y in succ(x) {
                    if seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
            seen.into_iter().collect()
        })
        .collect()
}

/// All moves of every configuration for one equivalence, computed once.
pub(crate) struct Saturation {
    pub fwd: Vec<Vec<(Pomset, usize)>>,
    pub rev: Vec<Vec<(Pomset, usize)>>,
    /// Internal forward closure (weak only; reflexive).
    pub tau_f: Vec<Vec<usize>>,
    /// Internal reverse closure (weak only; reflexive).
    pub tau_r: Vec<Vec<usize>>,
}

impl Saturation {
    pub fn new(u: &Union, mode: Mode, strength: Strength, k: usize) -> Saturation {
        let n = u.n;
        let is_tau = |l: &Vec<Action>| l.as_slice() == [Action::Tau];
        // resolution is internal in both strengths; `tau` only in the weak one
        let tau_f = closure(n, |i| {
            let mut v: Vec<usize> = u.prob[i].iter().map(|&(_, t)| t).collect();
            if strength == Strength::Weak {
                v.extend(u.fwd[i].iter().filter(|e| is_tau(&e.label)).map(|e| e.target));
            }
            v
        });
        let tau_r = match strength {
            Strength::Strong => (0..n).map(|i| vec![i]).collect(),
            Strength::Weak => closure(n, |i| u.rev[i].iter().filter(|e| is_tau(&e.label)).map(|e| e.target).collect()),
        };
        let weak = strength == Strength::Weak;
        let mut fwd = vec![Vec::new(); n];
        let mut rev = vec![Vec::new(); n];
        for i in 0..n {
            let mut out = BTreeSet::new();
            if mode.forward() {
                fwd_paths(u, &tau_f, weak, i, &mut Vec::new(), k, &mut out);
            }
            fwd[i] = out.into_iter().collect();
            let mut out = BTreeSet::new();
            if mode.reverse() {
                rev_paths(u, &tau_r, weak, i, i, &mut Vec::new(), k, &mut out);
            }
            rev[i] = out.into_iter().collect();
        }
        Saturation { fwd, rev, tau_f, tau_r }
    }
}

fn fwd_paths(
    u: &Union,
    tau: &[Vec<usize>],
    weak: bool,
    cur: usize,
    events: &mut Events,
    k: usize,
    out: &mut BTreeSet<(Pomset, usize)>,
) {
    for &c in &tau[cur] {
        for e in &u.fwd[c] {
            if weak && e.label.as_slice() == [Action::Tau] {
                continue;
            }
            events.push((e.key, e.label.clone()));
            for &t in &tau[e.target] {
                out.insert((pomset_of(u, events, t), t));
            }
            if events.len() < k {
                fwd_paths(u, tau, weak, e.target, events, k, out);
            }
            events.pop();
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn rev_paths(
    u: &Union,
    tau: &[Vec<usize>],
    weak: bool,
    origin: usize,
    cur: usize,
    events: &mut Events,
    k: usize,
    out: &mut BTreeSet<(Pomset, usize)>,
) {
    for &c in &tau[cur] {
        for e in &u.rev[c] {
            if weak && e.label.as_slice() == [Action::Tau] {
                continue;
            }
            events.push((e.key, e.label.clone()));
            for &t in &tau[e.target] {
                out.insert((pomset_of(u, events, origin), t));
            }
            if events.len() < k {
                rev_paths(u, tau, weak, origin, e.target, events, k, out);
            }
            events.pop();
        }
    }
}

/// Probability mass per block.
pub(crate) fn lift(dist: &[(Prob, usize)], block: &[usize]) -> Vec<(usize, Prob)> {
    let mut m: BTreeMap<usize, Prob> = BTreeMap::new();
    for (p, t) in dist {
        *m.entry(block[*t]).or_insert_with(|| Prob::from_integer(0)) += p;
    }
    m.into_iter().collect()
}

pub(crate) fn is_dirac(u: &Union, i: usize) -> bool {
    dirac(u, i).is_some()
}
