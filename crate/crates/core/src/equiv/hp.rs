//! History-preserving bisimulation: the greatest set of triples
//! `(c1, f, c2)` where `f` maps the executed events of `c1` to those of `c2`
//! preserving labels and causal order.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use indexmap::IndexSet;
use num_traits::{One, Zero};

use super::moves::closure;
use super::{is_tau, observable, observation, partition, Mode, Strength, Union};
use crate::error::{Error, Result};
use crate::semantics::{causal_order, event_labels, Plts};
use crate::syntax::{Action, Key};
use crate::Prob;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HpBounds {
    pub max_triples: usize,
}

impl Default for HpBounds {
    fn default() -> Self {
        HpBounds { max_triples: 200_000 }
    }
}

type Iso = Vec<(Key, Key)>;
type Triple = (usize, usize, Iso);
type Dist = Vec<(Prob, usize)>;

/// A move of one configuration: visible with its event, or internal.
#[derive(Clone, Debug)]
struct Move {
    label: Option<Vec<Action>>,
    key: Option<Key>,
    target: usize,
}

pub(crate) struct Arena {
    strength: Strength,
    fwd: Vec<Vec<Move>>,
    rev: Vec<Vec<Move>>,
    tau_f: Vec<Vec<usize>>,
    tau_r: Vec<Vec<usize>>,
    orders: Vec<BTreeSet<(Key, Key)>>,
    labels: Vec<BTreeMap<Key, Vec<Action>>>,
}

impl Arena {
    pub(crate) fn new(u: &Union, strength: Strength) -> Arena {
        let n = u.n;
        let weak = strength == Strength::Weak;
        let tau_f = closure(n, |i| {
            let mut v: Vec<usize> = u.prob[i].iter().map(|&(_, t)| t).collect();
            if weak {
                v.extend(u.fwd[i].iter().filter(|e| is_tau(&e.label)).map(|e| e.target));
            }
            v
        });
        let tau_r = if weak {
            closure(n, |i| u.rev[i].iter().filter(|e| is_tau(&e.label)).map(|e| e.target).collect())
        } else {
            (0..n).map(|i| vec![i]).collect()
        };
        let saturate = |edges: &Vec<Vec<crate::semantics::Edge>>, tau: &Vec<Vec<usize>>| {
            (0..n)
                .map(|i| {
                    let mut v = Vec::new();
                    v.extend(tau[i].iter().filter(|&&t| t != i).map(|&t| Move { label: None, key: None, target: t }));
                    for &c in &tau[i] {
                        for e in &edges[c] {
                            if weak && is_tau(&e.label) {
                                continue;
                            }
                            for &t in &tau[e.target] {
                                v.push(Move { label: Some(e.label.clone()), key: e.key, target: t });
                            }
                        }
                    }
                    v
                })
                .collect::<Vec<_>>()
        };
        let fwd = saturate(&u.fwd, &tau_f);
        let rev = saturate(&u.rev, &tau_r);
        Arena {
            strength,
            fwd,
            rev,
            tau_f,
            tau_r,
            orders: u.procs.iter().map(causal_order).collect(),
            labels: u
                .procs
                .iter()
                .map(|p| {
                    let mut m = event_labels(p);
                    if strength == Strength::Weak {
                        m.values_mut().for_each(|l| *l = observable(l));
                    }
                    m
                })
                .collect(),
        }
    }

    fn visible(&self, i: usize) -> Vec<Key> {
        self.labels[i]
            .iter()
            .filter(|(_, l)| self.strength == Strength::Strong || !is_tau(l))
            .map(|(k, _)| *k)
            .collect()
    }

    fn order_ok(&self, i: usize, j: usize, f: &Iso) -> bool {
        f.iter().all(|&(x1, x2)| {
            self.labels[i].get(&x1) == self.labels[j].get(&x2)
                && f.iter().all(|&(y1, y2)| self.orders[i].contains(&(x1, y1)) == self.orders[j].contains(&(x2, y2)))
        })
    }

    /// Every label- and order-preserving bijection between the visible
    /// events already present in two configurations.
    fn initial_isos(&self, i: usize, j: usize) -> Vec<Iso> {
        let left = self.visible(i);
        let right = self.visible(j);
        if left.len() != right.len() {
            return vec![];
        }
        let mut perm: Vec<usize> = (0..right.len()).collect();
        let mut out = Vec::new();
        loop {
            let mut f: Iso = left.iter().zip(&perm).map(|(&a, &p)| (a, right[p])).collect();
            f.sort();
            if self.order_ok(i, j, &f) {
                out.push(f);
            }
            if !super::moves::next_permutation(&mut perm) {
                break;
            }
        }
        out
    }
}

fn extend(f: &Iso, a: Option<Key>, b: Option<Key>) -> Iso {
    let mut g = f.clone();
    if let (Some(a), Some(b)) = (a, b) {
        g.push((a, b));
        g.sort();
    }
    g
}

fn shrink(f: &Iso, a: Option<Key>) -> Iso {
    f.iter().filter(|(x, _)| Some(*x) != a).cloned().collect()
}

/// What a triple must satisfy: every listed group needs a live member, and
/// every probabilistic obligation must balance.
#[derive(Default)]
struct Needs {
    groups: Vec<Vec<usize>>,
    /// (left distribution, options on the right, iso) and mirrored.
    masses: Vec<(Dist, Vec<Dist>, Iso, bool)>,
}

/// Greatest fixed point over the triples reachable from the roots. With
/// `prune`, triples whose configurations fall in different blocks start dead.
pub(crate) fn hp_fixpoint(
    u: &Union,
    mode: Mode,
    strength: Strength,
    hereditary: bool,
    bounds: HpBounds,
    prune: Option<&[usize]>,
) -> Result<bool> {
    let u = &*u.weakened(strength);
    let ar = Arena::new(u, strength);
    let check_rev = mode.reverse() || hereditary;
    let mut triples: IndexSet<Triple> = IndexSet::new();
    let mut needs: Vec<Needs> = Vec::new();
    let mut queue = VecDeque::new();
    let mut roots = Vec::new();
    let intern = |t: Triple, triples: &mut IndexSet<Triple>, queue: &mut VecDeque<usize>| -> Result<usize> {
        if let Some(i) = triples.get_index_of(&t) {
            return Ok(i);
        }
        if triples.len() >= bounds.max_triples {
            return Err(Error::BoundExceeded(format!("more than {} history triples", bounds.max_triples)));
        }
        let (i, _) = triples.insert_full(t);
        queue.push_back(i);
        Ok(i)
    };
    for f in ar.initial_isos(u.roots.0, u.roots.1) {
        roots.push(intern((u.roots.0, u.roots.1, f), &mut triples, &mut queue)?);
    }
    while let Some(t) = queue.pop_front() {
        let (i, j, f) = triples[t].clone();
        let mut need = Needs::default();
        let mut sides: Vec<(&Vec<Vec<Move>>, bool)> = Vec::new();
        if mode.forward() {
            sides.push((&ar.fwd, true));
        }
        if check_rev {
            sides.push((&ar.rev, false));
        }
        for (moves, forward) in sides {
            for flip in [false, true] {
                let (x, y) = if flip { (j, i) } else { (i, j) };
                for m in &moves[x] {
                    let mut group = Vec::new();
                    if m.label.is_none() {
                        let stay = if forward { &ar.tau_f[y] } else { &ar.tau_r[y] };
                        for &z in stay {
                            let tr = if flip { (z, m.target, f.clone()) } else { (m.target, z, f.clone()) };
                            group.push(intern(tr, &mut triples, &mut queue)?);
                        }
                        need.groups.push(group);
                        continue;
                    }
                    for n in &moves[y] {
                        if m.label != n.label {
                            continue;
                        }
                        let (a, b) = if flip { (n, m) } else { (m, n) };
                        let g = if forward {
                            extend(&f, a.key, b.key)
                        } else {
                            if f.iter().all(|&(p, q)| Some(p) != a.key || Some(q) != b.key) {
                                continue;
                            }
                            shrink(&f, a.key)
                        };
                        if forward && !ar.order_ok(a.target, b.target, &g) {
                            continue;
                        }
                        group.push(intern((a.target, b.target, g), &mut triples, &mut queue)?);
                    }
                    need.groups.push(group);
                }
            }
        }
        // probabilistic obligations: a genuine distribution is matched by
        // one reachable internally, or by a point mass on such a state
        let options = |y: usize| -> Vec<Dist> {
            let mut v = Vec::new();
            for &z in &ar.tau_f[y] {
                if u.prob[z].len() > 1 {
                    v.push(u.prob[z].clone());
                }
                v.push(vec![(Prob::one(), z)]);
            }
            v
        };
        for flip in [false, true] {
            let (x, y) = if flip { (j, i) } else { (i, j) };
            if u.prob[x].len() < 2 {
                continue;
            }
            let opts = options(y);
            for o in &opts {
                for (_, s) in &u.prob[x] {
                    for (_, r) in o {
                        let tr = if flip { (*r, *s, f.clone()) } else { (*s, *r, f.clone()) };
                        intern(tr, &mut triples, &mut queue)?;
                    }
                }
            }
            need.masses.push((u.prob[x].clone(), opts, f.clone(), flip));
        }
        if needs.len() <= t {
            needs.resize_with(t + 1, Needs::default);
        }
        needs[t] = need;
    }
    needs.resize_with(triples.len(), Needs::default);

    let mut alive: Vec<bool> = triples
        .iter()
        .map(|(i, j, _)| {
            observation(u, &ar.tau_f, *i, mode, strength) == observation(u, &ar.tau_f, *j, mode, strength)
                && prune.is_none_or(|b| b[*i] == b[*j])
        })
        .collect();
    loop {
        let mut changed = false;
        for t in 0..triples.len() {
            if !alive[t] {
                continue;
            }
            let n = &needs[t];
            let ok = n.groups.iter().all(|g| g.iter().any(|&x| alive[x]))
                && n.masses.iter().all(|(d, options, f, flip)| {
                    options.iter().any(|o| {
                        let (l, r) = if *flip { (o, d) } else { (d, o) };
                        balanced(&triples, &alive, l, r, f)
                    })
                });
            if !ok {
                alive[t] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(roots.iter().any(|&r| alive[r]))
}

/// Equal mass on every class of the relation restricted to the successors.
fn balanced(triples: &IndexSet<Triple>, alive: &[bool], l: &Dist, r: &Dist, f: &Iso) -> bool {
    let left: Vec<usize> = l.iter().map(|&(_, t)| t).collect();
    let right: Vec<usize> = r.iter().map(|&(_, t)| t).collect();
    // union-find over left ++ right positions
    let mut parent: Vec<usize> = (0..left.len() + right.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (a, &x) in left.iter().enumerate() {
        for (b, &y) in right.iter().enumerate() {
            if let Some(t) = triples.get_index_of(&(x, y, f.clone())) {
                if alive[t] {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, left.len() + b));
                    parent[ra] = rb;
                }
            }
        }
    }
    let mut mass: BTreeMap<usize, Prob> = BTreeMap::new();
    for (a, (p, _)) in l.iter().enumerate() {
        *mass.entry(find(&mut parent, a)).or_insert_with(Prob::zero) += p;
    }
    for (b, (p, _)) in r.iter().enumerate() {
        *mass.entry(find(&mut parent, left.len() + b)).or_insert_with(Prob::zero) -= p;
    }
    mass.values().all(|m| m.is_zero())
}

/// History-preserving bisimulation (`hereditary`: also closed under undoing
/// matched events, whatever the mode). Refuses systems with forward cycles.
pub fn check_hp_bisim(
    a: &Plts,
    b: &Plts,
    mode: Mode,
    strength: Strength,
    hereditary: bool,
    bounds: HpBounds,
) -> Result<bool> {
    check_preconditions(a, b)?;
    let u = Union::new(a, b)?;
    let blocks = partition(&u, mode, strength, 1).block;
    hp_fixpoint(&u, mode, strength, hereditary, bounds, Some(&blocks))
}

pub(crate) fn check_preconditions(a: &Plts, b: &Plts) -> Result<()> {
    for g in [a, b] {
        if !g.is_forward_acyclic() {
            return Err(Error::BoundExceeded("history-preserving check needs an acyclic system".into()));
        }
        if g.fwd.iter().flatten().any(|e| e.key.is_none()) {
            return Err(Error::FeatureDisabled {
                feature: "reversibility",
                what: "history-preserving bisimulation needs keyed events".into(),
            });
        }
    }
    Ok(())
}
