//! Behavioural equivalences on finite transition systems: step and pomset
//! bisimulation by signature refinement, history-preserving bisimulation by
//! a search over posetal triples, and a naive reference oracle.

mod hp;
mod moves;
mod oracle;

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write};
use std::str::FromStr;

use indexmap::IndexSet;

pub use hp::{check_hp_bisim, HpBounds};
pub use moves::Pomset;
pub use oracle::{brute_oracle, Definition, ORACLE_LIMIT};

use crate::error::{Error, Result};
use crate::semantics::{Edge, Plts, Status};
use crate::state::StateId;
use crate::syntax::{Action, Process};
use crate::Prob;
use moves::{is_dirac, lift, Saturation};

/// Which transitions must be matched.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Forward,
    Reverse,
    ForwardReverse,
}

impl Mode {
    pub fn forward(self) -> bool {
        self != Mode::Reverse
    }

    pub fn reverse(self) -> bool {
        self != Mode::Forward
    }

    pub const ALL: [Mode; 3] = [Mode::Forward, Mode::Reverse, Mode::ForwardReverse];
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fwd" | "f" => Ok(Mode::Forward),
            "rev" | "r" => Ok(Mode::Reverse),
            "fr" => Ok(Mode::ForwardReverse),
            other => Err(Error::Syntax { position: 0, expected: format!("fwd, rev or fr, not `{other}`") }),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Forward => "fwd",
            Mode::Reverse => "rev",
            Mode::ForwardReverse => "fr",
        })
    }
}

/// Strong matches every step; weak lets internal moves be absorbed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strength {
    Strong,
    Weak,
}

impl Strength {
    pub const ALL: [Strength; 2] = [Strength::Strong, Strength::Weak];
}

impl FromStr for Strength {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strong" => Ok(Strength::Strong),
            "weak" => Ok(Strength::Weak),
            other => Err(Error::Syntax { position: 0, expected: format!("strong or weak, not `{other}`") }),
        }
    }
}

impl fmt::Display for Strength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strength::Strong => "strong",
            Strength::Weak => "weak",
        })
    }
}

/// Disjoint union of one or two transition systems, indices of the second
/// shifted by `split`.
#[derive(Clone)]
pub struct Union {
    pub n: usize,
    pub split: usize,
    pub obs: Vec<(StateId, Status)>,
    pub prob: Vec<Vec<(Prob, usize)>>,
    pub fwd: Vec<Vec<Edge>>,
    pub rev: Vec<Vec<Edge>>,
    pub procs: Vec<Process>,
    pub roots: (usize, usize),
}

impl Union {
    pub fn new(a: &Plts, b: &Plts) -> Result<Union> {
        if a.model != b.model {
            return Err(Error::IncompatibleModels);
        }
        let mut u = Union::single(a);
        u.append(b);
        Ok(u)
    }

    pub fn single(a: &Plts) -> Union {
        let mut u = Union {
            n: 0,
            split: 0,
            obs: vec![],
            prob: vec![],
            fwd: vec![],
            rev: vec![],
            procs: vec![],
            roots: (a.root(), a.root()),
        };
        u.append(a);
        u
    }

    /// The same system seen by a weak observer: the `tau` parts of a
    /// concurrent step are hidden, and a step made only of `tau` is internal.
    pub(crate) fn weakened(&self, strength: Strength) -> Cow<'_, Union> {
        if strength == Strength::Strong {
            return Cow::Borrowed(self);
        }
        let hide = |es: &Vec<Edge>| -> Vec<Edge> {
            es.iter().map(|e| Edge { label: observable(&e.label), key: e.key, target: e.target }).collect()
        };
        Cow::Owned(Union {
            fwd: self.fwd.iter().map(hide).collect(),
            rev: self.rev.iter().map(hide).collect(),
            n: self.n,
            split: self.split,
            obs: self.obs.clone(),
            prob: self.prob.clone(),
            procs: self.procs.clone(),
            roots: self.roots,
        })
    }

    fn append(&mut self, g: &Plts) {
        let off = self.n;
        let shift = |es: &Vec<Edge>| {
            es.iter().map(|e| Edge { label: e.label.clone(), key: e.key, target: e.target + off }).collect()
        };
        for i in 0..g.len() {
            let c = g.config(i);
            self.obs.push((c.state, g.status[i]));
            self.prob.push(g.prob[i].iter().map(|&(p, t)| (p, t + off)).collect());
            self.fwd.push(shift(&g.fwd[i]));
            self.rev.push(shift(&g.rev[i]));
            self.procs.push(c.process.clone());
        }
        self.split = off;
        self.roots.1 = g.root() + off;
        self.n += g.len();
    }
}

/// A partition of the configurations of a (union of) transition system(s).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    /// Block number of every configuration.
    pub block: Vec<usize>,
    /// Index where the second system starts (equal to the length for one system).
    pub split: usize,
}

impl Partition {
    pub fn count(&self) -> usize {
        self.block.iter().copied().max().map_or(0, |m| m + 1)
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count()];
        for (i, &b) in self.block.iter().enumerate() {
            out[b].push(i);
        }
        out
    }

    /// `block k: A0 A3 B1` per line, with `A`/`B` naming the two systems.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, members) in self.blocks().iter().enumerate() {
            let _ = write!(out, "block {k}:");
            for &i in members {
                if i < self.split || self.split == 0 {
                    let _ = write!(out, " A{i}");
                } else {
                    let _ = write!(out, " B{}", i - self.split);
                }
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub equivalent: bool,
    pub partition: Partition,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Item {
    Move(bool, Pomset, usize),
    Tau(bool, usize),
    Dist(Vec<(usize, Prob)>),
}

/// Initial observation of a configuration: its data state and how it can
/// end. The weak variant only asks what is reachable internally. Ending is
/// a forward notion, so a reverse-only observer sees the data state alone.
pub(crate) fn observation(u: &Union, tau: &[Vec<usize>], i: usize, mode: Mode, strength: Strength) -> (StateId, u8) {
    match strength {
        _ if !mode.forward() => (u.obs[i].0, 0),
        Strength::Weak => {
            let done = tau[i].iter().any(|&j| u.obs[j].1 == Status::Done);
            let dead = tau[i].iter().any(|&j| u.obs[j].1 == Status::Dead);
            (u.obs[i].0, done as u8 | (dead as u8) << 1)
        }
        Strength::Strong => (u.obs[i].0, u.obs[i].1 as u8),
    }
}

/// Repeatedly splits blocks by signature until stable. Block numbers are
/// assigned in order of first occurrence, so witnesses are deterministic.
pub(crate) fn refine<K: Ord + Clone>(
    n: usize,
    init: impl Fn(usize) -> K,
    sig: impl Fn(usize, &[usize]) -> Vec<K>,
) -> Vec<usize> {
    let number = |keys: Vec<(usize, Vec<K>)>| {
        let mut seen: BTreeMap<(usize, Vec<K>), usize> = BTreeMap::new();
        keys.into_iter()
            .map(|k| {
                let next = seen.len();
                *seen.entry(k).or_insert(next)
            })
            .collect::<Vec<usize>>()
    };
    let mut block = number((0..n).map(|i| (0, vec![init(i)])).collect());
    loop {
        let next = number(
            (0..n)
                .map(|i| {
                    let mut s = sig(i, &block);
                    s.sort();
                    s.dedup();
                    (block[i], s)
                })
                .collect(),
        );
        let stable = next.iter().max() == block.iter().max();
        block = next;
        if stable {
            return block;
        }
    }
}

fn signature(u: &Union, sat: &Saturation, mode: Mode, i: usize, b: &[usize]) -> Vec<Item> {
    let mut s = Vec::new();
    for (p, t) in &sat.fwd[i] {
        s.push(Item::Move(false, p.clone(), b[*t]));
    }
    for (p, t) in &sat.rev[i] {
        s.push(Item::Move(true, p.clone(), b[*t]));
    }
    if mode.forward() {
        s.extend(sat.tau_f[i].iter().map(|&t| Item::Tau(false, b[t])));
    }
    if mode.reverse() {
        s.extend(sat.tau_r[i].iter().map(|&t| Item::Tau(true, b[t])));
    }
    // a distribution whose outcomes all lie in one block is as good as none
    for &j in &sat.tau_f[i] {
        let d = lift(&u.prob[j], b);
        if d.len() > 1 {
            s.push(Item::Dist(d));
        }
    }
    s
}

// Refinement keys: the initial observation, then signature items.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Key2 {
    Obs((StateId, u8)),
    Item(Item),
}

/// Coarsest stable partition of `u` for the given equivalence.
pub fn partition(u: &Union, mode: Mode, strength: Strength, max_seq: usize) -> Partition {
    let u = &*u.weakened(strength);
    let sat = Saturation::new(u, mode, strength, max_seq.max(1));
    let block = refine(
        u.n,
        |i| Key2::Obs(observation(u, &sat.tau_f, i, mode, strength)),
        |i, b| signature(u, &sat, mode, i, b).into_iter().map(Key2::Item).collect(),
    );
    Partition { block, split: if u.split == 0 { u.n } else { u.split } }
}

/// Step bisimulation on the disjoint union of `a` and `b`.
pub fn check_step_bisim(a: &Plts, b: &Plts, mode: Mode, strength: Strength) -> Result<Verdict> {
    check_pomset_bisim(a, b, mode, strength, 1)
}

/// Pomset bisimulation with pomsets of up to `max_seq` consecutive steps.
pub fn check_pomset_bisim(a: &Plts, b: &Plts, mode: Mode, strength: Strength, max_seq: usize) -> Result<Verdict> {
    let u = Union::new(a, b)?;
    let partition = partition(&u, mode, strength, max_seq);
    Ok(Verdict { equivalent: partition.block[u.roots.0] == partition.block[u.roots.1], partition })
}

/// The partition of a single system.
pub fn self_partition(p: &Plts, mode: Mode, strength: Strength, max_seq: usize) -> Partition {
    let mut w = partition(&Union::single(p), mode, strength, max_seq);
    w.split = p.len();
    w
}

/// Collapses each block of a stable strong partition into one configuration.
pub fn quotient(p: &Plts, w: &Partition) -> Result<Plts> {
    if w.block.len() != p.len() {
        return Err(Error::UnstablePartition);
    }
    let u = Union::single(p);
    let sat = Saturation::new(&u, Mode::ForwardReverse, Strength::Strong, 1);
    let sig = |i: usize| {
        let mut s = signature(&u, &sat, Mode::ForwardReverse, i, &w.block);
        s.sort();
        s.dedup();
        (u.obs[i], s)
    };
    let blocks = w.blocks();
    for members in &blocks {
        if members.iter().any(|&i| sig(i) != sig(members[0])) {
            return Err(Error::UnstablePartition);
        }
    }
    let mut q = Plts {
        configs: IndexSet::new(),
        status: vec![],
        prob: vec![],
        fwd: vec![],
        rev: vec![],
        roots: p.roots.iter().map(|&r| w.block[r]).collect(),
        model: p.model.clone(),
    };
    for members in &blocks {
        // a member that resolves surely stands in for its resolvent
        let rep = members.iter().copied().find(|&i| !is_dirac(&u, i)).unwrap_or(members[0]);
        let me = w.block[rep];
        q.configs.insert(p.config(rep).clone());
        q.status.push(p.status[rep]);
        let dist: Vec<(Prob, usize)> = lift(&p.prob[rep], &w.block).into_iter().map(|(b, m)| (m, b)).collect();
        q.prob.push(if dist.len() == 1 && dist[0].1 == me { vec![] } else { dist });
        let map = |es: &Vec<Edge>| {
            let set: BTreeSet<Edge> =
                es.iter().map(|e| Edge { label: e.label.clone(), key: e.key, target: w.block[e.target] }).collect();
            set.into_iter().collect::<Vec<_>>()
        };
        q.fwd.push(map(&p.fwd[rep]));
        q.rev.push(map(&p.rev[rep]));
    }
    Ok(q)
}

/// Quotient by strong forward-reverse step bisimilarity.
pub fn minimize(p: &Plts) -> Result<Plts> {
    quotient(p, &self_partition(p, Mode::ForwardReverse, Strength::Strong, 1))
}

/// A step label without its `tau` parts, or `tau` if nothing is left.
pub(crate) fn observable(label: &[Action]) -> Vec<Action> {
    let v: Vec<Action> = label.iter().filter(|a| **a != Action::Tau).cloned().collect();
    if v.is_empty() {
        vec![Action::Tau]
    } else {
        v
    }
}

pub(crate) fn is_tau(label: &[Action]) -> bool {
    label == [Action::Tau]
}
