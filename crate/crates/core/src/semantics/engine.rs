
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::features::FeatureMode;
use crate::state::{StateId, StateModel};
use crate::syntax::{is_std, Action, Definitions, Key, Process};
use crate::Prob;

/// A process paired with a data state. `history` logs the events fired
/// since the configuration was built, oldest first, each with the state it
/// fired from and its label.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Config {
    pub process: Process,
    pub state: StateId,
    pub history: Vec<Record>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Record {
    pub key: Key,
    pub from: StateId,
    pub label: Vec<Action>,
}

impl Config {
    pub fn new(process: Process, state: StateId) -> Self {
        Config { process, state, history: Vec::new() }
    }
}

/// How far a term is from successful termination in the current state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Status {
    /// Terminated (√): `nil`, `eps`, a passing guard.
    Done,
    /// Still has actions to perform (possibly blocked).
    Pending,
    /// Deadlocked: `delta`, a failing guard. Absorbing under `||`.
    Dead,
}

impl Status {
    fn choice(self, other: Status) -> Status {
        use Status::*;
        match (self, other) {
            (Pending, _) | (_, Pending) => Pending,
            (Done, _) | (_, Done) => Done,
            _ => Dead,
        }
    }

    fn parallel(self, other: Status) -> Status {
        use Status::*;
        match (self, other) {
            (Dead, _) | (_, Dead) => Dead,
            (Pending, _) | (_, Pending) => Pending,
            _ => Done,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_configs: usize,
    pub max_unfold: usize,
    /// Read the probabilistic rule for `||` literally, as a choice.
    pub faithful_pcomp: bool,
    pub features: FeatureMode,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { max_configs: 10_000, max_unfold: 64, faithful_pcomp: false, features: FeatureMode::full() }
    }
}

/// One action transition. `key` is the key of the step (absent when
/// reversibility is off).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub label: Vec<Action>,
    pub key: Option<Key>,
    pub target: Config,
}

pub type Distribution = Vec<(Prob, Config)>;

/// Rule evaluation against one model and one set of definitions.
pub struct Engine<'a> {
    pub model: &'a StateModel,
    pub defs: &'a Definitions,
    pub bounds: Bounds,
}

fn merge(dist: &mut Vec<(Prob, Process)>, p: Prob, x: Process) {
    match dist.iter_mut().find(|(_, y)| *y == x) {
        Some(entry) => entry.0 += p,
        None => dist.push((p, x)),
    }
}

fn product(
    a: Option<Vec<(Prob, Process)>>,
    b: Option<Vec<(Prob, Process)>>,
    left: &Process,
    right: &Process,
    join: impl Fn(Process, Process) -> Process,
) -> Option<Vec<(Prob, Process)>> {
    if a.is_none() && b.is_none() {
        return None;
    }
    let a = a.unwrap_or_else(|| vec![(Prob::one(), left.clone())]);
    let b = b.unwrap_or_else(|| vec![(Prob::one(), right.clone())]);
    let mut out = Vec::new();
    for (p, x) in &a {
        for (q, y) in &b {
            merge(&mut out, p * q, join(x.clone(), y.clone()));
        }
    }
    Some(out)
}

fn map_dist(d: Option<Vec<(Prob, Process)>>, f: impl Fn(Process) -> Process) -> Option<Vec<(Prob, Process)>> {
    d.map(|d| d.into_iter().map(|(p, x)| (p, f(x))).collect())
}

fn sorted(mut v: Vec<Action>) -> Vec<Action> {
    v.sort();
    v
}

impl<'a> Engine<'a> {
    pub fn new(model: &'a StateModel, defs: &'a Definitions, bounds: Bounds) -> Self {
        Engine { model, defs, bounds }
    }

    fn unfold(&self, name: &str, depth: usize) -> Result<&'a Process> {
        if depth >= self.bounds.max_unfold {
            return Err(Error::UnguardedRecursion(name.into()));
        }
        self.defs.get(name).ok_or_else(|| Error::UnknownConstant(name.into()))
    }

    pub fn status(&self, p: &Process, s: StateId) -> Result<Status> {
        self.status_at(p, s, 0)
    }

    fn status_at(&self, p: &Process, s: StateId, depth: usize) -> Result<Status> {
        Ok(match p {
            Process::Nil => Status::Done,
            Process::Guard(g) => {
                if self.model.test(g, s)? {
                    Status::Done
                } else {
                    Status::Dead
                }
            }
            Process::Prefix(..) => Status::Pending,
            Process::Past(q, _, _) | Process::Restrict(q, _) | Process::Relabel(q, _) | Process::Breve(q) => {
                self.status_at(q, s, depth)?
            }
            Process::Const(n) => self.status_at(self.unfold(n, depth)?, s, depth + 1)?,
            Process::Seq(a, b) => {
                if !is_std(b) {
                    return self.status_at(b, s, depth);
                }
                match self.status_at(a, s, depth)? {
                    Status::Done => self.status_at(b, s, depth)?,
                    other => other,
                }
            }
            Process::Sum(a, b) | Process::BoxSum(_, a, b) => {
                if !is_std(a) && is_std(b) {
                    self.status_at(a, s, depth)?
                } else if !is_std(b) && is_std(a) {
                    self.status_at(b, s, depth)?
                } else {
                    self.status_at(a, s, depth)?.choice(self.status_at(b, s, depth)?)
                }
            }
            Process::Par(a, b) => self.status_at(a, s, depth)?.parallel(self.status_at(b, s, depth)?),
        })
    }

    /// Probabilistic resolution. `None` when nothing is left to resolve.
    pub fn resolve(&self, p: &Process, s: StateId) -> Result<Option<Vec<(Prob, Process)>>> {
        self.resolve_at(p, s, 0)
    }

    fn resolve_at(&self, p: &Process, s: StateId, depth: usize) -> Result<Option<Vec<(Prob, Process)>>> {
        Ok(match p {
            Process::Nil | Process::Guard(_) | Process::Breve(_) => None,
            Process::Prefix(..) => Some(vec![(Prob::one(), Process::breve(p.clone()))]),
            Process::Const(n) => {
                let body = self.unfold(n, depth)?;
                Some(self.resolve_at(body, s, depth + 1)?.unwrap_or_else(|| vec![(Prob::one(), body.clone())]))
            }
            Process::Past(q, acts, k) => {
                map_dist(self.resolve_at(q, s, depth)?, |x| Process::Past(Box::new(x), acts.clone(), *k))
            }
            Process::Restrict(q, l) => map_dist(self.resolve_at(q, s, depth)?, |x| Process::restrict(x, l.clone())),
            Process::Relabel(q, f) => map_dist(self.resolve_at(q, s, depth)?, |x| Process::relabel(x, f.clone())),
            Process::Seq(a, b) => {
                if !is_std(b) {
                    let a = (**a).clone();
                    map_dist(self.resolve_at(b, s, depth)?, |y| Process::seq(a.clone(), y))
                } else {
                    let ra = self.resolve_at(a, s, depth)?;
                    let rb = if self.status_at(a, s, depth)? == Status::Done {
                        self.resolve_at(b, s, depth)?
                    } else {
                        None
                    };
                    product(ra, rb, a, b, Process::seq)
                }
            }
            Process::Sum(a, b) => {
                if !is_std(a) {
                    let b = (**b).clone();
                    map_dist(self.resolve_at(a, s, depth)?, |x| Process::sum(x, b.clone()))
                } else if !is_std(b) {
                    let a = (**a).clone();
                    map_dist(self.resolve_at(b, s, depth)?, |y| Process::sum(a.clone(), y))
                } else {
                    product(self.resolve_at(a, s, depth)?, self.resolve_at(b, s, depth)?, a, b, Process::sum)
                }
            }
            Process::BoxSum(pi, a, b) => {
                if !is_std(a) {
                    let b = (**b).clone();
                    map_dist(self.resolve_at(a, s, depth)?, |x| Process::boxsum(*pi, x, b.clone()))
                } else if !is_std(b) {
                    let a = (**a).clone();
                    map_dist(self.resolve_at(b, s, depth)?, |y| Process::boxsum(*pi, a.clone(), y))
                } else {
                    // an operand that can never act contributes no outcome
                    let live = |p: &Process| -> Result<Option<Vec<(Prob, Process)>>> {
                        if self.status_at(p, s, depth)? == Status::Dead {
                            return Ok(None);
                        }
                        self.resolve_at(p, s, depth)
                    };
                    match (live(a)?, live(b)?) {
                        (Some(ra), Some(rb)) => {
                            let mut out = Vec::new();
                            for (p, x) in ra {
                                merge(&mut out, p * pi, x);
                            }
                            for (q, y) in rb {
                                merge(&mut out, q * (Prob::one() - pi), y);
                            }
                            Some(out)
                        }
                        (Some(r), None) | (None, Some(r)) => Some(r),
                        (None, None) => None,
                    }
                }
            }
            Process::Par(a, b) => {
                let ra = self.resolve_at(a, s, depth)?;
                let rb = self.resolve_at(b, s, depth)?;
                if self.bounds.faithful_pcomp {
                    product(ra, rb, a, b, Process::sum)
                } else {
                    product(ra, rb, a, b, Process::par)
                }
            }
        })
    }

    /// The full resolution distribution of a configuration; a configuration
    /// with nothing to resolve maps to itself with probability one.
    pub fn prob_resolve(&self, c: &Config) -> Result<Distribution> {
        Ok(match self.resolve(&c.process, c.state)? {
            None => vec![(Prob::one(), c.clone())],
            Some(d) => d
                .into_iter()
                .filter(|(p, _)| !p.is_zero())
                .map(|(p, x)| Ok((p, self.canonical(Config { process: x, state: c.state, history: c.history.clone() })?)))
                .collect::<Result<_>>()?,
        })
    }

    /// Resolution marks carry no information beyond the term and the state:
    /// they sit exactly where resolution would put them, or nowhere while a
    /// probabilistic choice is pending. Every derived configuration is kept
    /// in this form, so that marks left behind by undone prefixes do not
    /// multiply the state space.
    pub fn canonical(&self, c: Config) -> Result<Config> {
        let bare = c.process.strip_breves();
        let process = match self.resolve(&bare, c.state)? {
            Some(mut d) if d.len() == 1 && d[0].1.strip_breves() == bare => d.remove(0).1,
            _ => bare,
        };
        Ok(Config { process, ..c })
    }

    fn fresh_key(c: &Config) -> Key {
        let used = c.process.keys();
        (1..).map(Key).find(|k| !used.contains(k) && !c.history.iter().any(|r| r.key == *k)).unwrap()
    }

    /// Forward action steps from resolved redexes, keyed by the least
    /// unused key.
    pub fn forward_steps(&self, c: &Config) -> Result<Vec<Step>> {
        self.forward_steps_keyed(c, Engine::fresh_key(c))
    }

    /// Forward action steps using `key` for the new event, which must not
    /// occur in `c`.
    pub fn forward_steps_keyed(&self, c: &Config, key: Key) -> Result<Vec<Step>> {
        let reversible = self.bounds.features.reversibility;
        let mut out = Vec::new();
        for (label, process) in self.fwd(&c.process, c.state, key, reversible)? {
            let label = sorted(label);
            let state = self.model.step_effect(&label, c.state)?;
            let mut history = c.history.clone();
            if reversible {
                history.push(Record { key, from: c.state, label: label.clone() });
                self.normalize_log(&mut history);
            }
            let target = self.canonical(Config { process, state, history })?;
            out.push(Step { label, key: reversible.then_some(key), target });
        }
        Ok(out)
    }

    fn fwd(&self, p: &Process, s: StateId, m: Key, rev: bool) -> Result<Vec<(Vec<Action>, Process)>> {
        let wrap = |v: Vec<(Vec<Action>, Process)>, f: &dyn Fn(Process) -> Process| {
            v.into_iter().map(|(l, x)| (l, f(x))).collect::<Vec<_>>()
        };
        Ok(match p {
            Process::Nil | Process::Guard(_) | Process::Const(_) | Process::Prefix(..) => vec![],
            Process::Breve(inner) => match &**inner {
                Process::Prefix(acts, body) => {
                    let next = if rev { Process::Past(body.clone(), acts.clone(), m) } else { (**body).clone() };
                    vec![(acts.clone(), next)]
                }
                _ => vec![],
            },
            Process::Past(q, acts, k) => {
                wrap(self.fwd(q, s, m, rev)?, &|x| Process::Past(Box::new(x), acts.clone(), *k))
            }
            Process::Seq(a, b) => {
                let mut v = Vec::new();
                if is_std(b) {
                    let b = (**b).clone();
                    v.extend(wrap(self.fwd(a, s, m, rev)?, &|x| Process::seq(x, b.clone())));
                }
                if !is_std(b) || self.status(a, s)? == Status::Done {
                    let a = (**a).clone();
                    v.extend(wrap(self.fwd(b, s, m, rev)?, &|y| Process::seq(a.clone(), y)));
                }
                v
            }
            Process::Sum(a, b) | Process::BoxSum(_, a, b) => {
                let rebuild = |x: Process, y: Process| match p {
                    Process::BoxSum(pi, _, _) => Process::boxsum(*pi, x, y),
                    _ => Process::sum(x, y),
                };
                let mut v = Vec::new();
                if is_std(b) {
                    v.extend(wrap(self.fwd(a, s, m, rev)?, &|x| rebuild(x, (**b).clone())));
                }
                if is_std(a) {
                    v.extend(wrap(self.fwd(b, s, m, rev)?, &|y| rebuild((**a).clone(), y)));
                }
                v
            }
            Process::Par(..) => {
                if self.status(p, s)? == Status::Dead {
                    return Ok(vec![]);
                }
                let parts = par_leaves(p);
                let mut choices = Vec::with_capacity(parts.len());
                for q in &parts {
                    choices.push(self.fwd(q, s, m, rev)?);
                }
                let mut v = Vec::new();
                let mut pick = vec![None; parts.len()];
                joint(&choices, 0, &mut pick, &mut |pick: &[Option<usize>]| {
                    let labels: Vec<&[Action]> = (0..parts.len())
                        .filter_map(|i| pick[i].map(|j| choices[i][j].0.as_slice()))
                        .collect();
                    if labels.is_empty() {
                        return;
                    }
                    if let Some(label) = synchronise(&labels) {
                        let mut next = (0..parts.len()).map(|i| match pick[i] {
                            Some(j) => choices[i][j].1.clone(),
                            None => parts[i].clone(),
                        });
                        v.push((label, rebuild_par(p, &mut next)));
                    }
                });
                v
            }
            Process::Restrict(q, l) => self
                .fwd(q, s, m, rev)?
                .into_iter()
                .filter(|(acts, _)| !acts.iter().any(|a| l.blocks(a)))
                .map(|(acts, x)| (acts, Process::restrict(x, l.clone())))
                .collect(),
            Process::Relabel(q, f) => self
                .fwd(q, s, m, rev)?
                .into_iter()
                .map(|(acts, x)| (acts.iter().map(|a| f.apply(a)).collect(), Process::relabel(x, f.clone())))
                .collect(),
        })
    }

    /// Reverse steps: every key whose events all sit at undoable positions.
    pub fn reverse_steps(&self, c: &Config) -> Result<Vec<Step>> {
        if !self.bounds.features.reversibility {
            return Ok(vec![]);
        }
        let mut out = Vec::new();
        for m in c.process.keys() {
            let Some((label, process)) = undo(&c.process, m) else { continue };
            if process.keys().contains(&m) || label.is_empty() {
                continue;
            }
            let label = sorted(label);
            let (state, history) = self.forget_event(c, m, &label)?;
            let target = self.canonical(Config { process, state, history })?;
            // no forward rule leaves a Dead configuration, so none is entered backwards
            if self.status(&target.process, target.state)? == Status::Dead {
                continue;
            }
            out.push(Step { label, key: Some(m), target });
        }
        Ok(out)
    }
}

impl Engine<'_> {
    /// The state and log after removing event `m`: the events that came
    /// later are replayed from the state `m` fired from. An event with no
    /// record predates the log, and its source is found through the
    /// model's inverse.
    fn forget_event(&self, c: &Config, m: Key, label: &[Action]) -> Result<(StateId, Vec<Record>)> {
        let (mut state, keep, later) = match c.history.iter().position(|r| r.key == m) {
            Some(i) => (c.history[i].from, i, i + 1),
            None => {
                let base = c.history.first().map_or(c.state, |r| r.from);
                (self.model.step_inverse(label, base).ok_or(Error::UnknownKey(m.0))?, 0, 0)
            }
        };
        let mut log = c.history[..keep].to_vec();
        for r in &c.history[later..] {
            log.push(Record { key: r.key, from: state, label: r.label.clone() });
            state = self.model.step_effect(&r.label, state)?;
        }
        self.normalize_log(&mut log);
        Ok((state, log))
    }

    /// Brings the log into key order as far as the effects allow. Two
    /// neighbouring events whose effects commute from their common source
    /// can be listed either way without changing any undo, so configurations
    /// that differ only in such orderings become equal.
    fn normalize_log(&self, log: &mut [Record]) {
        let mut changed = true;
        while changed {
            changed = false;
            for i in 1..log.len() {
                if log[i - 1].key < log[i].key {
                    continue;
                }
                let s = log[i - 1].from;
                let (x, y) = (&log[i - 1].label, &log[i].label);
                let via_x = self.model.step_effect(x, s).and_then(|t| self.model.step_effect(y, t));
                let y_first = self.model.step_effect(y, s);
                let via_y = y_first.clone().and_then(|t| self.model.step_effect(x, t));
                match (via_x, via_y, y_first) {
                    (Ok(a), Ok(b), Ok(mid)) if a == b => {
                        log.swap(i - 1, i);
                        log[i - 1].from = s;
                        log[i].from = mid;
                        changed = true;
                    }
                    _ => {}
                }
            }
        }
    }
}

/// Undoes every occurrence of key `m` found at an undoable position and
/// returns the observable label. `None` when an occurrence is blocked.
fn undo(p: &Process, m: Key) -> Option<(Vec<Action>, Process)> {
    Some(match p {
        Process::Nil | Process::Guard(_) | Process::Const(_) | Process::Prefix(..) | Process::Breve(_) => {
            (vec![], p.clone())
        }
        Process::Past(q, acts, k) => {
            if is_std(q) {
                if *k == m {
                    (acts.clone(), Process::breve(Process::Prefix(acts.clone(), q.clone())))
                } else {
                    (vec![], p.clone())
                }
            } else {
                let (l, x) = undo(q, m)?;
                (l, Process::Past(Box::new(x), acts.clone(), *k))
            }
        }
        Process::Seq(a, b) => {
            if is_std(b) {
                let (l, x) = undo(a, m)?;
                (l, Process::seq(x, (**b).clone()))
            } else {
                let (l, y) = undo(b, m)?;
                (l, Process::seq((**a).clone(), y))
            }
        }
        Process::Sum(a, b) | Process::BoxSum(_, a, b) => {
            let rebuild = |x: Process, y: Process| match p {
                Process::BoxSum(pi, _, _) => Process::boxsum(*pi, x, y),
                _ => Process::sum(x, y),
            };
            if !is_std(a) && is_std(b) {
                let (l, x) = undo(a, m)?;
                (l, rebuild(x, (**b).clone()))
            } else if !is_std(b) && is_std(a) {
                let (l, y) = undo(b, m)?;
                (l, rebuild((**a).clone(), y))
            } else if !is_std(a) {
                // both branches carry history: undo the shared event in each
                let (la, x) = undo(a, m)?;
                let (lb, y) = undo(b, m)?;
                if !la.is_empty() && !lb.is_empty() && la != lb {
                    return None;
                }
                (if la.is_empty() { lb } else { la }, rebuild(x, y))
            } else {
                (vec![], p.clone())
            }
        }
        Process::Par(..) => {
            let mut labels = Vec::new();
            let mut next = Vec::new();
            for q in par_leaves(p) {
                let (l, x) = undo(q, m)?;
                labels.push(l);
                next.push(x);
            }
            let parts: Vec<&[Action]> = labels.iter().filter(|l| !l.is_empty()).map(|l| l.as_slice()).collect();
            let label = synchronise(&parts).unwrap_or_else(|| labels.concat());
            (label, rebuild_par(p, &mut next.into_iter()))
        }
        Process::Restrict(q, set) => {
            let (l, x) = undo(q, m)?;
            if l.iter().any(|a| set.blocks(a)) {
                return None;
            }
            (l, Process::restrict(x, set.clone()))
        }
        Process::Relabel(q, f) => {
            let (l, x) = undo(q, m)?;
            (l.iter().map(|a| f.apply(a)).collect(), Process::relabel(x, f.clone()))
        }
    })
}

/// Operands of a maximal `||` tree, left to right.
pub(crate) fn par_leaves(p: &Process) -> Vec<&Process> {
    match p {
        Process::Par(a, b) => {
            let mut v = par_leaves(a);
            v.extend(par_leaves(b));
            v
        }
        other => vec![other],
    }
}

fn rebuild_par(shape: &Process, leaves: &mut impl Iterator<Item = Process>) -> Process {
    match shape {
        Process::Par(a, b) => {
            let x = rebuild_par(a, leaves);
            let y = rebuild_par(b, leaves);
            Process::par(x, y)
        }
        _ => leaves.next().expect("one replacement per operand"),
    }
}

/// Every way for a subset of operands to move together.
fn joint<T>(choices: &[Vec<T>], i: usize, pick: &mut Vec<Option<usize>>, f: &mut impl FnMut(&[Option<usize>])) {
    if i == choices.len() {
        f(pick);
        return;
    }
    pick[i] = None;
    joint(choices, i + 1, pick, f);
    for j in 0..choices[i].len() {
        pick[i] = Some(j);
        joint(choices, i + 1, pick, f);
    }
    pick[i] = None;
}

/// Label of a joint step whose operands contribute `parts`. Operands that
/// offer a lone action pair off with lone complements into `tau`. The
/// pairing is forced, since any leftover complementary pair is a clash
/// and the step is refused (`None`).
pub(crate) fn synchronise(parts: &[&[Action]]) -> Option<Vec<Action>> {
    let mut rest: Vec<Action> = parts.iter().filter(|l| l.len() != 1).flat_map(|l| l.iter().cloned()).collect();
    let mut lone: Vec<Action> = parts.iter().filter(|l| l.len() == 1).map(|l| l[0].clone()).collect();
    let mut taus = 0;
    while let Some(a) = lone.pop() {
        match lone.iter().position(|b| a.is_complement_of(b)) {
            Some(i) => {
                lone.swap_remove(i);
                taus += 1;
            }
            None => rest.push(a),
        }
    }
    if rest.iter().enumerate().any(|(i, a)| rest[i + 1..].iter().any(|b| a.is_complement_of(b))) {
        return None;
    }
    rest.extend(std::iter::repeat_n(Action::Tau, taus));
    Some(rest)
}
