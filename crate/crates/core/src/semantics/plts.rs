use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write;

use indexmap::IndexSet;
use num_traits::One;

use super::engine::{Bounds, Config, Engine, Status};
use super::show_label;
use crate::error::{Error, Result};
use crate::state::{StateId, StateModel};
use crate::syntax::{pretty, Action, Definitions, Key, Process};
use crate::Prob;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub label: Vec<Action>,
    pub key: Option<Key>,
    pub target: usize,
}

/// Probabilistic transition system over interned configurations.
#[derive(Clone, Debug)]
pub struct Plts {
    pub configs: IndexSet<Config>,
    pub status: Vec<Status>,
    pub prob: Vec<Vec<(Prob, usize)>>,
    pub fwd: Vec<Vec<Edge>>,
    pub rev: Vec<Vec<Edge>>,
    pub roots: Vec<usize>,
    pub model: StateModel,
}

pub fn build_plts(
    root: &Process,
    s0: StateId,
    model: &StateModel,
    defs: &Definitions,
    bounds: Bounds,
) -> Result<Plts> {
    build_plts_from(vec![Config::new(root.clone(), s0)], model, defs, bounds)
}

/// Breadth-first closure from several roots.
pub fn build_plts_from(roots: Vec<Config>, model: &StateModel, defs: &Definitions, bounds: Bounds) -> Result<Plts> {
    for c in &roots {
        bounds.features.check(&c.process)?;
        let mut atoms = BTreeSet::new();
        c.process.guard_atoms(&mut atoms);
        for p in defs.0.values() {
            bounds.features.check(p)?;
            p.guard_atoms(&mut atoms);
        }
        if let Some(a) = atoms.into_iter().find(|a| !model.atoms().contains(a)) {
            return Err(Error::UnknownAtom(a));
        }
        if c.state >= model.len() {
            return Err(Error::UnknownState(c.state.to_string()));
        }
    }
    let engine = Engine::new(model, defs, bounds);
    let mut g = Plts {
        configs: IndexSet::new(),
        status: Vec::new(),
        prob: Vec::new(),
        fwd: Vec::new(),
        rev: Vec::new(),
        roots: Vec::new(),
        model: model.clone(),
    };
    let mut queue = VecDeque::new();
    for c in roots {
        let i = g.intern(c, bounds.max_configs, &mut queue)?;
        g.roots.push(i);
    }
    while let Some(i) = queue.pop_front() {
        let c = g.configs[i].clone();
        g.status[i] = engine.status(&c.process, c.state)?;
        if engine.resolve(&c.process, c.state)?.is_some() {
            let mut edges = Vec::new();
            for (p, target) in engine.prob_resolve(&c)? {
                edges.push((p, g.intern(target, bounds.max_configs, &mut queue)?));
            }
            g.prob[i] = edges;
        } else {
            let mut edges = Vec::new();
            for step in engine.forward_steps(&c)? {
                let target = g.intern(step.target, bounds.max_configs, &mut queue)?;
                edges.push(Edge { label: step.label, key: step.key, target });
            }
            edges.sort();
            edges.dedup();
            g.fwd[i] = edges;
        }
        let mut back = Vec::new();
        for step in engine.reverse_steps(&c)? {
            let target = g.intern(step.target, bounds.max_configs, &mut queue)?;
            back.push(Edge { label: step.label, key: step.key, target });
        }
        back.sort();
        g.rev[i] = back;
    }
    add_redo_edges(&mut g, &engine)?;
    Ok(g)
}

/// Forward edges pick the least unused key, while an undone event may
/// carry any key. Any fresh key is a valid choice, so each undo is paired
/// with the redo that reuses its key whenever the engine confirms that the
/// redo restores the configuration exactly.
fn add_redo_edges(g: &mut Plts, engine: &Engine) -> Result<()> {
    for i in 0..g.len() {
        for e in g.rev[i].clone() {
            let (j, Some(key)) = (e.target, e.key) else { continue };
            let known = g.fwd[j].iter().any(|f| f.target == i && f.key == e.key && f.label == e.label);
            if known || !g.prob[j].is_empty() || g.configs[j].process.keys().contains(&key) {
                continue;
            }
            let redo = engine.forward_steps_keyed(&g.configs[j], key)?;
            if redo.iter().any(|s| s.label == e.label && s.target == g.configs[i]) {
                g.fwd[j].push(Edge { label: e.label, key: e.key, target: i });
                g.fwd[j].sort();
            }
        }
    }
    Ok(())
}

impl Plts {
    fn intern(&mut self, c: Config, max: usize, queue: &mut VecDeque<usize>) -> Result<usize> {
        if let Some(i) = self.configs.get_index_of(&c) {
            return Ok(i);
        }
        if self.configs.len() >= max {
            return Err(Error::StateSpaceBoundExceeded(max));
        }
        let (i, _) = self.configs.insert_full(c);
        self.status.push(Status::Pending);
        self.prob.push(Vec::new());
        self.fwd.push(Vec::new());
        self.rev.push(Vec::new());
        queue.push_back(i);
        Ok(i)
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn config(&self, i: usize) -> &Config {
        &self.configs[i]
    }

    pub fn root(&self) -> usize {
        self.roots[0]
    }

    /// √: the configuration has terminated successfully.
    pub fn terminated(&self, i: usize) -> bool {
        self.status[i] == Status::Done
    }

    /// No cycle through forward and probabilistic edges.
    pub fn is_forward_acyclic(&self) -> bool {
        let n = self.len();
        let mut indeg = vec![0usize; n];
        let succ = |i: usize| {
            self.fwd[i].iter().map(|e| e.target).chain(self.prob[i].iter().map(|&(_, t)| t)).collect::<Vec<_>>()
        };
        for i in 0..n {
            for t in succ(i) {
                indeg[t] += 1;
            }
        }
        let mut stack: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut seen = 0;
        while let Some(i) = stack.pop() {
            seen += 1;
            for t in succ(i) {
                indeg[t] -= 1;
                if indeg[t] == 0 {
                    stack.push(t);
                }
            }
        }
        seen == n
    }

    /// Checks that every probabilistic fan-out sums to exactly one.
    pub fn distributions_sound(&self) -> bool {
        self.prob.iter().all(|d| d.is_empty() || d.iter().map(|(p, _)| *p).sum::<Prob>() == Prob::one())
    }

    fn describe(&self, i: usize) -> String {
        let c = &self.configs[i];
        let mut s = format!(
            "{} state={} done={} term={}",
            i,
            self.model.state(c.state).id,
            self.terminated(i),
            pretty(&c.process)
        );
        if !c.history.is_empty() {
            let hist: Vec<String> =
                c.history.iter().map(|r| format!("{}:{}", r.key, self.model.state(r.from).id)).collect();
            let _ = write!(s, " history={}", hist.join(","));
        }
        s
    }

    /// One record per line: configurations first, then edges.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for i in 0..self.len() {
            let _ = writeln!(out, "config {}", self.describe(i));
        }
        for i in 0..self.len() {
            for (p, t) in &self.prob[i] {
                let _ = writeln!(out, "edge prob {i} -> {t} p={p}");
            }
            for e in &self.fwd[i] {
                let _ = writeln!(out, "edge fwd {i} -> {} {}", e.target, show_label(&e.label, None));
            }
            for e in &self.rev[i] {
                let _ = writeln!(out, "edge rev {i} -> {} {}", e.target, show_label(&e.label, e.key));
            }
        }
        out
    }

    /// Grouped human-readable listing.
    pub fn to_doc(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} configurations, roots {:?}", self.len(), self.roots);
        for i in 0..self.len() {
            let _ = writeln!(out, "[{}]", self.describe(i));
            for (p, t) in &self.prob[i] {
                let _ = writeln!(out, "    ~> {t} with {p}");
            }
            for e in &self.fwd[i] {
                let _ = writeln!(out, "    --{}--> {}", show_label(&e.label, None), e.target);
            }
            for e in &self.rev[i] {
                let _ = writeln!(out, "    <<{}<< {}", show_label(&e.label, e.key), e.target);
            }
        }
        out
    }
}
