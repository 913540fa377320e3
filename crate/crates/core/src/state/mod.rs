//! Finite data-state models: valuations, guard tests, effects and joins.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::syntax::{Action, Guard};

/// Index of a state inside its model.
pub type StateId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DataState {
    pub id: String,
    pub atoms: BTreeSet<String>,
}

/// An immutable finite model. Effects are keyed by the printed action (`a`,
/// `'a`, `tau`). Actions the model never mentions leave the state unchanged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateModel {
    states: Vec<DataState>,
    atoms: BTreeSet<String>,
    effects: BTreeMap<(String, StateId), StateId>,
    joins: BTreeMap<(StateId, StateId), StateId>,
    inverses: BTreeMap<(String, StateId), StateId>,
}

impl Default for StateModel {
    fn default() -> Self {
        StateModel::trivial()
    }
}

impl fmt::Display for StateModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "atoms:")?;
        for a in &self.atoms {
            write!(f, " {a}")?;
        }
        writeln!(f)?;
        for s in &self.states {
            write!(f, "state {}:", s.id)?;
            for a in &s.atoms {
                write!(f, " {a}")?;
            }
            writeln!(f)?;
        }
        for ((a, s), t) in &self.effects {
            writeln!(f, "effect {a} {} -> {}", self.states[*s].id, self.states[*t].id)?;
        }
        for ((s, t), u) in &self.joins {
            writeln!(f, "join {} {} -> {}", self.states[*s].id, self.states[*t].id, self.states[*u].id)?;
        }
        for ((a, s), t) in &self.inverses {
            writeln!(f, "inverse {a} {} -> {}", self.states[*s].id, self.states[*t].id)?;
        }
        Ok(())
    }
}

impl StateModel {
    /// One state, no atoms.
    pub fn trivial() -> Self {
        StateModel::builder(&[]).state("s0", &[]).build().expect("trivial model")
    }

    pub fn builder(atoms: &[&str]) -> ModelBuilder {
        ModelBuilder {
            atoms: atoms.iter().map(|a| a.to_string()).collect(),
            states: Vec::new(),
            effects: Vec::new(),
            joins: Vec::new(),
            inverses: Vec::new(),
        }
    }

    /// Reads the line format `atoms: p q`, `state s0: p`, `effect a s0 -> s1`,
    /// `join s1 s2 -> s3`, `inverse a s1 -> s0`. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut b = StateModel::builder(&[]);
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::Model(format!("line {}: cannot read `{line}`", no + 1));
            let words: Vec<&str> = line.split_whitespace().collect();
            match words[0] {
                "atoms:" => b.atoms.extend(words[1..].iter().map(|w| w.to_string())),
                "state" => {
                    let name = words.get(1).and_then(|w| w.strip_suffix(':')).ok_or_else(bad)?;
                    b.states.push((name.to_string(), words[2..].iter().map(|w| w.to_string()).collect()));
                }
                kind @ ("effect" | "join" | "inverse") => {
                    if words.len() != 5 || words[3] != "->" {
                        return Err(bad());
                    }
                    let entry = (words[1].to_string(), words[2].to_string(), words[4].to_string());
                    match kind {
                        "effect" => b.effects.push(entry),
                        "join" => b.joins.push(entry),
                        _ => b.inverses.push(entry),
                    }
                }
                _ => return Err(bad()),
            }
        }
        b.build()
    }

    pub fn states(&self) -> &[DataState] {
        &self.states
    }

    pub fn state(&self, id: StateId) -> &DataState {
        &self.states[id]
    }

    pub fn atoms(&self) -> &BTreeSet<String> {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn lookup(&self, name: &str) -> Result<StateId> {
        self.states.iter().position(|s| s.id == name).ok_or_else(|| Error::UnknownState(name.into()))
    }

    /// Initial state: the first declared one.
    pub fn initial(&self) -> StateId {
        0
    }

    pub fn check_atoms(&self, g: &Guard) -> Result<()> {
        let mut used = BTreeSet::new();
        g.atoms(&mut used);
        match used.into_iter().find(|a| !self.atoms.contains(a)) {
            Some(a) => Err(Error::UnknownAtom(a)),
            None => Ok(()),
        }
    }

    pub fn test(&self, g: &Guard, s: StateId) -> Result<bool> {
        Ok(match g {
            Guard::Epsilon => true,
            Guard::Delta => false,
            Guard::Atom(a) => {
                if !self.atoms.contains(a) {
                    return Err(Error::UnknownAtom(a.clone()));
                }
                self.states[s].atoms.contains(a)
            }
            Guard::Not(x) => !self.test(x, s)?,
            Guard::Sum(x, y) => self.test(x, s)? | self.test(y, s)?,
            Guard::Prod(x, y) => self.test(x, s)? & self.test(y, s)?,
        })
    }

    fn mentions(&self, key: &str) -> bool {
        self.effects.range((key.to_string(), 0)..).next().is_some_and(|((k, _), _)| k == key)
    }

    pub fn effect(&self, a: &Action, s: StateId) -> Result<StateId> {
        let key = match a {
            Action::Epsilon => return Ok(s),
            Action::Delta => return Err(Error::Model("delta has no effect".into())),
            other => other.to_string(),
        };
        if let Some(&t) = self.effects.get(&(key.clone(), s)) {
            return Ok(t);
        }
        if self.mentions(&key) {
            Err(Error::MissingEffect { action: key, state: self.states[s].id.clone() })
        } else {
            Ok(s)
        }
    }

    /// Joint effect of a step: the join of every single effect, all taken
    /// from the same source state.
    pub fn step_effect(&self, acts: &[Action], s: StateId) -> Result<StateId> {
        let mut acc = s;
        for a in acts {
            let t = self.effect(a, s)?;
            acc = self.join(s, acc, t)?;
        }
        Ok(acc)
    }

    /// Holds when `g` is guaranteed after `a` from every state.
    pub fn wp(&self, a: &Action, g: &Guard) -> Result<bool> {
        for s in 0..self.states.len() {
            if !self.test(g, self.effect(a, s)?)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Join of two states reached from a common source. A side that did not
    /// move is neutral. Otherwise the declared table decides, then the state
    /// that applies both sides' atom changes to the source.
    pub fn join(&self, source: StateId, x: StateId, y: StateId) -> Result<StateId> {
        if x == source || x == y {
            return Ok(y);
        }
        if y == source {
            return Ok(x);
        }
        if let Some(&z) = self.joins.get(&(x.min(y), x.max(y))) {
            return Ok(z);
        }
        let (src, xs, ys) = (&self.states[source].atoms, &self.states[x].atoms, &self.states[y].atoms);
        let merged: BTreeSet<String> = self
            .atoms
            .iter()
            .filter(|a| {
                let moved = |side: &BTreeSet<String>| side.contains(*a) != src.contains(*a);
                if moved(xs) {
                    xs.contains(*a)
                } else if moved(ys) {
                    ys.contains(*a)
                } else {
                    src.contains(*a)
                }
            })
            .cloned()
            .collect();
        self.states
            .iter()
            .position(|s| s.atoms == merged)
            .ok_or_else(|| Error::NonJoinableStates(self.states[x].id.clone(), self.states[y].id.clone()))
    }

    /// Undoes `a` landing in `t`: an explicit entry wins, otherwise the unique
    /// preimage of `t` when it exists.
    pub fn inverse(&self, a: &Action, t: StateId) -> Option<StateId> {
        self.step_inverse(std::slice::from_ref(a), t)
    }

    pub fn step_inverse(&self, acts: &[Action], t: StateId) -> Option<StateId> {
        if let [a] = acts {
            if let Some(&s) = self.inverses.get(&(a.to_string(), t)) {
                return Some(s);
            }
        }
        let mut pre = (0..self.states.len()).filter(|&s| self.step_effect(acts, s).ok() == Some(t));
        match (pre.next(), pre.next()) {
            (Some(s), None) => Some(s),
            _ => None,
        }
    }
}

pub struct ModelBuilder {
    atoms: BTreeSet<String>,
    states: Vec<(String, BTreeSet<String>)>,
    effects: Vec<(String, String, String)>,
    joins: Vec<(String, String, String)>,
    inverses: Vec<(String, String, String)>,
}

impl ModelBuilder {
    pub fn state(mut self, id: &str, atoms: &[&str]) -> Self {
        self.states.push((id.into(), atoms.iter().map(|a| a.to_string()).collect()));
        self
    }

    pub fn effect(mut self, action: &str, from: &str, to: &str) -> Self {
        self.effects.push((action.into(), from.into(), to.into()));
        self
    }

    pub fn join(mut self, x: &str, y: &str, z: &str) -> Self {
        self.joins.push((x.into(), y.into(), z.into()));
        self
    }

    pub fn inverse(mut self, action: &str, from: &str, to: &str) -> Self {
        self.inverses.push((action.into(), from.into(), to.into()));
        self
    }

    pub fn build(self) -> Result<StateModel> {
        if self.states.is_empty() {
            return Err(Error::Model("no states declared".into()));
        }
        let mut states: Vec<DataState> = Vec::new();
        for (id, atoms) in self.states {
            if states.iter().any(|s| s.id == id) {
                return Err(Error::Model(format!("state `{id}` declared twice")));
            }
            if let Some(a) = atoms.iter().find(|a| !self.atoms.contains(*a)) {
                return Err(Error::UnknownAtom(a.clone()));
            }
            states.push(DataState { id, atoms });
        }
        let find = |n: &str| states.iter().position(|s| s.id == n).ok_or_else(|| Error::UnknownState(n.into()));
        let mut effects = BTreeMap::new();
        for (a, s, t) in &self.effects {
            if a == "eps" || a == "delta" {
                return Err(Error::Model(format!("`{a}` cannot carry an effect")));
            }
            if effects.insert((a.clone(), find(s)?), find(t)?).is_some() {
                return Err(Error::Model(format!("effect of `{a}` on `{s}` declared twice")));
            }
        }
        let mut joins = BTreeMap::new();
        for (x, y, z) in &self.joins {
            let (x, y) = (find(x)?, find(y)?);
            joins.insert((x.min(y), x.max(y)), find(z)?);
        }
        let mut inverses = BTreeMap::new();
        for (a, s, t) in &self.inverses {
            inverses.insert((a.clone(), find(s)?), find(t)?);
        }
        Ok(StateModel { states, atoms: self.atoms, effects, joins, inverses })
    }
}
