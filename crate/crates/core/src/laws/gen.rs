//! Seeded random terms for law trials and property tests.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::syntax::{Action, Definitions, Guard, Key, Label, LabelSet, Process, RelabelFn};
use crate::Prob;

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub max_depth: usize,
    pub actions: Vec<String>,
    pub atoms: Vec<String>,
    pub allow_recursion: bool,
    /// Emit `[+pi]`.
    pub probabilism: bool,
    pub guards: bool,
    pub tau: bool,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_depth: 4,
            actions: vec!["a".into(), "b".into(), "c".into()],
            atoms: vec!["p".into(), "q".into()],
            allow_recursion: false,
            probabilism: true,
            guards: true,
            tau: true,
            seed: 0,
        }
    }
}

impl GenConfig {
    pub fn rng(&self) -> ChaCha8Rng {
        rand::SeedableRng::seed_from_u64(self.seed)
    }
}

/// A random term; deterministic per seed. With `allow_recursion` the term
/// may mention constants, see [`gen_system`].
pub fn gen_term(cfg: &GenConfig) -> Process {
    gen_system(cfg).0
}

/// A random term together with the definitions of the constants it uses.
/// Every definition body starts with an action prefix, so the system is
/// weakly guarded.
pub fn gen_system(cfg: &GenConfig) -> (Process, Definitions) {
    let mut g = Gen { cfg, rng: cfg.rng(), consts: 0 };
    let p = g.term(cfg.max_depth.max(1));
    let mut defs = Definitions::new();
    let mut i = 0;
    while i < g.consts {
        let a = g.action();
        let body = g.term(cfg.max_depth.saturating_sub(1).max(1));
        let body = if g.rng.gen_bool(0.5) { Process::constant(&format!("X{i}")) } else { body };
        defs.insert(format!("X{i}"), Process::prefix(a, body));
        i += 1;
    }
    (p, defs)
}

/// A random term in which every action has already happened: pasts,
/// sequences and parallel compositions over `nil`, with distinct keys.
pub fn gen_past(cfg: &GenConfig, rng: &mut ChaCha8Rng, next_key: &mut u32) -> Process {
    let mut g = Gen { cfg, rng: rng.clone(), consts: 0 };
    let p = g.past(cfg.max_depth.max(1), next_key);
    *rng = g.rng;
    p
}

/// A random guard formula over the atoms.
pub fn gen_guard(cfg: &GenConfig, rng: &mut ChaCha8Rng, depth: usize) -> Guard {
    let mut g = Gen { cfg, rng: rng.clone(), consts: 0 };
    let out = g.guard(depth);
    *rng = g.rng;
    out
}

/// A random non-trivial probability `n/d` with `d <= 4`.
pub fn gen_prob(rng: &mut ChaCha8Rng) -> Prob {
    let d = rng.gen_range(2..=4);
    Prob::new(rng.gen_range(1..d), d)
}

pub fn gen_labels(cfg: &GenConfig, rng: &mut ChaCha8Rng) -> LabelSet {
    LabelSet::new(cfg.actions.iter().filter(|_| rng.gen_bool(0.4)).cloned())
}

pub fn gen_relabel(cfg: &GenConfig, rng: &mut ChaCha8Rng) -> RelabelFn {
    let mut pairs = Vec::new();
    for n in &cfg.actions {
        if rng.gen_bool(0.5) {
            pairs.push((n.clone(), Label::new(cfg.actions.choose(rng).unwrap().clone())));
        }
    }
    RelabelFn::from_pairs(pairs)
}

pub fn gen_action(cfg: &GenConfig, rng: &mut ChaCha8Rng) -> Action {
    let mut g = Gen { cfg, rng: rng.clone(), consts: 0 };
    let a = g.action();
    *rng = g.rng;
    a
}

struct Gen<'c> {
    cfg: &'c GenConfig,
    rng: ChaCha8Rng,
    consts: usize,
}

impl Gen<'_> {
    fn name(&mut self) -> String {
        self.cfg.actions.choose(&mut self.rng).cloned().unwrap_or_else(|| "a".into())
    }

    fn action(&mut self) -> Action {
        let r: f64 = self.rng.gen();
        if self.cfg.tau && r < 0.1 {
            Action::Tau
        } else if r < 0.3 {
            Action::co(&self.name())
        } else {
            Action::label(&self.name())
        }
    }

    /// Two or three distinct names, no complementary pair.
    fn vector(&mut self) -> Vec<Action> {
        let mut names = self.cfg.actions.clone();
        names.shuffle(&mut self.rng);
        let n = self.rng.gen_range(2..=3).min(names.len());
        names.truncate(n.max(1));
        names.sort();
        names.iter().map(|n| Action::label(n)).collect()
    }

    fn guard(&mut self, depth: usize) -> Guard {
        if self.cfg.atoms.is_empty() {
            return if self.rng.gen_bool(0.5) { Guard::Epsilon } else { Guard::Delta };
        }
        let pick = if depth <= 1 { 0 } else { self.rng.gen_range(0..5) };
        match pick {
            0 | 1 => Guard::atom(self.cfg.atoms.choose(&mut self.rng).unwrap()),
            2 => Guard::not(self.guard(depth - 1)),
            3 => Guard::sum(self.guard(depth - 1), self.guard(depth - 1)),
            _ => Guard::prod(self.guard(depth - 1), self.guard(depth - 1)),
        }
    }

    fn leaf(&mut self) -> Process {
        let top = if self.cfg.guards { 3 } else { 2 };
        match self.rng.gen_range(0..top) {
            0 => Process::Nil,
            1 => Process::prefix(self.action(), Process::Nil),
            _ => {
                let g = self.guard(2);
                Process::guarded(g, Process::Nil)
            }
        }
    }

    fn term(&mut self, depth: usize) -> Process {
        if depth <= 1 {
            return self.leaf();
        }
        let d = depth - 1;
        match self.rng.gen_range(0..12) {
            0 => self.leaf(),
            1 | 2 => Process::prefix(self.action(), self.term(d)),
            3 => {
                let v = self.vector();
                Process::vprefix(v, self.term(d))
            }
            4 | 5 => Process::sum(self.term(d), self.term(d)),
            6 if self.cfg.probabilism => {
                let pi = gen_prob(&mut self.rng);
                Process::boxsum(pi, self.term(d), self.term(d))
            }
            6 | 7 => Process::par(self.term(d), self.term(d)),
            8 if self.cfg.guards => {
                let g = self.guard(2);
                Process::guarded(g, self.term(d))
            }
            8 => Process::prefix(self.action(), self.term(d)),
            9 => {
                let l = gen_labels(self.cfg, &mut self.rng);
                Process::restrict(self.term(d), l)
            }
            10 => {
                let f = gen_relabel(self.cfg, &mut self.rng);
                Process::relabel(self.term(d), f)
            }
            _ if self.cfg.allow_recursion && self.consts < 4 && self.rng.gen_bool(0.5) => {
                self.consts += 1;
                Process::prefix(self.action(), Process::constant(&format!("X{}", self.consts - 1)))
            }
            _ => Process::seq(self.term(d), self.term(d)),
        }
    }

    fn past(&mut self, depth: usize, next_key: &mut u32) -> Process {
        let leaf = |g: &mut Self, key: &mut u32| {
            let a = g.action();
            *key += 1;
            Process::past(Process::Nil, vec![a], *key - 1)
        };
        if depth <= 1 {
            return if self.rng.gen_bool(0.3) { Process::Nil } else { leaf(self, next_key) };
        }
        match self.rng.gen_range(0..4) {
            0 => leaf(self, next_key),
            1 => {
                let body = self.past(depth - 1, next_key);
                let a = self.action();
                *next_key += 1;
                Process::past(body, vec![a], *next_key - 1)
            }
            2 => Process::par(self.past(depth - 1, next_key), self.past(depth - 1, next_key)),
            _ => Process::seq(self.past(depth - 1, next_key), self.past(depth - 1, next_key)),
        }
    }
}

/// Least key above every key in the given terms.
pub fn fresh_key<'a>(terms: impl IntoIterator<Item = &'a Process>) -> Key {
    Key(terms.into_iter().flat_map(|p| p.keys()).map(|k| k.0 + 1).max().unwrap_or(1))
}
