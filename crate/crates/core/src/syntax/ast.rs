use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::Prob;

/// A visible label: a name or its co-name.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    pub name: String,
    pub co: bool,
}

impl Label {
    pub fn new(name: impl Into<String>) -> Self {
        Label { name: name.into(), co: false }
    }

    pub fn co(name: impl Into<String>) -> Self {
        Label { name: name.into(), co: true }
    }

    pub fn complement(&self) -> Label {
        Label { name: self.name.clone(), co: !self.co }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.co {
            write!(f, "'{}", self.name)
        } else {
            write!(f, "{}", self.name)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Label(Label),
    Tau,
    Epsilon,
    Delta,
}

impl Action {
    pub fn label(name: &str) -> Action {
        Action::Label(Label::new(name))
    }

    pub fn co(name: &str) -> Action {
        Action::Label(Label::co(name))
    }

    pub fn as_label(&self) -> Option<&Label> {
        match self {
            Action::Label(l) => Some(l),
            _ => None,
        }
    }

    /// Complement of a visible action; `None` for the silent and empty actions.
    pub fn complement(&self) -> Option<Action> {
        self.as_label().map(|l| Action::Label(l.complement()))
    }

    pub fn is_complement_of(&self, other: &Action) -> bool {
        match (self, other) {
            (Action::Label(a), Action::Label(b)) => a.name == b.name && a.co != b.co,
            _ => false,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Label(l) => write!(f, "{l}"),
            Action::Tau => write!(f, "tau"),
            Action::Epsilon => write!(f, "eps"),
            Action::Delta => write!(f, "delta"),
        }
    }
}

/// Identity of an executed step. Every event fired in the same step,
/// including both partners of a synchronisation, carries the same key.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Key(pub u32);

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Guard {
    Delta,
    Epsilon,
    Atom(String),
    Not(Box<Guard>),
    /// Disjunction.
    Sum(Box<Guard>, Box<Guard>),
    /// Conjunction.
    Prod(Box<Guard>, Box<Guard>),
}

impl Guard {
    pub fn atom(name: &str) -> Guard {
        Guard::Atom(name.to_string())
    }

    pub fn not(g: Guard) -> Guard {
        Guard::Not(Box::new(g))
    }

    pub fn sum(a: Guard, b: Guard) -> Guard {
        Guard::Sum(Box::new(a), Box::new(b))
    }

    pub fn prod(a: Guard, b: Guard) -> Guard {
        Guard::Prod(Box::new(a), Box::new(b))
    }

    pub fn atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Guard::Delta | Guard::Epsilon => {}
            Guard::Atom(a) => {
                out.insert(a.clone());
            }
            Guard::Not(g) => g.atoms(out),
            Guard::Sum(a, b) | Guard::Prod(a, b) => {
                a.atoms(out);
                b.atoms(out);
            }
        }
    }
}

/// Restriction set. Restricting a name hides both polarities.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelSet(pub BTreeSet<String>);

impl LabelSet {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        LabelSet(names.into_iter().map(Into::into).collect())
    }

    /// True if `l` or its complement lies in the set.
    pub fn hides(&self, l: &Label) -> bool {
        self.0.contains(&l.name)
    }

    pub fn blocks(&self, a: &Action) -> bool {
        a.as_label().is_some_and(|l| self.hides(l))
    }

    pub fn union(&self, other: &LabelSet) -> LabelSet {
        LabelSet(self.0.union(&other.0).cloned().collect())
    }
}

/// Relabelling function given on names; co-names follow by complementation,
/// so `f('l) = 'f(l)` holds by construction. Unlisted names map to themselves.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelabelFn(pub BTreeMap<String, Label>);

impl RelabelFn {
    pub fn identity() -> Self {
        RelabelFn::default()
    }

    pub fn from_pairs<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (String, Label)>,
    {
        let mut map = BTreeMap::new();
        for (from, to) in pairs {
            if !(to.name == from && !to.co) {
                map.insert(from, to);
            }
        }
        RelabelFn(map)
    }

    pub fn apply_label(&self, l: &Label) -> Label {
        match self.0.get(&l.name) {
            Some(image) if l.co => image.complement(),
            Some(image) => image.clone(),
            None => l.clone(),
        }
    }

    pub fn apply(&self, a: &Action) -> Action {
        match a {
            Action::Label(l) => Action::Label(self.apply_label(l)),
            other => other.clone(),
        }
    }

    /// `self` after `inner`, i.e. `x -> self(inner(x))`.
    pub fn compose_after(&self, inner: &RelabelFn) -> RelabelFn {
        let mut names: BTreeSet<String> = self.0.keys().cloned().collect();
        names.extend(inner.0.keys().cloned());
        RelabelFn::from_pairs(
            names
                .into_iter()
                .map(|n| {
                    let img = self.apply_label(&inner.apply_label(&Label::new(n.clone())));
                    (n, img)
                })
                .collect::<Vec<_>>(),
        )
    }

    /// Names whose image lies in `set`.
    pub fn preimage(&self, set: &LabelSet, universe: &BTreeSet<String>) -> LabelSet {
        let mut names: BTreeSet<String> = universe.clone();
        names.extend(self.0.keys().cloned());
        names.extend(set.0.iter().cloned());
        LabelSet(
            names
                .into_iter()
                .filter(|n| set.hides(&self.apply_label(&Label::new(n.clone()))))
                .collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Process {
    Nil,
    Const(String),
    /// A guard used as a process; `eps` and `delta` are guards too.
    Guard(Guard),
    /// `α.P` or `(α1||…||αn).P`.
    Prefix(Vec<Action>, Box<Process>),
    /// Executed prefix `P.α[m]`: the step `X[m]` has fired and `P` is its continuation.
    Past(Box<Process>, Vec<Action>, Key),
    /// General sequential composition `P.Q`; a guard prefix `φ.P` is `Seq(φ, P)`.
    Seq(Box<Process>, Box<Process>),
    Sum(Box<Process>, Box<Process>),
    BoxSum(Prob, Box<Process>, Box<Process>),
    Par(Box<Process>, Box<Process>),
    Restrict(Box<Process>, LabelSet),
    Relabel(Box<Process>, RelabelFn),
    /// Resolution mark on an enabled redex. Never produced by the parser.
    Breve(Box<Process>),
}

impl Process {
    pub fn nil() -> Process {
        Process::Nil
    }

    pub fn eps() -> Process {
        Process::Guard(Guard::Epsilon)
    }

    pub fn delta() -> Process {
        Process::Guard(Guard::Delta)
    }

    pub fn guard(g: Guard) -> Process {
        Process::Guard(g)
    }

    pub fn prefix(a: Action, p: Process) -> Process {
        Process::Prefix(vec![a], Box::new(p))
    }

    pub fn vprefix(actions: Vec<Action>, p: Process) -> Process {
        Process::Prefix(actions, Box::new(p))
    }

    pub fn past(p: Process, actions: Vec<Action>, key: u32) -> Process {
        Process::Past(Box::new(p), actions, Key(key))
    }

    pub fn seq(p: Process, q: Process) -> Process {
        Process::Seq(Box::new(p), Box::new(q))
    }

    pub fn guarded(g: Guard, p: Process) -> Process {
        Process::seq(Process::Guard(g), p)
    }

    pub fn sum(p: Process, q: Process) -> Process {
        Process::Sum(Box::new(p), Box::new(q))
    }

    pub fn boxsum(pi: Prob, p: Process, q: Process) -> Process {
        Process::BoxSum(pi, Box::new(p), Box::new(q))
    }

    pub fn par(p: Process, q: Process) -> Process {
        Process::Par(Box::new(p), Box::new(q))
    }

    pub fn restrict(p: Process, l: LabelSet) -> Process {
        Process::Restrict(Box::new(p), l)
    }

    pub fn relabel(p: Process, f: RelabelFn) -> Process {
        Process::Relabel(Box::new(p), f)
    }

    pub fn breve(p: Process) -> Process {
        Process::Breve(Box::new(p))
    }

    pub fn constant(name: &str) -> Process {
        Process::Const(name.to_string())
    }

    /// Direct subterms, left to right.
    pub fn children(&self) -> Vec<&Process> {
        match self {
            Process::Nil | Process::Const(_) | Process::Guard(_) => vec![],
            Process::Prefix(_, p)
            | Process::Past(p, _, _)
            | Process::Restrict(p, _)
            | Process::Relabel(p, _)
            | Process::Breve(p) => vec![p],
            Process::Seq(p, q) | Process::Sum(p, q) | Process::BoxSum(_, p, q) | Process::Par(p, q) => {
                vec![p, q]
            }
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Process::size).sum::<usize>()
    }

    pub fn contains_breve(&self) -> bool {
        matches!(self, Process::Breve(_)) || self.children().into_iter().any(Process::contains_breve)
    }

    /// Removes every resolution mark.
    pub fn strip_breves(&self) -> Process {
        self.map_children(&|p| p.strip_breves(), true)
    }

    /// Rebuilds the node with `f` applied to each child. With `unwrap_breve`
    /// a `Breve` node is replaced by its (mapped) body.
    pub(crate) fn map_children(&self, f: &dyn Fn(&Process) -> Process, unwrap_breve: bool) -> Process {
        match self {
            Process::Nil | Process::Const(_) | Process::Guard(_) => self.clone(),
            Process::Prefix(a, p) => Process::Prefix(a.clone(), Box::new(f(p))),
            Process::Past(p, a, k) => Process::Past(Box::new(f(p)), a.clone(), *k),
            Process::Seq(p, q) => Process::seq(f(p), f(q)),
            Process::Sum(p, q) => Process::sum(f(p), f(q)),
            Process::BoxSum(pi, p, q) => Process::boxsum(*pi, f(p), f(q)),
            Process::Par(p, q) => Process::par(f(p), f(q)),
            Process::Restrict(p, l) => Process::restrict(f(p), l.clone()),
            Process::Relabel(p, r) => Process::relabel(f(p), r.clone()),
            Process::Breve(p) => {
                if unwrap_breve {
                    f(p)
                } else {
                    Process::breve(f(p))
                }
            }
        }
    }

    /// Keys of all past events, in traversal order, without duplicates.
    pub fn keys(&self) -> Vec<Key> {
        let mut out = Vec::new();
        self.collect_keys(&mut out);
        out
    }

    fn collect_keys(&self, out: &mut Vec<Key>) {
        if let Process::Past(_, _, k) = self {
            if !out.contains(k) {
                out.push(*k);
            }
        }
        for c in self.children() {
            c.collect_keys(out);
        }
    }

    pub fn rename_keys(&self, map: &BTreeMap<Key, Key>) -> Process {
        match self {
            Process::Past(p, a, k) => {
                Process::Past(Box::new(p.rename_keys(map)), a.clone(), *map.get(k).unwrap_or(k))
            }
            other => other.map_children(&|c| c.rename_keys(map), false),
        }
    }

    pub fn constants(&self, out: &mut BTreeSet<String>) {
        if let Process::Const(n) = self {
            out.insert(n.clone());
        }
        for c in self.children() {
            c.constants(out);
        }
    }

    pub fn guard_atoms(&self, out: &mut BTreeSet<String>) {
        if let Process::Guard(g) = self {
            g.atoms(out);
        }
        for c in self.children() {
            c.guard_atoms(out);
        }
    }

    pub fn action_names(&self, out: &mut BTreeSet<String>) {
        let mut visit = |acts: &[Action]| {
            for a in acts {
                if let Some(l) = a.as_label() {
                    out.insert(l.name.clone());
                }
            }
        };
        match self {
            Process::Prefix(a, _) | Process::Past(_, a, _) => visit(a),
            Process::Restrict(_, l) => out.extend(l.0.iter().cloned()),
            Process::Relabel(_, f) => {
                for (k, v) in &f.0 {
                    out.insert(k.clone());
                    out.insert(v.name.clone());
                }
            }
            _ => {}
        }
        for c in self.children() {
            c.action_names(out);
        }
    }
}

/// Defining equations `A := P`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Definitions(pub BTreeMap<String, Process>);

impl Definitions {
    pub fn new() -> Self {
        Definitions::default()
    }

    pub fn get(&self, name: &str) -> Option<&Process> {
        self.0.get(name)
    }

    pub fn insert(&mut self, name: impl Into<String>, body: Process) {
        self.0.insert(name.into(), body);
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}
