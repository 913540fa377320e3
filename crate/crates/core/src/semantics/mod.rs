//! Operational semantics: resolution, forward and reverse steps, and the
//! probabilistic transition system built from them.

mod engine;
mod plts;

use std::collections::{BTreeMap, BTreeSet};

pub use engine::{Bounds, Config, Distribution, Engine, Record, Status, Step};
pub use plts::{build_plts, build_plts_from, Edge, Plts};

use crate::syntax::{Action, Key, Process};

/// Causal order between the past events of a term: `(k1, k2)` when the event
/// keyed `k2` happened inside the continuation of `k1`, or on the right of a
/// sequential composition whose left side holds `k1`. Transitively closed.
pub fn causal_order(p: &Process) -> BTreeSet<(Key, Key)> {
    let mut out = BTreeSet::new();
    order_into(p, &mut out);
    let keys: Vec<Key> = p.keys();
    loop {
        let mut extra = Vec::new();
        for &(a, b) in &out {
            for &(c, d) in &out {
                if b == c && a != d && !out.contains(&(a, d)) {
                    extra.push((a, d));
                }
            }
        }
        if extra.is_empty() {
            break;
        }
        out.extend(extra);
    }
    out.retain(|(a, b)| a != b && keys.contains(a) && keys.contains(b));
    out
}

fn order_into(p: &Process, out: &mut BTreeSet<(Key, Key)>) {
    match p {
        Process::Past(q, _, k) => {
            for j in q.keys() {
                out.insert((*k, j));
            }
        }
        Process::Seq(a, b) => {
            for i in a.keys() {
                for j in b.keys() {
                    out.insert((i, j));
                }
            }
        }
        _ => {}
    }
    for c in p.children() {
        order_into(c, out);
    }
}

/// Observable label of every past event, with relabelling applied and
/// synchronised pairs shown as `tau`.
pub fn event_labels(p: &Process) -> BTreeMap<Key, Vec<Action>> {
    match p {
        Process::Past(q, acts, k) => {
            let mut m = event_labels(q);
            m.entry(*k).or_default().extend(acts.iter().cloned());
            m
        }
        Process::Par(..) => {
            let mut parts: BTreeMap<Key, Vec<Vec<Action>>> = BTreeMap::new();
            for q in engine::par_leaves(p) {
                for (k, l) in event_labels(q) {
                    parts.entry(k).or_default().push(l);
                }
            }
            parts
                .into_iter()
                .map(|(k, ls)| {
                    let refs: Vec<&[Action]> = ls.iter().map(Vec::as_slice).collect();
                    let mut v = engine::synchronise(&refs).unwrap_or_else(|| ls.concat());
                    v.sort();
                    (k, v)
                })
                .collect()
        }
        Process::Relabel(q, f) => {
            let mut m = event_labels(q);
            for v in m.values_mut() {
                *v = v.iter().map(|a| f.apply(a)).collect();
                v.sort();
            }
            m
        }
        // both branches of a choice may hold the same event
        other => {
            let mut m = BTreeMap::new();
            for c in other.children() {
                for (k, v) in event_labels(c) {
                    m.entry(k).or_insert(v);
                }
            }
            m
        }
    }
}

/// Renders a step label: `{a, 'b}` or with keys `{a[1], 'b[1]}`.
pub fn show_label(label: &[Action], key: Option<Key>) -> String {
    let parts: Vec<String> = label
        .iter()
        .map(|a| match key {
            Some(k) => format!("{a}[{k}]"),
            None => a.to_string(),
        })
        .collect();
    format!("{{{}}}", parts.join(", "))
}
