//! Head normal form of a parallel composition, read off the engine's own
//! steps so that the expansion law is tested against the same rules it
//! quantifies over.

use std::collections::BTreeSet;

use num_traits::One;

use crate::error::{Error, Result};
use crate::semantics::{Bounds, Config, Engine, Status};
use crate::state::{StateId, StateModel};
use crate::syntax::{is_std, pretty, Definitions, Process};

/// Rewrites `(P1[f1] || ... || Pn[fn]) \ L` into a sum of step prefixes,
/// one per joint step (synchronisations appear as `tau`), recursively.
/// Components must be standard, finite and free of guard atoms, since a
/// state-dependent expansion would not be a term.
pub fn expansion_nf(p: &Process, model: &StateModel, defs: &Definitions, bounds: Bounds) -> Result<Process> {
    check_shape(p)?;
    let engine = Engine::new(model, defs, bounds);
    let mut budget = bounds.max_configs;
    nf(&engine, p, model.initial(), &mut budget)
}

fn check_shape(p: &Process) -> Result<()> {
    if !is_std(p) || p.contains_breve() {
        return Err(Error::Shape("expansion needs a standard term".into()));
    }
    let mut consts = BTreeSet::new();
    p.constants(&mut consts);
    if !consts.is_empty() {
        return Err(Error::Shape("expansion needs finite components without constants".into()));
    }
    let mut atoms = BTreeSet::new();
    p.guard_atoms(&mut atoms);
    if !atoms.is_empty() {
        return Err(Error::Shape("expansion needs components without guard atoms".into()));
    }
    Ok(())
}

fn nf(e: &Engine, p: &Process, s: StateId, budget: &mut usize) -> Result<Process> {
    if *budget == 0 {
        return Err(Error::BoundExceeded("expansion grew past the configuration bound".into()));
    }
    *budget -= 1;
    let dist = e.prob_resolve(&Config::new(p.clone(), s))?;
    if dist.len() > 1 {
        // fold the outcomes into nested binary choices
        let mut outcomes = Vec::new();
        for (w, c) in &dist {
            outcomes.push((*w, nf(e, &forget(&c.process), c.state, budget)?));
        }
        let (mut rest_w, mut acc) = outcomes.pop().expect("distribution is not empty");
        while let Some((w, q)) = outcomes.pop() {
            let total = w + rest_w;
            acc = Process::boxsum(w / total, q, acc);
            rest_w = total;
        }
        debug_assert!(rest_w.is_one());
        return Ok(acc);
    }
    let ready = &dist[0].1;
    let steps = e.forward_steps(ready)?;
    if steps.is_empty() {
        return Ok(match e.status(p, s)? {
            Status::Done => Process::Nil,
            Status::Dead => Process::delta(),
            Status::Pending => p.clone(),
        });
    }
    let mut seen = BTreeSet::new();
    let mut summands = Vec::new();
    for st in steps {
        let cont = nf(e, &forget(&st.target.process), st.target.state, budget)?;
        let summand = Process::vprefix(st.label.clone(), cont);
        if seen.insert(pretty(&summand)) {
            summands.push(summand);
        }
    }
    Ok(summands.into_iter().reduce(Process::sum).expect("at least one step"))
}

/// The standard term that remains to run: executed prefixes are dropped,
/// choices keep the branch that was taken, and resolution marks vanish.
pub fn forget(p: &Process) -> Process {
    match p {
        Process::Breve(x) => forget(x),
        Process::Past(body, _, _) => forget(body),
        Process::Seq(_, b) if !is_std(b) => forget(b),
        Process::Seq(a, b) => Process::seq(forget(a), b.strip_breves()),
        Process::Sum(a, _) | Process::BoxSum(_, a, _) if !is_std(a) => forget(a),
        Process::Sum(_, b) | Process::BoxSum(_, _, b) if !is_std(b) => forget(b),
        Process::Par(a, b) => Process::par(forget(a), forget(b)),
        Process::Restrict(a, l) => Process::restrict(forget(a), l.clone()),
        Process::Relabel(a, f) => Process::relabel(forget(a), f.clone()),
        other => other.strip_breves(),
    }
}
