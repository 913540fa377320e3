//! Terms of the calculus and their structural predicates.

mod ast;
mod parse;
mod pretty;

use std::collections::{BTreeMap, BTreeSet};

pub use ast::*;
pub use parse::{parse_definitions, parse_guard, parse_process};
pub use pretty::{pretty, pretty_guard};

use crate::error::{Error, Result};

/// Standard: no past events anywhere.
pub fn is_std(p: &Process) -> bool {
    !matches!(p, Process::Past(..)) && p.children().into_iter().all(is_std)
}

/// Fully executed: every action occurrence carries a key. Holds vacuously on
/// action-free terms such as `nil` and guards.
pub fn is_nstd(p: &Process) -> bool {
    match p {
        Process::Prefix(..) => false,
        other => other.children().into_iter().all(is_nstd),
    }
}

/// The label sort of a term; constants are solved as a least fixed point over
/// their definitions.
pub fn sort(p: &Process, defs: &Definitions) -> Result<BTreeSet<Label>> {
    let mut used = BTreeSet::new();
    p.constants(&mut used);
    let mut pending: Vec<String> = used.iter().cloned().collect();
    let mut reachable = BTreeSet::new();
    while let Some(n) = pending.pop() {
        if !reachable.insert(n.clone()) {
            continue;
        }
        let body = defs.get(&n).ok_or_else(|| Error::UnknownConstant(n.clone()))?;
        let mut inner = BTreeSet::new();
        body.constants(&mut inner);
        pending.extend(inner);
    }
    let mut env: BTreeMap<String, BTreeSet<Label>> =
        reachable.iter().map(|n| (n.clone(), BTreeSet::new())).collect();
    loop {
        let mut changed = false;
        for n in &reachable {
            let s = sort_in(defs.get(n).unwrap(), &env);
            if s != env[n] {
                env.insert(n.clone(), s);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(sort_in(p, &env))
}

fn sort_in(p: &Process, env: &BTreeMap<String, BTreeSet<Label>>) -> BTreeSet<Label> {
    let labels = |acts: &[Action]| acts.iter().filter_map(|a| a.as_label().cloned()).collect::<BTreeSet<_>>();
    match p {
        Process::Nil | Process::Guard(_) => BTreeSet::new(),
        Process::Const(n) => env.get(n).cloned().unwrap_or_default(),
        Process::Prefix(acts, body) | Process::Past(body, acts, _) => {
            let mut s = labels(acts);
            s.extend(sort_in(body, env));
            s
        }
        Process::Seq(a, b) | Process::Sum(a, b) | Process::BoxSum(_, a, b) | Process::Par(a, b) => {
            let mut s = sort_in(a, env);
            s.extend(sort_in(b, env));
            s
        }
        Process::Restrict(body, l) => sort_in(body, env).into_iter().filter(|x| !l.hides(x)).collect(),
        Process::Relabel(body, f) => sort_in(body, env).iter().map(|x| f.apply_label(x)).collect(),
        Process::Breve(body) => sort_in(body, env),
    }
}

/// Rejects definitions with a cycle of constant references that never passes
/// through an action prefix.
pub fn check_weakly_guarded(defs: &Definitions) -> Result<()> {
    fn unguarded(p: &Process, out: &mut BTreeSet<String>) {
        match p {
            Process::Const(n) => {
                out.insert(n.clone());
            }
            Process::Prefix(..) => {}
            other => other.children().into_iter().for_each(|c| unguarded(c, out)),
        }
    }
    for (name, body) in &defs.0 {
        let mut all = BTreeSet::new();
        body.constants(&mut all);
        if let Some(missing) = all.iter().find(|c| defs.get(c).is_none()) {
            return Err(Error::UnknownConstant(missing.clone()));
        }
        // depth-first walk over unguarded references
        let mut seen = BTreeSet::new();
        let mut stack = vec![name.clone()];
        while let Some(n) = stack.pop() {
            let mut next = BTreeSet::new();
            unguarded(defs.get(&n).unwrap(), &mut next);
            for m in next {
                if m == *name {
                    return Err(Error::NotWeaklyGuarded(name.clone()));
                }
                if seen.insert(m.clone()) {
                    stack.push(m);
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Process {
        parse_process(s, &Definitions::new()).unwrap()
    }

    #[test]
    fn std_predicates() {
        assert!(is_std(&p("a.nil")));
        assert!(!is_std(&p("nil.a[1]")));
        assert!(!is_std(&p("a.nil + nil.b[2]")));
        assert!(is_nstd(&p("nil.a[1]")));
        assert!(!is_nstd(&p("a.nil")));
        assert!(!is_nstd(&p("(nil.a[1]).b.nil")));
        assert!(is_std(&Process::Nil) && is_nstd(&Process::Nil));
    }

    #[test]
    fn sorts() {
        let d = Definitions::new();
        let s = sort(&p("a.nil + 'b.nil"), &d).unwrap();
        assert_eq!(s, [Label::new("a"), Label::co("b")].into_iter().collect());
        assert!(sort(&p("(a.nil) \\ {a}"), &d).unwrap().is_empty());
        assert_eq!(sort(&p("tau.a.nil"), &d).unwrap(), [Label::new("a")].into_iter().collect());
        assert_eq!(sort(&p("a.nil[a->'c]"), &d).unwrap(), [Label::co("c")].into_iter().collect());
    }

    #[test]
    fn recursive_sort() {
        let defs = parse_definitions("A := a.B\nB := b.A + c.nil").unwrap();
        let s = sort(&parse_process("A", &defs).unwrap(), &defs).unwrap();
        assert_eq!(s.len(), 3);
    }
}
