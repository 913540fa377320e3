use std::fmt::Write;

use crate::syntax::ast::*;

// Binding levels, loosest first.
const BOXSUM: u8 = 0;
const SUM: u8 = 1;
const PAR: u8 = 2;
const POST: u8 = 3;
const SEQ: u8 = 4;
const UNIT: u8 = 5;

fn level(p: &Process) -> u8 {
    match p {
        Process::BoxSum(..) => BOXSUM,
        Process::Sum(..) => SUM,
        Process::Par(..) => PAR,
        Process::Restrict(..) | Process::Relabel(..) => POST,
        Process::Prefix(..) | Process::Seq(..) | Process::Past(..) | Process::Breve(_) => SEQ,
        Process::Nil | Process::Const(_) | Process::Guard(_) => UNIT,
    }
}

/// Canonical text of a term. Parsing the output yields the same term.
/// Resolution marks print as `@` and are not part of the input language.
pub fn pretty(p: &Process) -> String {
    let mut out = String::new();
    write_at(&mut out, p, BOXSUM);
    out
}

pub fn pretty_guard(g: &Guard) -> String {
    let mut out = String::new();
    write_guard(&mut out, g, 0);
    out
}

fn write_at(out: &mut String, p: &Process, min: u8) {
    if level(p) < min {
        out.push('(');
        write_proc(out, p);
        out.push(')');
    } else {
        write_proc(out, p);
    }
}

fn write_actions(out: &mut String, acts: &[Action], key: Option<Key>) {
    let one = |out: &mut String, a: &Action| {
        let _ = write!(out, "{a}");
        if let Some(k) = key {
            let _ = write!(out, "[{k}]");
        }
    };
    if acts.len() == 1 {
        one(out, &acts[0]);
    } else {
        out.push('(');
        for (i, a) in acts.iter().enumerate() {
            if i > 0 {
                out.push_str("||");
            }
            one(out, a);
        }
        out.push(')');
    }
}

fn write_proc(out: &mut String, p: &Process) {
    match p {
        Process::Nil => out.push_str("nil"),
        Process::Const(n) => out.push_str(n),
        Process::Guard(Guard::Epsilon) => out.push_str("eps"),
        Process::Guard(Guard::Delta) => out.push_str("delta"),
        Process::Guard(g) => {
            out.push('<');
            write_guard(out, g, 0);
            out.push('>');
        }
        Process::Prefix(acts, body) => {
            write_actions(out, acts, None);
            out.push('.');
            write_at(out, body, SEQ);
        }
        Process::Past(body, acts, key) => {
            if matches!(**body, Process::Past(..)) {
                write_proc(out, body);
            } else {
                write_at(out, body, UNIT);
            }
            out.push('.');
            write_actions(out, acts, Some(*key));
        }
        Process::Seq(a, b) => {
            write_at(out, a, UNIT);
            out.push('.');
            write_at(out, b, SEQ);
        }
        Process::Sum(a, b) => {
            write_at(out, a, SUM);
            out.push_str(" + ");
            write_at(out, b, PAR);
        }
        Process::BoxSum(pi, a, b) => {
            write_at(out, a, BOXSUM);
            let _ = write!(out, " [+{}/{}] ", pi.numer(), pi.denom());
            write_at(out, b, SUM);
        }
        Process::Par(a, b) => {
            write_at(out, a, PAR);
            out.push_str(" || ");
            write_at(out, b, POST);
        }
        Process::Restrict(a, l) => {
            write_at(out, a, POST);
            out.push_str(" \\ {");
            for (i, n) in l.0.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(n);
            }
            out.push('}');
        }
        Process::Relabel(a, f) => {
            write_at(out, a, POST);
            out.push('[');
            for (i, (from, to)) in f.0.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{from}->{to}");
            }
            out.push(']');
        }
        Process::Breve(inner) => {
            out.push('@');
            write_at(out, inner, SEQ);
        }
    }
}

fn write_guard(out: &mut String, g: &Guard, min: u8) {
    let lvl = match g {
        Guard::Sum(..) => 0,
        Guard::Prod(..) => 1,
        _ => 2,
    };
    if lvl < min {
        out.push('(');
    }
    match g {
        Guard::Delta => out.push_str("delta"),
        Guard::Epsilon => out.push_str("eps"),
        Guard::Atom(a) => out.push_str(a),
        Guard::Not(inner) => {
            out.push('!');
            write_guard(out, inner, 2);
        }
        Guard::Sum(a, b) => {
            write_guard(out, a, 0);
            out.push_str(" + ");
            write_guard(out, b, 1);
        }
        Guard::Prod(a, b) => {
            write_guard(out, a, 1);
            out.push_str(" * ");
            write_guard(out, b, 2);
        }
    }
    if lvl < min {
        out.push(')');
    }
}
