//! Concrete syntax.
//!
//! ```text
//! nil  eps  delta  <p * !q + r>   guards and constants
//! a.P  'a.P  tau.P  (a||b).P      prefixes
//! P.a[3]  P.(a[3]||b[3])          executed prefixes
//! X.P                             sequential composition, `<φ>.P` guard prefix
//! P \ {a,b}   P[a->b,c->'d]       restriction, relabelling
//! P || Q   P + Q   P [+1/3] Q     composition, summation, box-summation
//! ```
//!
//! Binding, tightest first: `.`, postfix operators, `||`, `+`, `[+π]`.
//! Binary operators associate to the left. Uppercase identifiers are constants.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::syntax::ast::*;
use crate::Prob;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Lower(String),
    Upper(String),
    Num(i64),
    Quote,
    Dot,
    Plus,
    Bar2,
    BoxOpen,
    LBracket,
    RBracket,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Backslash,
    Comma,
    Arrow,
    Lt,
    Gt,
    Bang,
    Star,
    Slash,
    Define,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Lower(s) | Tok::Upper(s) => format!("`{s}`"),
        Tok::Num(n) => format!("`{n}`"),
        other => format!("{other:?}"),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = text[start..i].to_string();
            if c.is_ascii_uppercase() {
                out.push((start, Tok::Upper(word)));
            } else {
                out.push((start, Tok::Lower(word)));
            }
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = text[start..i].parse::<i64>().map_err(|_| Error::Syntax {
                position: start,
                expected: "a number that fits in 64 bits".into(),
            })?;
            out.push((start, Tok::Num(n)));
            continue;
        }
        let two = if i + 1 < bytes.len() { &text[i..i + 2] } else { "" };
        let tok = match two {
            "||" => Some(Tok::Bar2),
            "[+" => Some(Tok::BoxOpen),
            "->" => Some(Tok::Arrow),
            ":=" => Some(Tok::Define),
            _ => None,
        };
        if let Some(t) = tok {
            out.push((start, t));
            i += 2;
            continue;
        }
        let t = match c {
            '\'' => Tok::Quote,
            '.' => Tok::Dot,
            '+' => Tok::Plus,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '\\' => Tok::Backslash,
            ',' => Tok::Comma,
            '<' => Tok::Lt,
            '>' => Tok::Gt,
            '!' => Tok::Bang,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            _ => {
                return Err(Error::Syntax { position: start, expected: format!("a token, found `{c}`") })
            }
        };
        out.push((start, t));
        i += 1;
    }
    Ok(out)
}

const KEYWORDS: [&str; 4] = ["nil", "tau", "eps", "delta"];

enum Unit {
    Proc(Process),
    Actions(Vec<Action>),
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    known: &'a dyn Fn(&str) -> bool,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn peek_at(&self, n: usize) -> Option<&Tok> {
        self.toks.get(self.pos + n).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn err<T>(&self, expected: &str) -> Result<T> {
        let found = match self.peek() {
            Some(t) => describe(t),
            None => "end of input".into(),
        };
        Err(Error::Syntax { position: self.offset(), expected: format!("{expected}, found {found}") })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.err(&describe(&t))
        }
    }

    fn process(&mut self) -> Result<Process> {
        let mut left = self.sum()?;
        while self.eat(&Tok::BoxOpen) {
            let num = self.number()?;
            self.expect(Tok::Slash)?;
            let den = self.number()?;
            self.expect(Tok::RBracket)?;
            if den <= 0 || num <= 0 || num >= den {
                return Err(Error::BadProbability(format!("{num}/{den}")));
            }
            let right = self.sum()?;
            left = Process::boxsum(Prob::new(num, den), left, right);
        }
        Ok(left)
    }

    fn number(&mut self) -> Result<i64> {
        match self.peek() {
            Some(Tok::Num(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => self.err("a number"),
        }
    }

    fn sum(&mut self) -> Result<Process> {
        let mut left = self.par()?;
        while self.eat(&Tok::Plus) {
            let right = self.par()?;
            left = Process::sum(left, right);
        }
        Ok(left)
    }

    fn par(&mut self) -> Result<Process> {
        let mut left = self.post()?;
        while self.eat(&Tok::Bar2) {
            let right = self.post()?;
            left = Process::par(left, right);
        }
        Ok(left)
    }

    fn post(&mut self) -> Result<Process> {
        let mut p = self.seq()?;
        loop {
            if self.eat(&Tok::Backslash) {
                self.expect(Tok::LBrace)?;
                let mut names = BTreeSet::new();
                if !self.eat(&Tok::RBrace) {
                    loop {
                        names.insert(self.label()?.name);
                        if self.eat(&Tok::RBrace) {
                            break;
                        }
                        self.expect(Tok::Comma)?;
                    }
                }
                p = Process::restrict(p, LabelSet(names));
            } else if self.peek() == Some(&Tok::LBracket) {
                self.pos += 1;
                let mut pairs = Vec::new();
                if !self.eat(&Tok::RBracket) {
                    loop {
                        let from = self.label()?;
                        if from.co {
                            return self.err("a plain name on the left of `->`");
                        }
                        self.expect(Tok::Arrow)?;
                        let to = self.label()?;
                        pairs.push((from.name, to));
                        if self.eat(&Tok::RBracket) {
                            break;
                        }
                        self.expect(Tok::Comma)?;
                    }
                }
                p = Process::relabel(p, RelabelFn::from_pairs(pairs));
            } else {
                return Ok(p);
            }
        }
    }

    fn seq(&mut self) -> Result<Process> {
        match self.unit()? {
            Unit::Actions(acts) => {
                if self.eat(&Tok::Dot) {
                    let body = self.seq()?;
                    Ok(Process::Prefix(acts, Box::new(body)))
                } else {
                    Ok(Process::Prefix(acts, Box::new(Process::Nil)))
                }
            }
            Unit::Proc(mut p) => {
                while self.peek() == Some(&Tok::Dot) {
                    self.pos += 1;
                    if let Some((acts, key)) = self.try_keyed()? {
                        p = Process::Past(Box::new(p), acts, key);
                    } else {
                        let rest = self.seq()?;
                        return Ok(Process::seq(p, rest));
                    }
                }
                Ok(p)
            }
        }
    }

    /// `a[3]` or `(a[3]||b[3])`, if present.
    fn try_keyed(&mut self) -> Result<Option<(Vec<Action>, Key)>> {
        let save = self.pos;
        let single = |s: &mut Self| -> Result<Option<(Action, u32)>> {
            let Some(a) = s.try_action()? else { return Ok(None) };
            if !s.eat(&Tok::LBracket) {
                return Ok(None);
            }
            let k = s.number()?;
            s.expect(Tok::RBracket)?;
            if k < 0 || k > u32::MAX as i64 {
                return s.err("a key in range");
            }
            Ok(Some((a, k as u32)))
        };
        if let Some((a, k)) = single(self)? {
            validate_vector(std::slice::from_ref(&a))?;
            return Ok(Some((vec![a], Key(k))));
        }
        self.pos = save;
        if self.eat(&Tok::LParen) {
            let mut acts = Vec::new();
            let mut key = None;
            loop {
                match single(self)? {
                    Some((a, k)) => {
                        if key.is_some_and(|prev| prev != k) {
                            return Err(Error::InvalidVector(
                                "events of one executed step must share a key".into(),
                            ));
                        }
                        key = Some(k);
                        acts.push(a);
                    }
                    None => {
                        self.pos = save;
                        return Ok(None);
                    }
                }
                if self.eat(&Tok::RParen) {
                    break;
                }
                if !self.eat(&Tok::Bar2) {
                    self.pos = save;
                    return Ok(None);
                }
            }
            validate_vector(&acts)?;
            return Ok(Some((acts, Key(key.unwrap()))));
        }
        self.pos = save;
        Ok(None)
    }

    fn try_action(&mut self) -> Result<Option<Action>> {
        match self.peek().cloned() {
            Some(Tok::Lower(w)) if w == "tau" => {
                self.pos += 1;
                Ok(Some(Action::Tau))
            }
            Some(Tok::Lower(w)) if !KEYWORDS.contains(&w.as_str()) => {
                self.pos += 1;
                Ok(Some(Action::Label(Label::new(w))))
            }
            Some(Tok::Quote) => {
                self.pos += 1;
                match self.peek().cloned() {
                    Some(Tok::Lower(w)) if !KEYWORDS.contains(&w.as_str()) => {
                        self.pos += 1;
                        Ok(Some(Action::Label(Label::co(w))))
                    }
                    _ => self.err("a name after `'`"),
                }
            }
            _ => Ok(None),
        }
    }

    fn label(&mut self) -> Result<Label> {
        match self.try_action()? {
            Some(Action::Label(l)) => Ok(l),
            _ => self.err("a label"),
        }
    }

    fn unit(&mut self) -> Result<Unit> {
        match self.peek().cloned() {
            Some(Tok::Lower(w)) if w == "nil" => {
                self.pos += 1;
                Ok(Unit::Proc(Process::Nil))
            }
            Some(Tok::Lower(w)) if w == "eps" => {
                self.pos += 1;
                Ok(Unit::Proc(Process::eps()))
            }
            Some(Tok::Lower(w)) if w == "delta" => {
                self.pos += 1;
                Ok(Unit::Proc(Process::delta()))
            }
            Some(Tok::Upper(name)) => {
                self.pos += 1;
                if !(self.known)(&name) {
                    return Err(Error::UnknownConstant(name));
                }
                Ok(Unit::Proc(Process::Const(name)))
            }
            Some(Tok::Lt) => {
                self.pos += 1;
                let g = self.guard_sum()?;
                self.expect(Tok::Gt)?;
                Ok(Unit::Proc(Process::Guard(g)))
            }
            Some(Tok::LParen) => {
                if let Some(acts) = self.try_vector()? {
                    return Ok(Unit::Actions(acts));
                }
                self.pos += 1;
                let p = self.process()?;
                self.expect(Tok::RParen)?;
                Ok(Unit::Proc(p))
            }
            _ => match self.try_action()? {
                Some(a) => {
                    if self.peek() == Some(&Tok::LBracket) && matches!(self.peek_at(1), Some(Tok::Num(_))) {
                        return self.err("an unexecuted action (executed events are written `P.a[m]`)");
                    }
                    Ok(Unit::Actions(vec![a]))
                }
                None => self.err("a process"),
            },
        }
    }

    /// `(a||b||…)` followed by `.`; anything else backtracks.
    fn try_vector(&mut self) -> Result<Option<Vec<Action>>> {
        let save = self.pos;
        self.pos += 1;
        let mut acts = Vec::new();
        loop {
            match self.try_action()? {
                Some(a) => acts.push(a),
                None => {
                    self.pos = save;
                    return Ok(None);
                }
            }
            if self.eat(&Tok::RParen) {
                break;
            }
            if !self.eat(&Tok::Bar2) {
                self.pos = save;
                return Ok(None);
            }
        }
        if self.peek() != Some(&Tok::Dot) {
            self.pos = save;
            return Ok(None);
        }
        validate_vector(&acts)?;
        Ok(Some(acts))
    }

    fn guard_sum(&mut self) -> Result<Guard> {
        let mut g = self.guard_prod()?;
        while self.eat(&Tok::Plus) {
            g = Guard::sum(g, self.guard_prod()?);
        }
        Ok(g)
    }

    fn guard_prod(&mut self) -> Result<Guard> {
        let mut g = self.guard_unit()?;
        while self.eat(&Tok::Star) {
            g = Guard::prod(g, self.guard_unit()?);
        }
        Ok(g)
    }

    fn guard_unit(&mut self) -> Result<Guard> {
        match self.peek().cloned() {
            Some(Tok::Bang) => {
                self.pos += 1;
                Ok(Guard::not(self.guard_unit()?))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let g = self.guard_sum()?;
                self.expect(Tok::RParen)?;
                Ok(g)
            }
            Some(Tok::Lower(w)) => {
                self.pos += 1;
                Ok(match w.as_str() {
                    "eps" => Guard::Epsilon,
                    "delta" => Guard::Delta,
                    "nil" | "tau" => return self.err("a guard atom"),
                    _ => Guard::Atom(w),
                })
            }
            _ => self.err("a guard"),
        }
    }
}

/// Vector prefixes need pairwise distinct, non-complementary actions.
pub(crate) fn validate_vector(acts: &[Action]) -> Result<()> {
    if acts.is_empty() {
        return Err(Error::InvalidVector("empty action vector".into()));
    }
    for (i, a) in acts.iter().enumerate() {
        if matches!(a, Action::Epsilon | Action::Delta) {
            return Err(Error::InvalidVector(format!("`{a}` cannot be a prefix action")));
        }
        for b in &acts[i + 1..] {
            if a == b {
                return Err(Error::InvalidVector(format!("`{a}` occurs twice")));
            }
            if a.is_complement_of(b) {
                return Err(Error::InvalidVector(format!("`{a}` and `{b}` are complementary")));
            }
        }
    }
    Ok(())
}

fn run<T>(
    text: &str,
    known: &dyn Fn(&str) -> bool,
    f: impl FnOnce(&mut Parser) -> Result<T>,
) -> Result<T> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len(), known };
    let out = f(&mut p)?;
    if p.pos != p.toks.len() {
        return p.err("end of input");
    }
    Ok(out)
}

/// Parses one term. Constants must be defined in `defs`.
pub fn parse_process(text: &str, defs: &Definitions) -> Result<Process> {
    run(text, &|n| defs.get(n).is_some(), |p| p.process())
}

pub fn parse_guard(text: &str) -> Result<Guard> {
    run(text, &|_| false, |p| p.guard_sum())
}

/// Parses a definitions file: one `Name := term` per line, `#` comments.
/// Constants may be used before their defining line.
pub fn parse_definitions(text: &str) -> Result<Definitions> {
    let mut names = BTreeSet::new();
    let mut bodies = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let trimmed = line.split('#').next().unwrap_or("").trim();
        if !trimmed.is_empty() {
            let Some((lhs, rhs)) = trimmed.split_once(":=") else {
                return Err(Error::Syntax { position: offset, expected: "`Name := term`".into() });
            };
            let name = lhs.trim();
            if name.is_empty()
                || !name.chars().next().unwrap().is_ascii_uppercase()
                || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                return Err(Error::Syntax { position: offset, expected: "an uppercase constant name".into() });
            }
            if !names.insert(name.to_string()) {
                return Err(Error::Model(format!("constant `{name}` defined twice")));
            }
            bodies.push((name.to_string(), rhs.to_string(), offset + line.find(":=").unwrap() + 2));
        }
        offset += line.len();
    }
    let mut defs = Definitions::new();
    for (name, body, at) in bodies {
        let p = run(&body, &|n| names.contains(n), |p| p.process()).map_err(|e| match e {
            Error::Syntax { position, expected } => Error::Syntax { position: position + at, expected },
            other => other,
        })?;
        defs.insert(name, p);
    }
    crate::syntax::check_weakly_guarded(&defs)?;
    Ok(defs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Process {
        parse_process(s, &Definitions::new()).unwrap()
    }

    #[test]
    fn sum_of_prefixes() {
        assert_eq!(
            p("a.nil + b.nil"),
            Process::sum(Process::prefix(Action::label("a"), Process::Nil), Process::prefix(Action::label("b"), Process::Nil))
        );
    }

    #[test]
    fn box_sum() {
        assert_eq!(
            p("a.nil [+1/3] b.nil"),
            Process::boxsum(
                Prob::new(1, 3),
                Process::prefix(Action::label("a"), Process::Nil),
                Process::prefix(Action::label("b"), Process::Nil)
            )
        );
    }

    #[test]
    fn restricted_vector_prefix() {
        assert_eq!(
            p("(a||b).nil \\ {c}"),
            Process::restrict(
                Process::vprefix(vec![Action::label("a"), Action::label("b")], Process::Nil),
                LabelSet::new(["c"])
            )
        );
    }

    #[test]
    fn past_and_seq() {
        assert_eq!(p("nil.a[1]"), Process::past(Process::Nil, vec![Action::label("a")], 1));
        assert_eq!(
            p("(nil.a[1]).b.nil"),
            Process::seq(
                Process::past(Process::Nil, vec![Action::label("a")], 1),
                Process::prefix(Action::label("b"), Process::Nil)
            )
        );
        assert_eq!(
            p("nil.(a[2]||'b[2])"),
            Process::past(Process::Nil, vec![Action::label("a"), Action::co("b")], 2)
        );
    }

    #[test]
    fn guards_and_relabel() {
        assert_eq!(
            p("<p * !q>.a.nil[a->'b]"),
            Process::relabel(
                Process::guarded(
                    Guard::prod(Guard::atom("p"), Guard::not(Guard::atom("q"))),
                    Process::prefix(Action::label("a"), Process::Nil)
                ),
                RelabelFn::from_pairs([("a".to_string(), Label::co("b"))])
            )
        );
        assert_eq!(p("eps + delta"), Process::sum(Process::eps(), Process::delta()));
    }

    #[test]
    fn errors() {
        let defs = Definitions::new();
        assert!(matches!(parse_process("a.", &defs), Err(Error::Syntax { .. })));
        assert_eq!(parse_process("A", &defs), Err(Error::UnknownConstant("A".into())));
        assert!(matches!(parse_process("a.nil [+3/2] nil", &defs), Err(Error::BadProbability(_))));
        assert!(matches!(parse_process("a.nil [+0/2] nil", &defs), Err(Error::BadProbability(_))));
        assert!(matches!(parse_process("(a||'a).nil", &defs), Err(Error::InvalidVector(_))));
        assert!(matches!(parse_process("(a||a).nil", &defs), Err(Error::InvalidVector(_))));
        assert!(matches!(parse_process("nil.(a[1]||b[2])", &defs), Err(Error::InvalidVector(_))));
    }

    #[test]
    fn definitions_file() {
        let defs = parse_definitions("# clock\nA := tick.B\nB := tock.A\n").unwrap();
        assert_eq!(defs.0.len(), 2);
        assert!(matches!(parse_definitions("A := A"), Err(Error::NotWeaklyGuarded(_))));
        assert!(matches!(parse_definitions("A := b.C"), Err(Error::UnknownConstant(_))));
    }
}
