//! Aldebaran `.aut` reader and writer.
//!
//! ```text
//! des (0, 2, 3)
//! (0, "a", 1)
//! (1, "b", 2)
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::lts::{Action, FiniteLts, LtsError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("header declares {declared} transitions but {found} were read")]
    TransitionCount { declared: usize, found: usize },
    #[error(transparent)]
    Lts(#[from] LtsError),
}

fn syntax(line: usize, message: impl Into<String>) -> AutError {
    AutError::Syntax {
        line,
        message: message.into(),
    }
}

pub fn write_aut(lts: &FiniteLts) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "des ({}, {}, {})",
        lts.initial(),
        lts.transitions().len(),
        lts.num_states()
    );
    for (from, a, to) in lts.transitions() {
        let _ = writeln!(out, "({from}, \"{a}\", {to})");
    }
    out
}

pub fn read_aut(input: &str) -> Result<FiniteLts, AutError> {
    let mut lines = input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| syntax(1, "missing des header"))?;
    let body = header
        .strip_prefix("des")
        .map(str::trim_start)
        .and_then(|r| r.strip_prefix('('))
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| syntax(hline, "expected `des (<root>, <#transitions>, <#states>)`"))?;
    let fields: Vec<&str> = body.split(',').map(str::trim).collect();
    if fields.len() != 3 {
        return Err(syntax(hline, "header needs three fields"));
    }
    let num = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| syntax(hline, format!("`{s}` is not a natural number")))
    };
    let (root, declared, states) = (num(fields[0])?, num(fields[1])?, num(fields[2])?);

    let mut transitions = Vec::with_capacity(declared);
    for (line, text) in lines {
        transitions.push(parse_transition(line, text)?);
    }
    if transitions.len() != declared {
        return Err(AutError::TransitionCount {
            declared,
            found: transitions.len(),
        });
    }
    Ok(FiniteLts::new(states, root, transitions)?)
}

fn parse_transition(line: usize, text: &str) -> Result<(usize, Action, usize), AutError> {
    let inner = text
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| syntax(line, "expected `(<from>, \"<label>\", <to>)`"))?;
    let (from, rest) = inner
        .split_once(',')
        .ok_or_else(|| syntax(line, "missing label"))?;
    let rest = rest.trim_start();
    let (label, to) = if let Some(quoted) = rest.strip_prefix('"') {
        let end = quoted
            .find('"')
            .ok_or_else(|| syntax(line, "unterminated label"))?;
        let after = quoted[end + 1..].trim_start();
        let to = after
            .strip_prefix(',')
            .ok_or_else(|| syntax(line, "missing target state"))?;
        (&quoted[..end], to)
    } else {
        rest.rsplit_once(',')
            .map(|(l, t)| (l.trim(), t))
            .ok_or_else(|| syntax(line, "missing target state"))?
    };
    let state = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| syntax(line, format!("`{}` is not a state number", s.trim())))
    };
    let a = Action::new(label).map_err(|e| syntax(line, e.to_string()))?;
    Ok((state(from)?, a, state(to)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::ProcessTerm;

    #[test]
    fn writes_header_and_quoted_labels() {
        let t = ProcessTerm::parse("a.b.0").unwrap().to_lts();
        let text = write_aut(t.as_finite().unwrap());
        assert_eq!(text, "des (0, 2, 3)\n(0, \"a\", 1)\n(1, \"b\", 2)\n");
    }

    #[test]
    fn round_trip() {
        let t = ProcessTerm::parse("a.(b + c) + b.a.0").unwrap().to_lts();
        let l = t.as_finite().unwrap();
        assert_eq!(&read_aut(&write_aut(l)).unwrap(), l);
    }

    #[test]
    fn labels_are_verbatim() {
        let l = read_aut("des (0, 1, 2)\n(0, \"send msg\", 1)\n").unwrap();
        assert_eq!(l.transitions()[0].1.as_str(), "send msg");
    }

    #[test]
    fn errors() {
        assert!(matches!(
            read_aut("des (0, 2, 2)\n(0, \"a\", 1)\n"),
            Err(AutError::TransitionCount { declared: 2, found: 1 })
        ));
        assert!(matches!(
            read_aut("des (0, 1, 2)\n(0, \"a\", 5)\n"),
            Err(AutError::Lts(LtsError::DanglingTransition { .. }))
        ));
        assert!(matches!(
            read_aut("hello"),
            Err(AutError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            read_aut("des (0, 1, 2)\n(0 \"a\" 1)\n"),
            Err(AutError::Syntax { line: 2, .. })
        ));
    }
}
