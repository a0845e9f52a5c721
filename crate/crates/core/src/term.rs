//! Process terms (`0`, `a.P`, `P + Q`) and their canonical finite LTS.

use std::fmt;

use thiserror::Error;

use crate::lts::{Action, FiniteLts, TransitionSystem};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProcessTerm {
    Nil,
    Prefix(Action, Box<ProcessTerm>),
    /// Non-empty list of alternatives.
    Choice(Vec<ProcessTerm>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{column}: {message}")]
pub struct TermParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ProcessTerm {
    pub fn prefix(a: Action, t: ProcessTerm) -> Self {
        ProcessTerm::Prefix(a, Box::new(t))
    }

    /// Number of prefix operators.
    pub fn size(&self) -> usize {
        match self {
            ProcessTerm::Nil => 0,
            ProcessTerm::Prefix(_, t) => 1 + t.size(),
            ProcessTerm::Choice(ts) => ts.iter().map(ProcessTerm::size).sum(),
        }
    }

    pub fn parse(input: &str) -> Result<Self, TermParseError> {
        let mut p = TermParser {
            chars: input.chars().collect(),
            pos: 0,
        };
        let t = p.expr()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(t)
    }

    /// The canonical LTS of the term. State `0` is the root; further states
    /// are numbered depth-first, left to right, one per prefix target.
    pub fn to_lts(&self) -> TransitionSystem {
        fn build(t: &ProcessTerm, at: usize, next: &mut usize, out: &mut Vec<(usize, Action, usize)>) {
            match t {
                ProcessTerm::Nil => {}
                ProcessTerm::Prefix(a, body) => {
                    let target = *next;
                    *next += 1;
                    out.push((at, a.clone(), target));
                    build(body, target, next, out);
                }
                ProcessTerm::Choice(ts) => {
                    for t in ts {
                        build(t, at, next, out);
                    }
                }
            }
        }
        let mut next = 1;
        let mut transitions = Vec::new();
        build(self, 0, &mut next, &mut transitions);
        FiniteLts::new(next, 0, transitions)
            .expect("term construction only creates declared states")
            .into()
    }
}

pub fn from_term(t: &ProcessTerm) -> TransitionSystem {
    t.to_lts()
}

impl fmt::Display for ProcessTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProcessTerm::Nil => f.write_str("0"),
            ProcessTerm::Prefix(a, t) => match **t {
                ProcessTerm::Choice(_) => write!(f, "{a}.({t})"),
                _ => write!(f, "{a}.{t}"),
            },
            ProcessTerm::Choice(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    if matches!(t, ProcessTerm::Choice(_)) {
                        write!(f, "({t})")?;
                    } else {
                        write!(f, "{t}")?;
                    }
                }
                Ok(())
            }
        }
    }
}

struct TermParser {
    chars: Vec<char>,
    pos: usize,
}

impl TermParser {
    fn error(&self, message: &str) -> TermParseError {
        let mut line = 1;
        let mut column = 1;
        for c in &self.chars[..self.pos.min(self.chars.len())] {
            if *c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        TermParseError {
            line,
            column,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    // expr := seq ('+' expr)?   (right-associative, flattened)
    fn expr(&mut self) -> Result<ProcessTerm, TermParseError> {
        let mut alts = vec![self.seq()?];
        while self.peek() == Some('+') {
            self.pos += 1;
            alts.push(self.seq()?);
        }
        Ok(if alts.len() == 1 {
            alts.pop().expect("one alternative")
        } else {
            ProcessTerm::Choice(alts)
        })
    }

    // seq := '0' | '(' expr ')' | ident ('.' seq)?
    fn seq(&mut self) -> Result<ProcessTerm, TermParseError> {
        match self.peek() {
            Some('0') => {
                self.pos += 1;
                Ok(ProcessTerm::Nil)
            }
            Some('(') => {
                self.pos += 1;
                let t = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(t)
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.pos < self.chars.len()
                    && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_')
                {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                let a = Action::new(&name).map_err(|e| self.error(&e.to_string()))?;
                if self.peek() == Some('.') {
                    self.pos += 1;
                    Ok(ProcessTerm::prefix(a, self.seq()?))
                } else {
                    // a bare action abbreviates a.0
                    Ok(ProcessTerm::prefix(a, ProcessTerm::Nil))
                }
            }
            Some(_) => Err(self.error("expected '0', '(' or an action")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// All terms with at most `max_size` prefixes over `alphabet`, up to
/// reordering of alternatives. Duplicated alternatives are kept, so `a.0 +
/// a.0` and `a.0` are distinct (bisimilar) entries.
pub fn enumerate_terms(alphabet: &[Action], max_size: usize) -> Vec<ProcessTerm> {
    // by_size[n] = canonical terms with exactly n prefixes
    let mut by_size: Vec<Vec<ProcessTerm>> = vec![vec![ProcessTerm::Nil]];
    for n in 1..=max_size {
        // branches a.t with 1 + size(t) <= n, in a fixed order
        let mut branches: Vec<(usize, ProcessTerm)> = Vec::new();
        for (k, terms) in by_size.iter().enumerate().take(n) {
            for a in alphabet {
                for t in terms {
                    branches.push((k + 1, ProcessTerm::prefix(a.clone(), t.clone())));
                }
            }
        }
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        multisets(&branches, 0, n, &mut chosen, &mut out);
        by_size.push(out);
    }
    by_size.into_iter().flatten().collect()
}

fn multisets(
    branches: &[(usize, ProcessTerm)],
    from: usize,
    remaining: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<ProcessTerm>,
) {
    if remaining == 0 {
        let mut alts: Vec<ProcessTerm> = chosen.iter().map(|i| branches[*i].1.clone()).collect();
        out.push(if alts.len() == 1 {
            alts.pop().expect("one branch")
        } else {
            ProcessTerm::Choice(alts)
        });
        return;
    }
    for i in from..branches.len() {
        let w = branches[i].0;
        if w <= remaining {
            chosen.push(i);
            multisets(branches, i, remaining - w, chosen, out);
            chosen.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lts::{act, alphabet, State};

    fn finite(t: &str) -> FiniteLts {
        ProcessTerm::parse(t).unwrap().to_lts().as_finite().unwrap().clone()
    }

    #[test]
    fn nil_is_single_deadlock() {
        let l = finite("0");
        assert_eq!(l.num_states(), 1);
        assert!(l.transitions().is_empty());
    }

    #[test]
    fn single_prefix() {
        let l = finite("a.0");
        assert_eq!(l.num_states(), 2);
        assert_eq!(l.transitions(), &[(0, act("a"), 1)]);
    }

    #[test]
    fn two_a_branches_numbered_depth_first() {
        let t = ProcessTerm::Choice(vec![
            ProcessTerm::prefix(act("a"), ProcessTerm::prefix(act("b"), ProcessTerm::Nil)),
            ProcessTerm::prefix(act("a"), ProcessTerm::prefix(act("c"), ProcessTerm::Nil)),
        ]);
        let l = t.to_lts().as_finite().unwrap().clone();
        assert_eq!(l.num_states(), 5);
        assert_eq!(
            l.transitions(),
            &[
                (0, act("a"), 1),
                (1, act("b"), 2),
                (0, act("a"), 3),
                (3, act("c"), 4)
            ]
        );
        let ts: TransitionSystem = l.into();
        assert_eq!(
            ts.successors(State::Id(0), &act("a"), 0).unwrap(),
            vec![State::Id(1), State::Id(3)]
        );
    }

    #[test]
    fn plus_is_right_associative_and_dot_binds_tighter() {
        let t = ProcessTerm::parse("a.b.0 + a.c.0 + 0").unwrap();
        assert_eq!(
            t,
            ProcessTerm::Choice(vec![
                ProcessTerm::parse("a.b.0").unwrap(),
                ProcessTerm::parse("a.c.0").unwrap(),
                ProcessTerm::Nil,
            ])
        );
        let t = ProcessTerm::parse("a.(b + c)").unwrap();
        assert_eq!(t.to_string(), "a.(b.0 + c.0)");
        assert_eq!(ProcessTerm::parse(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = ProcessTerm::parse("a.(b + c").unwrap_err();
        assert_eq!((err.line, err.column), (1, 9));
        let err = ProcessTerm::parse("a.b\n + +").unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn construction_is_deterministic() {
        let t = ProcessTerm::parse("a.(b.0 + a.b.0) + b.0").unwrap();
        assert_eq!(t.to_lts(), t.to_lts());
    }

    #[test]
    fn enumeration_counts() {
        let ab = alphabet(["a", "b"]);
        let terms = enumerate_terms(&ab, 2);
        // 0 | a.0, b.0 | a.a.0 a.b.0 b.a.0 b.b.0, a.0+a.0 a.0+b.0 b.0+b.0
        assert_eq!(terms.len(), 1 + 2 + 7);
        assert!(terms.iter().all(|t| t.size() <= 2));
        let mut dedup = terms.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), terms.len());
    }
}
