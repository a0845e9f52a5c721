//! Text syntax for formulas.
//!
//! ```text
//! T  F  <a> phi  [a] phi  not phi  and(phi, ...)  or(phi, ...)
//! AND{n in N} tpl   AND{n in {0,2,5}} tpl   OR{n in N} tpl
//! <a>^n phi   [a]^n phi        (index nodes, inside templates)
//! ```
//!
//! Whitespace is insignificant and parentheses may group any formula.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::{Family, Formula, IndexSet, PosFormula};
use crate::lts::Action;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// A parsed formula in whichever logic its connectives belong to.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AnyFormula {
    Hml(Formula),
    Pos(PosFormula),
}

impl fmt::Display for AnyFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnyFormula::Hml(g) => g.fmt(f),
            AnyFormula::Pos(g) => g.fmt(f),
        }
    }
}

#[derive(Clone, Debug)]
enum Ast {
    True,
    False,
    Dia(Action, Box<Ast>),
    Box(Action, Box<Ast>),
    PowDia(Action, Box<Ast>),
    PowBox(Action, Box<Ast>),
    Not(Box<Ast>),
    And(Vec<Ast>),
    Or(Vec<Ast>),
    AndFam(IndexSet, Box<Ast>),
    OrFam(IndexSet, Box<Ast>),
}

impl Ast {
    fn has_negation(&self) -> bool {
        match self {
            Ast::Not(_) => true,
            Ast::True | Ast::False => false,
            Ast::Dia(_, g) | Ast::Box(_, g) | Ast::PowDia(_, g) | Ast::PowBox(_, g) => {
                g.has_negation()
            }
            Ast::AndFam(_, g) | Ast::OrFam(_, g) => g.has_negation(),
            Ast::And(gs) | Ast::Or(gs) => gs.iter().any(Ast::has_negation),
        }
    }

    fn is_positive_only(&self) -> bool {
        match self {
            Ast::False | Ast::Box(..) | Ast::PowBox(..) | Ast::Or(_) | Ast::OrFam(..) => true,
            Ast::True => false,
            Ast::Dia(_, g) | Ast::PowDia(_, g) | Ast::Not(g) => g.is_positive_only(),
            Ast::AndFam(_, g) => g.is_positive_only(),
            Ast::And(gs) => gs.iter().any(Ast::is_positive_only),
        }
    }

    fn to_hml(&self) -> Result<Formula, &'static str> {
        Ok(match self {
            Ast::True => Formula::True,
            Ast::Dia(a, g) => Formula::diamond(a.clone(), g.to_hml()?),
            Ast::PowDia(a, g) => Formula::power(a.clone(), g.to_hml()?),
            Ast::Not(g) => Formula::not(g.to_hml()?),
            Ast::And(gs) => Formula::and(gs.iter().map(Ast::to_hml).collect::<Result<_, _>>()?),
            Ast::AndFam(idx, g) => Formula::schematic(g.to_hml()?, idx.clone()),
            Ast::False => return Err("`F` is not part of HML; write `not T`"),
            Ast::Box(..) | Ast::PowBox(..) => return Err("box modalities are not part of HML"),
            Ast::Or(_) | Ast::OrFam(..) => return Err("disjunction is not part of HML"),
        })
    }

    fn to_pos(&self) -> Result<PosFormula, &'static str> {
        let list = |gs: &[Ast]| gs.iter().map(Ast::to_pos).collect::<Result<Vec<_>, _>>();
        Ok(match self {
            Ast::True => PosFormula::True,
            Ast::False => PosFormula::False,
            Ast::Dia(a, g) => PosFormula::diamond(a.clone(), g.to_pos()?),
            Ast::Box(a, g) => PosFormula::boxed(a.clone(), g.to_pos()?),
            Ast::PowDia(a, g) => PosFormula::PowerDiamond(a.clone(), Arc::new(g.to_pos()?)),
            Ast::PowBox(a, g) => PosFormula::PowerBox(a.clone(), Arc::new(g.to_pos()?)),
            Ast::And(gs) => PosFormula::and(list(gs)?),
            Ast::Or(gs) => PosFormula::or(list(gs)?),
            Ast::AndFam(idx, g) => PosFormula::conj_schematic(g.to_pos()?, idx.clone()),
            Ast::OrFam(idx, g) => PosFormula::disj_schematic(g.to_pos()?, idx.clone()),
            Ast::Not(_) => return Err("negation is not part of HML+"),
        })
    }
}

pub fn parse_formula(input: &str) -> Result<Formula, ParseError> {
    let ast = parse_ast(input)?;
    ast.to_hml().map_err(|m| ParseError {
        line: 1,
        column: 1,
        message: m.to_string(),
    })
}

pub fn parse_pos_formula(input: &str) -> Result<PosFormula, ParseError> {
    let ast = parse_ast(input)?;
    ast.to_pos().map_err(|m| ParseError {
        line: 1,
        column: 1,
        message: m.to_string(),
    })
}

/// Parses into HML when the text uses negation or only shared connectives,
/// and into HML⁺ when it uses `F`, boxes or disjunction.
pub fn parse_any(input: &str) -> Result<AnyFormula, ParseError> {
    let ast = parse_ast(input)?;
    let err = |m: &str| ParseError {
        line: 1,
        column: 1,
        message: m.to_string(),
    };
    match (ast.has_negation(), ast.is_positive_only()) {
        (true, true) => Err(err("formula mixes negation with HML+ connectives")),
        (false, true) => Ok(AnyFormula::Pos(ast.to_pos().map_err(err)?)),
        _ => Ok(AnyFormula::Hml(ast.to_hml().map_err(err)?)),
    }
}

fn parse_ast(input: &str) -> Result<Ast, ParseError> {
    let mut p = Parser {
        chars: input.chars().collect(),
        pos: 0,
        vars: Vec::new(),
    };
    let ast = p.formula()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(ast)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    /// Index variables of the enclosing families, innermost last.
    vars: Vec<String>,
}

impl Parser {
    fn error(&self, message: impl Into<String>) -> ParseError {
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
        ParseError {
            line,
            column,
            message: message.into(),
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

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len()
            && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_')
        {
            self.pos += 1;
        }
        if start == self.pos || self.chars[start].is_ascii_digit() {
            self.pos = start;
            return Err(self.error("expected an identifier"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn number(&mut self) -> Result<usize, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse().map_err(|_| {
            self.pos = start;
            self.error("expected a natural number")
        })
    }

    fn modality(&mut self, close: char) -> Result<(Action, bool), ParseError> {
        let name = self.ident()?;
        let a = Action::new(&name).map_err(|e| self.error(e.to_string()))?;
        self.expect(close)?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let v = self.ident()?;
            match self.vars.last() {
                Some(inner) if *inner == v => Ok((a, true)),
                Some(_) if self.vars.contains(&v) => {
                    Err(self.error(format!("index `{v}` belongs to an outer family")))
                }
                _ => Err(self.error(format!("index `{v}` is not bound by an enclosing family"))),
            }
        } else {
            Ok((a, false))
        }
    }

    fn list(&mut self) -> Result<Vec<Ast>, ParseError> {
        self.expect('(')?;
        let mut items = Vec::new();
        if self.peek() == Some(')') {
            self.pos += 1;
            return Ok(items);
        }
        loop {
            items.push(self.formula()?);
            match self.peek() {
                Some(',') => self.pos += 1,
                Some(')') => {
                    self.pos += 1;
                    return Ok(items);
                }
                _ => return Err(self.error("expected ',' or ')'")),
            }
        }
    }

    fn family(&mut self) -> Result<(IndexSet, Box<Ast>), ParseError> {
        self.expect('{')?;
        let var = self.ident()?;
        if self.ident()? != "in" {
            return Err(self.error("expected `in`"));
        }
        let idx = if self.peek() == Some('{') {
            self.pos += 1;
            let mut set = BTreeSet::new();
            if self.peek() != Some('}') {
                loop {
                    set.insert(self.number()?);
                    match self.peek() {
                        Some(',') => self.pos += 1,
                        Some('}') => break,
                        _ => return Err(self.error("expected ',' or '}'")),
                    }
                }
            }
            self.expect('}')?;
            IndexSet::Finite(set)
        } else {
            let at = self.pos;
            if self.ident()? != "N" {
                self.pos = at;
                return Err(self.error("expected `N` or an explicit index set"));
            }
            IndexSet::All
        };
        self.expect('}')?;
        self.vars.push(var);
        let body = self.formula();
        self.vars.pop();
        Ok((idx, Box::new(body?)))
    }

    fn formula(&mut self) -> Result<Ast, ParseError> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(')')?;
                Ok(f)
            }
            Some('<') => {
                self.pos += 1;
                let (a, power) = self.modality('>')?;
                let body = Box::new(self.formula()?);
                Ok(if power { Ast::PowDia(a, body) } else { Ast::Dia(a, body) })
            }
            Some('[') => {
                self.pos += 1;
                let (a, power) = self.modality(']')?;
                let body = Box::new(self.formula()?);
                Ok(if power { Ast::PowBox(a, body) } else { Ast::Box(a, body) })
            }
            Some(_) => {
                let at = self.pos;
                let word = self.ident()?;
                match word.as_str() {
                    "T" => Ok(Ast::True),
                    "F" => Ok(Ast::False),
                    "not" => Ok(Ast::Not(Box::new(self.formula()?))),
                    "and" => Ok(Ast::And(self.list()?)),
                    "or" => Ok(Ast::Or(self.list()?)),
                    "AND" => {
                        let (idx, body) = self.family()?;
                        Ok(Ast::AndFam(idx, body))
                    }
                    "OR" => {
                        let (idx, body) = self.family()?;
                        Ok(Ast::OrFam(idx, body))
                    }
                    other => {
                        self.pos = at;
                        Err(self.error(format!("unexpected `{other}`")))
                    }
                }
            }
        }
    }
}

fn var_name(level: usize) -> String {
    if level == 0 {
        "n".to_string()
    } else {
        format!("n{level}")
    }
}

fn write_indices(f: &mut fmt::Formatter<'_>, var: &str, idx: &IndexSet) -> fmt::Result {
    match idx {
        IndexSet::All => write!(f, "{{{var} in N}}"),
        IndexSet::Finite(js) => {
            write!(f, "{{{var} in {{")?;
            for (i, j) in js.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{j}")?;
            }
            f.write_str("}}")
        }
    }
}

fn write_list<T>(
    f: &mut fmt::Formatter<'_>,
    name: &str,
    items: &[T],
    level: usize,
    each: fn(&T, &mut fmt::Formatter<'_>, usize) -> fmt::Result,
) -> fmt::Result {
    write!(f, "{name}(")?;
    for (i, g) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        each(g, f, level)?;
    }
    f.write_str(")")
}

fn write_hml(phi: &Formula, f: &mut fmt::Formatter<'_>, level: usize) -> fmt::Result {
    match phi {
        Formula::True => f.write_str("T"),
        Formula::Diamond(a, g) => {
            write!(f, "<{a}> ")?;
            write_hml(g, f, level)
        }
        Formula::Power(a, g) => {
            // the index belongs to the innermost enclosing family
            write!(f, "<{a}>^{} ", var_name(level.saturating_sub(1)))?;
            write_hml(g, f, level)
        }
        Formula::Not(g) => {
            f.write_str("not ")?;
            write_hml(g, f, level)
        }
        Formula::And(fam) => match &**fam {
            Family::List(items) => write_list(f, "and", items, level, write_hml),
            Family::Schematic { template, indices } => {
                f.write_str("AND")?;
                write_indices(f, &var_name(level), indices)?;
                f.write_str(" ")?;
                write_hml(template, f, level + 1)
            }
        },
    }
}

fn write_pos(phi: &PosFormula, f: &mut fmt::Formatter<'_>, level: usize) -> fmt::Result {
    let fam = |f: &mut fmt::Formatter<'_>, kw: &str, list: &str, fam: &Family<PosFormula>| match fam {
        Family::List(items) => write_list(f, list, items, level, write_pos),
        Family::Schematic { template, indices } => {
            f.write_str(kw)?;
            write_indices(f, &var_name(level), indices)?;
            f.write_str(" ")?;
            write_pos(template, f, level + 1)
        }
    };
    match phi {
        PosFormula::True => f.write_str("T"),
        PosFormula::False => f.write_str("F"),
        PosFormula::Diamond(a, g) => {
            write!(f, "<{a}> ")?;
            write_pos(g, f, level)
        }
        PosFormula::Box(a, g) => {
            write!(f, "[{a}] ")?;
            write_pos(g, f, level)
        }
        PosFormula::PowerDiamond(a, g) => {
            write!(f, "<{a}>^{} ", var_name(level.saturating_sub(1)))?;
            write_pos(g, f, level)
        }
        PosFormula::PowerBox(a, g) => {
            write!(f, "[{a}]^{} ", var_name(level.saturating_sub(1)))?;
            write_pos(g, f, level)
        }
        PosFormula::And(g) => fam(f, "AND", "and", g),
        PosFormula::Or(g) => fam(f, "OR", "or", g),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_hml(self, f, 0)
    }
}

impl fmt::Display for PosFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_pos(self, f, 0)
    }
}
