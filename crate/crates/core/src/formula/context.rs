//! One-hole contexts over both logics.
//!
//! A context is stored as the list of frames on the path from the root to the
//! hole, outermost first.

use super::{to_positive, Family, Formula, FormulaError, IndexSet, PosFormula};
use crate::lts::Action;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Frame {
    /// The hole sits between `left` and `right` inside a finite conjunction.
    And {
        left: Vec<Formula>,
        right: Vec<Formula>,
    },
    Diamond(Action),
    Not,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PosFrame {
    And {
        left: Vec<PosFormula>,
        right: Vec<PosFormula>,
    },
    Or {
        left: Vec<PosFormula>,
        right: Vec<PosFormula>,
    },
    Diamond(Action),
    Box(Action),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn flip(self) -> Self {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

/// A context over HML.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Context {
    pub frames: Vec<Frame>,
}

/// A context over HML⁺.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PosContext {
    pub frames: Vec<PosFrame>,
}

impl Context {
    pub fn hole() -> Self {
        Context::default()
    }

    pub fn new(frames: Vec<Frame>) -> Self {
        Context { frames }
    }

    /// Wraps the context in one more frame on the outside.
    pub fn wrap(mut self, frame: Frame) -> Self {
        self.frames.insert(0, frame);
        self
    }

    pub fn substitute(&self, f: Formula) -> Formula {
        self.frames.iter().rev().fold(f, |acc, frame| match frame {
            Frame::And { left, right } => {
                let mut items = left.clone();
                items.push(acc);
                items.extend(right.iter().cloned());
                Formula::and(items)
            }
            Frame::Diamond(a) => Formula::diamond(a.clone(), acc),
            Frame::Not => Formula::not(acc),
        })
    }

    /// Even number of negations above the hole: positive; odd: negative.
    pub fn polarity(&self) -> Polarity {
        let negs = self.frames.iter().filter(|f| matches!(f, Frame::Not)).count();
        if negs % 2 == 0 {
            Polarity::Positive
        } else {
            Polarity::Negative
        }
    }
}

impl PosContext {
    pub fn hole() -> Self {
        PosContext::default()
    }

    pub fn new(frames: Vec<PosFrame>) -> Self {
        PosContext { frames }
    }

    pub fn substitute(&self, f: PosFormula) -> PosFormula {
        let splice = |left: &[PosFormula], acc: PosFormula, right: &[PosFormula]| {
            let mut items = left.to_vec();
            items.push(acc);
            items.extend(right.iter().cloned());
            items
        };
        self.frames.iter().rev().fold(f, |acc, frame| match frame {
            PosFrame::And { left, right } => PosFormula::and(splice(left, acc, right)),
            PosFrame::Or { left, right } => PosFormula::or(splice(left, acc, right)),
            PosFrame::Diamond(a) => PosFormula::diamond(a.clone(), acc),
            PosFrame::Box(a) => PosFormula::boxed(a.clone(), acc),
        })
    }

    /// The complemented context; the hole complements to itself.
    pub fn complement(&self) -> PosContext {
        let comp = |fs: &[PosFormula]| fs.iter().map(PosFormula::complement).collect();
        PosContext {
            frames: self
                .frames
                .iter()
                .map(|frame| match frame {
                    PosFrame::And { left, right } => PosFrame::Or {
                        left: comp(left),
                        right: comp(right),
                    },
                    PosFrame::Or { left, right } => PosFrame::And {
                        left: comp(left),
                        right: comp(right),
                    },
                    PosFrame::Diamond(a) => PosFrame::Box(a.clone()),
                    PosFrame::Box(a) => PosFrame::Diamond(a.clone()),
                })
                .collect(),
        }
    }
}

/// `P(D)[]` together with the polarity of `D`.
pub fn translate_context(d: &Context) -> (PosContext, Polarity) {
    let mut out = PosContext::hole();
    for frame in d.frames.iter().rev() {
        match frame {
            Frame::And { left, right } => out.frames.insert(
                0,
                PosFrame::And {
                    left: left.iter().map(to_positive).collect(),
                    right: right.iter().map(to_positive).collect(),
                },
            ),
            Frame::Diamond(a) => out.frames.insert(0, PosFrame::Diamond(a.clone())),
            Frame::Not => out = out.complement(),
        }
    }
    (out, d.polarity())
}

/// Splits `f` at `address` (child indices from the root: the `i`-th member
/// of a finite conjunction, or `0` under a diamond or negation) into the
/// surrounding context and the addressed subformula.
pub fn split_at(f: &Formula, address: &[usize]) -> Result<(Context, Formula), FormulaError> {
    let bad = || FormulaError::BadAddress(address.to_vec());
    let mut frames = Vec::new();
    let mut cur = f.clone();
    for &i in address {
        let next = match &cur {
            Formula::Diamond(a, g) if i == 0 => {
                frames.push(Frame::Diamond(a.clone()));
                (**g).clone()
            }
            Formula::Not(g) if i == 0 => {
                frames.push(Frame::Not);
                (**g).clone()
            }
            Formula::And(fam) => match &**fam {
                Family::List(items) if i < items.len() => {
                    frames.push(Frame::And {
                        left: items[..i].to_vec(),
                        right: items[i + 1..].to_vec(),
                    });
                    items[i].clone()
                }
                _ => return Err(bad()),
            },
            _ => return Err(bad()),
        };
        cur = next;
    }
    Ok((Context::new(frames), cur))
}

/// Every way of replacing the infinite family at `address` by a finite
/// sub-family `J ⊆ {0..=bound}`, `J` non-empty, embedded back into its
/// context. Subsets are listed in increasing bitmask order.
pub fn finite_subconjunctions(
    f: &Formula,
    address: &[usize],
    bound: usize,
) -> Result<Vec<Formula>, FormulaError> {
    let (ctx, sub) = split_at(f, address)?;
    let template = match &sub {
        Formula::And(fam) => match &**fam {
            Family::Schematic {
                template,
                indices: IndexSet::All,
            } => template.clone(),
            _ => return Err(FormulaError::NotSchematic(address.to_vec())),
        },
        _ => return Err(FormulaError::NotSchematic(address.to_vec())),
    };
    assert!(bound < 20, "subset enumeration bound too large");
    let width = bound + 1;
    Ok((1u32..(1 << width))
        .map(|mask| {
            let js = (0..width).filter(|j| mask & (1 << j) != 0);
            ctx.substitute(Formula::schematic(template.clone(), IndexSet::finite(js)))
        })
        .collect())
}
