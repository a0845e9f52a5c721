//! Hennessy-Milner logic with negation ([`Formula`]) and its negation-free
//! variant ([`PosFormula`]).
//!
//! Conjunctions (and, in the positive logic, disjunctions) range over a
//! [`Family`]: either an explicit finite list or a schematic family given by a
//! template and an index set. A template mentions the index through at most
//! one `Power` node, which stands for `n` nested modalities around its body.

mod context;
mod parse;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::ops::Add;
use std::sync::Arc;

use thiserror::Error;

use crate::lts::Action;

pub use context::{
    finite_subconjunctions, split_at, translate_context, Context, Frame, Polarity, PosContext,
    PosFrame,
};
pub use parse::{parse_any, parse_formula, parse_pos_formula, AnyFormula, ParseError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("complexity is undefined for a schematic family over all naturals")]
    InfiniteFamily,
    #[error("index node <{0}>^n appears outside a schematic template")]
    StrayPower(Action),
    #[error("template has more than one index node")]
    AmbiguousTemplate,
    #[error("address {0:?} does not name a subformula")]
    BadAddress(Vec<usize>),
    #[error("address {0:?} does not name a schematic family over all naturals")]
    NotSchematic(Vec<usize>),
}

/// Index set of a schematic family.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IndexSet {
    All,
    Finite(BTreeSet<usize>),
}

impl IndexSet {
    pub fn finite<I: IntoIterator<Item = usize>>(items: I) -> Self {
        IndexSet::Finite(items.into_iter().collect())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, IndexSet::All)
    }
}

/// The operand of a conjunction or disjunction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Family<F> {
    List(Vec<F>),
    Schematic { template: F, indices: IndexSet },
}

impl<F> Family<F> {
    fn map<G>(&self, mut f: impl FnMut(&F) -> G) -> Family<G> {
        match self {
            Family::List(items) => Family::List(items.iter().map(&mut f).collect()),
            Family::Schematic { template, indices } => Family::Schematic {
                template: f(template),
                indices: indices.clone(),
            },
        }
    }
}

/// Depth of a formula: a natural number or infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Depth {
    Finite(usize),
    Infinite,
}

impl Depth {
    pub fn is_finite(self) -> bool {
        matches!(self, Depth::Finite(_))
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            Depth::Finite(n) => Some(n),
            Depth::Infinite => None,
        }
    }
}

impl Add<usize> for Depth {
    type Output = Depth;
    fn add(self, k: usize) -> Depth {
        match self {
            Depth::Finite(n) => Depth::Finite(n + k),
            Depth::Infinite => Depth::Infinite,
        }
    }
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Finite(n) => write!(f, "{n}"),
            Depth::Infinite => f.write_str("inf"),
        }
    }
}

/// HML: `T | ⋀ φ_i | <a>φ | ¬φ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    And(Arc<Family<Formula>>),
    Diamond(Action, Arc<Formula>),
    Not(Arc<Formula>),
    /// `<a>^n body`, only meaningful inside a schematic template.
    Power(Action, Arc<Formula>),
}

/// HML⁺: `T | F | ⋀ φ_i | ⋁ φ_i | <a>φ | [a]φ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PosFormula {
    True,
    False,
    And(Arc<Family<PosFormula>>),
    Or(Arc<Family<PosFormula>>),
    Diamond(Action, Arc<PosFormula>),
    Box(Action, Arc<PosFormula>),
    /// `<a>^n body` inside a template.
    PowerDiamond(Action, Arc<PosFormula>),
    /// `[a]^n body` inside a template.
    PowerBox(Action, Arc<PosFormula>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LambdaMode {
    /// Count every infinite conjunction.
    Fin,
    /// Count only infinite conjunctions of infinite depth.
    Fdp,
}

impl Formula {
    pub fn diamond(a: Action, f: Formula) -> Self {
        Formula::Diamond(a, Arc::new(f))
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Arc::new(f))
    }

    pub fn and(items: Vec<Formula>) -> Self {
        Formula::And(Arc::new(Family::List(items)))
    }

    /// The encoding of falsum in HML: `¬T`.
    pub fn falsum() -> Self {
        Formula::not(Formula::True)
    }

    pub fn power(a: Action, body: Formula) -> Self {
        Formula::Power(a, Arc::new(body))
    }

    pub fn schematic(template: Formula, indices: IndexSet) -> Self {
        Formula::And(Arc::new(Family::Schematic { template, indices }))
    }

    /// `<a_1>…<a_k> body`.
    pub fn path(actions: &[Action], body: Formula) -> Self {
        actions
            .iter()
            .rev()
            .fold(body, |acc, a| Formula::diamond(a.clone(), acc))
    }

    /// `<a>^n body` unfolded.
    pub fn iterate(a: &Action, n: usize, body: Formula) -> Self {
        (0..n).fold(body, |acc, _| Formula::diamond(a.clone(), acc))
    }

    pub fn depth(&self) -> Depth {
        self.depth_memo(&mut HashMap::new())
    }

    fn depth_memo(&self, memo: &mut HashMap<*const Formula, Depth>) -> Depth {
        let mut child = |g: &Arc<Formula>| {
            if let Some(d) = memo.get(&Arc::as_ptr(g)) {
                return *d;
            }
            let d = g.depth_memo(memo);
            memo.insert(Arc::as_ptr(g), d);
            d
        };
        match self {
            Formula::True => Depth::Finite(0),
            Formula::Diamond(_, f) => child(f) + 1,
            Formula::Not(f) => child(f),
            Formula::Power(..) => Depth::Infinite,
            Formula::And(fam) => match &**fam {
                Family::List(items) => items
                    .iter()
                    .map(|g| g.depth_memo(memo))
                    .max()
                    .unwrap_or(Depth::Finite(0)),
                Family::Schematic { template, indices } => match indices {
                    IndexSet::All if template.has_power() => Depth::Infinite,
                    IndexSet::All => template.depth_memo(memo),
                    IndexSet::Finite(js) => js
                        .iter()
                        .map(|n| template.instantiate(*n).depth())
                        .max()
                        .unwrap_or(Depth::Finite(0)),
                },
            },
        }
    }

    /// `|T| = 1`, `|<a>φ| = |¬φ| = 1 + |φ|`, `|⋀φ_i| = 1 + max |φ_i|`.
    pub fn complexity(&self) -> Result<usize, FormulaError> {
        Ok(match self {
            Formula::True => 1,
            Formula::Diamond(_, f) | Formula::Not(f) => 1 + f.complexity()?,
            Formula::Power(a, _) => return Err(FormulaError::StrayPower(a.clone())),
            Formula::And(fam) => match &**fam {
                Family::List(items) => {
                    let mut m = 0;
                    for f in items {
                        m = m.max(f.complexity()?);
                    }
                    1 + m
                }
                Family::Schematic { indices: IndexSet::All, .. } => {
                    return Err(FormulaError::InfiniteFamily)
                }
                Family::Schematic {
                    template,
                    indices: IndexSet::Finite(js),
                } => {
                    let mut m = 0;
                    for n in js {
                        m = m.max(template.instantiate(*n).complexity()?);
                    }
                    1 + m
                }
            },
        })
    }

    /// Length of the longest chain of nested infinite conjunctions (in
    /// [`LambdaMode::Fdp`], only those of infinite depth).
    pub fn lambda(&self, mode: LambdaMode) -> usize {
        match self {
            Formula::True => 0,
            Formula::Diamond(_, f) | Formula::Not(f) | Formula::Power(_, f) => f.lambda(mode),
            Formula::And(fam) => match &**fam {
                Family::List(items) => items.iter().map(|f| f.lambda(mode)).max().unwrap_or(0),
                Family::Schematic { template, indices } => {
                    let inner = template.lambda(mode);
                    let counts = indices.is_infinite()
                        && (mode == LambdaMode::Fin || self.depth() == Depth::Infinite);
                    inner + usize::from(counts)
                }
            },
        }
    }

    /// Whether the formula mentions an infinite family anywhere.
    pub fn is_finitary(&self) -> bool {
        self.lambda(LambdaMode::Fin) == 0
    }

    /// Whether this template mentions its index (outside nested families).
    pub fn has_power(&self) -> bool {
        self.power_count() > 0
    }

    fn power_count(&self) -> usize {
        match self {
            Formula::True => 0,
            Formula::Power(_, body) => 1 + body.power_count(),
            Formula::Diamond(_, f) | Formula::Not(f) => f.power_count(),
            Formula::And(fam) => match &**fam {
                Family::List(items) => items.iter().map(Formula::power_count).sum(),
                Family::Schematic { .. } => 0,
            },
        }
    }

    /// Checks that index nodes only occur as the single index of an
    /// enclosing schematic template.
    pub fn validate(&self) -> Result<(), FormulaError> {
        fn walk(
            f: &Formula,
            in_template: bool,
            seen: &mut HashSet<(*const Formula, bool)>,
        ) -> Result<(), FormulaError> {
            let mut child = |g: &Arc<Formula>, in_template: bool| {
                if seen.insert((Arc::as_ptr(g), in_template)) {
                    walk(g, in_template, seen)
                } else {
                    Ok(())
                }
            };
            match f {
                Formula::True => Ok(()),
                Formula::Power(a, body) => {
                    if !in_template {
                        return Err(FormulaError::StrayPower(a.clone()));
                    }
                    child(body, false)
                }
                Formula::Diamond(_, g) | Formula::Not(g) => child(g, in_template),
                Formula::And(fam) => match &**fam {
                    Family::List(items) => items.iter().try_for_each(|g| walk(g, in_template, seen)),
                    Family::Schematic { template, .. } => {
                        if template.power_count() > 1 {
                            return Err(FormulaError::AmbiguousTemplate);
                        }
                        walk(template, true, seen)
                    }
                },
            }
        }
        walk(self, false, &mut HashSet::new())
    }

    /// Replaces the template's index node by `n` nested diamonds.
    pub fn instantiate(&self, n: usize) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::Power(a, body) => Formula::iterate(a, n, (**body).clone()),
            Formula::Diamond(a, f) => Formula::diamond(a.clone(), f.instantiate(n)),
            Formula::Not(f) => Formula::not(f.instantiate(n)),
            Formula::And(fam) => match &**fam {
                Family::List(items) => {
                    Formula::and(items.iter().map(|f| f.instantiate(n)).collect())
                }
                Family::Schematic { .. } => self.clone(),
            },
        }
    }

    /// `cut_n`: diamonds at depth `n` become `¬T`. Schematic families are
    /// expanded into the finitely many distinct cut instances, so the result
    /// has depth at most `n`.
    pub fn cut(&self, n: usize) -> Formula {
        let mut memo = HashMap::new();
        cut_rec(self, n, &mut memo)
    }
}

/// Memo for `cut_rec`, keyed by node address. Each entry holds on to its
/// node so the address cannot be reused by a later temporary instance.
type CutMemo = HashMap<(*const Formula, usize), (Arc<Formula>, Formula)>;

fn cut_rec(f: &Formula, n: usize, memo: &mut CutMemo) -> Formula {
    let shared = |g: &Arc<Formula>, k: usize, memo: &mut CutMemo| -> Formula {
        let key = (Arc::as_ptr(g), k);
        if let Some((_, hit)) = memo.get(&key) {
            return hit.clone();
        }
        let r = cut_rec(g, k, memo);
        memo.insert(key, (g.clone(), r.clone()));
        r
    };
    match f {
        Formula::True => Formula::True,
        Formula::Diamond(_, _) if n == 0 => Formula::falsum(),
        Formula::Diamond(a, g) => Formula::diamond(a.clone(), shared(g, n - 1, memo)),
        Formula::Not(g) => Formula::not(shared(g, n, memo)),
        // a stray index node behaves like a diamond of unknown height
        Formula::Power(a, g) => Formula::Power(a.clone(), Arc::new(shared(g, n, memo))),
        Formula::And(fam) => match &**fam {
            Family::List(items) => {
                Formula::and(items.iter().map(|g| cut_rec(g, n, memo)).collect())
            }
            Family::Schematic { template, indices } => {
                // instances beyond n + 1 all cut to the same formula
                let picked: Vec<usize> = match indices {
                    IndexSet::All => (0..=n + 1).collect(),
                    IndexSet::Finite(js) => {
                        let mut v: Vec<usize> = js.iter().copied().filter(|j| *j <= n + 1).collect();
                        if let Some(beyond) = js.iter().find(|j| **j > n + 1) {
                            v.push(*beyond);
                        }
                        v
                    }
                };
                Formula::and(
                    picked
                        .into_iter()
                        .map(|j| cut_rec(&template.instantiate(j), n, memo))
                        .collect(),
                )
            }
        },
    }
}

impl PosFormula {
    pub fn diamond(a: Action, f: PosFormula) -> Self {
        PosFormula::Diamond(a, Arc::new(f))
    }

    pub fn boxed(a: Action, f: PosFormula) -> Self {
        PosFormula::Box(a, Arc::new(f))
    }

    pub fn and(items: Vec<PosFormula>) -> Self {
        PosFormula::And(Arc::new(Family::List(items)))
    }

    pub fn or(items: Vec<PosFormula>) -> Self {
        PosFormula::Or(Arc::new(Family::List(items)))
    }

    pub fn conj_schematic(template: PosFormula, indices: IndexSet) -> Self {
        PosFormula::And(Arc::new(Family::Schematic { template, indices }))
    }

    pub fn disj_schematic(template: PosFormula, indices: IndexSet) -> Self {
        PosFormula::Or(Arc::new(Family::Schematic { template, indices }))
    }

    pub fn depth(&self) -> Depth {
        match self {
            PosFormula::True | PosFormula::False => Depth::Finite(0),
            PosFormula::Diamond(_, f) | PosFormula::Box(_, f) => f.depth() + 1,
            PosFormula::PowerDiamond(..) | PosFormula::PowerBox(..) => Depth::Infinite,
            PosFormula::And(fam) | PosFormula::Or(fam) => match &**fam {
                Family::List(items) => items
                    .iter()
                    .map(PosFormula::depth)
                    .max()
                    .unwrap_or(Depth::Finite(0)),
                Family::Schematic { template, indices } => match indices {
                    IndexSet::All if template.has_power() => Depth::Infinite,
                    IndexSet::All => template.depth(),
                    IndexSet::Finite(js) => js
                        .iter()
                        .map(|n| template.instantiate(*n).depth())
                        .max()
                        .unwrap_or(Depth::Finite(0)),
                },
            },
        }
    }

    pub fn has_power(&self) -> bool {
        match self {
            PosFormula::True | PosFormula::False => false,
            PosFormula::PowerDiamond(..) | PosFormula::PowerBox(..) => true,
            PosFormula::Diamond(_, f) | PosFormula::Box(_, f) => f.has_power(),
            PosFormula::And(fam) | PosFormula::Or(fam) => match &**fam {
                Family::List(items) => items.iter().any(PosFormula::has_power),
                Family::Schematic { .. } => false,
            },
        }
    }

    pub fn instantiate(&self, n: usize) -> PosFormula {
        let list = |items: &[PosFormula]| items.iter().map(|f| f.instantiate(n)).collect();
        match self {
            PosFormula::True | PosFormula::False => self.clone(),
            PosFormula::PowerDiamond(a, body) => (0..n).fold((**body).clone(), |acc, _| {
                PosFormula::diamond(a.clone(), acc)
            }),
            PosFormula::PowerBox(a, body) => (0..n).fold((**body).clone(), |acc, _| {
                PosFormula::boxed(a.clone(), acc)
            }),
            PosFormula::Diamond(a, f) => PosFormula::diamond(a.clone(), f.instantiate(n)),
            PosFormula::Box(a, f) => PosFormula::boxed(a.clone(), f.instantiate(n)),
            PosFormula::And(fam) => match &**fam {
                Family::List(items) => PosFormula::and(list(items)),
                Family::Schematic { .. } => self.clone(),
            },
            PosFormula::Or(fam) => match &**fam {
                Family::List(items) => PosFormula::or(list(items)),
                Family::Schematic { .. } => self.clone(),
            },
        }
    }

    /// `cut_n` over HML⁺: diamonds at depth `n` become `F`, boxes `T`.
    pub fn cut(&self, n: usize) -> PosFormula {
        let sub = |g: &PosFormula, k: usize| Arc::new(g.cut(k));
        match self {
            PosFormula::True | PosFormula::False => self.clone(),
            PosFormula::Diamond(..) if n == 0 => PosFormula::False,
            PosFormula::Box(..) if n == 0 => PosFormula::True,
            PosFormula::Diamond(a, g) => PosFormula::Diamond(a.clone(), sub(g, n - 1)),
            PosFormula::Box(a, g) => PosFormula::Box(a.clone(), sub(g, n - 1)),
            PosFormula::PowerDiamond(a, g) => PosFormula::PowerDiamond(a.clone(), sub(g, n)),
            PosFormula::PowerBox(a, g) => PosFormula::PowerBox(a.clone(), sub(g, n)),
            PosFormula::And(fam) | PosFormula::Or(fam) => {
                let items: Vec<PosFormula> = match &**fam {
                    Family::List(items) => items.iter().map(|g| g.cut(n)).collect(),
                    Family::Schematic { template, indices } => {
                        let picked: Vec<usize> = match indices {
                            IndexSet::All => (0..=n + 1).collect(),
                            IndexSet::Finite(js) => {
                                let mut v: Vec<usize> =
                                    js.iter().copied().filter(|j| *j <= n + 1).collect();
                                v.extend(js.iter().copied().find(|j| *j > n + 1));
                                v
                            }
                        };
                        picked.into_iter().map(|j| template.instantiate(j).cut(n)).collect()
                    }
                };
                match self {
                    PosFormula::And(_) => PosFormula::and(items),
                    _ => PosFormula::or(items),
                }
            }
        }
    }

    /// The dual formula: equivalent to the negation, with no negation symbol.
    pub fn complement(&self) -> PosFormula {
        let fam = |f: &Family<PosFormula>| Arc::new(f.map(PosFormula::complement));
        match self {
            PosFormula::True => PosFormula::False,
            PosFormula::False => PosFormula::True,
            PosFormula::And(f) => PosFormula::Or(fam(f)),
            PosFormula::Or(f) => PosFormula::And(fam(f)),
            PosFormula::Diamond(a, f) => PosFormula::Box(a.clone(), Arc::new(f.complement())),
            PosFormula::Box(a, f) => PosFormula::Diamond(a.clone(), Arc::new(f.complement())),
            PosFormula::PowerDiamond(a, f) => {
                PosFormula::PowerBox(a.clone(), Arc::new(f.complement()))
            }
            PosFormula::PowerBox(a, f) => {
                PosFormula::PowerDiamond(a.clone(), Arc::new(f.complement()))
            }
        }
    }
}

pub fn complement(f: &PosFormula) -> PosFormula {
    f.complement()
}

/// Negation elimination into HML⁺: `P(¬φ)` is the complement of `P(φ)`.
pub fn to_positive(f: &Formula) -> PosFormula {
    match f {
        Formula::True => PosFormula::True,
        Formula::And(fam) => PosFormula::And(Arc::new(fam.map(to_positive))),
        Formula::Diamond(a, g) => PosFormula::Diamond(a.clone(), Arc::new(to_positive(g))),
        Formula::Not(g) => to_positive(g).complement(),
        Formula::Power(a, g) => PosFormula::PowerDiamond(a.clone(), Arc::new(to_positive(g))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lts::act;

    fn a() -> Action {
        act("a")
    }

    fn dia(f: Formula) -> Formula {
        Formula::diamond(a(), f)
    }

    fn power_family() -> Formula {
        Formula::schematic(Formula::power(a(), Formula::True), IndexSet::All)
    }

    #[test]
    fn depths() {
        assert_eq!(Formula::True.depth(), Depth::Finite(0));
        assert_eq!(dia(Formula::True).depth(), Depth::Finite(1));
        assert_eq!(power_family().depth(), Depth::Infinite);
        // instance depth is n, checked for n <= 5, so the supremum is unbounded
        let tpl = Formula::power(a(), Formula::True);
        for n in 0..=5 {
            assert_eq!(tpl.instantiate(n).depth(), Depth::Finite(n));
        }
        let constant = Formula::schematic(dia(Formula::True), IndexSet::All);
        assert_eq!(constant.depth(), Depth::Finite(1));
        let fin = Formula::schematic(Formula::power(a(), Formula::True), IndexSet::finite([0, 2, 5]));
        assert_eq!(fin.depth(), Depth::Finite(5));
    }

    #[test]
    fn complexities() {
        assert_eq!(Formula::True.complexity(), Ok(1));
        assert_eq!(Formula::not(dia(Formula::True)).complexity(), Ok(3));
        assert_eq!(
            Formula::and(vec![Formula::True, dia(Formula::True)]).complexity(),
            Ok(3)
        );
        assert_eq!(
            power_family().complexity(),
            Err(FormulaError::InfiniteFamily)
        );
    }

    #[test]
    fn lambdas() {
        assert_eq!(Formula::True.lambda(LambdaMode::Fin), 0);
        assert_eq!(Formula::True.lambda(LambdaMode::Fdp), 0);
        assert_eq!(power_family().lambda(LambdaMode::Fin), 1);
        assert_eq!(power_family().lambda(LambdaMode::Fdp), 1);
        let constant = Formula::schematic(dia(Formula::True), IndexSet::All);
        assert_eq!(constant.lambda(LambdaMode::Fin), 1);
        assert_eq!(constant.lambda(LambdaMode::Fdp), 0);
        // a finite-depth infinite conjunction nested inside an infinite-depth one
        let nested = Formula::schematic(
            Formula::and(vec![Formula::power(a(), Formula::True), constant.clone()]),
            IndexSet::All,
        );
        assert_eq!(nested.lambda(LambdaMode::Fin), 2);
        assert_eq!(nested.lambda(LambdaMode::Fdp), 1);
    }

    #[test]
    fn complement_table() {
        assert_eq!(PosFormula::True.complement(), PosFormula::False);
        assert_eq!(
            PosFormula::diamond(a(), PosFormula::True).complement(),
            PosFormula::boxed(a(), PosFormula::False)
        );
    }

    #[test]
    fn positive_translation() {
        assert_eq!(to_positive(&Formula::True), PosFormula::True);
        assert_eq!(
            to_positive(&Formula::not(dia(Formula::True))),
            PosFormula::boxed(a(), PosFormula::False)
        );
        assert_eq!(
            to_positive(&Formula::not(Formula::not(dia(Formula::True)))),
            PosFormula::diamond(a(), PosFormula::True)
        );
    }

    #[test]
    fn cuts() {
        assert_eq!(dia(Formula::True).cut(0), Formula::falsum());
        assert_eq!(Formula::True.cut(3), Formula::True);
        assert_eq!(dia(dia(Formula::True)).cut(1), dia(Formula::falsum()));
        let cut = power_family().cut(2);
        assert_eq!(cut.depth(), Depth::Finite(2));
        assert!(cut.is_finitary());
        let expected = Formula::and(vec![
            Formula::True,
            dia(Formula::True),
            dia(dia(Formula::True)),
            dia(dia(Formula::falsum())),
        ]);
        assert_eq!(cut, expected);
    }

    #[test]
    fn positive_cuts_follow_the_translation() {
        let f = Formula::not(dia(Formula::not(dia(Formula::True))));
        for n in 0..3 {
            assert_eq!(to_positive(&f).cut(n), to_positive(&f.cut(n)), "n = {n}");
        }
        assert_eq!(PosFormula::diamond(a(), PosFormula::True).cut(0), PosFormula::False);
    }

    #[test]
    fn validation() {
        assert!(power_family().validate().is_ok());
        assert_eq!(
            Formula::power(a(), Formula::True).validate(),
            Err(FormulaError::StrayPower(a()))
        );
        let two = Formula::schematic(
            Formula::and(vec![
                Formula::power(a(), Formula::True),
                Formula::power(a(), Formula::True),
            ]),
            IndexSet::All,
        );
        assert_eq!(two.validate(), Err(FormulaError::AmbiguousTemplate));
    }
}
