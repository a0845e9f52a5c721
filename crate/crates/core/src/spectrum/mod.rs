//! Modal characterizations of spectrum semantics and the equivalences they
//! induce.
//!
//! The `bound` of a characterization limits the observation spine: the
//! number of diamonds along a trace (linear semantics) or the nesting depth
//! of the diamond/conjunction skeleton (branching semantics). Decorations
//! such as `and(not <a> T)` sit on top of the spine and add one to the depth
//! of the formulas that carry them.
//!
//! [`char_formulas`] enumerates the characterization syntactically.
//! [`Characterization`] generates it relative to a fixed finite state space,
//! keeping only formulas whose satisfying sets are new; on that space it
//! induces the same equivalence as the full enumeration.

mod deciders;
mod relative;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::eval::{EvalEnvironment, EvalError};
use crate::formula::Formula;
use crate::lts::{Action, FiniteLts, LtsError, State, StateRef, TransitionSystem};

pub use deciders::{
    bisimilar, bisimilar_within, bisimulation_classes, completed_traces, failures,
    linear_equivalent, reachability_equivalent, reachable_action, ready_sets, simulated_by,
    simulation_equivalent, trace_sets, Linear,
};
pub use relative::Characterization;

/// Upper limit on the size of a syntactic enumeration.
pub const MAX_FORMULAS: usize = 50_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpectrumError {
    #[error("unknown semantics `{0}`; known semantics: {}", catalogue())]
    Unknown(String),
    #[error("semantics `{0}` is catalogued but has no generator")]
    Unsupported(String),
    #[error("{semantics} at bound {bound} needs more than {MAX_FORMULAS} formulas")]
    TooLarge { semantics: SemanticsId, bound: usize },
    #[error("alphabet of {0} actions is too large for the refusal decider")]
    AlphabetTooLarge(usize),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Lts(#[from] LtsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SemanticsId {
    Trace,
    CompletedTrace,
    Failures,
    Readiness,
    Simulation,
    ReadySimulation,
    Bisimulation,
    /// Agreement on which actions are reachable.
    ReachabilityExample,
}

/// Catalogued semantics without a generator.
pub const UNSUPPORTED: [&str; 3] = ["failure-trace", "ready-trace", "nested-simulation"];

fn catalogue() -> String {
    let names: Vec<String> = SemanticsId::ALL.iter().map(|s| s.to_string()).collect();
    format!(
        "{} (catalogued, not implemented: {})",
        names.join(", "),
        UNSUPPORTED.join(", ")
    )
}

impl SemanticsId {
    pub const ALL: [SemanticsId; 8] = [
        SemanticsId::Trace,
        SemanticsId::CompletedTrace,
        SemanticsId::Failures,
        SemanticsId::Readiness,
        SemanticsId::Simulation,
        SemanticsId::ReadySimulation,
        SemanticsId::Bisimulation,
        SemanticsId::ReachabilityExample,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SemanticsId::Trace => "trace",
            SemanticsId::CompletedTrace => "completed-trace",
            SemanticsId::Failures => "failures",
            SemanticsId::Readiness => "readiness",
            SemanticsId::Simulation => "simulation",
            SemanticsId::ReadySimulation => "ready-simulation",
            SemanticsId::Bisimulation => "bisimulation",
            SemanticsId::ReachabilityExample => "reachability",
        }
    }

    fn linear(self) -> Option<Linear> {
        match self {
            SemanticsId::Trace => Some(Linear::Trace),
            SemanticsId::CompletedTrace => Some(Linear::CompletedTrace),
            SemanticsId::Failures => Some(Linear::Failures),
            SemanticsId::Readiness => Some(Linear::Readiness),
            _ => None,
        }
    }

    /// Decides the full (unbounded) equivalence directly, without formulas.
    pub fn decide(
        self,
        ts1: &TransitionSystem,
        s: impl Into<StateRef>,
        ts2: &TransitionSystem,
        t: impl Into<StateRef>,
    ) -> Result<bool, SpectrumError> {
        let (s, t) = (s.into(), t.into());
        if let Some(kind) = self.linear() {
            return linear_equivalent(kind, ts1, s, ts2, t, None);
        }
        Ok(match self {
            SemanticsId::Simulation => simulation_equivalent(ts1, s, ts2, t, false)?,
            SemanticsId::ReadySimulation => simulation_equivalent(ts1, s, ts2, t, true)?,
            SemanticsId::Bisimulation => bisimilar(ts1, s, ts2, t)?,
            SemanticsId::ReachabilityExample => reachability_equivalent(ts1, s, ts2, t)?,
            _ => unreachable!("linear semantics handled above"),
        })
    }
}

impl fmt::Display for SemanticsId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SemanticsId {
    type Err = SpectrumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        if let Some(id) = SemanticsId::ALL.iter().find(|id| id.name() == key) {
            return Ok(*id);
        }
        if UNSUPPORTED.contains(&key.as_str()) {
            return Err(SpectrumError::Unsupported(key));
        }
        Err(SpectrumError::Unknown(s.to_string()))
    }
}

/// A finite modal characterization `O`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterizationSet {
    /// `None` for ad-hoc sets.
    pub semantics: Option<SemanticsId>,
    pub alphabet: Vec<Action>,
    pub depth_bound: usize,
    pub formulas: Vec<Formula>,
}

impl CharacterizationSet {
    pub fn custom(formulas: Vec<Formula>) -> Self {
        CharacterizationSet {
            semantics: None,
            alphabet: Vec::new(),
            depth_bound: 0,
            formulas,
        }
    }

    /// The largest formula depth, or `None` if some member has infinite depth.
    pub fn max_depth(&self) -> Option<usize> {
        self.formulas
            .iter()
            .try_fold(0, |m, f| f.depth().finite().map(|d| m.max(d)))
    }
}

/// Outcome of an equivalence query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub equivalent: bool,
    /// A formula true at exactly one of the two states.
    pub witness: Option<Formula>,
}

fn refuse(a: &Action) -> Formula {
    Formula::not(Formula::diamond(a.clone(), Formula::True))
}

fn ready(a: &Action) -> Formula {
    Formula::diamond(a.clone(), Formula::True)
}

/// `T` for no conjuncts, the conjunct itself for one, `and(...)` otherwise.
pub(crate) fn conj(mut items: Vec<Formula>) -> Formula {
    match items.len() {
        0 => Formula::True,
        1 => items.pop().expect("one item"),
        _ => Formula::and(items),
    }
}

/// The formulas a linear semantics observes at the end of a trace.
pub(crate) fn decorations(sem: SemanticsId, alphabet: &[Action]) -> Vec<Formula> {
    let m = alphabet.len();
    let decorate = |lits: Vec<Formula>| {
        if lits.is_empty() {
            Formula::True
        } else {
            Formula::and(lits)
        }
    };
    match sem {
        SemanticsId::Trace => vec![Formula::True],
        SemanticsId::CompletedTrace => {
            vec![Formula::True, Formula::and(alphabet.iter().map(refuse).collect())]
        }
        SemanticsId::Failures => {
            let mut masks: Vec<u64> = (0..1u64 << m).collect();
            masks.sort_by_key(|x| (x.count_ones(), x.reverse_bits()));
            masks
                .into_iter()
                .map(|x| {
                    decorate(
                        (0..m)
                            .filter(|i| x & (1 << i) != 0)
                            .map(|i| refuse(&alphabet[i]))
                            .collect(),
                    )
                })
                .collect()
        }
        SemanticsId::Readiness => {
            // each action is unconstrained, refused, or ready
            let mut codes: Vec<Vec<u8>> = (0..3usize.pow(m as u32))
                .map(|mut c| {
                    (0..m)
                        .map(|_| {
                            let d = (c % 3) as u8;
                            c /= 3;
                            d
                        })
                        .collect()
                })
                .collect();
            codes.sort_by_key(|c| (c.iter().filter(|d| **d != 0).count(), c.iter().rev().copied().collect::<Vec<u8>>()));
            codes
                .into_iter()
                .map(|c| {
                    let mut lits: Vec<Formula> = (0..m).filter(|i| c[*i] == 1).map(|i| refuse(&alphabet[i])).collect();
                    lits.extend((0..m).filter(|i| c[*i] == 2).map(|i| ready(&alphabet[i])));
                    decorate(lits)
                })
                .collect()
        }
        _ => Vec::new(),
    }
}

/// `E_{≤k}<a>T`: `<a>T` reachable within `k` steps, as
/// `not and(not <a> T, not <b_1> R, …)` over the shared `R = E_{≤k-1}<a>T`.
pub fn reach_formula(a: &Action, alphabet: &[Action], k: usize) -> Formula {
    let base = ready(a);
    (0..k).fold(base.clone(), |r, _| {
        let mut items = vec![Formula::not(base.clone())];
        items.extend(
            alphabet
                .iter()
                .map(|b| Formula::not(Formula::diamond(b.clone(), r.clone()))),
        );
        Formula::not(Formula::and(items))
    })
}

fn too_large(semantics: SemanticsId, bound: usize) -> SpectrumError {
    SpectrumError::TooLarge { semantics, bound }
}

/// The characterization of `sem` over `alphabet` with spine length at most
/// `bound`, in canonical order (by depth, then generation order) without
/// structural duplicates.
pub fn char_formulas(
    sem: SemanticsId,
    alphabet: &[Action],
    bound: usize,
) -> Result<CharacterizationSet, SpectrumError> {
    let mut alphabet = alphabet.to_vec();
    alphabet.sort();
    alphabet.dedup();
    let formulas = match sem {
        SemanticsId::ReachabilityExample => alphabet
            .iter()
            .map(|a| reach_formula(a, &alphabet, bound))
            .collect(),
        SemanticsId::Trace
        | SemanticsId::CompletedTrace
        | SemanticsId::Failures
        | SemanticsId::Readiness => linear_syntactic(sem, &alphabet, bound)?,
        SemanticsId::Simulation | SemanticsId::ReadySimulation | SemanticsId::Bisimulation => {
            branching_syntactic(sem, &alphabet, bound)?
        }
    };
    let mut seen = HashSet::new();
    let mut formulas: Vec<Formula> = formulas.into_iter().filter(|f| seen.insert(f.clone())).collect();
    formulas.sort_by_key(|f| f.depth());
    Ok(CharacterizationSet {
        semantics: Some(sem),
        alphabet,
        depth_bound: bound,
        formulas,
    })
}

fn linear_syntactic(sem: SemanticsId, alphabet: &[Action], bound: usize) -> Result<Vec<Formula>, SpectrumError> {
    let m = alphabet.len();
    if m > 16 {
        return Err(too_large(sem, bound));
    }
    let decs = decorations(sem, alphabet);
    let mut spines: usize = 0;
    let mut layer: usize = 1;
    for _ in 0..=bound {
        spines = spines.saturating_add(layer);
        layer = layer.saturating_mul(m.max(1));
    }
    if spines.saturating_mul(decs.len()) > MAX_FORMULAS {
        return Err(too_large(sem, bound));
    }
    let mut out = Vec::new();
    for d in decs {
        let mut layer = vec![d];
        for k in 0..=bound {
            out.extend(layer.iter().cloned());
            if k < bound {
                // prepending keeps sequences in lexicographic order of σ
                layer = alphabet
                    .iter()
                    .flat_map(|a| layer.iter().map(move |f| Formula::diamond(a.clone(), f.clone())))
                    .collect();
            }
        }
    }
    Ok(out)
}

fn branching_syntactic(sem: SemanticsId, alphabet: &[Action], bound: usize) -> Result<Vec<Formula>, SpectrumError> {
    let mut all = vec![Formula::True];
    if sem == SemanticsId::ReadySimulation {
        all.extend(alphabet.iter().map(refuse));
    }
    let negate = sem == SemanticsId::Bisimulation;
    let mut seen: HashSet<Formula> = all.iter().cloned().collect();
    for _ in 0..bound {
        let mut pool: Vec<Formula> = all.iter().filter(|f| **f != Formula::True).cloned().collect();
        if negate {
            let negs: Vec<Formula> = pool.iter().map(|f| Formula::not(f.clone())).collect();
            pool.extend(negs);
        }
        if pool.len() >= 20 || (alphabet.len() << pool.len()) > MAX_FORMULAS {
            return Err(too_large(sem, bound));
        }
        let mut next = Vec::new();
        for a in alphabet {
            for mask in 0u64..(1 << pool.len()) {
                let chi = conj(
                    (0..pool.len())
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| pool[i].clone())
                        .collect(),
                );
                let f = Formula::diamond(a.clone(), chi);
                if seen.insert(f.clone()) {
                    next.push(f);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        all.extend(next);
    }
    if negate {
        let negs: Vec<Formula> = all
            .iter()
            .filter(|f| **f != Formula::True)
            .map(|f| Formula::not(f.clone()))
            .collect();
        all.extend(negs);
    }
    Ok(all)
}

/// Compares `s` (in `env1`) and `t` (in `env2`) on every member of `o`.
pub fn equiv_modulo(
    env1: &EvalEnvironment,
    s: impl Into<StateRef>,
    env2: &EvalEnvironment,
    t: impl Into<StateRef>,
    o: &CharacterizationSet,
) -> Result<Verdict, EvalError> {
    let (s, t) = (s.into(), t.into());
    for f in &o.formulas {
        if env1.satisfies(s, f)? != env2.satisfies(t, f)? {
            return Ok(Verdict {
                equivalent: false,
                witness: Some(f.clone()),
            });
        }
    }
    Ok(Verdict {
        equivalent: true,
        witness: None,
    })
}

/// `s ∼ t` under the characterization of `sem` with spine bound `bound`.
/// Finite systems use the relative generator; otherwise the syntactic
/// enumeration is evaluated.
pub fn equivalent_under(
    sem: SemanticsId,
    ts1: &TransitionSystem,
    s: impl Into<StateRef>,
    ts2: &TransitionSystem,
    t: impl Into<StateRef>,
    bound: usize,
) -> Result<Verdict, SpectrumError> {
    let (s, t) = (s.into(), t.into());
    if let (TransitionSystem::Finite(l1), TransitionSystem::Finite(l2)) = (ts1, ts2) {
        for (ts, r) in [(ts1, s), (ts2, t)] {
            if !ts.contains(r.state) {
                return Err(LtsError::UnknownState(r.state).into());
            }
        }
        let (union, offsets) = FiniteLts::disjoint_union(&[l1, l2]);
        let cap = s.budget.max(t.budget).unwrap_or(0);
        let c = Characterization::generate(sem, &union, cap, bound)?;
        let shift = |r: StateRef, off: usize| match r.state {
            State::Id(n) => StateRef {
                state: State::Id(n + off),
                budget: r.budget,
            },
            _ => r,
        };
        let witness = c.separating(shift(s, offsets[0]), shift(t, offsets[1]))?.cloned();
        return Ok(Verdict {
            equivalent: witness.is_none(),
            witness,
        });
    }
    let mut alphabet = ts1.alphabet();
    alphabet.extend(ts2.alphabet());
    let o = char_formulas(sem, &alphabet, bound)?;
    let env1 = EvalEnvironment::new(ts1.clone());
    let env2 = EvalEnvironment::new(ts2.clone());
    Ok(equiv_modulo(&env1, s, &env2, t, &o)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::lts::{a_loop, act, alphabet, deadlock};
    use crate::term::ProcessTerm;

    fn ts(t: &str) -> TransitionSystem {
        ProcessTerm::parse(t).unwrap().to_lts()
    }

    fn texts(o: &CharacterizationSet) -> Vec<String> {
        o.formulas.iter().map(|f| f.to_string()).collect()
    }

    #[test]
    fn completed_trace_generator() {
        let o = char_formulas(SemanticsId::CompletedTrace, &alphabet(["a"]), 1).unwrap();
        assert_eq!(
            texts(&o),
            ["T", "<a> T", "and(not <a> T)", "<a> and(not <a> T)"]
        );
    }

    #[test]
    fn trace_generator() {
        let o = char_formulas(SemanticsId::Trace, &alphabet(["a"]), 0).unwrap();
        assert_eq!(texts(&o), ["T"]);
        let o = char_formulas(SemanticsId::Trace, &alphabet(["a", "b"]), 2).unwrap();
        assert_eq!(o.formulas.len(), 7);
        assert!(o.formulas.iter().all(|f| f.depth().finite().unwrap() <= 2));
    }

    #[test]
    fn semantics_names() {
        for id in SemanticsId::ALL {
            assert_eq!(id.name().parse::<SemanticsId>().unwrap(), id);
        }
        assert!(matches!(
            "ready-trace".parse::<SemanticsId>(),
            Err(SpectrumError::Unsupported(_))
        ));
        let err = "coupled".parse::<SemanticsId>().unwrap_err();
        assert!(err.to_string().contains("bisimulation"));
    }

    #[test]
    fn bisimulation_witness() {
        let late = ts("a.(b + c)");
        let early = ts("a.b + a.c");
        let root = State::Id(0);
        let v = equivalent_under(SemanticsId::Trace, &late, root, &early, root, 3).unwrap();
        assert!(v.equivalent);
        let v = equivalent_under(SemanticsId::Bisimulation, &late, root, &early, root, 2).unwrap();
        assert!(!v.equivalent);
        assert_eq!(v.witness.unwrap(), parse_formula("<a> and(<b> T, <c> T)").unwrap());
    }

    #[test]
    fn loop_versus_deadlock() {
        let o = CharacterizationSet::custom(vec![parse_formula("AND{n in N} <a>^n T").unwrap()]);
        let v = equiv_modulo(
            &EvalEnvironment::new(a_loop()),
            State::Id(0),
            &EvalEnvironment::new(deadlock()),
            State::Id(0),
            &o,
        )
        .unwrap();
        assert!(!v.equivalent);
        assert_eq!(o.max_depth(), None);
    }

    #[test]
    fn reflexive() {
        let x = ts("a.(b + a.b) + b");
        for sem in SemanticsId::ALL {
            let v = equivalent_under(sem, &x, State::Id(0), &x, State::Id(0), 4).unwrap();
            assert!(v.equivalent, "{sem}");
        }
    }

    #[test]
    fn reach_formula_depth() {
        let ab = alphabet(["a", "b"]);
        assert_eq!(reach_formula(&act("a"), &ab, 0), parse_formula("<a> T").unwrap());
        assert_eq!(reach_formula(&act("a"), &ab, 3).depth().finite(), Some(4));
    }

    #[test]
    fn too_large_is_reported() {
        let ab = alphabet(["a", "b"]);
        assert!(matches!(
            char_formulas(SemanticsId::Bisimulation, &ab, 4),
            Err(SpectrumError::TooLarge { .. })
        ));
    }
}
