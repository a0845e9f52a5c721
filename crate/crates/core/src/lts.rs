//! Labelled transition systems and projection operators.
//!
//! Two kinds of system are supported. A [`FiniteLts`] is an explicit,
//! image-finite system with dense state ids. A [`ChainFamily`] is one of the
//! two infinitely branching fixtures: a root with an `a`-edge to the head of
//! an `a`-chain of every finite length, optionally with one extra branch that
//! carries an infinite `a`-path. Family systems expose successors through a
//! depth-bounded representative enumerator.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LtsError {
    #[error("action labels must be non-empty")]
    EmptyAction,
    #[error("state {0} does not belong to the system")]
    UnknownState(State),
    #[error("transition ({from}, {label}, {to}) references a state outside 0..{states}")]
    DanglingTransition {
        from: usize,
        label: String,
        to: usize,
        states: usize,
    },
    #[error("initial state {0} is out of range")]
    BadInitial(usize),
    #[error("operation requires a finite system")]
    NotFinite,
    #[error("cannot read `{0}` as a state; expected a number, root, chain(n), omega or pi_n(state)")]
    BadStateName(String),
}

/// An action label. Equality is exact text equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Action(Arc<str>);

impl Action {
    pub fn new(name: &str) -> Result<Self, LtsError> {
        if name.is_empty() {
            return Err(LtsError::EmptyAction);
        }
        Ok(Action(Arc::from(name)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl Serialize for Action {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

/// Shorthand used heavily in tests and fixtures. Panics on the empty string.
pub fn act(name: &str) -> Action {
    Action::new(name).expect("non-empty action name")
}

/// Builds a duplicate-free, sorted alphabet.
pub fn alphabet<I, S>(names: I) -> Vec<Action>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let set: BTreeSet<Action> = names.into_iter().map(|n| act(n.as_ref())).collect();
    set.into_iter().collect()
}

/// State identity. Finite systems use dense ids; family systems use
/// structured descriptors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum State {
    Id(usize),
    /// Root of a chain family.
    Root,
    /// A state with exactly `n` further `a`-steps before deadlock.
    Chain(usize),
    /// A state on the infinite `a`-path.
    Omega,
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            State::Id(n) => write!(f, "{n}"),
            State::Root => f.write_str("root"),
            State::Chain(n) => write!(f, "chain({n})"),
            State::Omega => f.write_str("omega"),
        }
    }
}

impl std::str::FromStr for State {
    type Err = LtsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || LtsError::BadStateName(s.to_string());
        if let Ok(n) = t.parse() {
            return Ok(State::Id(n));
        }
        match t {
            "root" => Ok(State::Root),
            "omega" => Ok(State::Omega),
            _ => t
                .strip_prefix("chain(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|n| n.trim().parse().ok())
                .map(State::Chain)
                .ok_or_else(bad),
        }
    }
}

/// `π_n(s)`: a state paired with a remaining step budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ProjectedState {
    pub base: State,
    pub budget: usize,
}

impl fmt::Display for ProjectedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pi_{}({})", self.budget, self.base)
    }
}

/// Anything the evaluator can be asked about: a plain state, or a state under
/// a projection operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct StateRef {
    pub state: State,
    pub budget: Option<usize>,
}

impl StateRef {
    pub fn plain(state: State) -> Self {
        StateRef { state, budget: None }
    }

    /// Applies `π_n`. Nested projections compose to the smaller budget.
    pub fn project(self, n: usize) -> Self {
        let budget = Some(self.budget.map_or(n, |b| b.min(n)));
        StateRef { budget, ..self }
    }
}

impl From<State> for StateRef {
    fn from(state: State) -> Self {
        StateRef::plain(state)
    }
}

impl From<ProjectedState> for StateRef {
    fn from(p: ProjectedState) -> Self {
        StateRef {
            state: p.base,
            budget: Some(p.budget),
        }
    }
}

impl fmt::Display for StateRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.budget {
            None => write!(f, "{}", self.state),
            Some(n) => write!(f, "pi_{}({})", n, self.state),
        }
    }
}

impl std::str::FromStr for StateRef {
    type Err = LtsError;

    /// Reads `s` or `pi_n(s)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let Some(rest) = t.strip_prefix("pi_") else {
            return Ok(StateRef::plain(t.parse()?));
        };
        let bad = || LtsError::BadStateName(s.to_string());
        let (n, inner) = rest.split_once('(').ok_or_else(bad)?;
        let inner = inner.strip_suffix(')').ok_or_else(bad)?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        Ok(StateRef::plain(inner.parse()?).project(n))
    }
}

/// An explicit finite LTS. Every transition endpoint is a declared state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteLts {
    num_states: usize,
    initial: usize,
    alphabet: Vec<Action>,
    transitions: Vec<(usize, Action, usize)>,
    outgoing: Vec<Vec<(Action, usize)>>,
}

impl FiniteLts {
    pub fn new(
        num_states: usize,
        initial: usize,
        transitions: Vec<(usize, Action, usize)>,
    ) -> Result<Self, LtsError> {
        if initial >= num_states {
            return Err(LtsError::BadInitial(initial));
        }
        let mut outgoing = vec![Vec::new(); num_states];
        let mut labels = BTreeSet::new();
        for (from, a, to) in &transitions {
            if *from >= num_states || *to >= num_states {
                return Err(LtsError::DanglingTransition {
                    from: *from,
                    label: a.to_string(),
                    to: *to,
                    states: num_states,
                });
            }
            outgoing[*from].push((a.clone(), *to));
            labels.insert(a.clone());
        }
        Ok(FiniteLts {
            num_states,
            initial,
            alphabet: labels.into_iter().collect(),
            transitions,
            outgoing,
        })
    }

    /// Extends the alphabet with actions that label no transition.
    pub fn with_alphabet(mut self, extra: &[Action]) -> Self {
        let set: BTreeSet<Action> = self.alphabet.drain(..).chain(extra.iter().cloned()).collect();
        self.alphabet = set.into_iter().collect();
        self
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn alphabet(&self) -> &[Action] {
        &self.alphabet
    }

    pub fn transitions(&self) -> &[(usize, Action, usize)] {
        &self.transitions
    }

    pub fn outgoing(&self, s: usize) -> &[(Action, usize)] {
        &self.outgoing[s]
    }

    /// Places the systems side by side. Returns the union (rooted at the
    /// first system's initial state) and each system's state offset.
    pub fn disjoint_union(parts: &[&FiniteLts]) -> (FiniteLts, Vec<usize>) {
        let mut offsets = Vec::with_capacity(parts.len());
        let mut transitions = Vec::new();
        let mut total = 0;
        let mut labels = Vec::new();
        for l in parts {
            offsets.push(total);
            transitions.extend(
                l.transitions
                    .iter()
                    .map(|(s, a, t)| (s + total, a.clone(), t + total)),
            );
            labels.extend(l.alphabet.iter().cloned());
            total += l.num_states;
        }
        let initial = parts.first().map_or(0, |l| l.initial);
        let union = FiniteLts::new(total.max(1), initial, transitions)
            .expect("offsets keep every endpoint in range")
            .with_alphabet(&labels);
        (union, offsets)
    }

    /// Actions enabled in `s`, sorted and deduplicated.
    pub fn enabled(&self, s: usize) -> BTreeSet<Action> {
        self.outgoing[s].iter().map(|(a, _)| a.clone()).collect()
    }

    pub fn successors(&self, s: usize, a: &Action) -> impl Iterator<Item = usize> + '_ {
        let a = a.clone();
        self.outgoing[s]
            .iter()
            .filter(move |(b, _)| *b == a)
            .map(|(_, t)| *t)
    }
}

/// The infinitely branching fixtures: the root has an `a`-edge to `Chain(n)`
/// for every `n`, and, when `infinite_branch` is set, one more `a`-edge to a
/// state on an infinite `a`-path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainFamily {
    action: Action,
    infinite_branch: bool,
}

impl ChainFamily {
    pub fn left() -> Self {
        ChainFamily {
            action: act("a"),
            infinite_branch: false,
        }
    }

    pub fn right() -> Self {
        ChainFamily {
            action: act("a"),
            infinite_branch: true,
        }
    }

    pub fn action(&self) -> &Action {
        &self.action
    }

    pub fn has_infinite_branch(&self) -> bool {
        self.infinite_branch
    }

    fn contains(&self, s: State) -> bool {
        match s {
            State::Root | State::Chain(_) => true,
            State::Omega => self.infinite_branch,
            State::Id(_) => false,
        }
    }

    /// Representative successors. For budget `k`, chains of length `>= k`
    /// are indistinguishable by formulas of depth `<= k`, so `Chain(0..=k)`
    /// stands in for the whole fan-out.
    fn successors(&self, s: State, a: &Action, budget: usize) -> Vec<State> {
        if *a != self.action {
            return Vec::new();
        }
        match s {
            State::Root => {
                let mut out: Vec<State> = (0..=budget).map(State::Chain).collect();
                if self.infinite_branch {
                    out.push(State::Omega);
                }
                out
            }
            State::Chain(0) => Vec::new(),
            State::Chain(n) => vec![State::Chain(n - 1)],
            State::Omega => vec![State::Omega],
            State::Id(_) => Vec::new(),
        }
    }

    fn infinite_a_path(&self, s: State) -> bool {
        matches!(s, State::Omega)
    }

    /// Whether `s` has `a`-paths of every finite length. This is the truth
    /// value of the infinite conjunction over all `<a>^n T`. It coincides with
    /// `infinite_a_path` on the image-finite states; the root is the one
    /// state where they differ.
    pub fn unbounded_a_paths(&self, s: State) -> bool {
        matches!(s, State::Root | State::Omega)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TransitionSystem {
    Finite(FiniteLts),
    Family(ChainFamily),
}

impl From<FiniteLts> for TransitionSystem {
    fn from(l: FiniteLts) -> Self {
        TransitionSystem::Finite(l)
    }
}

impl TransitionSystem {
    pub fn as_finite(&self) -> Result<&FiniteLts, LtsError> {
        match self {
            TransitionSystem::Finite(l) => Ok(l),
            TransitionSystem::Family(_) => Err(LtsError::NotFinite),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, TransitionSystem::Finite(_))
    }

    pub fn initial(&self) -> State {
        match self {
            TransitionSystem::Finite(l) => State::Id(l.initial),
            TransitionSystem::Family(_) => State::Root,
        }
    }

    pub fn alphabet(&self) -> Vec<Action> {
        match self {
            TransitionSystem::Finite(l) => l.alphabet.clone(),
            TransitionSystem::Family(f) => vec![f.action.clone()],
        }
    }

    pub fn state_count(&self) -> Option<usize> {
        match self {
            TransitionSystem::Finite(l) => Some(l.num_states),
            TransitionSystem::Family(_) => None,
        }
    }

    pub fn contains(&self, s: State) -> bool {
        match (self, s) {
            (TransitionSystem::Finite(l), State::Id(n)) => n < l.num_states,
            (TransitionSystem::Finite(_), _) => false,
            (TransitionSystem::Family(f), s) => f.contains(s),
        }
    }

    fn check(&self, s: State) -> Result<(), LtsError> {
        if self.contains(s) {
            Ok(())
        } else {
            Err(LtsError::UnknownState(s))
        }
    }

    /// The `a`-successors of `s`. Finite systems ignore `depth_budget`;
    /// family systems return a representative set faithful for formulas of
    /// depth at most `depth_budget`.
    pub fn successors(
        &self,
        s: State,
        a: &Action,
        depth_budget: usize,
    ) -> Result<Vec<State>, LtsError> {
        self.check(s)?;
        Ok(match (self, s) {
            (TransitionSystem::Finite(l), State::Id(n)) => {
                l.successors(n, a).map(State::Id).collect()
            }
            (TransitionSystem::Family(f), s) => f.successors(s, a, depth_budget),
            _ => unreachable!("checked above"),
        })
    }

    /// Successors of a possibly projected state, following
    /// `x -a-> x'  implies  π_{n+1}(x) -a-> π_n(x')`.
    pub fn step(
        &self,
        p: StateRef,
        a: &Action,
        depth_budget: usize,
    ) -> Result<Vec<StateRef>, LtsError> {
        match p.budget {
            Some(0) => {
                self.check(p.state)?;
                Ok(Vec::new())
            }
            Some(n) => Ok(self
                .successors(p.state, a, depth_budget.min(n - 1))?
                .into_iter()
                .map(|t| StateRef {
                    state: t,
                    budget: Some(n - 1),
                })
                .collect()),
            None => Ok(self
                .successors(p.state, a, depth_budget)?
                .into_iter()
                .map(StateRef::plain)
                .collect()),
        }
    }

    /// All outgoing moves of a finite-system state reference.
    pub fn moves(&self, p: StateRef) -> Result<Vec<(Action, StateRef)>, LtsError> {
        let l = self.as_finite()?;
        self.check(p.state)?;
        let State::Id(n) = p.state else {
            unreachable!("finite systems only hold dense ids")
        };
        let next_budget = match p.budget {
            Some(0) => return Ok(Vec::new()),
            Some(k) => Some(k - 1),
            None => None,
        };
        Ok(l.outgoing[n]
            .iter()
            .map(|(a, t)| {
                (
                    a.clone(),
                    StateRef {
                        state: State::Id(*t),
                        budget: next_budget,
                    },
                )
            })
            .collect())
    }

    /// Per-state infinite-path oracle; `None` for finite systems.
    pub fn infinite_a_path(&self, s: State) -> Option<bool> {
        match self {
            TransitionSystem::Finite(_) => None,
            TransitionSystem::Family(f) => Some(f.infinite_a_path(s)),
        }
    }

    pub fn project(&self, s: State, n: usize) -> ProjectedState {
        ProjectedState { base: s, budget: n }
    }

    /// The transition relation reachable from `π_n(s)`, in breadth-first
    /// order. Family systems are unfolded through their representatives for
    /// the remaining budget.
    pub fn projected_transitions(
        &self,
        root: ProjectedState,
    ) -> Result<Vec<(ProjectedState, Action, ProjectedState)>, LtsError> {
        self.check(root.base)?;
        let mut seen = HashSet::from([root]);
        let mut queue = VecDeque::from([root]);
        let mut out = Vec::new();
        let actions = self.alphabet();
        while let Some(p) = queue.pop_front() {
            if p.budget == 0 {
                continue;
            }
            for a in &actions {
                for t in self.successors(p.base, a, p.budget - 1)? {
                    let q = ProjectedState {
                        base: t,
                        budget: p.budget - 1,
                    };
                    out.push((p, a.clone(), q));
                    if seen.insert(q) {
                        queue.push_back(q);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// The two fixtures: finite `a`-traces of every length (left), and the same
/// plus an infinite `a`-trace (right).
pub fn counterexample_pair() -> (TransitionSystem, TransitionSystem) {
    (
        TransitionSystem::Family(ChainFamily::left()),
        TransitionSystem::Family(ChainFamily::right()),
    )
}

/// One state with an `a`-self-loop.
pub fn a_loop() -> TransitionSystem {
    FiniteLts::new(1, 0, vec![(0, act("a"), 0)])
        .expect("valid")
        .into()
}

/// One state, no transitions, alphabet `{a}`.
pub fn deadlock() -> TransitionSystem {
    FiniteLts::new(1, 0, vec![])
        .expect("valid")
        .with_alphabet(&[act("a")])
        .into()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_names_round_trip() {
        for s in [State::Id(4), State::Root, State::Chain(2), State::Omega] {
            assert_eq!(s.to_string().parse::<State>(), Ok(s));
            let r = StateRef::plain(s).project(3);
            assert_eq!(r.to_string().parse::<StateRef>(), Ok(r));
        }
        assert!("chain(x)".parse::<State>().is_err());
        assert!("pi_2(0".parse::<StateRef>().is_err());
    }

    #[test]
    fn empty_action_rejected() {
        assert_eq!(Action::new(""), Err(LtsError::EmptyAction));
    }

    #[test]
    fn dangling_transition_rejected() {
        let err = FiniteLts::new(2, 0, vec![(0, act("a"), 2)]).unwrap_err();
        assert!(matches!(err, LtsError::DanglingTransition { to: 2, .. }));
    }

    #[test]
    fn deadlock_has_no_successors() {
        let d = deadlock();
        assert!(d.successors(State::Id(0), &act("a"), 5).unwrap().is_empty());
    }

    #[test]
    fn unknown_state_is_an_error() {
        let d = deadlock();
        assert_eq!(
            d.successors(State::Id(3), &act("a"), 0),
            Err(LtsError::UnknownState(State::Id(3)))
        );
        let (left, _) = counterexample_pair();
        assert!(left.successors(State::Omega, &act("a"), 0).is_err());
    }

    #[test]
    fn finite_successors_ignore_budget() {
        let l = a_loop();
        for k in 0..4 {
            assert_eq!(
                l.successors(State::Id(0), &act("a"), k).unwrap(),
                vec![State::Id(0)]
            );
        }
    }

    #[test]
    fn family_representatives() {
        let (left, right) = counterexample_pair();
        let reps = left.successors(State::Root, &act("a"), 3).unwrap();
        assert_eq!(
            reps,
            vec![State::Chain(0), State::Chain(1), State::Chain(2), State::Chain(3)]
        );
        assert!(reps
            .iter()
            .all(|s| left.infinite_a_path(*s) == Some(false)));
        let reps = right.successors(State::Root, &act("a"), 3).unwrap();
        let infinite: Vec<_> = reps
            .iter()
            .filter(|s| right.infinite_a_path(**s) == Some(true))
            .collect();
        assert_eq!(infinite, vec![&State::Omega]);
        assert!(left.successors(State::Root, &act("b"), 3).unwrap().is_empty());
    }

    #[test]
    fn projection_zero_is_stuck() {
        let l = a_loop();
        let p = StateRef::from(l.project(State::Id(0), 0));
        assert!(l.step(p, &act("a"), 9).unwrap().is_empty());
        assert!(l.moves(p).unwrap().is_empty());
    }

    #[test]
    fn projection_decrements_budget() {
        let l = a_loop();
        let p = StateRef::from(l.project(State::Id(0), 3));
        let next = l.step(p, &act("a"), 9).unwrap();
        assert_eq!(next, vec![StateRef { state: State::Id(0), budget: Some(2) }]);
        assert_eq!(p.project(1).budget, Some(1));
        assert_eq!(p.project(7).budget, Some(3));
    }

    #[test]
    fn projected_relation_of_loop_is_a_chain() {
        let l = a_loop();
        let rel = l.projected_transitions(l.project(State::Id(0), 3)).unwrap();
        let budgets: Vec<_> = rel.iter().map(|(p, _, q)| (p.budget, q.budget)).collect();
        assert_eq!(budgets, vec![(3, 2), (2, 1), (1, 0)]);
    }
}
