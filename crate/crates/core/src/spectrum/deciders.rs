//! Direct deciders for the spectrum equivalences. They share no code with the
//! modal characterizations and serve as their oracles.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use fixedbitset::FixedBitSet;

use super::SpectrumError;
use crate::eval::StateSpace;
use crate::lts::{Action, FiniteLts, LtsError, State, StateRef, TransitionSystem};

type Run = (Vec<Action>, StateRef);

/// Every `(trace, reached state)` with trace length at most `bound`.
fn runs(ts: &TransitionSystem, s: StateRef, bound: usize) -> Result<BTreeSet<Run>, LtsError> {
    let mut out = BTreeSet::from([(Vec::new(), s)]);
    let mut layer = vec![(Vec::new(), s)];
    for _ in 0..bound {
        let mut next = Vec::new();
        for (trace, p) in &layer {
            for (a, q) in ts.moves(*p)? {
                let mut t = trace.clone();
                t.push(a);
                if out.insert((t.clone(), q)) {
                    next.push((t, q));
                }
            }
        }
        layer = next;
    }
    Ok(out)
}

fn enabled(ts: &TransitionSystem, p: StateRef) -> Result<BTreeSet<Action>, LtsError> {
    Ok(ts.moves(p)?.into_iter().map(|(a, _)| a).collect())
}

pub fn trace_sets(
    ts: &TransitionSystem,
    s: impl Into<StateRef>,
    bound: usize,
) -> Result<BTreeSet<Vec<Action>>, LtsError> {
    Ok(runs(ts, s.into(), bound)?.into_iter().map(|(t, _)| t).collect())
}

/// Traces of length at most `bound` that can end in a deadlock.
pub fn completed_traces(
    ts: &TransitionSystem,
    s: impl Into<StateRef>,
    bound: usize,
) -> Result<BTreeSet<Vec<Action>>, LtsError> {
    let mut out = BTreeSet::new();
    for (t, p) in runs(ts, s.into(), bound)? {
        if ts.moves(p)?.is_empty() {
            out.insert(t);
        }
    }
    Ok(out)
}

/// Pairs `(σ, X)` where some state after `σ` enables nothing in `X`, with
/// `X` ranging over subsets of the system's alphabet.
pub fn failures(
    ts: &TransitionSystem,
    s: impl Into<StateRef>,
    bound: usize,
) -> Result<BTreeSet<(Vec<Action>, BTreeSet<Action>)>, LtsError> {
    let alphabet = ts.alphabet();
    let mut out = BTreeSet::new();
    for (t, p) in runs(ts, s.into(), bound)? {
        let en = enabled(ts, p)?;
        let refusable: Vec<&Action> = alphabet.iter().filter(|a| !en.contains(*a)).collect();
        for mask in 0u64..(1 << refusable.len()) {
            let x = refusable
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, a)| (*a).clone())
                .collect();
            out.insert((t.clone(), x));
        }
    }
    Ok(out)
}

/// Pairs `(σ, E)` where some state after `σ` enables exactly `E`.
pub fn ready_sets(
    ts: &TransitionSystem,
    s: impl Into<StateRef>,
    bound: usize,
) -> Result<BTreeSet<(Vec<Action>, BTreeSet<Action>)>, LtsError> {
    let mut out = BTreeSet::new();
    for (t, p) in runs(ts, s.into(), bound)? {
        let en = enabled(ts, p)?;
        out.insert((t, en));
    }
    Ok(out)
}

/// Whether some path of length at most `bound` reaches a state enabling `a`.
pub fn reachable_action(
    ts: &TransitionSystem,
    s: impl Into<StateRef>,
    a: &Action,
    bound: usize,
) -> Result<bool, LtsError> {
    let s = s.into();
    let mut seen = HashSet::from([s]);
    let mut queue = VecDeque::from([(s, 0)]);
    while let Some((p, d)) = queue.pop_front() {
        let moves = ts.moves(p)?;
        if moves.iter().any(|(b, _)| b == a) {
            return Ok(true);
        }
        if d < bound {
            for (_, q) in moves {
                if seen.insert(q) {
                    queue.push_back((q, d + 1));
                }
            }
        }
    }
    Ok(false)
}

/// Both systems side by side in one state space, with the two query nodes.
pub(crate) struct Pair {
    pub space: StateSpace,
    pub s: usize,
    pub t: usize,
}

pub(crate) fn pair(
    ts1: &TransitionSystem,
    s: StateRef,
    ts2: &TransitionSystem,
    t: StateRef,
) -> Result<Pair, LtsError> {
    let (l1, l2) = (ts1.as_finite()?, ts2.as_finite()?);
    for (ts, r) in [(ts1, s), (ts2, t)] {
        if !ts.contains(r.state) {
            return Err(LtsError::UnknownState(r.state));
        }
    }
    let (union, offsets) = FiniteLts::disjoint_union(&[l1, l2]);
    let cap = s.budget.max(t.budget).unwrap_or(0);
    let space = StateSpace::new(&union, cap);
    let shift = |r: StateRef, off: usize| match r.state {
        State::Id(n) => StateRef {
            state: State::Id(n + off),
            budget: r.budget,
        },
        _ => r,
    };
    let s = space.node(shift(s, offsets[0]))?;
    let t = space.node(shift(t, offsets[1]))?;
    Ok(Pair { space, s, t })
}

fn enabled_mask(space: &StateSpace, v: usize) -> u64 {
    space.edges(v).iter().fold(0, |m, (a, _)| m | (1 << a))
}

/// The linear-time equivalences decided by determinization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Linear {
    Trace,
    CompletedTrace,
    Failures,
    Readiness,
}

fn decoration(kind: Linear, space: &StateSpace, set: &[usize]) -> Vec<u64> {
    let masks = || set.iter().map(|v| enabled_mask(space, *v));
    match kind {
        Linear::Trace => Vec::new(),
        Linear::CompletedTrace => vec![u64::from(masks().any(|m| m == 0))],
        Linear::Failures => {
            let m = space.alphabet().len();
            (0u64..(1 << m))
                .filter(|x| masks().any(|e| e & x == 0))
                .collect()
        }
        Linear::Readiness => {
            let set: BTreeSet<u64> = masks().collect();
            set.into_iter().collect()
        }
    }
}

/// Agreement of `s` and `t` on all observations along traces of length at
/// most `bound` (unbounded when `None`).
pub fn linear_equivalent(
    kind: Linear,
    ts1: &TransitionSystem,
    s: impl Into<StateRef>,
    ts2: &TransitionSystem,
    t: impl Into<StateRef>,
    bound: Option<usize>,
) -> Result<bool, SpectrumError> {
    let p = pair(ts1, s.into(), ts2, t.into())?;
    let m = p.space.alphabet().len();
    if m > 16 {
        return Err(SpectrumError::AlphabetTooLarge(m));
    }
    let step = |set: &[usize], a: usize| -> Vec<usize> {
        let targets: BTreeSet<usize> = set
            .iter()
            .flat_map(|v| p.space.edges(*v).iter())
            .filter(|(b, _)| *b == a)
            .map(|(_, w)| *w)
            .collect();
        targets.into_iter().collect()
    };
    let start = (vec![p.s], vec![p.t]);
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, 0)]);
    while let Some(((x, y), d)) = queue.pop_front() {
        if decoration(kind, &p.space, &x) != decoration(kind, &p.space, &y) {
            return Ok(false);
        }
        if bound.is_some_and(|b| d >= b) {
            continue;
        }
        for a in 0..m {
            let (x2, y2) = (step(&x, a), step(&y, a));
            if x2.is_empty() != y2.is_empty() {
                return Ok(false);
            }
            if !x2.is_empty() && seen.insert((x2.clone(), y2.clone())) {
                queue.push_back(((x2, y2), d + 1));
            }
        }
    }
    Ok(true)
}

/// Block ids of the coarsest partition after `rounds` refinement steps
/// (until stable when `None`). After `k` rounds the blocks are the classes of
/// agreement on formulas of depth at most `k`.
pub fn bisimulation_classes(space: &StateSpace, rounds: Option<usize>) -> Vec<usize> {
    let n = space.len();
    let mut ids = vec![0; n];
    let mut count = usize::from(n > 0);
    let mut round = 0;
    while rounds.is_none_or(|r| round < r) {
        let mut table: HashMap<(usize, Vec<(usize, usize)>), usize> = HashMap::new();
        let mut next = Vec::with_capacity(n);
        for v in 0..n {
            let mut sig: Vec<(usize, usize)> = space.edges(v).iter().map(|(a, w)| (*a, ids[*w])).collect();
            sig.sort_unstable();
            sig.dedup();
            let fresh = table.len();
            next.push(*table.entry((ids[v], sig)).or_insert(fresh));
        }
        round += 1;
        let stable = table.len() == count;
        count = table.len();
        ids = next;
        if stable {
            break;
        }
    }
    ids
}

pub fn bisimilar(
    ts1: &TransitionSystem,
    s: impl Into<StateRef>,
    ts2: &TransitionSystem,
    t: impl Into<StateRef>,
) -> Result<bool, LtsError> {
    bisimilar_within(ts1, s, ts2, t, None)
}

/// Bisimilarity up to `rounds` refinement steps.
pub fn bisimilar_within(
    ts1: &TransitionSystem,
    s: impl Into<StateRef>,
    ts2: &TransitionSystem,
    t: impl Into<StateRef>,
    rounds: Option<usize>,
) -> Result<bool, LtsError> {
    let p = pair(ts1, s.into(), ts2, t.into())?;
    let ids = bisimulation_classes(&p.space, rounds);
    Ok(ids[p.s] == ids[p.t])
}

/// `sim[v]` holds every `w` that simulates `v`.
fn greatest_simulation(space: &StateSpace, ready: bool) -> Vec<FixedBitSet> {
    let n = space.len();
    let masks: Vec<u64> = (0..n).map(|v| enabled_mask(space, v)).collect();
    let mut sim: Vec<FixedBitSet> = (0..n)
        .map(|v| {
            let mut row = FixedBitSet::with_capacity(n);
            for w in 0..n {
                if !ready || masks[v] == masks[w] {
                    row.insert(w);
                }
            }
            row
        })
        .collect();
    let mut changed = true;
    while changed {
        changed = false;
        for v in 0..n {
            let candidates: Vec<usize> = sim[v].ones().collect();
            for w in candidates {
                let matched = space.edges(v).iter().all(|(a, v2)| {
                    space
                        .edges(w)
                        .iter()
                        .any(|(b, w2)| a == b && sim[*v2].contains(*w2))
                });
                if !matched {
                    sim[v].set(w, false);
                    changed = true;
                }
            }
        }
    }
    sim
}

/// Whether `t` simulates `s`; with `ready`, related states must also enable
/// the same actions.
pub fn simulated_by(
    ts1: &TransitionSystem,
    s: impl Into<StateRef>,
    ts2: &TransitionSystem,
    t: impl Into<StateRef>,
    ready: bool,
) -> Result<bool, LtsError> {
    let p = pair(ts1, s.into(), ts2, t.into())?;
    Ok(greatest_simulation(&p.space, ready)[p.s].contains(p.t))
}

/// Simulation equivalence as two simulations, one in each direction.
pub fn simulation_equivalent(
    ts1: &TransitionSystem,
    s: impl Into<StateRef>,
    ts2: &TransitionSystem,
    t: impl Into<StateRef>,
    ready: bool,
) -> Result<bool, LtsError> {
    let p = pair(ts1, s.into(), ts2, t.into())?;
    let sim = greatest_simulation(&p.space, ready);
    Ok(sim[p.s].contains(p.t) && sim[p.t].contains(p.s))
}

/// Agreement on which actions can eventually be performed.
pub fn reachability_equivalent(
    ts1: &TransitionSystem,
    s: impl Into<StateRef>,
    ts2: &TransitionSystem,
    t: impl Into<StateRef>,
) -> Result<bool, LtsError> {
    let (s, t) = (s.into(), t.into());
    let mut actions: BTreeSet<Action> = ts1.alphabet().into_iter().collect();
    actions.extend(ts2.alphabet());
    let b1 = ts1.state_count().ok_or(LtsError::NotFinite)?;
    let b2 = ts2.state_count().ok_or(LtsError::NotFinite)?;
    for a in &actions {
        if reachable_action(ts1, s, a, b1)? != reachable_action(ts2, t, a, b2)? {
            return Ok(false);
        }
    }
    Ok(true)
}
