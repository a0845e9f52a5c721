//! The satisfaction relation for HML and HML⁺.
//!
//! Finite systems are evaluated bottom-up over state sets. Projected states
//! live in the same graph: alongside the plain states it holds one layer
//! `(s, k)` per remaining budget `k`, so `π_k` never needs to be
//! materialized as a separate system.
//!
//! Schematic families over all naturals are evaluated exactly. For the
//! template `C[<a>^n φ]`, the sets `X_n = sat(<a>^n φ)` satisfy
//! `X_{n+1} = pre_a(X_n)`, so the sequence is eventually periodic; the
//! family is the meet (or join) of `C` over the finitely many distinct `X_n`.
//!
//! Chain-family fixtures are evaluated top-down through their depth-bounded
//! representatives, with the fixture oracle deciding `⋀_n <a>^n T`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::{Arc, Mutex};

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::formula::{AnyFormula, Family, Formula, FormulaError, IndexSet, PosFormula};
use crate::lts::{Action, ChainFamily, FiniteLts, LtsError, State, StateRef, TransitionSystem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error(transparent)]
    Lts(#[from] LtsError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("cannot evaluate `{formula}` on this system: {reason}")]
    Unsupported { formula: String, reason: &'static str },
}

/// A system together with a cache of satisfaction results.
pub struct EvalEnvironment {
    system: TransitionSystem,
    memoize: bool,
    cache: Mutex<Cache>,
}

#[derive(Default)]
struct Cache {
    graph: Option<Arc<StateSpace>>,
    sets: HashMap<NodeKey, Arc<FixedBitSet>>,
    family: HashMap<(StateRef, NodeKey), bool>,
}

/// Formula identity: the root node compared structurally, its children by
/// allocation. Holding the formula keeps those allocations alive, so an
/// address is never reused while its entry exists.
#[derive(Clone)]
struct NodeKey(AnyFormula);

impl NodeKey {
    fn parts(&self) -> (u8, Option<&Action>, usize) {
        fn addr<T>(a: &Arc<T>) -> usize {
            Arc::as_ptr(a) as *const () as usize
        }
        match &self.0 {
            AnyFormula::Hml(f) => match f {
                Formula::True => (0, None, 0),
                Formula::And(fam) => (1, None, addr(fam)),
                Formula::Diamond(a, g) => (2, Some(a), addr(g)),
                Formula::Not(g) => (3, None, addr(g)),
                Formula::Power(a, g) => (4, Some(a), addr(g)),
            },
            AnyFormula::Pos(f) => match f {
                PosFormula::True => (10, None, 0),
                PosFormula::False => (11, None, 0),
                PosFormula::And(fam) => (12, None, addr(fam)),
                PosFormula::Or(fam) => (13, None, addr(fam)),
                PosFormula::Diamond(a, g) => (14, Some(a), addr(g)),
                PosFormula::Box(a, g) => (15, Some(a), addr(g)),
                PosFormula::PowerDiamond(a, g) => (16, Some(a), addr(g)),
                PosFormula::PowerBox(a, g) => (17, Some(a), addr(g)),
            },
        }
    }
}

impl PartialEq for NodeKey {
    fn eq(&self, other: &Self) -> bool {
        self.parts() == other.parts()
    }
}

impl Eq for NodeKey {}

impl std::hash::Hash for NodeKey {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.parts().hash(h)
    }
}

impl EvalEnvironment {
    pub fn new(system: TransitionSystem) -> Self {
        EvalEnvironment {
            system,
            memoize: true,
            cache: Mutex::default(),
        }
    }

    /// An environment that recomputes every query from scratch.
    pub fn without_memo(system: TransitionSystem) -> Self {
        EvalEnvironment {
            memoize: false,
            ..EvalEnvironment::new(system)
        }
    }

    pub fn system(&self) -> &TransitionSystem {
        &self.system
    }

    pub fn satisfies(&self, s: impl Into<StateRef>, f: &Formula) -> Result<bool, EvalError> {
        f.validate()?;
        self.query(s.into(), &AnyFormula::Hml(f.clone()))
    }

    pub fn satisfies_pos(&self, s: impl Into<StateRef>, f: &PosFormula) -> Result<bool, EvalError> {
        validate_pos(f)?;
        self.query(s.into(), &AnyFormula::Pos(f.clone()))
    }

    pub fn satisfies_any(&self, s: impl Into<StateRef>, f: &AnyFormula) -> Result<bool, EvalError> {
        match f {
            AnyFormula::Hml(g) => self.satisfies(s, g),
            AnyFormula::Pos(g) => self.satisfies_pos(s, g),
        }
    }

    /// Truth values of `f` at each of `refs`, in order.
    pub fn signature(&self, refs: &[StateRef], f: &Formula) -> Result<Vec<bool>, EvalError> {
        f.validate()?;
        let key = AnyFormula::Hml(f.clone());
        match &self.system {
            TransitionSystem::Finite(l) => {
                let cap = refs.iter().filter_map(|r| r.budget).max();
                let (graph, bits) = self.finite_set(l, cap, &key)?;
                refs.iter()
                    .map(|r| Ok(bits.contains(graph.node(*r)?)))
                    .collect()
            }
            TransitionSystem::Family(_) => refs.iter().map(|r| self.query(*r, &key)).collect(),
        }
    }

    /// All plain states satisfying `f`.
    pub fn satisfying_set(&self, f: &Formula) -> Result<BTreeSet<State>, EvalError> {
        f.validate()?;
        let l = self.system.as_finite()?;
        let (_, bits) = self.finite_set(l, None, &AnyFormula::Hml(f.clone()))?;
        Ok((0..l.num_states())
            .filter(|s| bits.contains(*s))
            .map(State::Id)
            .collect())
    }

    fn query(&self, s: StateRef, f: &AnyFormula) -> Result<bool, EvalError> {
        match &self.system {
            TransitionSystem::Finite(l) => {
                let (graph, bits) = self.finite_set(l, s.budget, f)?;
                Ok(bits.contains(graph.node(s)?))
            }
            TransitionSystem::Family(fam) => {
                if !self.system.contains(s.state) {
                    return Err(LtsError::UnknownState(s.state).into());
                }
                if self.memoize {
                    let key = (s, NodeKey(f.clone()));
                    if let Some(hit) = self.lock().family.get(&key) {
                        return Ok(*hit);
                    }
                    let v = family_holds(&self.system, fam, s, f)?;
                    self.lock().family.insert(key, v);
                    Ok(v)
                } else {
                    family_holds(&self.system, fam, s, f)
                }
            }
        }
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Cache> {
        self.cache.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// The graph covering budgets up to `cap`, and the satisfying set of `f`.
    fn finite_set(
        &self,
        l: &FiniteLts,
        cap: Option<usize>,
        f: &AnyFormula,
    ) -> Result<(Arc<StateSpace>, Arc<FixedBitSet>), EvalError> {
        let want = cap.unwrap_or(0);
        if !self.memoize {
            let graph = Arc::new(StateSpace::new(l, want));
            let bits = Arc::new(SetEval::new(&graph).any(f)?);
            return Ok((graph, bits));
        }
        let graph = {
            let mut cache = self.lock();
            match &cache.graph {
                Some(g) if g.cap >= want => g.clone(),
                _ => {
                    let g = Arc::new(StateSpace::new(l, want.max(cache.graph.as_ref().map_or(0, |g| g.cap))));
                    cache.graph = Some(g.clone());
                    cache.sets.clear();
                    g
                }
            }
        };
        let key = NodeKey(f.clone());
        if let Some(bits) = self.lock().sets.get(&key) {
            return Ok((graph, bits.clone()));
        }
        let bits = Arc::new(SetEval::new(&graph).any(f)?);
        let mut cache = self.lock();
        if cache.graph.as_ref().is_some_and(|g| Arc::ptr_eq(g, &graph)) {
            cache.sets.insert(key, bits.clone());
        }
        Ok((graph, bits))
    }
}

fn validate_pos(f: &PosFormula) -> Result<(), FormulaError> {
    fn powers(f: &PosFormula) -> usize {
        match f {
            PosFormula::True | PosFormula::False => 0,
            PosFormula::PowerDiamond(_, g) | PosFormula::PowerBox(_, g) => 1 + powers(g),
            PosFormula::Diamond(_, g) | PosFormula::Box(_, g) => powers(g),
            PosFormula::And(fam) | PosFormula::Or(fam) => match &**fam {
                Family::List(items) => items.iter().map(powers).sum(),
                Family::Schematic { .. } => 0,
            },
        }
    }
    fn walk(f: &PosFormula, in_template: bool) -> Result<(), FormulaError> {
        match f {
            PosFormula::True | PosFormula::False => Ok(()),
            PosFormula::PowerDiamond(a, g) | PosFormula::PowerBox(a, g) => {
                if !in_template {
                    return Err(FormulaError::StrayPower(a.clone()));
                }
                walk(g, false)
            }
            PosFormula::Diamond(_, g) | PosFormula::Box(_, g) => walk(g, in_template),
            PosFormula::And(fam) | PosFormula::Or(fam) => match &**fam {
                Family::List(items) => items.iter().try_for_each(|g| walk(g, in_template)),
                Family::Schematic { template, .. } => {
                    if powers(template) > 1 {
                        return Err(FormulaError::AmbiguousTemplate);
                    }
                    walk(template, true)
                }
            },
        }
    }
    walk(f, false)
}

/// The nodes of a finite system as seen by the evaluator: plain states
/// `0..n` followed by the projected layers `(s, k)` for `k = 0..=cap`.
pub struct StateSpace {
    n: usize,
    cap: usize,
    alphabet: Vec<Action>,
    /// Per node, `(action index, successor node)`.
    succ: Vec<Vec<(usize, usize)>>,
}

impl StateSpace {
    pub fn new(l: &FiniteLts, cap: usize) -> Self {
        let n = l.num_states();
        let alphabet = l.alphabet().to_vec();
        let idx = |a: &Action| alphabet.binary_search(a).expect("alphabet covers labels");
        let mut succ = vec![Vec::new(); n * (cap + 2)];
        for s in 0..n {
            let out: Vec<(usize, usize)> = l.outgoing(s).iter().map(|(a, t)| (idx(a), *t)).collect();
            succ[s] = out.clone();
            for k in 1..=cap {
                succ[(k + 1) * n + s] = out.iter().map(|(a, t)| (*a, k * n + t)).collect();
            }
        }
        StateSpace {
            n,
            cap,
            alphabet,
            succ,
        }
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    /// Index of a state reference; budgets above the cap are an error.
    pub fn node(&self, r: StateRef) -> Result<usize, LtsError> {
        match r.state {
            State::Id(s) if s < self.n => match r.budget {
                None => Ok(s),
                Some(k) if k <= self.cap => Ok((k + 1) * self.n + s),
                Some(_) => Err(LtsError::UnknownState(r.state)),
            },
            other => Err(LtsError::UnknownState(other)),
        }
    }

    fn action(&self, a: &Action) -> Option<usize> {
        self.alphabet.binary_search(a).ok()
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn full(&self) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(self.len());
        b.insert_range(..);
        b
    }

    pub fn alphabet(&self) -> &[Action] {
        &self.alphabet
    }

    /// Outgoing edges of a node as `(action index, target node)`.
    pub fn edges(&self, node: usize) -> &[(usize, usize)] {
        &self.succ[node]
    }

    /// Nodes with an `a`-successor in `x`.
    pub fn pre(&self, a: &Action, x: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.len());
        if let Some(ai) = self.action(a) {
            for (v, succ) in self.succ.iter().enumerate() {
                if succ.iter().any(|(b, t)| *b == ai && x.contains(*t)) {
                    out.insert(v);
                }
            }
        }
        out
    }

    /// Nodes all of whose `a`-successors lie in `x`.
    pub fn boxed(&self, a: &Action, x: &FixedBitSet) -> FixedBitSet {
        let ai = self.action(a);
        let mut out = FixedBitSet::with_capacity(self.len());
        for (v, succ) in self.succ.iter().enumerate() {
            if succ.iter().all(|(b, t)| Some(*b) != ai || x.contains(*t)) {
                out.insert(v);
            }
        }
        out
    }

    /// Nodes with no `a`-successor.
    pub fn refuses(&self, a: &Action) -> FixedBitSet {
        let mut x = self.full();
        x.toggle_range(..);
        self.boxed(a, &x)
    }

    pub fn sat(&self, f: &Formula) -> Result<FixedBitSet, EvalError> {
        f.validate()?;
        SetEval::new(self).hml(f, None)
    }

    pub fn sat_pos(&self, f: &PosFormula) -> Result<FixedBitSet, EvalError> {
        validate_pos(f)?;
        SetEval::new(self).pos(f, None)
    }

    /// The distinct members of `x, f(x), f(f(x)), …`, in order of appearance.
    fn orbit(&self, x: FixedBitSet, step: impl Fn(&FixedBitSet) -> FixedBitSet) -> Vec<FixedBitSet> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut cur = x;
        while seen.insert(cur.clone()) {
            let next = step(&cur);
            out.push(cur);
            cur = next;
        }
        out
    }

    /// `x_j` for each `j` in `js`, where `x_0 = x` and `x_{j+1} = f(x_j)`.
    fn iterates(
        &self,
        x: FixedBitSet,
        js: &BTreeSet<usize>,
        step: impl Fn(&FixedBitSet) -> FixedBitSet,
    ) -> Vec<FixedBitSet> {
        let mut out = Vec::new();
        let mut cur = x;
        let mut at = 0;
        for &j in js {
            while at < j {
                cur = step(&cur);
                at += 1;
            }
            out.push(cur.clone());
        }
        out
    }
}

struct SetEval<'g> {
    g: &'g StateSpace,
    hml: HashMap<*const Formula, FixedBitSet>,
    pos: HashMap<*const PosFormula, FixedBitSet>,
}

impl<'g> SetEval<'g> {
    fn new(g: &'g StateSpace) -> Self {
        SetEval {
            g,
            hml: HashMap::new(),
            pos: HashMap::new(),
        }
    }

    fn any(&mut self, f: &AnyFormula) -> Result<FixedBitSet, EvalError> {
        match f {
            AnyFormula::Hml(g) => self.hml(g, None),
            AnyFormula::Pos(g) => self.pos(g, None),
        }
    }

    fn hml_shared(&mut self, f: &Arc<Formula>, power: Option<&FixedBitSet>) -> Result<FixedBitSet, EvalError> {
        if power.is_some() {
            return self.hml(f, power);
        }
        let key = Arc::as_ptr(f);
        if let Some(hit) = self.hml.get(&key) {
            return Ok(hit.clone());
        }
        let r = self.hml(f, None)?;
        self.hml.insert(key, r.clone());
        Ok(r)
    }

    /// `power` is the value of the enclosing template's index node.
    fn hml(&mut self, f: &Formula, power: Option<&FixedBitSet>) -> Result<FixedBitSet, EvalError> {
        Ok(match f {
            Formula::True => self.g.full(),
            Formula::Diamond(a, body) => {
                let x = self.hml_shared(body, power)?;
                self.g.pre(a, &x)
            }
            Formula::Not(body) => {
                let mut x = self.hml_shared(body, power)?;
                x.toggle_range(..);
                x
            }
            Formula::Power(a, _) => match power {
                Some(x) => x.clone(),
                None => return Err(FormulaError::StrayPower(a.clone()).into()),
            },
            Formula::And(fam) => match &**fam {
                Family::List(items) => {
                    let mut acc = self.g.full();
                    for item in items {
                        if acc.is_clear() {
                            break;
                        }
                        acc.intersect_with(&self.hml(item, power)?);
                    }
                    acc
                }
                Family::Schematic { template, indices } => {
                    let values = match hml_power(template) {
                        None => return self.hml(template, None),
                        Some((a, body)) => {
                            let x0 = self.hml_shared(body, None)?;
                            let g = self.g;
                            let step = |x: &FixedBitSet| g.pre(a, x);
                            match indices {
                                IndexSet::All => g.orbit(x0, step),
                                IndexSet::Finite(js) => g.iterates(x0, js, step),
                            }
                        }
                    };
                    let mut acc = self.g.full();
                    for x in &values {
                        if acc.is_clear() {
                            break;
                        }
                        acc.intersect_with(&self.hml(template, Some(x))?);
                    }
                    acc
                }
            },
        })
    }

    fn pos_shared(
        &mut self,
        f: &Arc<PosFormula>,
        power: Option<&FixedBitSet>,
    ) -> Result<FixedBitSet, EvalError> {
        if power.is_some() {
            return self.pos(f, power);
        }
        let key = Arc::as_ptr(f);
        if let Some(hit) = self.pos.get(&key) {
            return Ok(hit.clone());
        }
        let r = self.pos(f, None)?;
        self.pos.insert(key, r.clone());
        Ok(r)
    }

    fn pos(&mut self, f: &PosFormula, power: Option<&FixedBitSet>) -> Result<FixedBitSet, EvalError> {
        Ok(match f {
            PosFormula::True => self.g.full(),
            PosFormula::False => FixedBitSet::with_capacity(self.g.len()),
            PosFormula::Diamond(a, body) => {
                let x = self.pos_shared(body, power)?;
                self.g.pre(a, &x)
            }
            PosFormula::Box(a, body) => {
                let x = self.pos_shared(body, power)?;
                self.g.boxed(a, &x)
            }
            PosFormula::PowerDiamond(a, _) | PosFormula::PowerBox(a, _) => match power {
                Some(x) => x.clone(),
                None => return Err(FormulaError::StrayPower(a.clone()).into()),
            },
            PosFormula::And(fam) => self.pos_family(fam, power, true)?,
            PosFormula::Or(fam) => self.pos_family(fam, power, false)?,
        })
    }

    fn pos_family(
        &mut self,
        fam: &Family<PosFormula>,
        power: Option<&FixedBitSet>,
        meet: bool,
    ) -> Result<FixedBitSet, EvalError> {
        let mut acc = if meet {
            self.g.full()
        } else {
            FixedBitSet::with_capacity(self.g.len())
        };
        let saturated = |acc: &FixedBitSet| {
            if meet {
                acc.is_clear()
            } else {
                acc.count_ones(..) == acc.len()
            }
        };
        let combine = |acc: &mut FixedBitSet, x: FixedBitSet| {
            if meet {
                acc.intersect_with(&x)
            } else {
                acc.union_with(&x)
            }
        };
        match fam {
            Family::List(items) => {
                for item in items {
                    if saturated(&acc) {
                        break;
                    }
                    let x = self.pos(item, power)?;
                    combine(&mut acc, x);
                }
            }
            Family::Schematic { template, indices } => {
                let values = match pos_power(template) {
                    None => return self.pos(template, None),
                    Some((a, body, is_box)) => {
                        let x0 = self.pos_shared(body, None)?;
                        let g = self.g;
                        let step = |x: &FixedBitSet| {
                            if is_box {
                                g.boxed(a, x)
                            } else {
                                g.pre(a, x)
                            }
                        };
                        match indices {
                            IndexSet::All => g.orbit(x0, step),
                            IndexSet::Finite(js) => g.iterates(x0, js, step),
                        }
                    }
                };
                for x in &values {
                    if saturated(&acc) {
                        break;
                    }
                    let y = self.pos(template, Some(x))?;
                    combine(&mut acc, y);
                }
            }
        }
        Ok(acc)
    }
}

/// The index node of a template, outside nested families.
fn hml_power(f: &Formula) -> Option<(&Action, &Arc<Formula>)> {
    match f {
        Formula::True => None,
        Formula::Power(a, body) => Some((a, body)),
        Formula::Diamond(_, g) | Formula::Not(g) => hml_power(g),
        Formula::And(fam) => match &**fam {
            Family::List(items) => items.iter().find_map(hml_power),
            Family::Schematic { .. } => None,
        },
    }
}

fn pos_power(f: &PosFormula) -> Option<(&Action, &Arc<PosFormula>, bool)> {
    match f {
        PosFormula::True | PosFormula::False => None,
        PosFormula::PowerDiamond(a, body) => Some((a, body, false)),
        PosFormula::PowerBox(a, body) => Some((a, body, true)),
        PosFormula::Diamond(_, g) | PosFormula::Box(_, g) => pos_power(g),
        PosFormula::And(fam) | PosFormula::Or(fam) => match &**fam {
            Family::List(items) => items.iter().find_map(pos_power),
            Family::Schematic { .. } => None,
        },
    }
}

fn unsupported(f: &impl ToString, reason: &'static str) -> EvalError {
    EvalError::Unsupported {
        formula: f.to_string(),
        reason,
    }
}

fn family_holds(
    ts: &TransitionSystem,
    fam: &ChainFamily,
    s: StateRef,
    f: &AnyFormula,
) -> Result<bool, EvalError> {
    let ev = FamilyEval { ts, fam };
    match f {
        AnyFormula::Hml(g) => ev.hml(s, g),
        AnyFormula::Pos(g) => ev.pos(s, g),
    }
}

struct FamilyEval<'a> {
    ts: &'a TransitionSystem,
    fam: &'a ChainFamily,
}

impl FamilyEval<'_> {
    fn is_oracle_template(&self, f: &Formula) -> bool {
        matches!(f, Formula::Power(a, body) if a == self.fam.action() && **body == Formula::True)
    }

    /// Depth, counting families decided by the oracle as depth 0; `None` when
    /// some other family has infinite depth.
    fn hml_depth(&self, f: &Formula) -> Option<usize> {
        match f {
            Formula::True => Some(0),
            Formula::Diamond(_, g) => self.hml_depth(g).map(|d| d + 1),
            Formula::Not(g) => self.hml_depth(g),
            Formula::Power(..) => None,
            Formula::And(fam) => match &**fam {
                Family::Schematic {
                    template,
                    indices: IndexSet::All,
                } if template.has_power() => self.is_oracle_template(template).then_some(0),
                Family::Schematic { .. } => f.depth().finite(),
                Family::List(items) => items
                    .iter()
                    .try_fold(0, |m, g| self.hml_depth(g).map(|d| m.max(d))),
            },
        }
    }

    fn budget_for(&self, s: StateRef, body_depth: Option<usize>, f: &impl ToString) -> Result<usize, EvalError> {
        match (s.budget, body_depth) {
            (Some(m), d) => Ok(d.map_or(m, |d| d.min(m))),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(unsupported(f, "infinite-depth family below a modality")),
        }
    }

    fn hml(&self, s: StateRef, f: &Formula) -> Result<bool, EvalError> {
        match f {
            Formula::True => Ok(true),
            Formula::Not(g) => Ok(!self.hml(s, g)?),
            Formula::Diamond(a, g) => {
                let k = self.budget_for(s, self.hml_depth(g), f)?;
                for t in self.ts.step(s, a, k)? {
                    if self.hml(t, g)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Power(a, _) => Err(FormulaError::StrayPower(a.clone()).into()),
            Formula::And(fam) => match &**fam {
                Family::List(items) => {
                    for g in items {
                        if !self.hml(s, g)? {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                }
                Family::Schematic { template, indices } => {
                    let js: Vec<usize> = match indices {
                        IndexSet::Finite(js) => js.iter().copied().collect(),
                        IndexSet::All if !template.has_power() => return self.hml(s, template),
                        // instances beyond the budget agree with instance m + 1
                        IndexSet::All => match s.budget {
                            Some(m) => (0..=m + 1).collect(),
                            None if self.is_oracle_template(template) => {
                                return Ok(self.fam.unbounded_a_paths(s.state))
                            }
                            None => {
                                return Err(unsupported(f, "only the a-path family has an oracle"))
                            }
                        },
                    };
                    for j in js {
                        if !self.hml(s, &template.instantiate(j))? {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                }
            },
        }
    }

    fn pos_oracle(&self, f: &PosFormula, meet: bool) -> bool {
        let a = self.fam.action();
        match f {
            PosFormula::PowerDiamond(b, body) => meet && b == a && **body == PosFormula::True,
            PosFormula::PowerBox(b, body) => !meet && b == a && **body == PosFormula::False,
            _ => false,
        }
    }

    fn pos_depth(&self, f: &PosFormula) -> Option<usize> {
        match f {
            PosFormula::True | PosFormula::False => Some(0),
            PosFormula::Diamond(_, g) | PosFormula::Box(_, g) => self.pos_depth(g).map(|d| d + 1),
            PosFormula::PowerDiamond(..) | PosFormula::PowerBox(..) => None,
            PosFormula::And(fam) | PosFormula::Or(fam) => match &**fam {
                Family::Schematic {
                    template,
                    indices: IndexSet::All,
                } if template.has_power() => {
                    self.pos_oracle(template, matches!(f, PosFormula::And(_))).then_some(0)
                }
                Family::Schematic { .. } => f.depth().finite(),
                Family::List(items) => items
                    .iter()
                    .try_fold(0, |m, g| self.pos_depth(g).map(|d| m.max(d))),
            },
        }
    }

    fn pos(&self, s: StateRef, f: &PosFormula) -> Result<bool, EvalError> {
        match f {
            PosFormula::True => Ok(true),
            PosFormula::False => Ok(false),
            PosFormula::Diamond(a, g) | PosFormula::Box(a, g) => {
                let want = matches!(f, PosFormula::Diamond(..));
                let k = self.budget_for(s, self.pos_depth(g), f)?;
                for t in self.ts.step(s, a, k)? {
                    if self.pos(t, g)? == want {
                        return Ok(want);
                    }
                }
                Ok(!want)
            }
            PosFormula::PowerDiamond(a, _) | PosFormula::PowerBox(a, _) => {
                Err(FormulaError::StrayPower(a.clone()).into())
            }
            PosFormula::And(fam) | PosFormula::Or(fam) => {
                let meet = matches!(f, PosFormula::And(_));
                let items: Vec<PosFormula> = match &**fam {
                    Family::List(items) => items.clone(),
                    Family::Schematic { template, indices } => match indices {
                        IndexSet::Finite(js) => js.iter().map(|j| template.instantiate(*j)).collect(),
                        IndexSet::All if !template.has_power() => vec![template.clone()],
                        IndexSet::All => match s.budget {
                            Some(m) => (0..=m + 1).map(|j| template.instantiate(j)).collect(),
                            None if self.pos_oracle(template, meet) => {
                                let unbounded = self.fam.unbounded_a_paths(s.state);
                                return Ok(if meet { unbounded } else { !unbounded });
                            }
                            None => {
                                return Err(unsupported(f, "only the a-path family has an oracle"))
                            }
                        },
                    },
                };
                for g in &items {
                    if self.pos(s, g)? != meet {
                        return Ok(!meet);
                    }
                }
                Ok(meet)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::lts::{a_loop, act, counterexample_pair, deadlock};
    use crate::term::ProcessTerm;

    fn env(term: &str) -> EvalEnvironment {
        EvalEnvironment::new(ProcessTerm::parse(term).unwrap().to_lts())
    }

    fn f(text: &str) -> Formula {
        parse_formula(text).unwrap()
    }

    #[test]
    fn truth_everywhere() {
        let e = env("a.b.0 + b.0");
        for s in 0..4 {
            assert!(e.satisfies(State::Id(s), &Formula::True).unwrap());
        }
    }

    #[test]
    fn satisfying_sets() {
        let e = env("a.0");
        assert_eq!(
            e.satisfying_set(&f("<a> T")).unwrap(),
            BTreeSet::from([State::Id(0)])
        );
        assert_eq!(
            e.satisfying_set(&f("not <a> T")).unwrap(),
            BTreeSet::from([State::Id(1)])
        );
        let (left, _) = counterexample_pair();
        assert!(EvalEnvironment::new(left).satisfying_set(&Formula::True).is_err());
    }

    #[test]
    fn loop_and_deadlock() {
        let family = f("AND{n in N} <a>^n T");
        let l = EvalEnvironment::new(a_loop());
        let d = EvalEnvironment::new(deadlock());
        assert!(l.satisfies(State::Id(0), &family).unwrap());
        assert!(!d.satisfies(State::Id(0), &family).unwrap());
        for k in 1..=4 {
            let phi = Formula::iterate(&act("a"), k, Formula::True);
            assert!(l.satisfies(State::Id(0), &phi).unwrap());
        }
    }

    #[test]
    fn fixture_roots() {
        let (left, right) = counterexample_pair();
        let phi = f("<a> AND{n in N} <a>^n T");
        let l = EvalEnvironment::new(left);
        let r = EvalEnvironment::new(right);
        assert!(!l.satisfies(State::Root, &phi).unwrap());
        assert!(r.satisfies(State::Root, &phi).unwrap());
        assert!(l.satisfies(State::Chain(2), &f("<a> <a> T")).unwrap());
        assert!(!l.satisfies(State::Chain(2), &f("<a> <a> <a> T")).unwrap());
    }

    #[test]
    fn unsupported_family_on_fixture() {
        let (left, _) = counterexample_pair();
        let l = EvalEnvironment::new(left);
        let err = l.satisfies(State::Root, &f("AND{n in N} <a> <a>^n T"));
        assert!(matches!(err, Err(EvalError::Unsupported { .. })));
    }

    #[test]
    fn projections() {
        let e = env("a.a.a.0");
        let p = StateRef::plain(State::Id(0)).project(2);
        assert!(e.satisfies(p, &f("<a> <a> T")).unwrap());
        assert!(!e.satisfies(p, &f("<a> <a> <a> T")).unwrap());
        let l = EvalEnvironment::new(a_loop());
        for n in 0..=3 {
            let p = StateRef::plain(State::Id(0)).project(n);
            let a = act("a");
            assert!(l.satisfies(p, &Formula::iterate(&a, n, Formula::True)).unwrap());
            assert!(!l.satisfies(p, &Formula::iterate(&a, n + 1, Formula::True)).unwrap());
        }
    }

    #[test]
    fn unknown_state() {
        let e = env("a.0");
        assert!(e.satisfies(State::Id(7), &Formula::True).is_err());
        assert!(e.satisfies(State::Omega, &Formula::True).is_err());
    }

    #[test]
    fn schematic_disjunction_on_loop() {
        let l = EvalEnvironment::new(a_loop());
        let d = EvalEnvironment::new(deadlock());
        let or = crate::formula::parse_pos_formula("OR{n in N} <a>^n T").unwrap();
        assert!(l.satisfies_pos(State::Id(0), &or).unwrap());
        let or1 = crate::formula::parse_pos_formula("OR{n in N} <a> <a>^n T").unwrap();
        assert!(!d.satisfies_pos(State::Id(0), &or1).unwrap());
    }

    #[test]
    fn stray_power_rejected() {
        let e = env("a.0");
        assert!(matches!(
            e.satisfies(State::Id(0), &Formula::power(act("a"), Formula::True)),
            Err(EvalError::Formula(FormulaError::StrayPower(_)))
        ));
    }
}
