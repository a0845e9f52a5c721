use std::collections::{HashMap, HashSet};

use fixedbitset::FixedBitSet;

use super::{conj, decorations, CharacterizationSet, SemanticsId, SpectrumError};
use crate::eval::StateSpace;
use crate::formula::Formula;
use crate::lts::{Action, FiniteLts, LtsError, StateRef};

/// A characterization generated against one state space: every kept formula
/// has a satisfying set that no earlier formula has.
pub struct Characterization {
    set: CharacterizationSet,
    space: StateSpace,
    sats: Vec<FixedBitSet>,
    fixpoint: bool,
}

struct Gen<'s> {
    space: &'s StateSpace,
    formulas: Vec<Formula>,
    sats: Vec<FixedBitSet>,
    seen: HashSet<FixedBitSet>,
}

impl Gen<'_> {
    /// Keeps `f` if its set is new; returns its index when kept.
    fn push(&mut self, f: Formula, x: FixedBitSet) -> Option<usize> {
        if self.seen.insert(x.clone()) {
            self.formulas.push(f);
            self.sats.push(x);
            Some(self.formulas.len() - 1)
        } else {
            None
        }
    }

    fn linear(&mut self, sem: SemanticsId, alphabet: &[Action], bound: usize) -> Result<bool, SpectrumError> {
        let mut frontier = Vec::new();
        for d in decorations(sem, alphabet) {
            let x = self.space.sat(&d)?;
            frontier.extend(self.push(d, x));
        }
        for _ in 0..bound {
            let mut next = Vec::new();
            for &i in &frontier {
                for a in alphabet {
                    let y = self.space.pre(a, &self.sats[i]);
                    let f = Formula::diamond(a.clone(), self.formulas[i].clone());
                    next.extend(self.push(f, y));
                }
            }
            frontier = next;
            if frontier.is_empty() {
                return Ok(true);
            }
        }
        Ok(frontier.is_empty())
    }

    fn reach(&mut self, alphabet: &[Action], bound: usize) -> bool {
        let mut stable = true;
        for a in alphabet {
            let base = Formula::diamond(a.clone(), Formula::True);
            let x0 = self.space.pre(a, &self.space.full());
            let (mut r, mut x) = (base.clone(), x0.clone());
            let mut settled = false;
            for _ in 0..bound {
                let mut y = x0.clone();
                for b in alphabet {
                    y.union_with(&self.space.pre(b, &x));
                }
                if y == x {
                    settled = true;
                    break;
                }
                let mut items = vec![Formula::not(base.clone())];
                items.extend(
                    alphabet
                        .iter()
                        .map(|b| Formula::not(Formula::diamond(b.clone(), r.clone()))),
                );
                r = Formula::not(Formula::and(items));
                x = y;
            }
            stable &= settled;
            self.push(r, x);
        }
        stable
    }

    fn branching(&mut self, sem: SemanticsId, alphabet: &[Action], bound: usize) -> Result<bool, SpectrumError> {
        let negate = sem == SemanticsId::Bisimulation;
        let space = self.space;
        let keep = |g: &mut Self, f: Formula, x: FixedBitSet| -> bool {
            let mut neg = x.clone();
            neg.toggle_range(..);
            let kept = g.push(f.clone(), x).is_some();
            if negate {
                g.push(Formula::not(f), neg);
            }
            kept
        };
        keep(self, Formula::True, space.full());
        if sem == SemanticsId::ReadySimulation {
            for a in alphabet {
                keep(self, Formula::not(Formula::diamond(a.clone(), Formula::True)), space.refuses(a));
            }
        }
        for _ in 0..bound {
            let principal = self.principal_formulas();
            let mut grew = false;
            for a in alphabet {
                for (chi, target) in &principal {
                    let y = space.pre(a, target);
                    grew |= keep(self, Formula::diamond(a.clone(), chi.clone()), y);
                }
            }
            if !grew {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// For each class of nodes agreeing on every kept formula, the
    /// conjunction of the formulas the class satisfies, shortened greedily,
    /// with its satisfying set.
    fn principal_formulas(&self) -> Vec<(Formula, FixedBitSet)> {
        let n = self.space.len();
        let k = self.formulas.len();
        let mut rows = vec![FixedBitSet::with_capacity(k); n];
        for (i, x) in self.sats.iter().enumerate() {
            for v in x.ones() {
                rows[v].insert(i);
            }
        }
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by_key(|i| (self.sats[*i].count_ones(..), *i));
        let mut classes = HashSet::new();
        let mut targets = HashSet::new();
        let mut out = Vec::new();
        for row in rows {
            if !classes.insert(row.clone()) {
                continue;
            }
            let mut target = self.space.full();
            for i in row.ones() {
                target.intersect_with(&self.sats[i]);
            }
            if !targets.insert(target.clone()) {
                continue;
            }
            let mut cur = self.space.full();
            let mut chosen = Vec::new();
            for &i in &order {
                if cur == target {
                    break;
                }
                if row.contains(i) && !cur.is_subset(&self.sats[i]) {
                    cur.intersect_with(&self.sats[i]);
                    chosen.push(i);
                }
            }
            chosen.sort_unstable();
            let chi = conj(chosen.iter().map(|i| self.formulas[*i].clone()).collect());
            out.push((chi, target));
        }
        out
    }
}

impl Characterization {
    /// Generates the characterization of `sem` with spine bound `bound` over
    /// the alphabet of `lts`, relative to its state space with projection
    /// layers up to `cap`.
    pub fn generate(
        sem: SemanticsId,
        lts: &FiniteLts,
        cap: usize,
        bound: usize,
    ) -> Result<Self, SpectrumError> {
        let space = StateSpace::new(lts, cap);
        let alphabet = lts.alphabet().to_vec();
        let mut g = Gen {
            space: &space,
            formulas: Vec::new(),
            sats: Vec::new(),
            seen: HashSet::new(),
        };
        let fixpoint = match sem {
            SemanticsId::ReachabilityExample => g.reach(&alphabet, bound),
            SemanticsId::Simulation | SemanticsId::ReadySimulation | SemanticsId::Bisimulation => {
                g.branching(sem, &alphabet, bound)?
            }
            _ => g.linear(sem, &alphabet, bound)?,
        };
        let (formulas, sats) = (g.formulas, g.sats);
        Ok(Characterization {
            set: CharacterizationSet {
                semantics: Some(sem),
                alphabet,
                depth_bound: bound,
                formulas,
            },
            space,
            sats,
            fixpoint,
        })
    }

    pub fn set(&self) -> &CharacterizationSet {
        &self.set
    }

    pub fn formulas(&self) -> &[Formula] {
        &self.set.formulas
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    /// Whether generation stopped because nothing new appeared, rather than
    /// at the bound.
    pub fn is_fixpoint(&self) -> bool {
        self.fixpoint
    }

    /// Satisfying set of the `i`-th formula over the state space.
    pub fn sat(&self, i: usize) -> &FixedBitSet {
        &self.sats[i]
    }

    /// The first formula true at exactly one of `s` and `t`.
    pub fn separating(&self, s: StateRef, t: StateRef) -> Result<Option<&Formula>, LtsError> {
        let (x, y) = (self.space.node(s)?, self.space.node(t)?);
        Ok(self
            .sats
            .iter()
            .position(|b| b.contains(x) != b.contains(y))
            .map(|i| &self.set.formulas[i]))
    }

    /// Class ids for `refs`, numbered in order of first appearance; equal ids
    /// mean equivalent.
    pub fn classes(&self, refs: &[StateRef]) -> Result<Vec<usize>, LtsError> {
        classes_of(&self.space, &self.sats, refs)
    }
}

/// Groups `refs` by their truth values on every set in `sats`.
pub(crate) fn classes_of(
    space: &StateSpace,
    sats: &[FixedBitSet],
    refs: &[StateRef],
) -> Result<Vec<usize>, LtsError> {
    let nodes: Vec<usize> = refs.iter().map(|r| space.node(*r)).collect::<Result<_, _>>()?;
    let mut table: HashMap<Vec<bool>, usize> = HashMap::new();
    Ok(nodes
        .iter()
        .map(|v| {
            let sig: Vec<bool> = sats.iter().map(|x| x.contains(*v)).collect();
            let fresh = table.len();
            *table.entry(sig).or_insert(fresh)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lts::State;
    use crate::term::ProcessTerm;

    fn finite(t: &str) -> FiniteLts {
        ProcessTerm::parse(t).unwrap().to_lts().as_finite().unwrap().clone()
    }

    #[test]
    fn trace_generation_reaches_fixpoint() {
        let l = finite("a.b.0 + b.0");
        let c = Characterization::generate(SemanticsId::Trace, &l, 0, 10).unwrap();
        assert!(c.is_fixpoint());
        // <a><b>T holds exactly where <a>T does, so only T, <a>T, <b>T and
        // the empty set via <a><a>T survive
        assert_eq!(c.formulas().len(), 4);
    }

    #[test]
    fn sets_are_distinct() {
        let l = finite("a.(b + a.b) + b.a");
        for sem in SemanticsId::ALL {
            let c = Characterization::generate(sem, &l, 3, 6).unwrap();
            let distinct: HashSet<_> = (0..c.formulas().len()).map(|i| c.sat(i).clone()).collect();
            assert_eq!(distinct.len(), c.formulas().len());
            for (i, f) in c.formulas().iter().enumerate() {
                assert_eq!(&c.space().sat(f).unwrap(), c.sat(i), "{sem}: {f}");
            }
        }
    }

    #[test]
    fn projection_layers_are_addressable() {
        let l = finite("a.a.a.0");
        let c = Characterization::generate(SemanticsId::Bisimulation, &l, 3, 5).unwrap();
        let root = StateRef::plain(State::Id(0));
        let ids = c.classes(&[root, root.project(3), root.project(2)]).unwrap();
        assert_eq!(ids, vec![0, 0, 1]);
        let w = c.separating(root, root.project(2)).unwrap().unwrap();
        assert_eq!(w.depth().finite(), Some(3));
    }
}
