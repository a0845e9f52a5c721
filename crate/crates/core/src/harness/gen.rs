//! Seeded random formulas, contexts, templates and systems.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::{Context, Formula, Frame, IndexSet, PosContext, PosFormula, PosFrame};
use crate::lts::{Action, FiniteLts};

const NEGATION: f64 = 0.3;

pub struct Gen {
    rng: ChaCha8Rng,
    actions: Vec<Action>,
}

impl Gen {
    pub fn new(seed: u64, actions: &[Action]) -> Self {
        assert!(!actions.is_empty(), "generator needs at least one action");
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            actions: actions.to_vec(),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn action(&mut self) -> Action {
        self.actions.choose(&mut self.rng).expect("non-empty").clone()
    }

    /// An HML formula of depth at most `depth`, without infinite families.
    pub fn formula(&mut self, depth: usize) -> Formula {
        self.formula_in(depth, 0)
    }

    fn formula_in(&mut self, depth: usize, nest: usize) -> Formula {
        let base = if depth == 0 || self.rng.gen_bool(0.15) {
            Formula::True
        } else if nest >= 2 || self.rng.gen_bool(0.6) {
            let a = self.action();
            Formula::diamond(a, self.formula_in(depth - 1, nest))
        } else {
            let k = self.rng.gen_range(2..=3);
            Formula::and((0..k).map(|_| self.formula_in(depth, nest + 1)).collect())
        };
        if self.rng.gen_bool(NEGATION) {
            Formula::not(base)
        } else {
            base
        }
    }

    /// An HML⁺ formula of depth at most `depth`, without infinite families.
    pub fn pos_formula(&mut self, depth: usize) -> PosFormula {
        self.pos_in(depth, 0)
    }

    fn pos_in(&mut self, depth: usize, nest: usize) -> PosFormula {
        if depth == 0 || self.rng.gen_bool(0.15) {
            return if self.rng.gen_bool(0.7) {
                PosFormula::True
            } else {
                PosFormula::False
            };
        }
        if nest >= 2 || self.rng.gen_bool(0.6) {
            let a = self.action();
            let f = self.pos_in(depth - 1, nest);
            if self.rng.gen_bool(0.5) {
                PosFormula::diamond(a, f)
            } else {
                PosFormula::boxed(a, f)
            }
        } else {
            let k = self.rng.gen_range(2..=3);
            let items = (0..k).map(|_| self.pos_in(depth, nest + 1)).collect();
            if self.rng.gen_bool(0.5) {
                PosFormula::and(items)
            } else {
                PosFormula::or(items)
            }
        }
    }

    /// A template with one `<a>^n` node over a body of depth at most
    /// `body_depth`.
    pub fn template(&mut self, body_depth: usize) -> Formula {
        let a = self.action();
        let core = Formula::power(a, self.formula(body_depth));
        match self.rng.gen_range(0..4) {
            0 | 1 => core,
            2 => Formula::diamond(self.action(), core),
            _ => Formula::and(vec![self.formula(1), core]),
        }
    }

    /// A template with one `<a>^n` or `[a]^n` node.
    pub fn pos_template(&mut self, body_depth: usize) -> PosFormula {
        let a = self.action();
        let body = self.pos_formula(body_depth);
        let core = if self.rng.gen_bool(0.5) {
            PosFormula::PowerDiamond(a, body.into())
        } else {
            PosFormula::PowerBox(a, body.into())
        };
        match self.rng.gen_range(0..5) {
            0 | 1 => core,
            2 => PosFormula::diamond(self.action(), core),
            3 => PosFormula::boxed(self.action(), core),
            _ => {
                let side = self.pos_formula(1);
                if self.rng.gen_bool(0.5) {
                    PosFormula::and(vec![side, core])
                } else {
                    PosFormula::or(vec![side, core])
                }
            }
        }
    }

    /// An HML context with at most `depth` diamonds above the hole.
    pub fn context(&mut self, depth: usize) -> Context {
        let mut frames = Vec::new();
        let mut left = depth;
        for _ in 0..self.rng.gen_range(0..=depth + 1) {
            let frame = match self.rng.gen_range(0..3) {
                0 if left > 0 => {
                    left -= 1;
                    Frame::Diamond(self.action())
                }
                1 => Frame::Not,
                _ => {
                    let side = vec![self.formula(2)];
                    if self.rng.gen_bool(0.5) {
                        Frame::And { left: side, right: Vec::new() }
                    } else {
                        Frame::And { left: Vec::new(), right: side }
                    }
                }
            };
            frames.push(frame);
        }
        Context::new(frames)
    }

    /// An HML⁺ context with at most `depth` modalities above the hole.
    pub fn pos_context(&mut self, depth: usize) -> PosContext {
        let mut frames = Vec::new();
        let mut left = depth;
        for _ in 0..self.rng.gen_range(0..=depth + 1) {
            let kind = self.rng.gen_range(0..4);
            let frame = match kind {
                0 | 1 if left > 0 => {
                    left -= 1;
                    let a = self.action();
                    if kind == 0 {
                        PosFrame::Diamond(a)
                    } else {
                        PosFrame::Box(a)
                    }
                }
                _ => {
                    let side = vec![self.pos_formula(2)];
                    let (l, r) = if self.rng.gen_bool(0.5) {
                        (side, Vec::new())
                    } else {
                        (Vec::new(), side)
                    };
                    if self.rng.gen_bool(0.5) {
                        PosFrame::And { left: l, right: r }
                    } else {
                        PosFrame::Or { left: l, right: r }
                    }
                }
            };
            frames.push(frame);
        }
        PosContext::new(frames)
    }

    /// A non-empty finite index set of at most `max_size` indices from
    /// `0..=max_index`.
    pub fn index_set(&mut self, max_size: usize, max_index: usize) -> IndexSet {
        let k = self.rng.gen_range(1..=max_size);
        IndexSet::finite((0..k).map(|_| self.rng.gen_range(0..=max_index)).collect::<Vec<_>>())
    }

    /// A random system with `1..=max_states` states rooted at 0.
    pub fn system(&mut self, max_states: usize) -> FiniteLts {
        let n = self.rng.gen_range(1..=max_states);
        let mut transitions = Vec::new();
        for s in 0..n {
            for a in self.actions.clone() {
                for _ in 0..self.rng.gen_range(0..=2) {
                    transitions.push((s, a.clone(), self.rng.gen_range(0..n)));
                }
            }
        }
        transitions.sort();
        transitions.dedup();
        FiniteLts::new(n, 0, transitions)
            .expect("endpoints in range")
            .with_alphabet(&self.actions)
    }

    /// `l` with its states renamed by a random permutation.
    pub fn shuffled(&mut self, l: &FiniteLts) -> FiniteLts {
        let mut perm: Vec<usize> = (0..l.num_states()).collect();
        perm.shuffle(&mut self.rng);
        let transitions = l
            .transitions()
            .iter()
            .map(|(s, a, t)| (perm[*s], a.clone(), perm[*t]))
            .collect();
        FiniteLts::new(l.num_states(), perm[l.initial()], transitions)
            .expect("permutation keeps endpoints in range")
            .with_alphabet(l.alphabet())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lts::alphabet;

    #[test]
    fn depth_bounds_hold() {
        let mut g = Gen::new(7, &alphabet(["a", "b"]));
        for _ in 0..200 {
            assert!(g.formula(3).depth().finite().unwrap() <= 3);
            assert!(g.pos_formula(2).depth().finite().unwrap() <= 2);
            let t = g.template(2);
            assert!(t.has_power());
            Formula::schematic(t, IndexSet::All).validate().unwrap();
        }
    }

    #[test]
    fn seeded() {
        let ab = alphabet(["a", "b"]);
        let (mut g, mut h) = (Gen::new(3, &ab), Gen::new(3, &ab));
        for _ in 0..20 {
            assert_eq!(g.formula(3), h.formula(3));
            assert_eq!(g.system(5), h.system(5));
        }
    }
}
