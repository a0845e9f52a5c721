use std::collections::HashMap;

use proptest::prelude::*;

use hml_core::aut::{read_aut, write_aut};
use hml_core::eval::{EvalEnvironment, StateSpace};
use hml_core::formula::{
    parse_formula, parse_pos_formula, to_positive, translate_context, Formula, Frame, IndexSet,
    Polarity, PosFormula,
};
use hml_core::harness::gen::Gen;
use hml_core::lts::{act, counterexample_pair, FiniteLts, State, StateRef, TransitionSystem};
use hml_core::term::{enumerate_terms, from_term};

fn ab() -> Vec<hml_core::lts::Action> {
    vec![act("a"), act("b")]
}

fn plain(v: usize) -> StateRef {
    StateRef::plain(State::Id(v))
}

fn projected(v: usize, n: usize) -> StateRef {
    plain(v).project(n)
}

/// `π_n(s)` unrolled into an explicit system whose state 0 is the root.
fn materialize(ts: &TransitionSystem, s: State, n: usize) -> FiniteLts {
    let root = ts.project(s, n);
    let edges = ts.projected_transitions(root).unwrap();
    let mut ids = HashMap::from([(root, 0)]);
    let mut transitions = Vec::new();
    for (p, a, q) in edges {
        let next = ids.len();
        let p = *ids.entry(p).or_insert(next);
        let next = ids.len();
        let q = *ids.entry(q).or_insert(next);
        transitions.push((p, a, q));
    }
    FiniteLts::new(ids.len(), 0, transitions).unwrap()
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(96)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn complement_is_an_involution(seed in any::<u64>()) {
        let mut g = Gen::new(seed, &ab());
        let p = g.pos_formula(3);
        prop_assert_eq!(p.complement().complement(), p.clone());
        let l = g.system(5);
        let space = StateSpace::new(&l, 0);
        let mut neg = space.sat_pos(&p).unwrap();
        neg.toggle_range(..);
        prop_assert_eq!(space.sat_pos(&p.complement()).unwrap(), neg);
    }

    #[test]
    fn positive_translation_agrees(seed in any::<u64>()) {
        let mut g = Gen::new(seed, &[act("a")]);
        let f = g.formula(3);
        let l = g.system(5);
        let env = EvalEnvironment::new(l.clone().into());
        let p = to_positive(&f);
        for v in 0..l.num_states() {
            prop_assert_eq!(env.satisfies(plain(v), &f).unwrap(), env.satisfies_pos(plain(v), &p).unwrap());
            let neg = Formula::not(f.clone());
            prop_assert_eq!(env.satisfies(plain(v), &neg).unwrap(), !env.satisfies(plain(v), &f).unwrap());
        }
    }

    #[test]
    fn context_lemma(seed in any::<u64>()) {
        let mut g = Gen::new(seed, &ab());
        let d = g.context(3);
        let f = g.formula(3);
        let (pd, polarity) = translate_context(&d);
        let inner = match polarity {
            Polarity::Positive => to_positive(&f),
            Polarity::Negative => to_positive(&f).complement(),
        };
        prop_assert_eq!(to_positive(&d.substitute(f)), pd.substitute(inner));
        let negations = d.frames.iter().filter(|fr| matches!(fr, Frame::Not)).count();
        prop_assert_eq!(polarity == Polarity::Positive, negations % 2 == 0);
    }

    #[test]
    fn cuts_stay_within_depth(seed in any::<u64>(), n in 0usize..6) {
        let mut g = Gen::new(seed, &ab());
        let f = if seed % 3 == 0 {
            g.context(2).substitute(Formula::schematic(g.template(1), IndexSet::All))
        } else {
            g.formula(4)
        };
        let c = f.cut(n);
        prop_assert!(c.depth().finite().is_some_and(|d| d <= n), "{} -> {}", f, c);
        let l = g.system(4);
        let env = EvalEnvironment::new(l.clone().into());
        for v in 0..l.num_states() {
            prop_assert_eq!(
                env.satisfies(projected(v, n), &f).unwrap(),
                env.satisfies(plain(v), &c).unwrap()
            );
        }
    }

    #[test]
    fn power_instances_are_antitone(seed in any::<u64>()) {
        let mut g = Gen::new(seed, &[act("a")]);
        let l = g.system(5);
        let env = EvalEnvironment::new(l.clone().into());
        let template = Formula::power(act("a"), Formula::True);
        let n = l.num_states();
        for v in 0..n {
            let truth: Vec<bool> = (0..n + 3)
                .map(|k| env.satisfies(plain(v), &template.instantiate(k)).unwrap())
                .collect();
            prop_assert!(truth.windows(2).all(|w| w[0] >= w[1]), "{:?}", truth);
            prop_assert!(truth[n..].iter().all(|t| *t == truth[n]));
            let all = Formula::schematic(template.clone(), IndexSet::All);
            prop_assert_eq!(env.satisfies(plain(v), &all).unwrap(), truth[n]);
        }
    }

    #[test]
    fn projections_are_monotone(seed in any::<u64>(), m in 0usize..4, extra in 0usize..3) {
        let mut g = Gen::new(seed, &ab());
        let f = g.formula(m);
        let l = g.system(5);
        let env = EvalEnvironment::new(l.clone().into());
        for v in 0..l.num_states() {
            prop_assert_eq!(
                env.satisfies(projected(v, m), &f).unwrap(),
                env.satisfies(projected(v, m + extra), &f).unwrap()
            );
        }
    }

    #[test]
    fn projection_matches_unrolling(seed in any::<u64>(), n in 0usize..4) {
        let mut g = Gen::new(seed, &ab());
        let f = g.formula(4);
        let l = g.system(4);
        let ts: TransitionSystem = l.clone().into();
        let env = EvalEnvironment::new(ts.clone());
        for v in 0..l.num_states() {
            let unrolled = materialize(&ts, State::Id(v), n);
            let oracle = EvalEnvironment::new(unrolled.into());
            prop_assert_eq!(
                env.satisfies(projected(v, n), &f).unwrap(),
                oracle.satisfies(plain(0), &f).unwrap()
            );
        }
    }

    #[test]
    fn memo_is_transparent(seed in any::<u64>()) {
        let mut g = Gen::new(seed, &ab());
        let l = g.system(5);
        let memo = EvalEnvironment::new(l.clone().into());
        let bare = EvalEnvironment::without_memo(l.clone().into());
        for _ in 0..4 {
            let f = g.formula(3);
            for v in 0..l.num_states() {
                for r in [plain(v), projected(v, 2)] {
                    prop_assert_eq!(memo.satisfies(r, &f).unwrap(), bare.satisfies(r, &f).unwrap());
                }
            }
        }
    }

    #[test]
    fn aut_round_trips(seed in any::<u64>()) {
        let mut g = Gen::new(seed, &ab());
        let l = g.system(6);
        let back = read_aut(&write_aut(&l)).unwrap();
        prop_assert_eq!(write_aut(&back), write_aut(&l));
        prop_assert_eq!(back.transitions(), l.transitions());
    }

    #[test]
    fn printed_formulas_reparse(seed in any::<u64>()) {
        let mut g = Gen::new(seed, &ab());
        let f = g.formula(4);
        prop_assert_eq!(parse_formula(&f.to_string()).unwrap(), f.clone());
        let p = g.pos_formula(4);
        prop_assert_eq!(parse_pos_formula(&p.to_string()).unwrap(), p);
        let s = g.context(2).substitute(Formula::schematic(g.template(2), IndexSet::All));
        prop_assert_eq!(parse_formula(&s.to_string()).unwrap(), s);
        let j = g.index_set(5, 9);
        let s = Formula::schematic(g.template(1), j);
        prop_assert_eq!(parse_formula(&s.to_string()).unwrap(), s);
        let fam = PosFormula::disj_schematic(g.pos_template(1), IndexSet::All);
        let p = g.pos_context(2).substitute(fam);
        prop_assert_eq!(parse_pos_formula(&p.to_string()).unwrap(), p);
        prop_assert_eq!(parse_pos_formula(&to_positive(&f).to_string()).unwrap(), to_positive(&f));
    }

    #[test]
    fn family_representatives_are_stable(seed in any::<u64>(), k in 0usize..4) {
        let mut g = Gen::new(seed, &[act("a")]);
        let f = g.formula(k);
        let (left, right) = counterexample_pair();
        for ts in [left, right] {
            let env = EvalEnvironment::new(ts.clone());
            let root = ts.initial();
            let truth = env.satisfies(StateRef::plain(root).project(k), &f).unwrap();
            for n in k + 1..k + 4 {
                prop_assert_eq!(env.satisfies(StateRef::plain(root).project(n), &f).unwrap(), truth);
            }
            prop_assert_eq!(env.satisfies(root, &f).unwrap(), truth);
        }
    }
}

#[test]
fn terms_translate_deterministically() {
    for t in enumerate_terms(&ab(), 4) {
        let (x, y) = (from_term(&t), from_term(&t));
        assert_eq!(x, y);
        let (TransitionSystem::Finite(x), TransitionSystem::Finite(y)) = (x, y) else {
            panic!("terms give finite systems");
        };
        assert_eq!(write_aut(&x), write_aut(&y));
    }
}

#[test]
fn translation_agrees_on_every_small_term() {
    let terms = enumerate_terms(&[act("a")], 4);
    let parts: Vec<FiniteLts> = terms
        .iter()
        .map(|t| match from_term(t) {
            TransitionSystem::Finite(l) => l,
            TransitionSystem::Family(_) => unreachable!(),
        })
        .collect();
    let refs: Vec<&FiniteLts> = parts.iter().collect();
    let (union, _) = FiniteLts::disjoint_union(&refs);
    let space = StateSpace::new(&union, 0);
    let mut g = Gen::new(5, &[act("a")]);
    for _ in 0..500 {
        let f = g.formula(3);
        assert_eq!(space.sat(&f).unwrap(), space.sat_pos(&to_positive(&f)).unwrap(), "{f}");
    }
}
