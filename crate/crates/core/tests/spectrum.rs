use proptest::prelude::*;

use hml_core::eval::EvalEnvironment;
use hml_core::harness::gen::Gen;
use hml_core::harness::Corpus;
use hml_core::lts::{act, Action, FiniteLts, State, StateRef, TransitionSystem};
use hml_core::spectrum::{
    bisimilar, char_formulas, equiv_modulo, equivalent_under, Characterization, SemanticsId,
};
use hml_core::term::{enumerate_terms, from_term, ProcessTerm};

const BRANCHING: [SemanticsId; 3] = [
    SemanticsId::Simulation,
    SemanticsId::ReadySimulation,
    SemanticsId::Bisimulation,
];

fn ab() -> Vec<Action> {
    vec![act("a"), act("b")]
}

fn term(s: &str) -> TransitionSystem {
    from_term(&ProcessTerm::parse(s).unwrap())
}

fn size(ts: &TransitionSystem) -> usize {
    ts.state_count().unwrap()
}

fn decide(sem: SemanticsId, x: &TransitionSystem, y: &TransitionSystem) -> bool {
    sem.decide(x, x.initial(), y, y.initial()).unwrap()
}

#[test]
fn textbook_pairs() {
    let cases = [
        // (left, right, [trace, completed, failures, readiness, sim, ready-sim, bisim, reach])
        ("a.(b.0 + c.0)", "a.b.0 + a.c.0", [true, true, false, false, false, false, false, true]),
        ("a.b.0 + a.0", "a.b.0", [true, false, false, false, true, false, false, true]),
        ("a.0 + a.0", "a.0", [true, true, true, true, true, true, true, true]),
        ("a.b.0 + a.(b.0 + c.0)", "a.(b.0 + c.0)", [true, true, false, false, true, false, false, true]),
        ("b.a.0", "a.b.0", [false, false, false, false, false, false, false, true]),
    ];
    for (l, r, expected) in cases {
        let (x, y) = (term(l), term(r));
        let bound = size(&x) * size(&y);
        for (sem, want) in SemanticsId::ALL.into_iter().zip(expected) {
            assert_eq!(decide(sem, &x, &y), want, "{sem} decider on {l} vs {r}");
            let v = equivalent_under(sem, &x, x.initial(), &y, y.initial(), bound).unwrap();
            assert_eq!(v.equivalent, want, "{sem} formulas on {l} vs {r}");
            if let Some(w) = v.witness {
                let e1 = EvalEnvironment::new(x.clone());
                let e2 = EvalEnvironment::new(y.clone());
                assert_ne!(
                    e1.satisfies(x.initial(), &w).unwrap(),
                    e2.satisfies(y.initial(), &w).unwrap(),
                    "{w} does not separate {l} and {r}"
                );
            }
        }
    }
}

#[test]
fn generated_characterizations_match_deciders_on_terms() {
    let corpus = Corpus::standard();
    let roots = corpus.roots();
    let terms: Vec<usize> = (0..corpus.len())
        .filter(|i| !corpus.names()[*i].contains('-'))
        .collect();
    assert!(terms.len() >= 143);
    let systems: Vec<TransitionSystem> = corpus.systems().iter().map(|l| l.clone().into()).collect();
    let bound = corpus.max_states() * corpus.max_states();
    for sem in &SemanticsId::ALL[..7] {
        let c = Characterization::generate(*sem, corpus.union(), 0, bound).unwrap();
        assert!(c.is_fixpoint(), "{sem}");
        let refs: Vec<StateRef> = roots.iter().map(|v| StateRef::plain(State::Id(*v))).collect();
        let ids = c.classes(&refs).unwrap();
        for (n, &i) in terms.iter().enumerate() {
            for &j in &terms[n + 1..] {
                assert_eq!(
                    ids[i] == ids[j],
                    decide(*sem, &systems[i], &systems[j]),
                    "{sem}: {} vs {}",
                    corpus.names()[i],
                    corpus.names()[j]
                );
            }
        }
    }
}

#[test]
fn syntactic_characterizations_match_deciders() {
    let terms = enumerate_terms(&ab(), 2);
    let systems: Vec<TransitionSystem> = terms.iter().map(from_term).collect();
    for sem in [
        SemanticsId::Trace,
        SemanticsId::CompletedTrace,
        SemanticsId::Failures,
        SemanticsId::Readiness,
        SemanticsId::ReachabilityExample,
    ] {
        for (i, x) in systems.iter().enumerate() {
            for y in &systems[i..] {
                let o = char_formulas(sem, &ab(), size(x) * size(y)).unwrap();
                let (e1, e2) = (EvalEnvironment::new(x.clone()), EvalEnvironment::new(y.clone()));
                let v = equiv_modulo(&e1, x.initial(), &e2, y.initial(), &o).unwrap();
                assert_eq!(v.equivalent, decide(sem, x, y), "{sem}: {x:?} vs {y:?}");
            }
        }
    }
    for sem in BRANCHING {
        let o = char_formulas(sem, &[act("a")], 2).unwrap();
        assert!(o.max_depth().is_some());
    }
}

#[test]
fn desk_scale_bisimulation() {
    let mut g = Gen::new(17, &ab());
    for _ in 0..100 {
        let l = g.system(6);
        let m = g.shuffled(&l);
        let (x, y): (TransitionSystem, TransitionSystem) = (l.into(), m.into());
        assert!(bisimilar(&x, x.initial(), &y, y.initial()).unwrap());
        let v = equivalent_under(SemanticsId::Bisimulation, &x, x.initial(), &y, y.initial(), size(&x) + size(&y)).unwrap();
        assert!(v.equivalent);
    }
}

fn pair(seed: u64) -> (TransitionSystem, TransitionSystem) {
    let mut g = Gen::new(seed, &ab());
    let l: FiniteLts = g.system(5);
    let m = if seed.is_multiple_of(2) { g.shuffled(&l) } else { g.system(5) };
    (l.into(), m.into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn characterization_agrees_with_decider(seed in any::<u64>()) {
        let (x, y) = pair(seed);
        for sem in SemanticsId::ALL {
            let bound = match sem {
                SemanticsId::Simulation | SemanticsId::ReadySimulation | SemanticsId::Bisimulation => {
                    size(&x) + size(&y)
                }
                _ => size(&x) * size(&y),
            };
            let v = equivalent_under(sem, &x, x.initial(), &y, y.initial(), bound).unwrap();
            prop_assert_eq!(v.equivalent, decide(sem, &x, &y), "{}", sem);
        }
    }

    #[test]
    fn spectrum_inclusions(seed in any::<u64>()) {
        let (x, y) = pair(seed);
        let chain = [
            SemanticsId::Bisimulation,
            SemanticsId::ReadySimulation,
            SemanticsId::Readiness,
            SemanticsId::Failures,
            SemanticsId::CompletedTrace,
            SemanticsId::Trace,
        ];
        for w in chain.windows(2) {
            prop_assert!(!decide(w[0], &x, &y) || decide(w[1], &x, &y), "{} vs {}", w[0], w[1]);
        }
        prop_assert!(!decide(SemanticsId::ReadySimulation, &x, &y) || decide(SemanticsId::Simulation, &x, &y));
        prop_assert!(!decide(SemanticsId::Simulation, &x, &y) || decide(SemanticsId::Trace, &x, &y));
    }

    #[test]
    fn equivalences_survive_projection(seed in any::<u64>(), n in 0usize..5) {
        let (x, y) = pair(seed);
        let (s, t) = (StateRef::plain(x.initial()), StateRef::plain(y.initial()));
        for sem in &SemanticsId::ALL[..7] {
            if sem.decide(&x, s, &y, t).unwrap() {
                prop_assert!(sem.decide(&x, s.project(n), &y, t.project(n)).unwrap(), "{} at {}", sem, n);
            }
        }
    }
}

#[test]
fn member_depths_follow_the_spine_bound() {
    for sem in SemanticsId::ALL {
        for bound in 0..3 {
            let o = char_formulas(sem, &ab(), bound).unwrap();
            let deepest = o.max_depth().unwrap();
            let limit = if sem == SemanticsId::Trace { bound } else { bound + 1 };
            assert!(deepest <= limit, "{sem} at {bound}: depth {deepest}");
            assert_eq!(o.depth_bound, bound);
        }
    }
}
