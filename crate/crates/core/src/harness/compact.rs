//! Compactness of infinite conjunctions and disjunctions, the finitary
//! characterization theorem, and the negation translation.

use std::collections::HashSet;

use fixedbitset::FixedBitSet;
use rand::Rng;

use super::gen::Gen;
use super::{classes, salted, separating, CheckReport, Corpus, HarnessError, Witness};
use crate::eval::{EvalEnvironment, StateSpace};
use crate::formula::{
    finite_subconjunctions, to_positive, Context, Family, Formula, Frame, IndexSet, PosFormula,
};
use crate::lts::{a_loop, act, counterexample_pair, deadlock, Action, TransitionSystem};
use crate::spectrum::{bisimilar, equivalent_under, SemanticsId};

/// Which finitary fragment the characterization theorem compares against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThmMode {
    /// Members without infinite conjunctions.
    Fin,
    /// Members of finite depth.
    Fdp,
}

fn ab() -> Vec<Action> {
    vec![act("a"), act("b")]
}

/// `⋀_{n∈ℕ} <a>^n T`.
fn a_forever() -> Formula {
    Formula::schematic(Formula::power(act("a"), Formula::True), IndexSet::All)
}

/// Index window beyond which every template instance repeats an earlier
/// satisfying set on systems of the corpus size.
fn window(corpus: &Corpus) -> usize {
    let m = corpus.max_states();
    m * m + m
}

/// Every non-empty `J ⊆ {0..4}`, a few random `J` of size at most 8, and
/// the whole window.
fn index_sets(g: &mut Gen, window: usize) -> Vec<IndexSet> {
    let mut out: Vec<IndexSet> = (1u32..32)
        .map(|mask| IndexSet::finite((0..5).filter(|j| mask & (1 << j) != 0)))
        .collect();
    for _ in 0..4 {
        out.push(g.index_set(8, window));
    }
    out.push(IndexSet::finite(0..=window));
    out
}

/// The left fixture root refutes `<a>⋀_{n∈ℕ}<a>^n T` yet satisfies every
/// finite version with `J ⊆ {0..max}`, while the right root satisfies the
/// infinite one. `Ok` carries a description of the divergence, `Err` the
/// first deviation from it.
fn fixture_divergence(max: usize) -> Result<Result<Witness, Witness>, HarnessError> {
    let (left, right) = counterexample_pair();
    let f = Formula::diamond(act("a"), a_forever());
    let (le, re) = (EvalEnvironment::new(left.clone()), EvalEnvironment::new(right.clone()));
    let w = |note: &str| Witness {
        system: "@left-counterexample | @right-counterexample".into(),
        states: vec![left.initial().to_string(), right.initial().to_string()],
        formula: Some(f.to_string()),
        note: Some(note.into()),
    };
    if le.satisfies(left.initial(), &f)? {
        return Ok(Err(w("left root satisfies the infinite conjunction")));
    }
    if !re.satisfies(right.initial(), &f)? {
        return Ok(Err(w("right root refutes the infinite conjunction")));
    }
    for fj in finite_subconjunctions(&f, &[0], max)? {
        if !le.satisfies(left.initial(), &fj)? || !re.satisfies(right.initial(), &fj)? {
            return Ok(Err(w("a finite sub-conjunction fails").with_formula(fj)));
        }
    }
    Ok(Ok(w(&format!(
        "left refutes the infinite conjunction, both satisfy all finite J within 0..={max}"
    ))))
}

/// The fixture counterexample with `J ⊆ {0..8}`.
pub fn check_counterexample(seed: u64) -> Result<CheckReport, HarnessError> {
    let mut r = CheckReport::new("counterexample", seed);
    r.trials = (1 << 9) + 1;
    Ok(match fixture_divergence(8)? {
        Ok(w) => {
            r.witness = Some(w);
            r
        }
        Err(w) => r.fail(w),
    })
}

fn first(x: &FixedBitSet) -> Option<usize> {
    x.ones().next()
}

fn diff(x: &FixedBitSet, y: &FixedBitSet) -> Option<usize> {
    first(&(x ^ y))
}

/// `s ⊨ C[⋀_ℕ φ_n]` iff `s ⊨ C[⋀_J φ_n]` for all sampled finite `J`, over
/// every corpus state, with random negation-free contexts and templates.
/// Also asserts the expected failure on the non-image-finite fixture.
pub fn check_conjunction_compactness(
    corpus: &Corpus,
    seed: u64,
    trials: usize,
) -> Result<CheckReport, HarnessError> {
    let mut r = CheckReport::new("conjunction-compactness", seed);
    let mut g = Gen::new(salted(seed, &r.name), &ab());
    let space = corpus.space(0);
    let k = window(corpus);
    for _ in 0..trials {
        let c = g.pos_context(3);
        let tpl = g.pos_template(2);
        let inf_f = c.substitute(PosFormula::conj_schematic(tpl.clone(), IndexSet::All));
        let inf = space.sat_pos(&inf_f)?;
        let mut all = space.full();
        for j in index_sets(&mut g, k) {
            let fj = c.substitute(PosFormula::conj_schematic(tpl.clone(), j));
            let x = space.sat_pos(&fj)?;
            if let Some(v) = first(&inf.difference(&x).collect()) {
                let w = corpus.witness(&[v]).with_formula(&fj);
                return Ok(r.fail(w.with_note("infinite conjunction holds, finite one fails")));
            }
            all.intersect_with(&x);
        }
        r.trials += 1;
        if let Some(v) = diff(&all, &inf) {
            let w = corpus.witness(&[v]).with_formula(&inf_f);
            return Ok(r.fail(w.with_note("every sampled J holds, infinite conjunction fails")));
        }
    }
    match fixture_divergence(4)? {
        Ok(_) => r.trials += 1,
        Err(w) => return Ok(r.fail(w)),
    }
    Ok(r)
}

/// Dual of the conjunction check: `s ⊨ C[⋁_ℕ φ_n]` iff some sampled finite
/// `J` gives `s ⊨ C[⋁_J φ_n]`. The complemented formula must hold exactly
/// where the original fails, at the infinite family and at every `J`.
pub fn check_disjunction_compactness(
    corpus: &Corpus,
    seed: u64,
    trials: usize,
) -> Result<CheckReport, HarnessError> {
    let mut r = CheckReport::new("disjunction-compactness", seed);
    let mut g = Gen::new(salted(seed, &r.name), &ab());
    let space = corpus.space(0);
    let k = window(corpus);
    let dual = |f: &PosFormula, x: &FixedBitSet| -> Result<Option<usize>, HarnessError> {
        let y = space.sat_pos(&f.complement())?;
        Ok(first(&(x & &y)).or_else(|| first(&space.full().difference(&(x | &y)).collect())))
    };
    for _ in 0..trials {
        let c = g.pos_context(3);
        let tpl = g.pos_template(2);
        let inf_f = c.substitute(PosFormula::disj_schematic(tpl.clone(), IndexSet::All));
        let inf = space.sat_pos(&inf_f)?;
        if let Some(v) = dual(&inf_f, &inf)? {
            let w = corpus.witness(&[v]).with_formula(&inf_f);
            return Ok(r.fail(w.with_note("complement does not negate the infinite disjunction")));
        }
        let mut any = FixedBitSet::with_capacity(space.len());
        for j in index_sets(&mut g, k) {
            let fj = c.substitute(PosFormula::disj_schematic(tpl.clone(), j));
            let x = space.sat_pos(&fj)?;
            if let Some(v) = first(&x.difference(&inf).collect()) {
                let w = corpus.witness(&[v]).with_formula(&fj);
                return Ok(r.fail(w.with_note("finite disjunction holds, infinite one fails")));
            }
            if let Some(v) = dual(&fj, &x)? {
                let w = corpus.witness(&[v]).with_formula(&fj);
                return Ok(r.fail(w.with_note("complement does not negate a finite disjunction")));
            }
            any.union_with(&x);
        }
        r.trials += 1;
        if let Some(v) = diff(&any, &inf) {
            let w = corpus.witness(&[v]).with_formula(&inf_f);
            return Ok(r.fail(w.with_note("infinite disjunction holds, no sampled J does")));
        }
    }
    Ok(r)
}

/// Contexts with negation: a positive context needs every finite `J`, a
/// negative one some finite `J`.
pub fn check_negation_compactness(
    corpus: &Corpus,
    seed: u64,
    trials: usize,
) -> Result<CheckReport, HarnessError> {
    use crate::formula::Polarity;
    let mut r = CheckReport::new("negation-compactness", seed);
    let mut g = Gen::new(salted(seed, &r.name), &ab());
    let space = corpus.space(0);
    let k = window(corpus);
    for _ in 0..trials {
        let d = g.context(3);
        let tpl = g.template(2);
        let positive = d.polarity() == Polarity::Positive;
        let inf_f = d.substitute(Formula::schematic(tpl.clone(), IndexSet::All));
        let inf = space.sat(&inf_f)?;
        let mut acc = if positive {
            space.full()
        } else {
            FixedBitSet::with_capacity(space.len())
        };
        for j in index_sets(&mut g, k) {
            let fj = d.substitute(Formula::schematic(tpl.clone(), j));
            let x = space.sat(&fj)?;
            let stray = if positive {
                inf.difference(&x).collect()
            } else {
                x.difference(&inf).collect()
            };
            if let Some(v) = first(&stray) {
                let w = corpus.witness(&[v]).with_formula(&fj);
                return Ok(r.fail(w.with_note("finite instance contradicts the infinite one")));
            }
            if positive {
                acc.intersect_with(&x);
            } else {
                acc.union_with(&x);
            }
        }
        r.trials += 1;
        if let Some(v) = diff(&acc, &inf) {
            let w = corpus.witness(&[v]).with_formula(&inf_f);
            let note = if positive {
                "positive context: all J hold, infinite family fails"
            } else {
                "negative context: infinite family holds, no J does"
            };
            return Ok(r.fail(w.with_note(note)));
        }
    }
    Ok(r)
}

/// Child-index path from the root of `ctx` to its hole.
fn hole_address(ctx: &Context) -> Vec<usize> {
    ctx.frames
        .iter()
        .map(|f| match f {
            Frame::And { left, .. } => left.len(),
            Frame::Diamond(_) | Frame::Not => 0,
        })
        .collect()
}

/// Addresses of infinite conjunctions reachable without entering a family.
fn infinite_addresses(f: &Formula) -> Vec<Vec<usize>> {
    fn walk(f: &Formula, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        match f {
            Formula::True | Formula::Power(..) => {}
            Formula::Diamond(_, g) | Formula::Not(g) => {
                path.push(0);
                walk(g, path, out);
                path.pop();
            }
            Formula::And(fam) => match &**fam {
                Family::List(items) => {
                    for (i, g) in items.iter().enumerate() {
                        path.push(i);
                        walk(g, path, out);
                        path.pop();
                    }
                }
                Family::Schematic { indices, .. } => {
                    if indices.is_infinite() {
                        out.push(path.clone());
                    }
                }
            },
        }
    }
    let mut out = Vec::new();
    walk(f, &mut Vec::new(), &mut out);
    out
}

/// `D[⋀_{n∈ℕ}<x>^n T]` for a few contexts `D` and both actions, together
/// with every finite sub-conjunction over `J ⊆ {0..max_states}`.
pub fn power_family_characterization(corpus: &Corpus) -> Vec<Formula> {
    let (a, b) = (act("a"), act("b"));
    let contexts = [
        Context::hole(),
        Context::new(vec![Frame::Diamond(a.clone())]),
        Context::new(vec![Frame::Diamond(b.clone())]),
        Context::new(vec![Frame::Diamond(a.clone()), Frame::Diamond(b.clone())]),
        Context::new(vec![Frame::And {
            left: vec![Formula::diamond(b.clone(), Formula::True)],
            right: vec![],
        }]),
        Context::new(vec![Frame::Not]),
    ];
    let mut out = Vec::new();
    for x in [a, b] {
        let fam = Formula::schematic(Formula::power(x, Formula::True), IndexSet::All);
        for d in &contexts {
            let f = d.substitute(fam.clone());
            let subs = finite_subconjunctions(&f, &hole_address(d), corpus.max_states())
                .expect("the hole holds the family");
            out.push(f);
            out.extend(subs);
        }
    }
    out
}

/// `∼_O` and `∼_{O_FIN}` (or `∼_{O_FDP}`) coincide on all pairs of corpus
/// roots, provided `O` contains the finite sub-conjunctions of its
/// infinite members.
pub fn check_thm_hml(
    corpus: &Corpus,
    o: &[Formula],
    mode: ThmMode,
    seed: u64,
) -> Result<CheckReport, HarnessError> {
    let name = match mode {
        ThmMode::Fin => "thm-hml-fin",
        ThmMode::Fdp => "thm-hml-fdp",
    };
    let mut r = CheckReport::new(name, seed);
    let members: HashSet<&Formula> = o.iter().collect();
    for f in o {
        for addr in infinite_addresses(f) {
            for sub in finite_subconjunctions(f, &addr, corpus.max_states())? {
                if !members.contains(&sub) {
                    let w = Witness::note(format!("missing finite sub-conjunction {sub}"));
                    return Ok(r.vacuous(w.with_formula(f)));
                }
            }
        }
    }
    let finitary: Vec<&Formula> = o
        .iter()
        .filter(|f| match mode {
            ThmMode::Fin => f.is_finitary(),
            ThmMode::Fdp => f.depth().is_finite(),
        })
        .collect();
    let space = corpus.space(0);
    let sats: Vec<FixedBitSet> = o.iter().map(|f| space.sat(f)).collect::<Result<_, _>>()?;
    let fin_sats: Vec<FixedBitSet> =
        finitary.iter().map(|f| space.sat(f)).collect::<Result<_, _>>()?;
    let roots = corpus.roots();
    let (full, fin) = (classes(&sats, &roots), classes(&fin_sats, &roots));
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            r.trials += 1;
            if (full[i] == full[j]) != (fin[i] == fin[j]) {
                let (u, v) = (roots[i], roots[j]);
                let f = match separating(&sats, u, v) {
                    Some(k) => o[k].to_string(),
                    None => finitary[separating(&fin_sats, u, v).expect("differ")].to_string(),
                };
                return Ok(r.fail(corpus.witness(&[u, v]).with_formula(f)));
            }
        }
    }
    Ok(r)
}

/// Inverted controls for the characterization theorem: a characterization
/// that is not closed under finite sub-conjunctions, and the
/// non-image-finite fixture pair. Passes only if both diverge as expected.
pub fn check_thm_hml_controls(corpus: &Corpus, seed: u64) -> Result<CheckReport, HarnessError> {
    let mut r = CheckReport::new("thm-hml-controls", seed);
    let lone = vec![a_forever()];
    r.trials = 2;
    let closure = check_thm_hml(corpus, &lone, ThmMode::Fin, seed)?;
    if closure.verdict != super::Outcome::Vacuous {
        return Ok(r.fail(Witness::note("closure test accepted a lone infinite conjunction")));
    }
    // O_FIN is empty, so only the infinite member can separate anything
    let (lp, dl) = (a_loop(), deadlock());
    let f = &lone[0];
    let apart = EvalEnvironment::new(lp.clone()).satisfies(lp.initial(), f)?
        != EvalEnvironment::new(dl.clone()).satisfies(dl.initial(), f)?;
    let w = Witness {
        system: "a-loop | deadlock".into(),
        states: vec!["0".into(), "0".into()],
        formula: Some(f.to_string()),
        note: None,
    };
    if !apart {
        return Ok(r.fail(w.with_note("lone infinite conjunction does not separate")));
    }
    match fixture_divergence(8)? {
        Ok(_) => {
            r.witness = Some(w.with_note("O separates, empty O_FIN is universal; fixtures diverge"));
            Ok(r)
        }
        Err(w) => Ok(r.fail(w)),
    }
}

/// Bisimulation characterization at bound `|S1| + |S2|` against partition
/// refinement, on every pair of corpus roots and on random pairs.
pub fn check_hml_desk(
    corpus: &Corpus,
    seed: u64,
    random_pairs: usize,
) -> Result<CheckReport, HarnessError> {
    let mut r = CheckReport::new("hml-desk-check", seed);
    let systems: Vec<TransitionSystem> =
        corpus.systems().iter().map(|l| l.clone().into()).collect();
    let mut g = Gen::new(salted(seed, &r.name), &ab());
    let mut pairs: Vec<(TransitionSystem, TransitionSystem, String)> = Vec::new();
    for _ in 0..random_pairs {
        let l = g.system(6);
        let m = if g.rng().gen_bool(0.5) {
            g.shuffled(&l)
        } else {
            g.system(6)
        };
        pairs.push((l.into(), m.into(), "random pair".into()));
    }
    let agree = |ts1: &TransitionSystem, ts2: &TransitionSystem| -> Result<bool, HarnessError> {
        let bound = ts1.state_count().unwrap_or(0) + ts2.state_count().unwrap_or(0);
        let (s, t) = (ts1.initial(), ts2.initial());
        let v = equivalent_under(SemanticsId::Bisimulation, ts1, s, ts2, t, bound)?;
        Ok(v.equivalent == bisimilar(ts1, s, ts2, t)?)
    };
    for i in 0..systems.len() {
        for j in i + 1..systems.len() {
            r.trials += 1;
            if !agree(&systems[i], &systems[j])? {
                let roots = corpus.roots();
                return Ok(r.fail(corpus.witness(&[roots[i], roots[j]])));
            }
        }
    }
    for (ts1, ts2, label) in &pairs {
        r.trials += 1;
        if !agree(ts1, ts2)? {
            let w = Witness::note(format!("{label}: {ts1:?} vs {ts2:?}"));
            return Ok(r.fail(w));
        }
    }
    Ok(r)
}

/// `s ⊨ φ` iff `s ⊨ P(φ)`, the complement negates, and double complement
/// is the identity, for random formulas of depth at most 3.
pub fn check_translation(
    corpus: &Corpus,
    seed: u64,
    count: usize,
) -> Result<CheckReport, HarnessError> {
    let mut r = CheckReport::new("translation-coherence", seed);
    let mut g = Gen::new(salted(seed, &r.name), &ab());
    let space: StateSpace = corpus.space(0);
    for _ in 0..count {
        let f = g.formula(3);
        let p = to_positive(&f);
        r.trials += 1;
        if p.complement().complement() != p {
            return Ok(r.fail(Witness::note("double complement changed the formula").with_formula(&p)));
        }
        let x = space.sat(&f)?;
        if let Some(v) = diff(&x, &space.sat_pos(&p)?) {
            return Ok(r.fail(corpus.witness(&[v]).with_formula(&f)));
        }
        let mut y = space.sat_pos(&p.complement())?;
        y.toggle_range(..);
        if let Some(v) = diff(&x, &y) {
            let w = corpus.witness(&[v]).with_formula(p.complement());
            return Ok(r.fail(w.with_note("complement does not negate")));
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn addresses() {
        let f = Formula::diamond(act("a"), Formula::and(vec![Formula::True, a_forever()]));
        assert_eq!(infinite_addresses(&f), vec![vec![0, 1]]);
        let ctx = Context::new(vec![Frame::Not, Frame::And { left: vec![Formula::True], right: vec![] }]);
        assert_eq!(hole_address(&ctx), vec![0, 1]);
    }

    #[test]
    fn fixture_divergence_holds() {
        assert!(fixture_divergence(5).unwrap().is_ok());
    }
}
