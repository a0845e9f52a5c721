//! Projections, the cut lemma, approximation induction and its converse.

use fixedbitset::FixedBitSet;
use rand::Rng;

use super::gen::Gen;
use super::{classes, salted, separating, CheckReport, Corpus, HarnessError, Outcome, Witness};
use crate::eval::StateSpace;
use crate::formula::{parse_formula, Formula, IndexSet};
use crate::lts::{act, State, StateRef, TransitionSystem};
use crate::spectrum::{reachable_action, Characterization, SemanticsId};

fn layer(space: &StateSpace, v: usize, k: usize) -> usize {
    (k + 1) * (space.len() / (space.cap() + 2)) + v
}

fn fixed(texts: &[&str]) -> Vec<Formula> {
    texts
        .iter()
        .map(|t| parse_formula(t).expect("fixed formulas parse"))
        .collect()
}

/// `s ⊨ φ` iff `π_n(s) ⊨ φ` for `n` in `d(φ)..=d(φ)+3`, over every corpus
/// state and random finite-depth formulas of depth at most 4. Also records
/// a state where some `π_n` with `n < d(φ)` disagrees.
pub fn check_bounded_form(
    corpus: &Corpus,
    seed: u64,
    count: usize,
) -> Result<CheckReport, HarnessError> {
    let mut r = CheckReport::new("bounded-form", seed);
    let mut g = Gen::new(salted(seed, &r.name), &[act("a"), act("b")]);
    let space = corpus.space(7);
    let n = corpus.union().num_states();
    let mut formulas = fixed(&["T", "<a> T", "not <a> T"]);
    formulas.extend((0..count).map(|_| g.formula(4)));
    let mut tight: Option<Witness> = None;
    for f in &formulas {
        let d = f.depth().finite().expect("generated formulas have finite depth");
        let x = space.sat(f)?;
        r.trials += 1;
        for s in 0..n {
            for k in d..=d + 3 {
                if x.contains(s) != x.contains(layer(&space, s, k)) {
                    let w = corpus.witness(&[s, layer(&space, s, k)]).with_formula(f);
                    return Ok(r.fail(w));
                }
            }
            if tight.is_none() {
                if let Some(k) = (0..d).find(|k| x.contains(s) != x.contains(layer(&space, s, *k))) {
                    let w = corpus.witness(&[s, layer(&space, s, k)]).with_formula(f);
                    tight = Some(w.with_note("projection below the depth disagrees"));
                }
            }
        }
    }
    match tight {
        Some(w) => {
            r.witness = Some(w);
            Ok(r)
        }
        None => Ok(r.fail(Witness::note("no projection below the depth ever disagreed"))),
    }
}

/// `π_n(s) ⊨ φ` iff `s ⊨ cut_n(φ)` for `n ≤ 5`, every corpus state, and
/// random formulas of depth at most 4, some of them with infinite
/// conjunctions. Also `d(cut_n(φ)) ≤ n`.
pub fn check_cut_lemma(
    corpus: &Corpus,
    seed: u64,
    count: usize,
) -> Result<CheckReport, HarnessError> {
    const N: usize = 5;
    let mut r = CheckReport::new("cut-lemma", seed);
    let mut g = Gen::new(salted(seed, &r.name), &[act("a"), act("b")]);
    let space = corpus.space(N);
    let n = corpus.union().num_states();
    let mut formulas = fixed(&["<a> T", "T", "not <a> <a> T", "AND{n in N} <a>^n T"]);
    for _ in 0..count {
        let f = if g.rng().gen_bool(0.2) {
            let d = g.context(2);
            let tpl = g.template(1);
            d.substitute(Formula::schematic(tpl, IndexSet::All))
        } else {
            g.formula(4)
        };
        formulas.push(f);
    }
    for f in &formulas {
        let x = space.sat(f)?;
        for k in 0..=N {
            r.trials += 1;
            let c = f.cut(k);
            if c.depth().finite().is_none_or(|d| d > k) {
                return Ok(r.fail(Witness::note(format!("cut_{k} too deep")).with_formula(f)));
            }
            let y = space.sat(&c)?;
            if let Some(s) = (0..n).find(|s| x.contains(layer(&space, *s, k)) != y.contains(*s)) {
                let w = corpus.witness(&[layer(&space, s, k), s]).with_formula(f);
                return Ok(r.fail(w.with_note(format!("cut_{k}: {c}"))));
            }
        }
    }
    Ok(r)
}

/// For all pairs of corpus roots: if every projection up to `n_max` agrees
/// on `sats`, the roots agree too.
fn aip_over(
    corpus: &Corpus,
    space: &StateSpace,
    sats: &[FixedBitSet],
    formula: impl Fn(usize) -> String,
    n_max: usize,
    r: &mut CheckReport,
) -> Option<Witness> {
    let roots = corpus.roots();
    let mut nodes = roots.clone();
    for k in 0..=n_max {
        nodes.extend(roots.iter().map(|v| layer(space, *v, k)));
    }
    let ids = classes(sats, &nodes);
    let m = roots.len();
    for i in 0..m {
        for j in i + 1..m {
            r.trials += 1;
            let projections_agree = (1..=n_max + 1).all(|l| ids[l * m + i] == ids[l * m + j]);
            if projections_agree && ids[i] != ids[j] {
                let f = separating(sats, roots[i], roots[j]).map(&formula);
                let mut w = corpus.witness(&[roots[i], roots[j]]);
                w.formula = f;
                return Some(w.with_note(format!("all projections up to {n_max} agree")));
            }
        }
    }
    None
}

/// AIP for the characterization of `sem`, generated relative to the corpus
/// with spine bound `n_max - 1`.
pub fn check_aip(
    sem: SemanticsId,
    corpus: &Corpus,
    n_max: usize,
    seed: u64,
) -> Result<CheckReport, HarnessError> {
    let mut r = CheckReport::new(&format!("aip-{}", sem.name()), seed);
    let c = Characterization::generate(sem, corpus.union(), n_max, n_max.saturating_sub(1))?;
    match c.set().max_depth() {
        Some(d) if d <= n_max => {}
        d => {
            let note = format!("characterization depth {d:?} exceeds the horizon {n_max}");
            return Ok(r.vacuous(Witness::note(note)));
        }
    }
    let sats: Vec<FixedBitSet> = (0..c.formulas().len()).map(|i| c.sat(i).clone()).collect();
    let label = |i: usize| c.formulas()[i].to_string();
    if let Some(w) = aip_over(corpus, c.space(), &sats, label, n_max, &mut r) {
        return Ok(r.fail(w));
    }
    Ok(r)
}

/// AIP for an explicit characterization. Vacuous when some member has
/// infinite depth.
pub fn check_aip_formulas(
    name: &str,
    corpus: &Corpus,
    o: &[Formula],
    n_max: usize,
    seed: u64,
) -> Result<CheckReport, HarnessError> {
    let mut r = CheckReport::new(name, seed);
    if let Some(f) = o.iter().find(|f| !f.depth().is_finite()) {
        let w = Witness::note("member of infinite depth").with_formula(f);
        return Ok(r.vacuous(w));
    }
    let space = corpus.space(n_max);
    let sats: Vec<FixedBitSet> = o.iter().map(|f| space.sat(f)).collect::<Result<_, _>>()?;
    if let Some(w) = aip_over(corpus, &space, &sats, |i| o[i].to_string(), n_max, &mut r) {
        return Ok(r.fail(w));
    }
    Ok(r)
}

/// Inverted control: with `O = {⋀_{n∈ℕ}<a>^n T}` the `a`-loop and the
/// deadlock have indistinguishable projections but are distinguished.
pub fn check_aip_non_fdp_control(
    corpus: &Corpus,
    n_max: usize,
    seed: u64,
) -> Result<CheckReport, HarnessError> {
    let mut r = CheckReport::new("aip-non-fdp-control", seed);
    let o = vec![parse_formula("AND{n in N} <a>^n T").expect("valid")];
    let plain = check_aip_formulas("aip-infinite", corpus, &o, n_max, seed)?;
    if plain.verdict != Outcome::Vacuous {
        return Ok(r.fail(Witness::note("infinite-depth characterization was not flagged")));
    }
    let (Some(lp), Some(dl)) = (corpus.find("a-loop"), corpus.find("deadlock")) else {
        return Ok(r.vacuous(Witness::note("corpus lacks the a-loop or the deadlock")));
    };
    let roots = corpus.roots();
    let (u, v) = (roots[lp], roots[dl]);
    let space = corpus.space(n_max);
    let x = space.sat(&o[0])?;
    r.trials = n_max + 2;
    let w = corpus.witness(&[u, v]).with_formula(&o[0]);
    if (0..=n_max).any(|k| x.contains(layer(&space, u, k)) || x.contains(layer(&space, v, k))) {
        return Ok(r.fail(w.with_note("some projection satisfies the infinite conjunction")));
    }
    if x.contains(u) == x.contains(v) {
        return Ok(r.fail(w.with_note("the infinite conjunction does not separate")));
    }
    r.witness = Some(w.with_note(format!("projections up to {n_max} agree, the states do not")));
    Ok(r)
}

/// If `∼_O` is compositional for projections on the corpus, it coincides
/// with `∼_{O_1}` where `O_1` collects `cut_n(φ)` for `φ ∈ O`, `n ≤ n_max`.
/// Vacuous, with the offending pair, when compositionality fails.
pub fn check_necessity(
    sem: SemanticsId,
    corpus: &Corpus,
    n_max: usize,
    seed: u64,
) -> Result<CheckReport, HarnessError> {
    let mut r = CheckReport::new(&format!("necessity-{}", sem.name()), seed);
    let c = Characterization::generate(sem, corpus.union(), n_max, n_max)?;
    let space = c.space();
    let sats: Vec<FixedBitSet> = (0..c.formulas().len()).map(|i| c.sat(i).clone()).collect();
    let roots = corpus.roots();
    let m = roots.len();
    let mut nodes = roots.clone();
    for k in 0..=n_max {
        nodes.extend(roots.iter().map(|v| layer(space, *v, k)));
    }
    let ids = classes(&sats, &nodes);
    for i in 0..m {
        for j in i + 1..m {
            if ids[i] != ids[j] {
                continue;
            }
            r.trials += 1;
            if let Some(k) = (0..=n_max).find(|k| ids[(k + 1) * m + i] != ids[(k + 1) * m + j]) {
                let w = corpus.witness(&[roots[i], roots[j]]);
                let note = format!("equivalent, but their projections pi_{k} are not");
                return Ok(r.vacuous(w.with_note(note)));
            }
        }
    }
    if sem == SemanticsId::Trace {
        for f in c.formulas() {
            let d = f.depth().finite().expect("trace formulas have finite depth");
            if f.cut(d) != *f {
                return Ok(r.fail(Witness::note("cut at the depth changed a trace").with_formula(f)));
            }
        }
    }
    let plain = corpus.space(0);
    let mut cut_sats: Vec<FixedBitSet> = Vec::new();
    for f in c.formulas() {
        for k in 0..=n_max {
            cut_sats.push(plain.sat(&f.cut(k))?);
        }
    }
    let o1 = classes(&cut_sats, &roots);
    r.trials = 0;
    for i in 0..m {
        for j in i + 1..m {
            r.trials += 1;
            if (ids[i] == ids[j]) != (o1[i] == o1[j]) {
                let w = corpus.witness(&[roots[i], roots[j]]);
                return Ok(r.fail(w.with_note("O and its cut image disagree")));
            }
        }
    }
    Ok(r)
}

/// AIP for agreement on `E<a>T` per action, decided by search on each
/// projection.
pub fn check_reachability_soundness(
    corpus: &Corpus,
    n_max: usize,
    seed: u64,
) -> Result<CheckReport, HarnessError> {
    let mut r = CheckReport::new("reachability-soundness", seed);
    let union = corpus.union();
    let ts: TransitionSystem = union.clone().into();
    let bound = union.num_states();
    let profile = |v: usize, budget: Option<usize>| -> Result<Vec<bool>, HarnessError> {
        let s = StateRef {
            state: State::Id(v),
            budget,
        };
        union
            .alphabet()
            .iter()
            .map(|a| Ok(reachable_action(&ts, s, a, bound)?))
            .collect()
    };
    let roots = corpus.roots();
    let mut table = Vec::with_capacity(roots.len());
    for v in &roots {
        let mut row = vec![profile(*v, None)?];
        for k in 0..=n_max {
            row.push(profile(*v, Some(k))?);
        }
        table.push(row);
    }
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            r.trials += 1;
            let projections_agree = (1..=n_max + 1).all(|l| table[i][l] == table[j][l]);
            if projections_agree && table[i][0] != table[j][0] {
                return Ok(r.fail(corpus.witness(&[roots[i], roots[j]])));
            }
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lts::FiniteLts;

    #[test]
    fn layer_arithmetic() {
        let l = FiniteLts::new(3, 0, vec![]).unwrap();
        let space = StateSpace::new(&l, 4);
        for k in 0..=4 {
            let r = StateRef::plain(State::Id(2)).project(k);
            assert_eq!(space.node(r).unwrap(), layer(&space, 2, k));
        }
    }
}
