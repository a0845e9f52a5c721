//! Executable checks of the compactness, characterization, projection and
//! approximation-induction results over a fixed corpus of small systems.
//!
//! Each check returns a [`CheckReport`]. Two checks are inverted controls:
//! they pass only when the expected divergence actually shows up.

mod approx;
mod compact;
pub mod gen;

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::Serialize;
use thiserror::Error;

use crate::eval::{EvalError, StateSpace};
use crate::formula::FormulaError;
use crate::lts::{a_loop, act, deadlock, FiniteLts, LtsError, State, StateRef};
use crate::spectrum::{SemanticsId, SpectrumError};
use crate::term::enumerate_terms;

pub use approx::{
    check_aip, check_aip_formulas, check_aip_non_fdp_control, check_bounded_form,
    check_cut_lemma, check_necessity, check_reachability_soundness,
};
pub use compact::{
    check_conjunction_compactness, check_counterexample, check_disjunction_compactness,
    check_hml_desk, check_negation_compactness, check_thm_hml, check_thm_hml_controls,
    check_translation, power_family_characterization, ThmMode,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Lts(#[from] LtsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Vacuous,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Vacuous => "vacuous",
        })
    }
}

/// Where a check found something: systems, states and a formula.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub system: String,
    pub states: Vec<String>,
    pub formula: Option<String>,
    pub note: Option<String>,
}

impl Witness {
    pub fn note(text: impl Into<String>) -> Self {
        Witness {
            note: Some(text.into()),
            ..Witness::default()
        }
    }

    fn with_formula(mut self, f: impl ToString) -> Self {
        self.formula = Some(f.to_string());
        self
    }

    fn with_note(mut self, text: impl Into<String>) -> Self {
        self.note = Some(text.into());
        self
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.system.is_empty() {
            parts.push(format!("system: {}", self.system));
        }
        if !self.states.is_empty() {
            parts.push(format!("states: {}", self.states.join(", ")));
        }
        if let Some(x) = &self.formula {
            parts.push(format!("formula: {x}"));
        }
        if let Some(x) = &self.note {
            parts.push(x.clone());
        }
        write!(f, "[{}]", parts.join("; "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub verdict: Outcome,
    pub trials: usize,
    pub witness: Option<Witness>,
    pub seed: u64,
}

impl CheckReport {
    fn new(name: &str, seed: u64) -> Self {
        CheckReport {
            name: name.to_string(),
            verdict: Outcome::Pass,
            trials: 0,
            witness: None,
            seed,
        }
    }

    fn fail(mut self, w: Witness) -> Self {
        self.verdict = Outcome::Fail;
        self.witness = Some(w);
        self
    }

    fn vacuous(mut self, w: Witness) -> Self {
        self.verdict = Outcome::Vacuous;
        self.witness = Some(w);
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Outcome::Pass
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.name, self.verdict, self.trials, self.seed)?;
        if let Some(w) = &self.witness {
            write!(f, " {w}")?;
        }
        Ok(())
    }
}

/// Named finite systems placed side by side in one union.
pub struct Corpus {
    names: Vec<String>,
    systems: Vec<FiniteLts>,
    union: FiniteLts,
    offsets: Vec<usize>,
}

impl Corpus {
    pub fn new(entries: Vec<(String, FiniteLts)>) -> Self {
        let (names, systems): (Vec<_>, Vec<_>) = entries.into_iter().unzip();
        let refs: Vec<&FiniteLts> = systems.iter().collect();
        let (union, offsets) = FiniteLts::disjoint_union(&refs);
        Corpus {
            names,
            systems,
            union,
            offsets,
        }
    }

    /// Every process term with at most four prefixes over `{a, b}`, plus a
    /// handful of cyclic systems, the `a`-loop and the deadlock.
    pub fn standard() -> Self {
        let ab = [act("a"), act("b")];
        let mut entries: Vec<(String, FiniteLts)> = enumerate_terms(&ab, 4)
            .into_iter()
            .map(|t| {
                let ts = t.to_lts();
                (t.to_string(), ts.as_finite().expect("terms are finite").clone())
            })
            .collect();
        let sys = |n: usize, edges: &[(usize, &str, usize)]| {
            FiniteLts::new(n, 0, edges.iter().map(|(s, a, t)| (*s, act(a), *t)).collect())
                .expect("valid")
        };
        let finite = |ts: crate::lts::TransitionSystem| ts.as_finite().expect("finite").clone();
        entries.extend([
            ("a-loop".to_string(), finite(a_loop())),
            ("deadlock".to_string(), finite(deadlock())),
            ("a-cycle-2".to_string(), sys(2, &[(0, "a", 1), (1, "a", 0)])),
            ("ab-cycle".to_string(), sys(2, &[(0, "a", 1), (1, "b", 0)])),
            ("a-loop-b-exit".to_string(), sys(2, &[(0, "a", 0), (0, "b", 1)])),
            ("a-loop-or-stop".to_string(), sys(2, &[(0, "a", 0), (0, "a", 1)])),
            (
                "a-chain-5".to_string(),
                sys(6, &[(0, "a", 1), (1, "a", 2), (2, "a", 3), (3, "a", 4), (4, "a", 5)]),
            ),
        ]);
        Corpus::new(entries)
    }

    pub fn len(&self) -> usize {
        self.systems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.systems.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn systems(&self) -> &[FiniteLts] {
        &self.systems
    }

    pub fn union(&self) -> &FiniteLts {
        &self.union
    }

    pub fn max_states(&self) -> usize {
        self.systems.iter().map(FiniteLts::num_states).max().unwrap_or(0)
    }

    /// Projection horizon for the approximation checks: twice the largest
    /// system.
    pub fn n_max(&self) -> usize {
        2 * self.max_states()
    }

    /// Union ids of the initial states, one per system.
    pub fn roots(&self) -> Vec<usize> {
        self.systems
            .iter()
            .zip(&self.offsets)
            .map(|(l, off)| off + l.initial())
            .collect()
    }

    /// Index of a system by name.
    pub fn find(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// The system and local state behind a node of a state space built on
    /// the union.
    pub fn locate(&self, node: usize) -> (usize, StateRef) {
        let n = self.union.num_states();
        let (layer, s) = (node / n, node % n);
        let sys = self.offsets.partition_point(|off| *off <= s) - 1;
        let local = State::Id(s - self.offsets[sys]);
        let r = StateRef {
            state: local,
            budget: layer.checked_sub(1),
        };
        (sys, r)
    }

    fn witness(&self, nodes: &[usize]) -> Witness {
        let mut systems: Vec<&str> = Vec::new();
        let mut states = Vec::new();
        for v in nodes {
            let (sys, r) = self.locate(*v);
            if !systems.contains(&self.names[sys].as_str()) {
                systems.push(&self.names[sys]);
            }
            states.push(r.to_string());
        }
        Witness {
            system: systems.join(" | "),
            states,
            formula: None,
            note: None,
        }
    }

    fn space(&self, cap: usize) -> StateSpace {
        StateSpace::new(&self.union, cap)
    }
}

/// Class ids of `nodes` by their membership in every set of `sats`,
/// numbered in order of first appearance.
fn classes(sats: &[FixedBitSet], nodes: &[usize]) -> Vec<usize> {
    let mut ids = vec![0usize; nodes.len()];
    for x in sats {
        let mut table = HashMap::new();
        for (i, v) in nodes.iter().enumerate() {
            let fresh = table.len();
            ids[i] = *table.entry((ids[i], x.contains(*v))).or_insert(fresh);
        }
    }
    ids
}

/// The first set telling `u` and `v` apart.
fn separating(sats: &[FixedBitSet], u: usize, v: usize) -> Option<usize> {
    sats.iter().position(|x| x.contains(u) != x.contains(v))
}

fn salted(seed: u64, salt: &str) -> u64 {
    salt.bytes()
        .fold(seed ^ 0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

/// Runs every check on the standard corpus.
pub fn run_all(seed: u64) -> Result<Vec<CheckReport>, HarnessError> {
    let corpus = Corpus::standard();
    let n_max = corpus.n_max();
    let mut out = vec![
        check_counterexample(seed)?,
        check_conjunction_compactness(&corpus, seed, 1000)?,
        check_disjunction_compactness(&corpus, seed, 1000)?,
        check_negation_compactness(&corpus, seed, 1000)?,
        check_thm_hml(&corpus, &power_family_characterization(&corpus), ThmMode::Fin, seed)?,
        check_thm_hml(&corpus, &power_family_characterization(&corpus), ThmMode::Fdp, seed)?,
        check_thm_hml_controls(&corpus, seed)?,
        check_hml_desk(&corpus, seed, 200)?,
        check_bounded_form(&corpus, seed, 400)?,
        check_cut_lemma(&corpus, seed, 300)?,
    ];
    for sem in &SemanticsId::ALL[..7] {
        out.push(check_aip(*sem, &corpus, n_max, seed)?);
    }
    out.push(check_aip_non_fdp_control(&corpus, n_max, seed)?);
    for sem in [
        SemanticsId::Bisimulation,
        SemanticsId::Trace,
        SemanticsId::ReachabilityExample,
    ] {
        out.push(check_necessity(sem, &corpus, n_max, seed)?);
    }
    out.push(check_reachability_soundness(&corpus, n_max, seed)?);
    out.push(check_translation(&corpus, seed, 500)?);
    Ok(out)
}

/// Whether the reports add up to a successful run: no failures, and the
/// only vacuous check is the reachability necessity probe, whose hypothesis
/// is expected not to hold.
pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| match r.verdict {
        Outcome::Pass => true,
        Outcome::Vacuous => r.name == "necessity-reachability",
        Outcome::Fail => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_shape() {
        let c = Corpus::standard();
        assert_eq!(c.len(), 143 + 7);
        assert!(c.max_states() <= 6);
        assert!(c.find("a-loop").is_some());
        let (sys, r) = c.locate(c.roots()[c.find("deadlock").unwrap()]);
        assert_eq!(c.names()[sys], "deadlock");
        assert_eq!(r, StateRef::plain(State::Id(0)));
    }

    #[test]
    fn class_numbering() {
        let mut x = FixedBitSet::with_capacity(4);
        x.insert(1);
        x.insert(3);
        assert_eq!(classes(&[x.clone()], &[0, 1, 2, 3]), vec![0, 1, 0, 1]);
        assert_eq!(separating(&[x], 0, 1), Some(0));
    }

    #[test]
    fn report_line() {
        let r = CheckReport::new("demo", 5).fail(Witness::note("boom").with_formula("T"));
        assert_eq!(r.to_string(), "demo fail 0 5 [formula: T; boom]");
    }
}
