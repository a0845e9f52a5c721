//! `hml`: evaluate Hennessy-Milner formulas, compare processes, and run the
//! theorem checks from the command line.
//!
//! Exit codes: 0 for success or `true`, 1 for `false` or distinguished, 2 for
//! usage and input errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use hml_core::aut::{read_aut, AutError};
use hml_core::eval::{EvalEnvironment, EvalError};
use hml_core::formula::{parse_any, AnyFormula, ParseError};
use hml_core::harness::{all_passed, run_all, HarnessError};
use hml_core::lts::{counterexample_pair, LtsError, StateRef, TransitionSystem};
use hml_core::spectrum::{equivalent_under, SemanticsId, SpectrumError};

#[derive(Parser)]
#[command(name = "hml", version, about = "Hennessy-Milner logic over labelled transition systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a state satisfies a formula.
    Eval {
        /// An `.aut` file, `@left-counterexample` or `@right-counterexample`.
        #[arg(long)]
        lts: String,
        /// A state id, `root`, `chain(n)`, `omega` or `pi_n(state)`;
        /// defaults to the initial state.
        #[arg(long)]
        state: Option<String>,
        #[arg(long)]
        formula: String,
    },
    /// Compare two states under a spectrum semantics.
    Equiv {
        #[arg(long)]
        lts1: String,
        #[arg(long)]
        lts2: String,
        #[arg(long)]
        state1: Option<String>,
        #[arg(long)]
        state2: Option<String>,
        #[arg(long)]
        semantics: String,
        /// Spine bound of the characterization; defaults to `|S1|+|S2|` for
        /// branching semantics and `|S1|·|S2|` otherwise.
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Print the transitions reachable from `π_n(state)`.
    Project {
        #[arg(long)]
        lts: String,
        #[arg(long)]
        state: Option<String>,
        #[arg(long)]
        n: usize,
    },
    /// Print `cut_n` of a formula.
    Cut {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        formula: String,
    },
    /// Verdicts of every semantics on a pair of states.
    SpectrumReport {
        #[arg(long)]
        lts1: String,
        #[arg(long)]
        lts2: String,
        #[arg(long)]
        state1: Option<String>,
        #[arg(long)]
        state2: Option<String>,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Run every theorem check and print one report line per check.
    CheckAll {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the reports as JSON to this file.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Aut { path: PathBuf, source: AutError },
    #[error("formula, line {}, column {}: {}", .0.line, .0.column, .0.message)]
    Parse(ParseError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lts(#[from] LtsError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
}

fn load(spec: &str) -> Result<TransitionSystem, CliError> {
    match spec {
        "@left-counterexample" => return Ok(counterexample_pair().0),
        "@right-counterexample" => return Ok(counterexample_pair().1),
        _ => {}
    }
    if spec.starts_with('@') {
        return Err(CliError::Usage(format!(
            "unknown reserved system `{spec}`; use @left-counterexample or @right-counterexample"
        )));
    }
    let path = Path::new(spec);
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let lts = read_aut(&text).map_err(|source| CliError::Aut {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(lts.into())
}

fn state(ts: &TransitionSystem, arg: Option<&str>) -> Result<StateRef, CliError> {
    let r = match arg {
        Some(text) => text.parse::<StateRef>()?,
        None => StateRef::plain(ts.initial()),
    };
    if !ts.contains(r.state) {
        return Err(LtsError::UnknownState(r.state).into());
    }
    Ok(r)
}

fn default_bound(sem: SemanticsId, ts1: &TransitionSystem, ts2: &TransitionSystem) -> Result<usize, CliError> {
    let (Some(n1), Some(n2)) = (ts1.state_count(), ts2.state_count()) else {
        return Err(CliError::Usage("--bound is required for family systems".into()));
    };
    Ok(match sem {
        SemanticsId::Simulation | SemanticsId::ReadySimulation | SemanticsId::Bisimulation => n1 + n2,
        _ => n1 * n2,
    })
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Eval {
            lts,
            state: s,
            formula,
        } => {
            let f = parse_any(&formula).map_err(CliError::Parse)?;
            let ts = load(&lts)?;
            let s = state(&ts, s.as_deref())?;
            let holds = EvalEnvironment::new(ts).satisfies_any(s, &f)?;
            println!("{holds}");
            Ok(if holds { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Equiv {
            lts1,
            lts2,
            state1,
            state2,
            semantics,
            bound,
        } => {
            let sem: SemanticsId = semantics.parse()?;
            let (ts1, ts2) = (load(&lts1)?, load(&lts2)?);
            let (s, t) = (state(&ts1, state1.as_deref())?, state(&ts2, state2.as_deref())?);
            let bound = match bound {
                Some(b) => b,
                None => default_bound(sem, &ts1, &ts2)?,
            };
            let v = equivalent_under(sem, &ts1, s, &ts2, t, bound)?;
            if v.equivalent {
                println!("equivalent under {sem} (bound {bound})");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("distinguished under {sem} (bound {bound})");
                if let Some(w) = v.witness {
                    println!("witness: {w}");
                }
                Ok(ExitCode::from(1))
            }
        }
        Command::Project { lts, state: s, n } => {
            let ts = load(&lts)?;
            let s = state(&ts, s.as_deref())?;
            let root = ts.project(s.state, s.budget.map_or(n, |b| b.min(n)));
            println!("{root}");
            for (p, a, q) in ts.projected_transitions(root)? {
                println!("({p}, \"{a}\", {q})");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Cut { n, formula } => {
            match parse_any(&formula).map_err(CliError::Parse)? {
                AnyFormula::Hml(f) => println!("{}", f.cut(n)),
                AnyFormula::Pos(f) => println!("{}", f.cut(n)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::SpectrumReport {
            lts1,
            lts2,
            state1,
            state2,
            bound,
        } => {
            let (ts1, ts2) = (load(&lts1)?, load(&lts2)?);
            let (s, t) = (state(&ts1, state1.as_deref())?, state(&ts2, state2.as_deref())?);
            println!("{:<18} {:<16} {:<16} witness", "semantics", "formulas", "decider");
            for sem in SemanticsId::ALL {
                let bound = match bound {
                    Some(b) => b,
                    None => default_bound(sem, &ts1, &ts2)?,
                };
                let v = equivalent_under(sem, &ts1, s, &ts2, t, bound)?;
                let direct = if ts1.is_finite() && ts2.is_finite() {
                    verdict(sem.decide(&ts1, s, &ts2, t)?)
                } else {
                    "-"
                };
                let witness = v.witness.map(|w| w.to_string()).unwrap_or_default();
                println!("{:<18} {:<16} {:<16} {witness}", sem.name(), verdict(v.equivalent), direct);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckAll { seed, json } => {
            let reports = run_all(seed)?;
            for r in &reports {
                println!("{r}");
            }
            if let Some(path) = json {
                let text = serde_json::to_string_pretty(&reports).expect("reports serialize");
                fs::write(&path, text + "\n").map_err(|source| CliError::Io { path, source })?;
            }
            Ok(if all_passed(&reports) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn verdict(equivalent: bool) -> &'static str {
    if equivalent {
        "equivalent"
    } else {
        "distinguished"
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
