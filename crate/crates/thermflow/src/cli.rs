//! Command-line driver: `sim`, `search`, `find-earliest`, and `mc`.
//!
//! Every command loads a scene (`--scene path/to/file.scene` or
//! `--scene builtin:cs1`), optionally overrides its time step, and prints
//! deterministic output: the same invocation yields byte-identical bytes.
//! Exit codes: 0 for success (including "holds" and "found"), 1 for a
//! decided negative ("no solution", "violated"), 2 for usage, parse, and
//! file problems, 3 for engine diagnostics (livelock, inconclusive
//! searches, evaluation failures).

use crate::analysis::{
    self, columns, parse_formula, Column, McOutcome, SearchOptions, SearchOutcome, Trace,
    DEFAULT_STEP_CAP,
};
use crate::model::SystemState;
use crate::numeric::Rat;
use crate::scene::{self, parse_predicate, parse_scene, Predicate, SceneDef};
use clap::{Args, CommandFactory, Parser, Subcommand};
use serde_json::{json, Value};
use std::fs;
use std::path::PathBuf;

/// Simulator and bounded model checker for hybrid thermal systems.
#[derive(Debug, Parser)]
#[command(name = "thermflow", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Arguments shared by every subcommand.
#[derive(Debug, Args)]
pub struct SceneArgs {
    /// Scene to load: a file path, or builtin:cs1 | builtin:cs2 | builtin:cs3
    #[arg(long)]
    pub scene: String,
    /// Override the scene's integration step (seconds, exact: `1`, `1/2`, `0.25`)
    #[arg(long)]
    pub step: Option<Rat>,
    /// Also write every visited state to this file as CSV
    #[arg(long, visible_alias = "collect", value_name = "FILE")]
    pub csv: Option<PathBuf>,
    /// Print JSON instead of plain text
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate until a time bound and print every sample
    Sim {
        #[command(flatten)]
        scene: SceneArgs,
        /// Stop once the clock reaches this time (seconds, exact rational)
        #[arg(long)]
        until: Rat,
    },
    /// List all states within a time bound that satisfy a predicate
    Search {
        #[command(flatten)]
        scene: SceneArgs,
        /// Search up to this time (seconds, exact rational)
        #[arg(long)]
        until: Rat,
        /// State predicate, e.g. 'abs(temp(coffee) - temp(room)) <= 1/1000'
        #[arg(long)]
        pred: String,
        /// Stop after this many matches
        #[arg(long, value_name = "N")]
        max: Option<usize>,
        /// Explore every interleaving of individual discrete rule firings
        #[arg(long)]
        interleave: bool,
        /// Give up as inconclusive after this many engine operations
        /// [default: 1000000, or $THERMFLOW_STEP_CAP]
        #[arg(long, value_name = "N")]
        step_cap: Option<usize>,
    },
    /// Find the earliest state within a time bound satisfying a predicate
    FindEarliest {
        #[command(flatten)]
        scene: SceneArgs,
        /// Search up to this time (seconds, exact rational)
        #[arg(long)]
        until: Rat,
        /// State predicate, e.g. 'phaseIs(coffee, melting)'
        #[arg(long)]
        pred: String,
        /// Explore every interleaving of individual discrete rule firings
        #[arg(long)]
        interleave: bool,
        /// Give up as inconclusive after this many engine operations
        /// [default: 1000000, or $THERMFLOW_STEP_CAP]
        #[arg(long, value_name = "N")]
        step_cap: Option<usize>,
    },
    /// Check a temporal formula on the bounded run
    Mc {
        #[command(flatten)]
        scene: SceneArgs,
        /// Path length: simulate up to this time (seconds, exact rational)
        #[arg(long)]
        until: Rat,
        /// Temporal formula over the scene's props, e.g. '[](temp-ok -> []temp-ok)'
        #[arg(long)]
        formula: String,
    },
}

/// A failure with the exit code it maps to.
enum Failure {
    /// Bad invocation, unreadable or invalid input: exit 2.
    Usage(String),
    /// The engine or an evaluation gave up: exit 3.
    Engine(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Engine(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Engine(m) => m,
        }
    }
}

fn map_analysis(e: analysis::AnalysisError) -> Failure {
    use analysis::AnalysisError::*;
    match &e {
        Invalid(_) | BadTimeBound(_) => Failure::Usage(e.to_string()),
        Engine(_) | Eval(_) | UnboundProp(_) => Failure::Engine(e.to_string()),
    }
}

/// Runs the command line and returns the process exit code.
pub fn main_with_args<I>(args: I) -> i32
where
    I: IntoIterator<Item = String>,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version to stdout and usage errors to stderr
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            failure.code()
        }
    }
}

/// Prints one line to stdout, exiting with the conventional SIGPIPE
/// status when the reader has gone away (`thermflow sim … | head`), so a
/// closed pipe never turns into a panic.
macro_rules! emit {
    ($($arg:tt)*) => {{
        use std::io::Write;
        if writeln!(std::io::stdout().lock(), $($arg)*).is_err() {
            std::process::exit(141);
        }
    }};
}

fn dispatch(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Sim { scene, until } => {
            let def = load_scene(&scene)?;
            let trace = analysis::simulate(&def, &until).map_err(map_analysis)?;
            write_csv_if_requested(&scene, &trace)?;
            if scene.json {
                let samples: Vec<Value> = trace
                    .samples
                    .iter()
                    .map(|s| sample_json(s, &trace.columns, trace.precision))
                    .collect();
                emit!("{}", json!({ "samples": samples }));
            } else {
                for state in &trace.samples {
                    emit!("{}", state_line(state, &trace.columns, trace.precision));
                }
            }
            Ok(0)
        }
        Command::Search {
            scene,
            until,
            pred,
            max,
            interleave,
            step_cap,
        } => {
            let def = load_scene(&scene)?;
            let pred = parse_pred(&def, &pred)?;
            let mut options = SearchOptions::new(until);
            options.max_solutions = max;
            options.interleave = interleave;
            options.step_cap = effective_step_cap(step_cap)?;
            let (outcome, visited) = search_collecting(&def, &pred, &options)?;
            write_csv_if_requested(
                &scene,
                &Trace {
                    columns: columns(&def.objects),
                    precision: def.params.precision,
                    samples: visited,
                },
            )?;
            report_search(&def, &scene, outcome, false)
        }
        Command::FindEarliest {
            scene,
            until,
            pred,
            interleave,
            step_cap,
        } => {
            let def = load_scene(&scene)?;
            let pred = parse_pred(&def, &pred)?;
            let mut options = SearchOptions::new(until);
            options.max_solutions = Some(1);
            options.interleave = interleave;
            options.step_cap = effective_step_cap(step_cap)?;
            let (outcome, visited) = search_collecting(&def, &pred, &options)?;
            write_csv_if_requested(
                &scene,
                &Trace {
                    columns: columns(&def.objects),
                    precision: def.params.precision,
                    samples: visited,
                },
            )?;
            report_search(&def, &scene, outcome, true)
        }
        Command::Mc {
            scene,
            until,
            formula,
        } => {
            let def = load_scene(&scene)?;
            let formula = parse_formula(&formula, &def.props)
                .map_err(|e| Failure::Usage(format!("--formula: {e}")))?;
            let outcome = analysis::model_check(&def, &formula, &until).map_err(map_analysis)?;
            match outcome {
                McOutcome::Holds => {
                    if scene.json {
                        emit!("{}", json!({ "outcome": "holds" }));
                    } else {
                        emit!("holds");
                    }
                    Ok(0)
                }
                McOutcome::Violated { counterexample } => {
                    write_csv_if_requested(&scene, &counterexample)?;
                    if scene.json {
                        let samples: Vec<Value> = counterexample
                            .samples
                            .iter()
                            .map(|s| {
                                sample_json(s, &counterexample.columns, counterexample.precision)
                            })
                            .collect();
                        emit!(
                            "{}",
                            json!({ "outcome": "violated", "counterexample": samples })
                        );
                    } else {
                        emit!("violated");
                        for state in &counterexample.samples {
                            emit!(
                                "{}",
                                state_line(
                                    state,
                                    &counterexample.columns,
                                    counterexample.precision
                                )
                            );
                        }
                    }
                    Ok(1)
                }
            }
        }
    }
}

fn load_scene(args: &SceneArgs) -> Result<SceneDef, Failure> {
    let mut def = if let Some(name) = args.scene.strip_prefix("builtin:") {
        scene::builtin(name).ok_or_else(|| {
            Failure::Usage(format!(
                "unknown builtin scene `{name}` (available: {})",
                scene::BUILTIN_NAMES.join(", ")
            ))
        })?
    } else {
        let text = fs::read_to_string(&args.scene)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", args.scene)))?;
        parse_scene(&text).map_err(|e| Failure::Usage(format!("{}: {e}", args.scene)))?
    };
    if let Some(step) = &args.step {
        if !step.is_positive() {
            return Err(Failure::Usage(format!(
                "--step must be positive, got {step}"
            )));
        }
        def.params.time_step = step.clone();
    }
    Ok(def)
}

fn parse_pred(def: &SceneDef, text: &str) -> Result<Predicate, Failure> {
    parse_predicate(text, &def.objects).map_err(|e| Failure::Usage(format!("--pred: {e}")))
}

fn effective_step_cap(flag: Option<usize>) -> Result<usize, Failure> {
    if let Some(cap) = flag {
        return Ok(cap);
    }
    match std::env::var("THERMFLOW_STEP_CAP") {
        Ok(text) => text.parse::<usize>().map_err(|_| {
            Failure::Usage(format!(
                "THERMFLOW_STEP_CAP must be a nonnegative integer, got {text:?}"
            ))
        }),
        Err(_) => Ok(DEFAULT_STEP_CAP),
    }
}

fn search_collecting(
    def: &SceneDef,
    pred: &Predicate,
    options: &SearchOptions,
) -> Result<(SearchOutcome, Vec<SystemState>), Failure> {
    let mut visited = Vec::new();
    let outcome = analysis::timed_search_with(def, pred, options, |s| visited.push(s.clone()))
        .map_err(map_analysis)?;
    Ok((outcome, visited))
}

fn report_search(
    def: &SceneDef,
    scene: &SceneArgs,
    outcome: SearchOutcome,
    earliest: bool,
) -> Result<i32, Failure> {
    let cols = columns(&def.objects);
    let precision = def.params.precision;
    match outcome {
        SearchOutcome::Found(matches) => {
            if scene.json {
                let key = if earliest { "solution" } else { "solutions" };
                let states: Vec<Value> = matches
                    .iter()
                    .map(|s| sample_json(s, &cols, precision))
                    .collect();
                if earliest {
                    emit!("{}", json!({ "outcome": "found", key: states[0] }));
                } else {
                    emit!("{}", json!({ "outcome": "found", key: states }));
                }
            } else {
                for state in &matches {
                    emit!("{}", state_line(state, &cols, precision));
                }
            }
            Ok(0)
        }
        SearchOutcome::NoSolution => {
            if scene.json {
                emit!("{}", json!({ "outcome": "no-solution" }));
            } else {
                emit!("no solution");
            }
            Ok(1)
        }
        SearchOutcome::Inconclusive { steps } => {
            if scene.json {
                emit!("{}", json!({ "outcome": "inconclusive", "steps": steps }));
                Ok(3)
            } else {
                Err(Failure::Engine(format!(
                    "inconclusive: step cap exhausted after {steps} operations before the time bound"
                )))
            }
        }
    }
}

fn write_csv_if_requested(scene: &SceneArgs, trace: &Trace) -> Result<(), Failure> {
    if let Some(path) = &scene.csv {
        fs::write(path, trace.csv_string())
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

/// One state as a plain-text line: `time=<clock> <id>.<attr>=<value> …`,
/// every value printed to the scene's precision.
fn state_line(state: &SystemState, cols: &[Column], precision: u32) -> String {
    let mut line = format!("time={}", state.clock.display(precision));
    for col in cols {
        line.push(' ');
        line.push_str(&col.header());
        line.push('=');
        line.push_str(&col.read(&state.config).display(precision));
    }
    line
}

fn sample_json(state: &SystemState, cols: &[Column], precision: u32) -> Value {
    let mut map = serde_json::Map::new();
    map.insert(
        "time".to_owned(),
        Value::String(state.clock.display(precision)),
    );
    for col in cols {
        map.insert(
            col.header(),
            Value::String(col.read(&state.config).display(precision)),
        );
    }
    Value::Object(map)
}

/// Keeps `--help` examples honest: the CLI structure is validated in unit
/// tests and the assertions here double as usage documentation.
pub fn debug_assert_cli() {
    Cli::command().debug_assert();
}
