//! Timed analyses over a scene: simulation traces, bounded search for a
//! predicate, earliest-occurrence queries, and time-bounded model checking
//! of temporal formulas.
//!
//! All analyses share one sampling discipline. A run starts at the scene's
//! initial state; at each point in time the urgent discrete rules are
//! first driven to their normal form, then one integration tick advances
//! the clock. The observed samples are the initial state, each discrete
//! normal form that differs from its predecessor (same clock — discrete
//! changes are instantaneous), and each post-tick state. Normalization
//! also runs once the time bound is reached, so a rule that fires exactly
//! at the bound is still observed.

pub mod ltl;

pub use ltl::{parse_formula, Formula, FormulaParseError};

use crate::engine::{self, EngineError};
use crate::model::{Configuration, ObjectId, SystemState, ValidationReport};
use crate::numeric::Rat;
use crate::scene::predicate::read_attr;
use crate::scene::{Attr, EvalError, Predicate, SceneDef};
use std::collections::{HashSet, VecDeque};
use std::io;
use thiserror::Error;

/// Any way an analysis can fail.
#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("invalid scene: {0}")]
    Invalid(#[from] ValidationReport),
    #[error("time bound must be nonnegative, got {0}")]
    BadTimeBound(Rat),
    #[error("formula references unknown prop `{0}`")]
    UnboundProp(String),
}

/// One printable observable of a configuration: an attribute of a fixed
/// object. The column set of a scene is fixed, so every sample prints the
/// same way.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Column {
    pub id: ObjectId,
    pub attr: Attr,
}

impl Column {
    pub fn header(&self) -> String {
        format!("{}.{}", self.id, self.attr.name())
    }

    pub fn read(&self, config: &Configuration) -> Rat {
        read_attr(config, self.attr, &self.id)
            .expect("columns are derived from the same configuration they read")
    }
}

/// The observable columns of a configuration: every entity's temperature
/// (plus the latent-heat accumulator for water), then every interaction's
/// flow rate, then every heater's output, each group in id order.
pub fn columns(config: &Configuration) -> Vec<Column> {
    let mut cols = Vec::new();
    for e in config.entities() {
        cols.push(Column {
            id: e.id.clone(),
            attr: Attr::Temp,
        });
        if e.heat_trans().is_some() {
            cols.push(Column {
                id: e.id.clone(),
                attr: Attr::HeatTrans,
            });
        }
    }
    for i in config.interactions() {
        cols.push(Column {
            id: i.id.clone(),
            attr: Attr::Qdot,
        });
    }
    for h in config.heaters() {
        cols.push(Column {
            id: h.id.clone(),
            attr: Attr::Qdot,
        });
    }
    cols
}

/// A sampled run: the states in observation order plus how to print them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub columns: Vec<Column>,
    pub precision: u32,
    pub samples: Vec<SystemState>,
}

impl Trace {
    /// The trace as CSV: a header row `time,<id>.<attr>,…` and one row per
    /// sample, every value printed to `precision` fraction digits.
    pub fn csv_string(&self) -> String {
        let mut out = String::new();
        out.push_str("time");
        for col in &self.columns {
            out.push(',');
            out.push_str(&col.header());
        }
        out.push('\n');
        for state in &self.samples {
            out.push_str(&state.clock.display(self.precision));
            for col in &self.columns {
                out.push(',');
                out.push_str(&col.read(&state.config).display(self.precision));
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv<W: io::Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(self.csv_string().as_bytes())
    }

    pub fn last(&self) -> &SystemState {
        self.samples.last().expect("a trace holds at least the initial state")
    }
}

/// Simulates `def` until the clock reaches `until`, returning every sample
/// along the way. The final tick may overshoot a bound that is not a
/// multiple of the time step; the run stops at the first clock ≥ `until`.
pub fn simulate(def: &SceneDef, until: &Rat) -> Result<Trace, AnalysisError> {
    let mut samples = Vec::new();
    run(def, until, |state| samples.push(state.clone()))?;
    Ok(Trace {
        columns: columns(&def.objects),
        precision: def.params.precision,
        samples,
    })
}

/// The shared run loop: validates, then drives the state to `until`,
/// handing every sample to `visit` in order.
fn run(
    def: &SceneDef,
    until: &Rat,
    mut visit: impl FnMut(&SystemState),
) -> Result<SystemState, AnalysisError> {
    def.validate()?;
    if until.is_negative() {
        return Err(AnalysisError::BadTimeBound(until.clone()));
    }
    let consts = &def.params.constants;
    let h = &def.params.time_step;
    let mut state = def.initial_state();
    visit(&state);
    loop {
        let normalized = engine::normalize_discrete(&state.config, consts)?;
        if normalized != state.config {
            state.config = normalized;
            visit(&state);
        }
        if &state.clock >= until {
            return Ok(state);
        }
        state = engine::tick(&state, h, consts)?;
        visit(&state);
    }
}

/// Fallback cap on engine operations for searches, overridable per search
/// and via `--step-cap`/`THERMFLOW_STEP_CAP` on the command line.
pub const DEFAULT_STEP_CAP: usize = 1_000_000;

/// How far and how hard a search may go.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Model time at which the search stops.
    pub time_bound: Rat,
    /// Stop after this many matching states; `None` collects all within
    /// the bound.
    pub max_solutions: Option<usize>,
    /// Cap on engine operations (ticks, discrete normalizations, and —
    /// under interleaving — individual rule applications) after which the
    /// search gives up as inconclusive.
    pub step_cap: usize,
    /// Explore every interleaving of individual discrete rule
    /// applications instead of only canonical normal forms, so states that
    /// exist only partway through a cascade of rules become visible.
    pub interleave: bool,
}

impl SearchOptions {
    pub fn new(time_bound: Rat) -> SearchOptions {
        SearchOptions {
            time_bound,
            max_solutions: None,
            step_cap: DEFAULT_STEP_CAP,
            interleave: false,
        }
    }
}

/// Result of a bounded search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    /// Matching states in observation order (earliest first).
    Found(Vec<SystemState>),
    /// The whole bounded run was explored and nothing matched.
    NoSolution,
    /// The step cap ran out before the time bound; the bounded run was
    /// *not* exhausted, so absence of a match means nothing.
    Inconclusive { steps: usize },
}

/// Searches the bounded run for states satisfying `pred`.
pub fn timed_search(
    def: &SceneDef,
    pred: &Predicate,
    options: &SearchOptions,
) -> Result<SearchOutcome, AnalysisError> {
    timed_search_with(def, pred, options, |_| {})
}

/// [`timed_search`], additionally handing every visited state (in
/// observation order) to `visit` — the command line uses this to stream a
/// CSV of the exploration.
pub fn timed_search_with(
    def: &SceneDef,
    pred: &Predicate,
    options: &SearchOptions,
    mut visit: impl FnMut(&SystemState),
) -> Result<SearchOutcome, AnalysisError> {
    def.validate()?;
    if options.time_bound.is_negative() {
        return Err(AnalysisError::BadTimeBound(options.time_bound.clone()));
    }
    let consts = &def.params.constants;
    let h = &def.params.time_step;
    let mut steps = 0usize;
    let mut found: Vec<SystemState> = Vec::new();
    let max_reached =
        |found: &Vec<SystemState>| options.max_solutions.is_some_and(|m| found.len() >= m);

    let mut state = def.initial_state();
    visit(&state);
    if pred.eval(&state.config)? {
        found.push(state.clone());
    }
    loop {
        if max_reached(&found) {
            return Ok(SearchOutcome::Found(found));
        }
        if options.interleave {
            let explored = explore_interleavings(
                &state, consts, pred, options, &mut steps, &mut found, &mut visit,
            )?;
            match explored {
                Some(normal_form) => state.config = normal_form,
                None => return Ok(SearchOutcome::Inconclusive { steps }),
            }
        } else {
            let normalized = engine::normalize_discrete(&state.config, consts)?;
            if normalized != state.config {
                state.config = normalized;
                steps += 1;
                visit(&state);
                if pred.eval(&state.config)? {
                    found.push(state.clone());
                }
            }
        }
        if max_reached(&found) {
            return Ok(SearchOutcome::Found(found));
        }
        if state.clock >= options.time_bound {
            break;
        }
        if steps >= options.step_cap {
            return Ok(SearchOutcome::Inconclusive { steps });
        }
        state = engine::tick(&state, h, consts)?;
        steps += 1;
        visit(&state);
        if pred.eval(&state.config)? {
            found.push(state.clone());
        }
    }
    if found.is_empty() {
        Ok(SearchOutcome::NoSolution)
    } else {
        Ok(SearchOutcome::Found(found))
    }
}

/// Breadth-first exploration of every order in which the currently enabled
/// rules (and those they enable in turn) can fire, collecting matches among
/// the intermediate states. Returns the canonical normal form to continue
/// from, or `None` when the step cap ran out mid-exploration.
///
/// The rule system is confluent, so all maximal firing orders end in the
/// same normal form; the intermediate states are what this mode adds.
#[allow(clippy::too_many_arguments)]
fn explore_interleavings(
    state: &SystemState,
    consts: &crate::physics::PhysConstants,
    pred: &Predicate,
    options: &SearchOptions,
    steps: &mut usize,
    found: &mut Vec<SystemState>,
    visit: &mut impl FnMut(&SystemState),
) -> Result<Option<Configuration>, AnalysisError> {
    let max_reached =
        |found: &Vec<SystemState>| options.max_solutions.is_some_and(|m| found.len() >= m);
    let mut queue: VecDeque<Configuration> = VecDeque::new();
    let mut seen: HashSet<Configuration> = HashSet::new();
    seen.insert(state.config.clone());
    queue.push_back(state.config.clone());
    let mut normal_form: Option<Configuration> = None;
    while let Some(config) = queue.pop_front() {
        let enabled = engine::enabled_rules(&config, consts);
        if enabled.is_empty() {
            // confluence: every maximal firing order reaches this form
            normal_form.get_or_insert(config);
            continue;
        }
        for instance in enabled {
            if *steps >= options.step_cap {
                return Ok(None);
            }
            let next = engine::apply_rule(&config, &instance, consts)?;
            *steps += 1;
            if seen.insert(next.clone()) {
                let next_state = SystemState {
                    config: next.clone(),
                    clock: state.clock.clone(),
                };
                visit(&next_state);
                if pred.eval(&next_state.config)? {
                    found.push(next_state);
                    if max_reached(found) {
                        // deliver what we have; the caller returns Found
                        return Ok(Some(
                            normal_form
                                .unwrap_or_else(|| config.clone()),
                        ));
                    }
                }
                queue.push_back(next);
            }
        }
    }
    match normal_form {
        Some(nf) => Ok(Some(nf)),
        // every firing order cycles: surface the same livelock diagnostic
        // the canonical normalization would produce
        None => Err(engine::normalize_discrete(&state.config, consts)
            .expect_err("a discrete system with no normal form cannot quiesce")
            .into()),
    }
}

/// The earliest state within the bound satisfying `pred`, if any: a search
/// capped at one solution.
pub fn find_earliest(
    def: &SceneDef,
    pred: &Predicate,
    options: &SearchOptions,
) -> Result<SearchOutcome, AnalysisError> {
    let options = SearchOptions {
        max_solutions: Some(1),
        ..options.clone()
    };
    timed_search(def, pred, &options)
}

/// Verdict of a bounded model-checking run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum McOutcome {
    Holds,
    /// The formula fails at the start of the bounded run; the trace is the
    /// full path the verdict was decided on (its final state repeats
    /// forever).
    Violated { counterexample: Trace },
}

/// Decides `formula` on the bounded run of `def`: the path of samples up
/// to `time_bound`, whose final state then repeats forever.
pub fn model_check(
    def: &SceneDef,
    formula: &Formula,
    time_bound: &Rat,
) -> Result<McOutcome, AnalysisError> {
    let trace = simulate(def, time_bound)?;
    let values = ltl::eval_on_path(formula, &trace.samples, &def.props)?;
    if values[0] {
        Ok(McOutcome::Holds)
    } else {
        Ok(McOutcome::Violated {
            counterexample: trace,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Phase;
    use crate::scene::{self, parse_predicate};

    fn cs(name: &str) -> SceneDef {
        scene::builtin(name).unwrap()
    }

    fn pred(def: &SceneDef, text: &str) -> Predicate {
        parse_predicate(text, &def.objects).unwrap()
    }

    #[test]
    fn simulate_samples_initial_plus_one_per_tick_without_discrete_activity() {
        let def = cs("cs1");
        let trace = simulate(&def, &Rat::from(5i64)).unwrap();
        assert_eq!(trace.samples.len(), 6);
        let clocks: Vec<String> = trace.samples.iter().map(|s| s.clock.display(1)).collect();
        assert_eq!(clocks, ["0.0", "1.0", "2.0", "3.0", "4.0", "5.0"]);
    }

    #[test]
    fn simulate_inserts_a_sample_for_the_discrete_normal_form() {
        let def = cs("cs3");
        let trace = simulate(&def, &Rat::from(2i64)).unwrap();
        // initial, normal form at clock 0, then two post-tick samples
        assert_eq!(trace.samples.len(), 4);
        assert_eq!(trace.samples[0].clock, trace.samples[1].clock);
        let coffee = trace.samples[1].config.entity(&"coffee".into()).unwrap().unwrap();
        assert_eq!(coffee.phase(), Some(Phase::Freezing));
        let heater = trace.samples[1].config.heater(&"coffeeHeater".into()).unwrap().unwrap();
        assert_eq!(heater.qdot, scene::constants::heater_power());
    }

    #[test]
    fn csv_has_fixed_columns_and_exact_display() {
        let def = cs("cs1");
        let trace = simulate(&def, &Rat::from(1i64)).unwrap();
        let csv = trace.csv_string();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "time,coffee.temp,room.temp,crConduct.qdot,crConvect.qdot"
        );
        assert_eq!(
            lines.next().unwrap(),
            "0.0000000000,70.0000000000,20.0000000000,0.0000000000,0.0000000000"
        );
        // after one tick the flows hold the rates computed from the old
        // temperatures and the temperatures have taken one Euler step
        let row = lines.next().unwrap();
        assert!(row.starts_with("1.0000000000,69.7791005291,20.0052069160,"), "{row}");
        assert!(lines.next().is_none());
    }

    #[test]
    fn water_scene_gains_a_heat_trans_column() {
        let def = cs("cs2");
        let trace = simulate(&def, &Rat::zero()).unwrap();
        let headers: Vec<String> = trace.columns.iter().map(|c| c.header()).collect();
        assert_eq!(
            headers,
            [
                "coffee.temp",
                "coffee.heatTrans",
                "room.temp",
                "crConduct.qdot",
                "crConvect.qdot",
                "boiler.qdot"
            ]
        );
    }

    #[test]
    fn search_finds_matches_in_observation_order() {
        let def = cs("cs1");
        let warm = pred(&def, "temp(coffee) >= 69");
        let outcome =
            timed_search(&def, &warm, &SearchOptions::new(Rat::from(30i64))).unwrap();
        let SearchOutcome::Found(matches) = outcome else {
            panic!("expected matches, got {outcome:?}");
        };
        // cooling is monotone here, so the matches are a prefix of the run
        let n = matches.len();
        assert!(n > 2, "cooling one degree takes several ticks");
        for (i, m) in matches.iter().enumerate() {
            assert_eq!(m.clock, Rat::from(i as i64));
        }
        // the first non-matching state is one tick past the last match
        let trace = simulate(&def, &Rat::from(30i64)).unwrap();
        assert!(!warm.eval(&trace.samples[n].config).unwrap());
    }

    #[test]
    fn search_reports_no_solution_when_the_bound_is_too_tight() {
        // cooling runs at roughly 0.22 °C per tick at the start, so a full
        // degree takes five ticks — three are not enough
        let def = cs("cs1");
        let cool = pred(&def, "temp(coffee) <= 69");
        let outcome = timed_search(&def, &cool, &SearchOptions::new(Rat::from(3i64))).unwrap();
        assert_eq!(outcome, SearchOutcome::NoSolution);
    }

    #[test]
    fn search_gives_up_inconclusively_at_the_step_cap() {
        let def = cs("cs1");
        let cool = pred(&def, "temp(coffee) <= 69");
        let mut options = SearchOptions::new(Rat::from(1000i64));
        options.step_cap = 5;
        let outcome = timed_search(&def, &cool, &options).unwrap();
        assert_eq!(outcome, SearchOutcome::Inconclusive { steps: 5 });
    }

    #[test]
    fn find_earliest_returns_the_first_match_only() {
        let def = cs("cs1");
        let warm = pred(&def, "temp(coffee) >= 0");
        let outcome = find_earliest(&def, &warm, &SearchOptions::new(Rat::from(100i64))).unwrap();
        let SearchOutcome::Found(matches) = outcome else {
            panic!("expected a match");
        };
        assert_eq!(matches.len(), 1);
        assert_eq!(matches[0].clock, Rat::zero());
    }

    #[test]
    fn normalization_runs_at_the_time_bound_itself() {
        // with a zero bound no tick ever runs, yet the urgent rules still
        // fire: the thermostat turns on at clock 0
        let def = cs("cs3");
        let on = pred(&def, "statusIs(coffeeHeater, on)");
        let outcome = find_earliest(&def, &on, &SearchOptions::new(Rat::zero())).unwrap();
        let SearchOutcome::Found(matches) = outcome else {
            panic!("expected the thermostat to engage at clock 0");
        };
        assert_eq!(matches[0].clock, Rat::zero());
    }

    #[test]
    fn interleaving_exposes_states_between_rule_firings() {
        // at clock 0 two rules are enabled: the freezing entry on the
        // coffee and the thermostat turn-on. The canonical normal form has
        // both applied; only the interleaving search can observe the state
        // where the phase changed but the heater is still off.
        let def = cs("cs3");
        let between = pred(&def, "phaseIs(coffee, freezing) and statusIs(coffeeHeater, off)");
        let canonical = timed_search(&def, &between, &SearchOptions::new(Rat::zero())).unwrap();
        assert_eq!(canonical, SearchOutcome::NoSolution);
        let mut options = SearchOptions::new(Rat::zero());
        options.interleave = true;
        let explored = timed_search(&def, &between, &options).unwrap();
        let SearchOutcome::Found(matches) = explored else {
            panic!("expected the intermediate state, got {explored:?}");
        };
        assert_eq!(matches.len(), 1);
        assert_eq!(matches[0].clock, Rat::zero());
    }

    #[test]
    fn interleaving_continues_from_the_shared_normal_form() {
        let def = cs("cs3");
        let never = pred(&def, "false");
        let mut options = SearchOptions::new(Rat::from(3i64));
        options.interleave = true;
        let mut interleaved_last = None;
        timed_search_with(&def, &never, &options, |s| interleaved_last = Some(s.clone()))
            .unwrap();
        let mut canonical_last = None;
        run(&def, &Rat::from(3i64), |s| canonical_last = Some(s.clone())).unwrap();
        assert_eq!(interleaved_last, canonical_last);
    }

    #[test]
    fn model_check_decides_bounded_reachability() {
        let mut def = cs("cs1");
        def.props.insert(
            "cool".to_owned(),
            parse_predicate("temp(coffee) <= 69", &def.objects).unwrap(),
        );
        let formula = parse_formula("<>cool", &def.props).unwrap();
        assert_eq!(
            model_check(&def, &formula, &Rat::from(30i64)).unwrap(),
            McOutcome::Holds
        );
        match model_check(&def, &formula, &Rat::from(3i64)).unwrap() {
            McOutcome::Violated { counterexample } => {
                assert_eq!(counterexample.samples.len(), 4);
            }
            McOutcome::Holds => panic!("3 s is not enough to cool a degree"),
        }
    }

    #[test]
    fn model_check_reports_division_by_zero_in_a_prop() {
        let mut def = cs("cs1");
        def.props.insert(
            "bad".to_owned(),
            parse_predicate("1 / (temp(room) - 20) = 1", &def.objects).unwrap(),
        );
        let formula = parse_formula("[]bad", &def.props).unwrap();
        let e = model_check(&def, &formula, &Rat::zero()).unwrap_err();
        assert!(matches!(e, AnalysisError::Eval(EvalError::DivisionByZero)));
    }

    #[test]
    fn negative_bounds_are_rejected() {
        let def = cs("cs1");
        let e = simulate(&def, &Rat::from(-1i64)).unwrap_err();
        assert!(matches!(e, AnalysisError::BadTimeBound(_)));
        let p = pred(&def, "true");
        let e = timed_search(&def, &p, &SearchOptions::new(Rat::from(-1i64))).unwrap_err();
        assert!(matches!(e, AnalysisError::BadTimeBound(_)));
    }

    #[test]
    fn invalid_scenes_are_rejected_up_front() {
        let mut def = cs("cs1");
        def.params.time_step = Rat::zero();
        assert!(matches!(
            simulate(&def, &Rat::zero()).unwrap_err(),
            AnalysisError::Invalid(_)
        ));
    }
}
