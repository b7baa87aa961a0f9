use thermflow::analysis::{find_earliest, simulate, SearchOptions, SearchOutcome};
use thermflow::model::Phase;
use thermflow::numeric::Rat;
use thermflow::scene::{self, parse_predicate};

// Frozen coffee on a 1.5 kW boiler, driven through every phase.
//
// Phase transitions are urgent discrete rules: the instant the solid
// reaches the melt point it switches into the melting phase, its
// temperature freezes in place, and the inflowing heat accumulates as
// latent heat instead. Once the accumulator reaches the latent heat of
// fusion (334 kJ/kg), the entity snaps to liquid and sensible heating
// resumes. The same happens again at the boil point with the latent heat
// of vaporization.

pub fn main() {
    let def = scene::builtin("cs2").expect("cs2 ships with the crate");
    let p = def.params.precision;

    // the earliest melting state, found by bounded search
    let melting = parse_predicate("phaseIs(coffee, melting)", &def.objects).unwrap();
    let outcome = find_earliest(&def, &melting, &SearchOptions::new(Rat::from(2000)))
        .expect("cs2 searches cleanly");
    let SearchOutcome::Found(matches) = outcome else {
        panic!("a 1.5 kW boiler melts half a kilo of ice well within 2000 s");
    };
    let onset = &matches[0];
    let coffee = onset.config.entity(&"coffee".into()).unwrap().unwrap();
    println!(
        "melting begins at t={} with the block at {} C",
        onset.clock,
        coffee.temp.display(p)
    );
    // the rule fires on the first sample at or above the melt point; the
    // last Euler step overshot 0 C slightly, and that is the exact state
    // the transition captures
    assert_eq!(onset.clock, Rat::from(12));
    assert_eq!(coffee.temp.display(p), "0.7945354449");

    // one full timeline from a single simulation: the first sample in each
    // phase the coffee passes through
    let trace = simulate(&def, &Rat::from(1500)).expect("cs2 simulates cleanly");
    let mut onsets: Vec<(Phase, Rat)> = Vec::new();
    for state in &trace.samples {
        let phase = state
            .config
            .entity(&"coffee".into())
            .unwrap()
            .unwrap()
            .phase()
            .expect("cs2 coffee is a water entity");
        if onsets.last().map(|(ph, _)| *ph) != Some(phase) {
            onsets.push((phase, state.clock.clone()));
        }
    }
    println!("phase timeline:");
    for (phase, clock) in &onsets {
        println!("  t={:>5}  {}", clock.to_string(), phase);
    }
    let expect: Vec<(Phase, Rat)> = [
        (Phase::Solid, 0),
        (Phase::Melting, 12),
        (Phase::Liquid, 104),
        (Phase::Evaporating, 262),
        (Phase::Gas, 1439),
    ]
    .into_iter()
    .map(|(ph, t)| (ph, Rat::from(t)))
    .collect();
    assert_eq!(onsets, expect);

    // while melting, the temperature is pinned and the latent-heat
    // accumulator takes the inflow: after the first melting tick it holds
    // one second of net heat
    let after_first_melting_tick = trace
        .samples
        .iter()
        .find(|s| s.clock == Rat::from(13))
        .unwrap();
    let coffee = after_first_melting_tick.config.entity(&"coffee".into()).unwrap().unwrap();
    assert_eq!(coffee.temp.display(p), "0.7945354449"); // unchanged
    assert_eq!(coffee.heat_trans().unwrap().display(p), "1.6610197574");
    println!(
        "one tick into melting: temp still {} C, accumulator {} kJ",
        coffee.temp.display(p),
        coffee.heat_trans().unwrap().display(p)
    );
}
