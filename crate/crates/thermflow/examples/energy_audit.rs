use thermflow::analysis::simulate;
use thermflow::model::SystemState;
use thermflow::numeric::Rat;
use thermflow::scene;

// Exact energy bookkeeping — the payoff of rational arithmetic.
//
// Interactions only move heat between their two endpoints, so in a closed
// two-body system the enthalpy changes cancel exactly:
//
//     m1*c1*(T1 - T1_0) + m2*c2*(T2 - T2_0) = 0
//
// Not "to within 1e-12": identically zero, at every sample, for as long
// as the run goes. With a heater in the loop the books still balance
// exactly — the total enthalpy (sensible plus the latent-heat
// accumulator) grows by precisely heater-power times elapsed time, right
// through a phase transition.

fn sensible(state: &SystemState, initial: &SystemState) -> Rat {
    let mut total = Rat::zero();
    for e in state.config.entities() {
        let start = &initial.config.entity(&e.id).unwrap().unwrap().temp;
        total = total + &e.mass * &e.heat_cap * (&e.temp - start);
    }
    total
}

fn latent(state: &SystemState) -> Rat {
    state
        .config
        .entities()
        .filter_map(|e| e.heat_trans().cloned())
        .fold(Rat::zero(), |acc, qt| acc + qt)
}

pub fn main() {
    // part 1: the closed system — exact cancellation at every sample
    let def = scene::builtin("cs1").expect("cs1 ships with the crate");
    let trace = simulate(&def, &Rat::from(500)).expect("cs1 simulates cleanly");
    let initial = &trace.samples[0];
    for state in &trace.samples {
        assert_eq!(
            sensible(state, initial),
            Rat::zero(),
            "imbalance at t={}",
            state.clock
        );
    }
    println!(
        "cs1: enthalpy change sums to exactly 0 over all {} samples",
        trace.samples.len()
    );

    // part 2: the driven system — every joule the boiler injects is on the
    // books, sensible or latent, through warming and melting alike
    let def = scene::builtin("cs2").expect("cs2 ships with the crate");
    let power = def
        .objects
        .heater(&"boiler".into())
        .unwrap()
        .unwrap()
        .qdot
        .clone();
    // stop before the boiling transition: entering a transition resets the
    // accumulator, which retires the melting energy from the books
    let trace = simulate(&def, &Rat::from(250)).expect("cs2 simulates cleanly");
    let initial = &trace.samples[0];
    for state in &trace.samples {
        let injected = &power * &state.clock;
        let on_the_books = sensible(state, initial) + latent(state);
        assert_eq!(
            on_the_books, injected,
            "audit failed at t={}",
            state.clock
        );
    }
    let last = trace.last();
    println!(
        "cs2: {} kJ injected by t={}, all accounted for (sensible {} kJ, latent {} kJ)",
        (&power * &last.clock).display(1),
        last.clock,
        sensible(last, initial).display(1),
        latent(last).display(1)
    );

    // spot-check the all-solid prefix: by the melting onset at t=12 the
    // boiler has delivered exactly 18 kJ of sensible heat
    let at_onset = trace
        .samples
        .iter()
        .find(|s| s.clock == Rat::from(12))
        .unwrap();
    assert_eq!(sensible(at_onset, initial), Rat::from(18));
    println!("cs2: at t=12 (melting onset) exactly 18 kJ = 12 s x 3/2 kW on the books");
}
