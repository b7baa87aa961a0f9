use thermflow::analysis::{
    find_earliest, model_check, parse_formula, McOutcome, SearchOptions, SearchOutcome,
};
use thermflow::numeric::Rat;
use thermflow::scene::{self, parse_predicate};

// Model checking a thermostat — and reading a vacuous verdict honestly.
//
// In cs3 a supercooled liquid (-20 C) sits under a thermostat-controlled
// heater with a 70..80 C band. The scene defines the prop `temp-ok`
// (69.5 C to 80.5 C), and the natural stability property is
//
//     [](temp-ok -> []temp-ok)    "once in the window, always in it"
//
// The verdict is `holds` — but not because the controller regulates well.
// The liquid starts below the melt point, so the freezing transition
// captures it immediately and pins its temperature at -20 C while the
// heater pours energy into the latent-heat accumulator. `temp-ok` never
// becomes true, so the implication holds vacuously. The second check
// below exposes that: `<>temp-ok` is violated on the same bounded run.

pub fn main() {
    let def = scene::builtin("cs3").expect("cs3 ships with the crate");
    let bound = Rat::from(500);

    // the thermostat reacts instantly: it is on at clock 0
    let on = parse_predicate("statusIs(coffeeHeater, on)", &def.objects).unwrap();
    let outcome = find_earliest(&def, &on, &SearchOptions::new(Rat::from(10)))
        .expect("cs3 searches cleanly");
    let SearchOutcome::Found(matches) = outcome else {
        panic!("the heater sees -20 C and must switch on");
    };
    assert_eq!(matches[0].clock, Rat::zero());
    println!("thermostat switches on at t={}", matches[0].clock);

    // the stability property holds on the bounded run…
    let stable = parse_formula("[](temp-ok -> []temp-ok)", &def.props).unwrap();
    let verdict = model_check(&def, &stable, &bound).expect("cs3 checks cleanly");
    assert_eq!(verdict, McOutcome::Holds);
    println!("[](temp-ok -> []temp-ok) holds up to t={bound}");

    // …but vacuously: the window is never reached at all
    let reached = parse_formula("<>temp-ok", &def.props).unwrap();
    match model_check(&def, &reached, &bound).expect("cs3 checks cleanly") {
        McOutcome::Violated { counterexample } => {
            let last = counterexample.last();
            let coffee = last.config.entity(&"coffee".into()).unwrap().unwrap();
            println!(
                "<>temp-ok is violated: at t={} the coffee is still {} C ({}), accumulator {} kJ",
                last.clock,
                coffee.temp.display(2),
                coffee.phase().unwrap(),
                coffee.heat_trans().unwrap().display(2)
            );
            // the freezing transition pinned the temperature for good
            assert_eq!(coffee.temp, Rat::from(-20));
        }
        McOutcome::Holds => panic!("the window is unreachable in cs3"),
    }
}
