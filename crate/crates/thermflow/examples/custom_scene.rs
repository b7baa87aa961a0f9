use thermflow::analysis::{find_earliest, simulate, SearchOptions, SearchOutcome};
use thermflow::numeric::Rat;
use thermflow::scene::{parse_predicate, parse_scene};

// A steel ingot fresh out of the forge (900 C) cooling in a large hall
// (25 C), defined as scene text instead of built in code. At 900 C the
// fourth-power radiation law moves heat more than three times as fast as
// convection across the same face — the reason radiant exchange needs its
// own law rather than a bigger convection coefficient.
//
// The horizon is deliberately short. A radiated flow raises the running
// temperature to the fourth power, so under exact arithmetic every tick
// multiplies the digit count of the state roughly fourfold: a handful of
// ticks is cheap, hundreds are astronomically large. Purely linear scenes
// (conduction and convection) grow slowly and run for thousands of ticks;
// see the other examples for those.

const SCENE: &str = r#"
# hot ingot radiating into a cold hall
[params]
timeStep = 1
precision = 10

[entity ingot]
mass = 20
heatCap = 49/100
temp = 900

[entity hall]
mass = 1200
heatCap = 1
temp = 25

[interaction glow]
kind = radiation
entity1 = ingot
entity2 = hall
emissiv = 4/5
area = 1/2

[interaction breeze]
kind = convection
entity1 = ingot
entity2 = hall
convCoeff = 1/100
area = 1/2
"#;

pub fn main() {
    let def = parse_scene(SCENE).expect("the scene text is well formed");
    let p = def.params.precision;

    // One tick stores the flows computed from the 900 C / 25 C start.
    let trace = simulate(&def, &Rat::from(1)).expect("one tick is cheap");
    let state = trace.last();
    let qdot_of = |id: &str| {
        state.config.interaction(&id.into()).unwrap().unwrap().qdot.clone()
    };
    let glow = qdot_of("glow");
    let breeze = qdot_of("breeze");
    println!("flows out of the 900 C ingot:");
    println!("  radiation  {} kW", glow.display(p));
    println!("  convection {} kW", breeze.display(p));
    assert_eq!(glow.display(p), "14.8803391406");
    assert_eq!(breeze.display(p), "4.3750000000");
    assert!(glow > Rat::from(3) * &breeze, "radiation dominates at 900 C");

    // When does the glow visibly dim — the ingot down to 890 C?
    let pred = parse_predicate("temp(ingot) <= 890", &def.initial_state().config)
        .expect("the predicate is well formed");
    let outcome = find_earliest(&def, &pred, &SearchOptions::new(Rat::from(6)))
        .expect("six ticks stay cheap");
    let SearchOutcome::Found(states) = outcome else {
        panic!("the ingot cools past 890 C within the bound");
    };
    let hit = &states[0];
    println!(
        "ingot first at or below 890 C at t={}: ingot {} C, hall {} C",
        hit.clock,
        hit.config.entity(&"ingot".into()).unwrap().unwrap().temp.display(p),
        hit.config.entity(&"hall".into()).unwrap().unwrap().temp.display(p),
    );
    assert_eq!(hit.clock, Rat::from(6));
    assert_eq!(
        hit.config.entity(&"ingot".into()).unwrap().unwrap().temp.display(p),
        "888.4207021756"
    );
    assert_eq!(
        hit.config.entity(&"hall".into()).unwrap().unwrap().temp.display(p),
        "25.0945642655"
    );
}
