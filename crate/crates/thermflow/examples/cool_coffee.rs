use thermflow::analysis::simulate;
use thermflow::numeric::Rat;
use thermflow::scene;

// A fresh cup of coffee (70 C) cooling in a 20 C room for 1000 seconds.
//
// The cup and room exchange heat through the ceramic wall (conduction)
// and the open top (convection). Every number below is an exact rational:
// rerunning this example anywhere reproduces the same digits, byte for
// byte. The printed values are truncated to the scene's precision, not
// rounded.

pub fn main() {
    let def = scene::builtin("cs1").expect("cs1 ships with the crate");
    let trace = simulate(&def, &Rat::from(1000)).expect("cs1 simulates cleanly");
    let p = def.params.precision;

    // no discrete rules fire in this scene, so the samples are exactly the
    // initial state plus one per tick
    assert_eq!(trace.samples.len(), 1001);

    let first = &trace.samples[0];
    let last = trace.last();
    let temp_of = |state: &thermflow::model::SystemState, id: &str| {
        state.config.entity(&id.into()).unwrap().unwrap().temp.clone()
    };
    println!("t=0:    coffee {} C, room {} C", temp_of(first, "coffee").display(p), temp_of(first, "room").display(p));
    println!("t=1000: coffee {} C, room {} C", temp_of(last, "coffee").display(p), temp_of(last, "room").display(p));

    // the flow rates over the two paths at the end of the run, in kW
    let qdot_of = |id: &str| {
        last.config.interaction(&id.into()).unwrap().unwrap().qdot.clone()
    };
    println!("t=1000: conduction {} kW, convection {} kW", qdot_of("crConduct").display(p), qdot_of("crConvect").display(p));

    // frozen reference digits for the 1000 s state
    assert_eq!(temp_of(last, "coffee").display(p), "21.6767974687");
    assert_eq!(temp_of(last, "room").display(p), "21.1390469168");
    assert_eq!(qdot_of("crConduct").display(p), "0.0044820616");
    assert_eq!(qdot_of("crConvect").display(p), "0.0000543280");

    // the same run as a spreadsheet-ready file
    let csv_path = std::env::temp_dir().join("cool_coffee.csv");
    std::fs::write(&csv_path, trace.csv_string()).expect("temp dir is writable");
    println!("wrote {} rows to {}", trace.samples.len(), csv_path.display());
}
