use thermflow::analysis::{find_earliest, timed_search, SearchOptions, SearchOutcome};
use thermflow::numeric::Rat;
use thermflow::scene::{self, parse_predicate};

// When has the coffee effectively reached room temperature?
//
// "Effectively" here means the gap is at most a thousandth of a degree —
// and because the arithmetic is exact, that threshold is a hard boundary,
// not a tolerance. The search below walks the bounded run sample by
// sample and reports the first state where the predicate flips to true.

pub fn main() {
    let def = scene::builtin("cs1").expect("cs1 ships with the crate");
    let near = parse_predicate("abs(temp(coffee) - temp(room)) <= 1/1000", &def.objects)
        .expect("predicate parses against cs1");
    let p = def.params.precision;

    let outcome = find_earliest(&def, &near, &SearchOptions::new(Rat::from(3000)))
        .expect("cs1 searches cleanly");
    let SearchOutcome::Found(matches) = outcome else {
        panic!("equalization must happen within 3000 s, got {outcome:?}");
    };
    let state = &matches[0];
    let coffee = &state.config.entity(&"coffee".into()).unwrap().unwrap().temp;
    let room = &state.config.entity(&"room".into()).unwrap().unwrap().temp;
    println!(
        "first within 1/1000 C at t={} (coffee {}, room {})",
        state.clock,
        coffee.display(p),
        room.display(p)
    );
    assert_eq!(state.clock, Rat::from(2388));
    assert_eq!(coffee.display(p), "21.1524040711");
    assert_eq!(room.display(p), "21.1514076183");

    // once equalized, the system stays equalized: the next few matches are
    // the immediately following ticks
    let mut options = SearchOptions::new(Rat::from(3000));
    options.max_solutions = Some(4);
    let outcome = timed_search(&def, &near, &options).expect("cs1 searches cleanly");
    let SearchOutcome::Found(more) = outcome else {
        panic!("the bounded search found one match already");
    };
    let clocks: Vec<String> = more.iter().map(|s| s.clock.to_string()).collect();
    println!("first four matches at t = {}", clocks.join(", "));
    assert_eq!(clocks, ["2388", "2389", "2390", "2391"]);
}
