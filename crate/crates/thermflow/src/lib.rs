//! Exact-rational simulation and bounded model checking for hybrid thermal
//! systems.
//!
//! A system is a collection of thermal entities (bodies with a temperature)
//! coupled by heat-transfer interactions (conduction, convection, radiation)
//! and heat sources. Continuous behaviour is integrated with explicit Euler
//! steps over arbitrary-precision rationals — no floating point anywhere —
//! while urgent discrete rules (water phase transitions, thermostat
//! switching) fire between ticks. On top of the stepped run sit three
//! analyses: trace simulation, timed search for predicate-satisfying states,
//! and time-bounded LTL model checking.
//!
//! Runs are deterministic and reproducible bit for bit. The runnable
//! programs in `examples/` are the best starting point; the `thermflow`
//! binary exposes the same analyses as `sim`, `search`, `find-earliest`
//! and `mc` subcommands.

pub mod analysis;
pub mod cli;
pub mod engine;
pub mod model;
pub mod numeric;
pub mod physics;
pub mod scene;
