//! Thin entry point; all behavior lives in [`thermflow::cli`].

use std::process;

fn main() {
    process::exit(thermflow::cli::main_with_args(std::env::args()));
}
