#![no_main]

//! Arbitrary text must parse or fail with an error, never panic, and error
//! positions must fall inside the input.

use libfuzzer_sys::fuzz_target;

fuzz_target!(|src: &str| {
    if let Err(e) = rollsim::parse_scenario(src) {
        if let Some((line, col)) = e.position {
            assert!(line >= 1 && col >= 1);
            assert!(line <= src.lines().count().max(1) + 1);
        }
    }
});
