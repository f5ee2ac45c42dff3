#![no_main]

//! Scenarios that parse are validated; accepted ones must yield a feasible
//! initial state.

use libfuzzer_sys::fuzz_target;
use rollsim::Scenario;
use rollsim_core::full::constraint_residuals;

fuzz_target!(|src: &str| {
    let Ok(scenario) = Scenario::from_str(src, "fuzz.toml") else {
        return;
    };
    assert!(scenario.integrator.validate().is_ok());
    let state = scenario.full_state();
    assert!(state.is_finite());
    let (so3, contact) =
        constraint_residuals(&scenario.scene, &state).expect("initial normals were checked");
    assert!(so3 < 1e-9 && contact < 1e-9, "so3 {so3}, contact {contact}");
});
