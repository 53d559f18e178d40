//! Hyperbolic growth until a demographic switch, stabilization after.
//!
//! Pure coupled dynamics race toward a pole, but real demography switches
//! regime: past the switch time the population follows a plain logistic
//! toward a fixed ceiling while technology keeps compounding. The trajectory
//! is continuous at the switch and the population flattens out a century or
//! so later.
//!
//! Run with: `cargo run --example demographic_transition`

use accelerando::{
    integrate_with_transition, IntegratorConfig, MacroParams, MacroState, RegimeSwitch,
    Termination,
};

fn main() {
    // abstract units; the switch fires at t = 12 with a ceiling of 10
    let params = MacroParams::new(2.0, 1.0, 0.02).expect("positive parameters");
    let init = MacroState::new(0.0, 0.5, 0.6).expect("positive state");
    let switch = RegimeSwitch::new(12.0, 10.0, 0.6).expect("valid switch");
    let cfg = IntegratorConfig::adaptive(30.0).with_blowup_threshold(1e15);

    let trajectory =
        integrate_with_transition(&init, &params, &switch, &cfg).expect("valid setup");
    assert_eq!(trajectory.termination, Termination::ReachedEnd);

    println!("{:>6} {:>12} {:>14}", "t", "N", "T");
    let mut next_report = 0.0;
    for s in &trajectory.samples {
        if s.t >= next_report {
            println!("{:>6.1} {:>12.4} {:>14.4}", s.t, s.population, s.technology);
            next_report += 2.0;
        }
    }
    let last = trajectory.last();
    println!(
        "\npopulation settles at {:.4} (ceiling {}), technology still grows",
        last.population, switch.k_pop
    );
    println!("trajectory CSV is available via Trajectory::to_csv()");
}
