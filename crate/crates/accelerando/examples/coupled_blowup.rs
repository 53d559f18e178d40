//! Integrate the coupled population-technology system to its pole.
//!
//! With population relaxing quickly toward its technology-set carrying
//! capacity, the pair obeys `dT/dt ~ c*b*T^2`, whose solution reaches
//! infinity at the finite time `t* = 1/(c*b*T0)`. The integrator cannot step
//! through the pole; it detects the blow-up and reports an extrapolated
//! pole estimate instead.
//!
//! Run with: `cargo run --example coupled_blowup`

use accelerando::{
    integrate, IntegratorConfig, MacroParams, MacroState, QuasiEquilibrium, Termination,
};

fn main() {
    // fast relaxation: a = 200 >> c, so N hugs b*T from the start
    let params = MacroParams::new(200.0, 1.0, 1.0).expect("positive parameters");
    let init = MacroState::new(0.0, 1.0, 1.0).expect("positive state");

    let qe = QuasiEquilibrium::new(init.technology, &params).expect("valid");
    println!("closed-form pole: t* = 1/(c*b*T0) = {}", qe.blowup_time());
    for t in [0.0, 0.5, 0.9, 0.99] {
        println!("  T({t:.2}) = {:>10.3}", qe.technology_at(t).unwrap());
    }

    let cfg = IntegratorConfig::adaptive(2.0);
    let trajectory = integrate(&init, &params, &cfg).expect("valid config");
    println!("\nintegrated {} accepted steps", trajectory.samples.len());
    match trajectory.termination {
        Termination::BlowUp { t_est } => {
            let err = (t_est - qe.blowup_time()).abs() / qe.blowup_time();
            println!("blow-up detected: t_est = {t_est:.6} (relative error {:.3e})", err);
        }
        other => println!("unexpected termination: {other:?}"),
    }
    let last = trajectory.last();
    println!(
        "last state: t = {:.6}, N = {:.3e}, T = {:.3e}",
        last.t, last.population, last.technology
    );
}
