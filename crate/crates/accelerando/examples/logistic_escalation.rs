//! Fit a logistic escalation: ever shorter, steeper S-curves.
//!
//! Technology diffusion is classically S-shaped, but successive waves
//! saturate faster and faster. A logistic escalation sums S-curves whose
//! durations (10%-to-90% rise times) strictly decrease; the duration
//! ordering is built into the fit's parameterization, not hoped for.
//!
//! Run with: `cargo run --example logistic_escalation`

use accelerando::growthfit::LogisticStage;
use accelerando::{fit_escalation, FitOptions, GrowthModel, Point, TimeSeries};

fn main() {
    // synthesize two diffusion waves: the second is twice as steep
    let truth = GrowthModel::LogisticEscalation {
        stages: vec![
            LogisticStage {
                capacity: 8.0,
                rate: 1.0,
                midpoint: 3.0,
            },
            LogisticStage {
                capacity: 15.0,
                rate: 2.0,
                midpoint: 8.0,
            },
        ],
    };
    let times: Vec<f64> = (0..40).map(|i| i as f64 * 0.3).collect();
    let values = truth.values_at(&times).expect("evaluable");
    let series = TimeSeries::new(
        "adoption",
        "units",
        times.iter().zip(&values).map(|(&t, &v)| Point::new(t, v)).collect(),
    )
    .expect("valid series");

    let result = fit_escalation(&series, 2, &FitOptions::default()).expect("feasible");
    println!("r^2 = {:.6}", result.r_squared);
    if let GrowthModel::LogisticEscalation { stages } = &result.model {
        println!("{:>7} {:>9} {:>9} {:>10}", "stage", "capacity", "midpoint", "duration");
        for (i, s) in stages.iter().enumerate() {
            println!(
                "{:>7} {:>9.3} {:>9.3} {:>10.3}",
                i + 1,
                s.capacity,
                s.midpoint,
                s.duration()
            );
        }
        println!(
            "\ndurations strictly decrease: {}",
            stages.windows(2).all(|w| w[1].duration() < w[0].duration())
        );
    }
}
