//! Rank growth laws against the population record by AIC.
//!
//! Run with: `cargo run --example compare_growth_models`

use accelerando::datasets;
use accelerando::{compare_models, FitOptions, ModelKind};

fn main() {
    let series = datasets::world_population()
        .series
        .slice_fit_ready(-500.0, 1962.0)
        .expect("bundled data covers the window");

    let kinds = [
        ModelKind::Exponential,
        ModelKind::Logistic,
        ModelKind::Hyperbolic,
    ];
    let comparison = compare_models(&series, &kinds, &FitOptions::default());

    println!("{:<14} {:>14} {:>10} {:>10}", "model", "sse", "r^2", "aic");
    for entry in &comparison.ranked {
        println!(
            "{:<14} {:>14.1} {:>10.4} {:>10.1}",
            entry.kind.to_string(),
            entry.result.sse,
            entry.result.r_squared,
            entry.aic
        );
    }
    for (kind, err) in &comparison.failures {
        println!("{kind}: failed to fit ({err})");
    }
    println!(
        "\nbest by AIC: {}",
        comparison.ranked.first().map(|e| e.kind.to_string()).unwrap_or_default()
    );
}
