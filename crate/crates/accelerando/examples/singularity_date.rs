//! Estimate the singularity date of world population growth.
//!
//! Fits `N(t) = C / (t0 - t)` to the pre-transition population record and
//! brackets the pole year `t0` with a residual-resampling bootstrap. The
//! classic extrapolations of this family land in the 2020s-2050s; the exact
//! year depends on the dataset reconstruction and the fitting space, so the
//! interval matters more than the point.
//!
//! Run with: `cargo run --example singularity_date`

use accelerando::datasets;
use accelerando::{estimate_singularity, AlphaMode, FitOptions};

fn main() {
    let series = datasets::world_population()
        .series
        .slice_fit_ready(-500.0, 1962.0)
        .expect("bundled data covers the window");

    let opts = FitOptions {
        seed: 42,
        n_resamples: 200,
        ..FitOptions::default()
    };
    let estimate = estimate_singularity(&series, AlphaMode::Fixed(1.0), &opts)
        .expect("hyperbolic fit converges on the population record");

    println!("pole of the fitted hyperbola (alpha = 1):");
    println!("  t0_hat = {:.1}", estimate.t0_hat);
    println!(
        "  90% bootstrap interval = [{:.1}, {:.1}]  ({} resamples, seed {})",
        estimate.ci_low, estimate.ci_high, estimate.n_resamples, estimate.seed
    );
    println!("\nreport JSON:\n{}", estimate.to_json());
}
