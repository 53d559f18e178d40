//! Fit a finite-time-singularity growth law to world population.
//!
//! Historical population growth between 500 BCE and the early 1960s is much
//! faster than exponential: the growth rate itself grows. A hyperbolic law
//! `C / (t0 - t)^alpha` captures this with three parameters and explains
//! nearly all of the variation in log space.
//!
//! Run with: `cargo run --example fit_population`

use accelerando::datasets;
use accelerando::{fit, r_squared, FitOptions, FitSpace, GrowthModel, ModelKind};

fn main() {
    let dataset = datasets::world_population();
    println!("dataset: {} ({})", dataset.id, dataset.series.unit());
    let series = dataset
        .series
        .slice_fit_ready(-500.0, 1962.0)
        .expect("bundled data covers the window");
    println!(
        "fitting {} points on [{}, {}]\n",
        series.len(),
        series.points()[0].t,
        series.points().last().unwrap().t
    );

    let opts = FitOptions {
        fit_space: Some(FitSpace::Log),
        ..FitOptions::default()
    };
    let result = fit(ModelKind::Hyperbolic, &series, &opts).expect("fit runs");

    match result.model {
        GrowthModel::Hyperbolic {
            coefficient,
            t_pole,
            exponent,
        } => {
            println!("hyperbolic fit: value(t) = C / (t0 - t)^alpha");
            println!("  C     = {coefficient:.4}");
            println!("  t0    = {t_pole:.1}");
            println!("  alpha = {exponent:.4}");
        }
        ref other => unreachable!("asked for hyperbolic, got {other:?}"),
    }
    println!("  R^2 (log space) = {:.5}", result.r_squared);
    println!("  converged = {} in {} iterations", result.converged, result.iterations);

    // an exponential cannot keep up: its log-space fit is visibly worse
    let exp = fit(ModelKind::Exponential, &series, &opts).expect("fit runs");
    let r2_exp = r_squared(&series, &exp.model, FitSpace::Log).expect("evaluable");
    println!("\nfor contrast, best exponential R^2 (log space) = {r2_exp:.5}");
}
