//! Ephemeralization in one table: information transmission speed.
//!
//! From couriered letters to fiber optics the speed of long-distance
//! information transmission has grown by more than ten orders of magnitude,
//! and the local doubling time keeps shrinking: the growth is much faster
//! than exponential.
//!
//! Run with: `cargo run --example info_speed_trend`

use accelerando::datasets;

fn main() {
    let dataset = datasets::info_speed();
    println!("{}", dataset.provenance.trim());
    println!();
    println!("{:>6} {:>14}", "year", "bits/s");
    for p in dataset.series.points() {
        println!("{:>6} {:>14}", p.t, p.v);
    }

    let first = dataset.series.points()[0].v;
    let last = dataset.series.points().last().unwrap().v;
    println!("\noverall ratio: {:.2e}", last / first);

    let profile = dataset.series.doubling_time_profile().expect("positive values");
    println!("\nlocal doubling time (years), at interval midpoints:");
    println!("{:>8} {:>10}", "t_mid", "tau_d");
    for p in profile.points() {
        println!("{:>8.1} {:>10.2}", p.t, p.v);
    }
    let values: Vec<f64> = profile.values().collect();
    println!(
        "\nstrictly decreasing: {}",
        values.windows(2).all(|w| w[1] < w[0])
    );
}
