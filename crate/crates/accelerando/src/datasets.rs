//! Bundled historical datasets.
//!
//! The raw CSV files and their provenance notes live under `data/` and are
//! compiled into the library so that examples and tests need no file paths.

use crate::timeseries::{Dataset, TimeSeries};

const WORLD_POPULATION_CSV: &str = include_str!("../data/world_population.csv");
const WORLD_POPULATION_PROVENANCE: &str = include_str!("../data/world_population.provenance.txt");
const INFO_SPEED_CSV: &str = include_str!("../data/info_speed.csv");
const INFO_SPEED_PROVENANCE: &str = include_str!("../data/info_speed.provenance.txt");

/// World population estimates in millions, 1000 BCE through 2000 CE.
pub fn world_population() -> Dataset {
    Dataset {
        id: "world_population".to_string(),
        series: TimeSeries::from_csv("world_population", "millions", WORLD_POPULATION_CSV)
            .expect("bundled world_population.csv is valid"),
        provenance: WORLD_POPULATION_PROVENANCE.to_string(),
    }
}

/// Long-distance information transmission speed in bits per second across
/// five technology epochs, from couriered letters to fiber optics.
pub fn info_speed() -> Dataset {
    Dataset {
        id: "info_speed".to_string(),
        series: TimeSeries::from_csv("info_speed", "bits/s", INFO_SPEED_CSV)
            .expect("bundled info_speed.csv is valid"),
        provenance: INFO_SPEED_PROVENANCE.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn info_speed_has_the_five_epochs() {
        let ds = info_speed();
        let values: Vec<f64> = ds.series.values().collect();
        assert_eq!(values, vec![0.03, 3.0, 300.0, 60_000.0, 1e9]);
        assert_eq!(ds.series.len(), 5);
        assert!(!ds.provenance.is_empty());
    }

    #[test]
    fn world_population_spans_the_fit_window() {
        let ds = world_population();
        let first = ds.series.points()[0].t;
        let last = ds.series.points().last().unwrap().t;
        assert!(first <= -500.0, "first point {first}");
        assert!(last >= 2000.0, "last point {last}");
        assert!(ds.series.len() >= 20);
        ds.series.ensure_positive().unwrap();
    }

    #[test]
    fn population_slices_to_the_classic_fit_window() {
        let series = world_population().series;
        let window = series.slice(-500.0, 1962.0).unwrap();
        assert!(window.len() >= 20);
        assert!(window
            .times()
            .all(|t| (-500.0..=1962.0).contains(&t)));
        assert_eq!(window.points()[0].t, -500.0);
        assert_eq!(window.points().last().unwrap().t, 1960.0);
    }

    #[test]
    fn info_speed_doubling_profile_strictly_decreases() {
        let profile = info_speed().series.doubling_time_profile().unwrap();
        let vals: Vec<f64> = profile.values().collect();
        assert_eq!(vals.len(), 4);
        for w in vals.windows(2) {
            assert!(w[1] < w[0], "profile not strictly decreasing: {vals:?}");
        }
    }
}
