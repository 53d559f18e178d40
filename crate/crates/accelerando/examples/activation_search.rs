//! Spreading activation: associative search without keywords.
//!
//! Activation injected at one concept flows along weighted links, decaying
//! each hop; after a few steps the most strongly associated concepts hold
//! the most activation. Sinks retain their (decayed) activation instead of
//! losing it.
//!
//! Run with: `cargo run --example activation_search`

use std::collections::BTreeMap;

use accelerando::{spread_activation, ActivationState, LinkState, Medium};

fn main() {
    let mut medium = Medium::default();
    for node in ["ant", "colony", "insect", "pheromone", "trail", "wing"] {
        medium.add_node(node);
    }
    for (from, to, w) in [
        ("ant", "colony", 0.9),
        ("ant", "insect", 0.6),
        ("ant", "pheromone", 0.8),
        ("colony", "ant", 0.5),
        ("insect", "wing", 0.7),
        ("pheromone", "trail", 0.9),
        ("trail", "pheromone", 0.4),
    ] {
        medium
            .add_link(from, to, LinkState::new(w, 0.0, 1.0))
            .expect("valid link");
    }

    let mut init = BTreeMap::new();
    init.insert("ant".into(), 1.0);
    let state = ActivationState::new(init, 0.8, 0.0).expect("valid");

    for steps in [1, 2, 4] {
        let out = spread_activation(&medium, &state, steps).expect("nodes exist");
        println!("after {steps} step(s):");
        let mut ranked: Vec<(&accelerando::NodeId, f64)> =
            out.values().iter().map(|(n, &v)| (n, v)).collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
        for (node, value) in ranked {
            if value > 0.0 {
                println!("  {node:<10} {value:.4}");
            }
        }
        println!("  total = {:.4}\n", out.total());
    }
}
