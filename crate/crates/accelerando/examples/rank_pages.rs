//! Rank nodes by the links pointing at them, directly or indirectly.
//!
//! A damped power iteration over the weight-proportional transition
//! structure: every agent that inserted a link voted, and votes from
//! highly-ranked nodes count for more. Dangling nodes spread their mass
//! uniformly; scores always sum to 1.
//!
//! Run with: `cargo run --example rank_pages`

use accelerando::quantstig::ranking_csv;
use accelerando::{rank_nodes, LinkState, Medium};

fn main() {
    let mut medium = Medium::default();
    for node in ["blog", "forum", "hub", "news", "wiki"] {
        medium.add_node(node);
    }
    for (from, to, w) in [
        ("blog", "hub", 0.9),
        ("blog", "wiki", 0.4),
        ("forum", "hub", 0.7),
        ("forum", "news", 0.2),
        ("hub", "wiki", 0.8),
        ("news", "hub", 0.5),
        ("wiki", "hub", 0.3),
    ] {
        medium
            .add_link(from, to, LinkState::new(w, 0.0, 1.0))
            .expect("valid link");
    }

    let scores = rank_nodes(&medium, 0.85, 1e-12).expect("non-empty medium");
    println!("{}", ranking_csv(&scores));
    let total: f64 = scores.values().sum();
    println!("sum of scores = {total}");
}
