//! Hebbian link learning: strengthen what is used, shortcut what is hot.
//!
//! Seeded random walkers generate traffic on a small graph with a popular
//! two-hop detour. The update scan then strengthens traveled links, weakens
//! idle ones, and creates a direct link across any two-hop chain whose both
//! hops were traversed often enough.
//!
//! Run with: `cargo run --example hebbian_shortcuts`

use accelerando::quantstig::hebbian_update;
use accelerando::{choose_next, HebbianConfig, LinkState, Medium};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut medium = Medium::default();
    for node in ["start", "hub", "goal", "side"] {
        medium.add_node(node);
    }
    // traffic flows start -> hub -> goal; a side road sees almost none
    for (from, to) in [
        ("start", "hub"),
        ("hub", "goal"),
        ("start", "side"),
        ("side", "goal"),
        ("goal", "start"),
    ] {
        medium
            .add_link(from, to, LinkState::new(0.4, 1.0, 1.0))
            .expect("valid link");
    }
    // bias the trail state so walkers prefer the hub route
    medium.link_mut(&"start".into(), &"hub".into()).unwrap().pheromone = 8.0;

    let cfg = HebbianConfig {
        shortcut_threshold: 10,
        ..HebbianConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _walk in 0..60 {
        let mut here: accelerando::NodeId = "start".into();
        while here != "goal".into() {
            let next = choose_next(&here, &medium, 1.0, 0.0, &mut rng).expect("no dead ends");
            medium.link_mut(&here, &next).unwrap().traversals += 1;
            here = next;
        }
    }

    println!("traversals before the scan:");
    let mut snapshot = Vec::new();
    for (from, to, s) in medium.all_links() {
        println!("  {from} -> {to}: {} traversals, weight {:.3}", s.traversals, s.weight);
        snapshot.push((from.clone(), to.clone()));
    }

    let created = hebbian_update(&mut medium, &cfg).expect("valid config");
    println!("\nshortcuts created: {created:?}");
    println!("\nweights after the scan:");
    for (from, to, s) in medium.all_links() {
        let marker = if !snapshot.contains(&(from.clone(), to.clone())) {
            "  <- new"
        } else {
            ""
        };
        println!("  {from} -> {to}: weight {:.3}{marker}", s.weight);
    }
}
