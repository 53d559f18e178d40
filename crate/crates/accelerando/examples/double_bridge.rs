//! The double-bridge experiment: pheromone trails find the short path.
//!
//! Two disjoint routes connect nest and food: a direct link of length 1 and
//! a two-hop detour of length 2. Ants choose links in proportion to
//! pheromone, completed walks deposit pheromone in proportion to inverse
//! path cost, and trails evaporate every iteration. The short branch gets
//! slightly more deposit per trip, attracts more ants, gets even more
//! deposit - and ends up holding nearly all the pheromone.
//!
//! Run with: `cargo run --example double_bridge`

use accelerando::{run_foraging, AntConfig, LinkState, Medium};

fn main() {
    let mut medium = Medium::default();
    for node in ["nest", "mid", "food"] {
        medium.add_node(node);
    }
    for (from, to) in [("nest", "food"), ("nest", "mid"), ("mid", "food")] {
        medium
            .add_link(from, to, LinkState::new(0.5, 1.0, 1.0))
            .expect("valid link");
    }

    let cfg = AntConfig {
        seed: 42,
        ..AntConfig::new("nest", "food")
    };
    println!(
        "{} ants, {} iterations, alpha {}, beta {}, rho {}, Q {}\n",
        cfg.n_ants, cfg.n_iterations, cfg.alpha, cfg.beta, cfg.rho, cfg.q
    );

    let report = run_foraging(&mut medium, &cfg).expect("food reachable");

    println!("best walk cost per iteration (sampled):");
    for stat in report.per_iteration.iter().step_by(25) {
        println!("  iter {:>3}: {:?}", stat.iter, stat.best_cost);
    }

    let short = medium
        .link(&"nest".into(), &"food".into())
        .expect("exists")
        .pheromone;
    let share = short / medium.total_pheromone();
    println!("\nfinal pheromone share on the short branch: {:.1}%", share * 100.0);
    println!("overall best cost: {:?}", report.best_cost());
}
