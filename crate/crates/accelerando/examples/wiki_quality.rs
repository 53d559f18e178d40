//! Collaborative editing as variation and selection.
//!
//! Agents with different skill levels and noisy quality perception take
//! turns replacing the statement that looks worst with a fresh draft,
//! keeping the draft only when it looks better. No agent sees true quality
//! and every past version stays in the append-only history, yet the mean
//! true quality of the article climbs.
//!
//! Run with: `cargo run --example wiki_quality`

use accelerando::{run_wiki_sim, WikiConfig};

fn main() {
    let cfg = WikiConfig {
        seed: 7,
        ..WikiConfig::default()
    };
    println!(
        "{} agents (skills {:?}, noise {}), {} edits on {} statements at quality {}\n",
        cfg.n_agents, cfg.skill_range, cfg.noise, cfg.n_edits, cfg.init_statements, cfg.init_quality
    );

    let report = run_wiki_sim(&cfg).expect("valid config");

    println!("{:>6} {:>14} {:>13}", "edit", "mean quality", "min quality");
    let last = report.trajectory.last().unwrap();
    for point in report.trajectory.iter().step_by(100) {
        println!(
            "{:>6} {:>14.4} {:>13.4}",
            point.edit, point.mean_quality, point.min_quality
        );
    }
    if !last.edit.is_multiple_of(100) {
        println!(
            "{:>6} {:>14.4} {:>13.4}",
            last.edit, last.mean_quality, last.min_quality
        );
    }

    println!(
        "\nmean quality: {:.4} -> {:.4}",
        report.initial_mean_quality(),
        report.final_mean_quality
    );
    println!(
        "history: {} revisions, every one still retrievable",
        report.article.len()
    );
    let rejected = report.config.n_edits + 1 - report.article.len();
    println!("rejected edits (no revision appended): {rejected}");
}
