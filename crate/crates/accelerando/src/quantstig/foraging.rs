//! Ant-colony foraging on the medium.

use std::collections::{BTreeMap, VecDeque};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::medium::{Medium, NodeId};

use super::{AntConfig, StigmergyError};

/// Per-iteration statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationStat {
    pub iter: usize,
    /// Cost of the best completed walk this iteration, if any completed.
    pub best_cost: Option<f64>,
}

/// Result of a foraging run.
#[derive(Debug, Clone)]
pub struct ForagingReport {
    pub per_iteration: Vec<IterationStat>,
    /// Canonical snapshot of the medium after the final iteration.
    pub final_medium_snapshot: Value,
    pub seed: u64,
    pub config: AntConfig,
}

impl ForagingReport {
    pub fn to_json(&self) -> Value {
        let per_iteration: Vec<Value> = self
            .per_iteration
            .iter()
            .map(|s| json!({"iter": s.iter, "best_cost": s.best_cost}))
            .collect();
        json!({
            "per_iteration": per_iteration,
            "final_medium_snapshot": self.final_medium_snapshot,
            "seed": self.seed,
            "config": serde_json::to_value(&self.config).expect("config serializes"),
        })
    }

    /// Best (lowest) completed walk cost across all iterations.
    pub fn best_cost(&self) -> Option<f64> {
        self.per_iteration
            .iter()
            .filter_map(|s| s.best_cost)
            .min_by(f64::total_cmp)
    }
}

/// Samples the next node from `current` with probability proportional to
/// `pheromone^alpha * heuristic^beta` over the outgoing links.
///
/// Consumes exactly one draw from `rng`. When every score is zero (for
/// example on a cold start with `alpha > 0` and no pheromone anywhere) the
/// choice falls back to uniform over the out-neighbors.
pub fn choose_next(
    current: &NodeId,
    medium: &Medium,
    alpha: f64,
    beta: f64,
    rng: &mut impl Rng,
) -> Result<NodeId, StigmergyError> {
    let mut targets: Vec<&NodeId> = Vec::new();
    let mut scores: Vec<f64> = Vec::new();
    let mut total = 0.0;
    for (to, state) in medium.out_links(current) {
        let score = state.pheromone.powf(alpha) * state.heuristic.powf(beta);
        let score = if score.is_finite() { score } else { 0.0 };
        targets.push(to);
        scores.push(score);
        total += score;
    }
    if targets.is_empty() {
        return Err(StigmergyError::DeadEnd(current.clone()));
    }
    let u: f64 = rng.gen();
    if total <= 0.0 {
        // uniform fallback
        let idx = ((u * targets.len() as f64) as usize).min(targets.len() - 1);
        return Ok(targets[idx].clone());
    }
    let mut acc = 0.0;
    let target = u * total;
    for (to, score) in targets.iter().zip(&scores) {
        acc += score;
        if target < acc {
            return Ok((*to).clone());
        }
    }
    Ok(targets[targets.len() - 1].clone())
}

/// Removes cycles from a walk, keeping the first visit of every node.
fn loop_erase(walk: &[NodeId]) -> Vec<NodeId> {
    let mut out: Vec<NodeId> = Vec::with_capacity(walk.len());
    let mut position: BTreeMap<NodeId, usize> = BTreeMap::new();
    for node in walk {
        if let Some(&p) = position.get(node) {
            for removed in out.drain(p + 1..) {
                position.remove(&removed);
            }
        } else {
            position.insert(node.clone(), out.len());
            out.push(node.clone());
        }
    }
    out
}

/// Length of a link: the inverse of its heuristic when positive, 1 otherwise.
fn link_length(medium: &Medium, from: &NodeId, to: &NodeId) -> f64 {
    match medium.link(from, to) {
        Some(s) if s.heuristic > 0.0 => 1.0 / s.heuristic,
        _ => 1.0,
    }
}

fn path_cost(medium: &Medium, path: &[NodeId]) -> f64 {
    path.windows(2)
        .map(|w| link_length(medium, &w[0], &w[1]))
        .sum()
}

fn reachable(medium: &Medium, from: &NodeId, to: &NodeId) -> bool {
    let mut seen = std::collections::BTreeSet::new();
    let mut queue = VecDeque::from([from.clone()]);
    seen.insert(from.clone());
    while let Some(node) = queue.pop_front() {
        if &node == to {
            return true;
        }
        for (next, _) in medium.out_links(&node) {
            if seen.insert(next.clone()) {
                queue.push_back(next.clone());
            }
        }
    }
    false
}

/// Runs the foraging simulation on `medium`.
///
/// Each iteration the ants walk nest-to-food sequentially in index order,
/// all choosing against the pheromone state frozen at the start of the
/// iteration. Walks are loop-erased and capped at `10 * node count` steps;
/// walks that reach the food deposit `Q / cost` pheromone on every link of
/// the erased path after the iteration's evaporation. Deterministic per
/// seed.
pub fn run_foraging(
    medium: &mut Medium,
    cfg: &AntConfig,
) -> Result<ForagingReport, StigmergyError> {
    cfg.validate()?;
    for node in [&cfg.nest, &cfg.food] {
        if !medium.contains_node(node) {
            return Err(StigmergyError::UnknownNode(node.clone()));
        }
    }
    if !reachable(medium, &cfg.nest, &cfg.food) {
        return Err(StigmergyError::Unreachable {
            nest: cfg.nest.clone(),
            food: cfg.food.clone(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let max_steps = 10 * medium.node_count();
    let mut per_iteration = Vec::with_capacity(cfg.n_iterations);

    for iter in 0..cfg.n_iterations {
        // ants choose against the iteration-start trail state
        let frozen = medium.clone();
        let mut completed: Vec<Vec<NodeId>> = Vec::new();
        for _ant in 0..cfg.n_ants {
            let mut walk = vec![cfg.nest.clone()];
            let mut current = cfg.nest.clone();
            for _step in 0..max_steps {
                if current == cfg.food {
                    break;
                }
                match choose_next(&current, &frozen, cfg.alpha, cfg.beta, &mut rng) {
                    Ok(next) => {
                        walk.push(next.clone());
                        current = next;
                    }
                    Err(StigmergyError::DeadEnd(_)) => break,
                    Err(other) => return Err(other),
                }
            }
            if current == cfg.food {
                completed.push(loop_erase(&walk));
            }
        }

        medium.evaporate(cfg.rho)?;
        let mut best_cost: Option<f64> = None;
        for path in &completed {
            let cost = path_cost(medium, path);
            medium.deposit(path, 1.0 / cost, cfg.q)?;
            best_cost = Some(match best_cost {
                Some(b) => b.min(cost),
                None => cost,
            });
        }
        per_iteration.push(IterationStat { iter, best_cost });
    }

    Ok(ForagingReport {
        per_iteration,
        final_medium_snapshot: medium.snapshot_value(),
        seed: cfg.seed,
        config: cfg.clone(),
    })
}
