//! Quantitative stigmergy: mechanisms that rank or prioritize existing
//! options by reading and reinforcing numeric trail state on the medium.
//!
//! Four mechanisms share the [`Medium`](crate::medium::Medium):
//!
//! - ant-colony foraging ([`run_foraging`]): walkers choose links in
//!   proportion to pheromone and heuristic, successful walks deposit
//!   pheromone in proportion to path quality, trails evaporate;
//! - Hebbian link learning ([`hebbian_update`]): frequently traveled links
//!   strengthen, unused links weaken, and heavily traveled two-hop chains
//!   grow direct shortcut links;
//! - spreading activation ([`spread_activation`]): numeric activation
//!   propagates along weighted links with decay, exploring many paths in
//!   parallel;
//! - link-structure ranking ([`rank_nodes`]): a damped power iteration over
//!   the weight-proportional transition structure scores every node by the
//!   links directly or indirectly pointing at it.
//!
//! Every stochastic entry point takes a seed and is bitwise reproducible.

mod activation;
mod foraging;
mod hebbian;
mod ranking;

pub use activation::{spread_activation, ActivationState};
pub use foraging::{choose_next, run_foraging, ForagingReport, IterationStat};
pub use hebbian::hebbian_update;
pub use ranking::{rank_nodes, ranking_csv};

use serde::Serialize;
use thiserror::Error;

use crate::medium::{MediumError, NodeId};

/// Errors from the quantitative-stigmergy operations.
#[derive(Debug, Error)]
pub enum StigmergyError {
    #[error("node {0} has no outgoing links")]
    DeadEnd(NodeId),
    #[error("no path from {nest} to {food} in the medium")]
    Unreachable { nest: NodeId, food: NodeId },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("medium has no nodes")]
    EmptyMedium,
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("power iteration did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error(transparent)]
    Medium(#[from] MediumError),
}

/// Ant-colony foraging configuration.
#[derive(Debug, Clone, Serialize)]
pub struct AntConfig {
    pub n_ants: usize,
    /// Pheromone exponent.
    pub alpha: f64,
    /// Heuristic exponent.
    pub beta: f64,
    /// Evaporation per iteration, in [0, 1).
    pub rho: f64,
    /// Deposit constant.
    pub q: f64,
    pub n_iterations: usize,
    pub nest: NodeId,
    pub food: NodeId,
    pub seed: u64,
}

impl AntConfig {
    /// Standard configuration: 20 ants, alpha 1, beta 2, rho 0.1, Q 1,
    /// 200 iterations.
    pub fn new(nest: impl Into<NodeId>, food: impl Into<NodeId>) -> Self {
        Self {
            n_ants: 20,
            alpha: 1.0,
            beta: 2.0,
            rho: 0.1,
            q: 1.0,
            n_iterations: 200,
            nest: nest.into(),
            food: food.into(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), StigmergyError> {
        if self.nest == self.food {
            return Err(StigmergyError::InvalidConfig(
                "nest and food must differ".into(),
            ));
        }
        if self.n_ants == 0 || self.n_iterations == 0 {
            return Err(StigmergyError::InvalidConfig(
                "n_ants and n_iterations must be >= 1".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(StigmergyError::InvalidConfig(format!(
                "rho must lie in [0, 1), got {}",
                self.rho
            )));
        }
        if self.alpha < 0.0 || self.beta < 0.0 || !self.alpha.is_finite() || !self.beta.is_finite()
        {
            return Err(StigmergyError::InvalidConfig(
                "alpha and beta must be finite and >= 0".into(),
            ));
        }
        if self.q <= 0.0 || self.q.is_nan() {
            return Err(StigmergyError::InvalidConfig(format!(
                "Q must be > 0, got {}",
                self.q
            )));
        }
        Ok(())
    }
}

/// Hebbian reinforcement configuration.
#[derive(Debug, Clone, Serialize)]
pub struct HebbianConfig {
    /// Weight gain per traversal.
    pub lambda: f64,
    /// Decay factor applied to links unused since the last scan, in (0, 1).
    pub mu: f64,
    /// Minimum traversals on both hops for a shortcut, >= 1.
    pub shortcut_threshold: u64,
    /// New shortcut weight as a fraction of the weaker hop, in (0, 1].
    pub shortcut_factor: f64,
    /// Reserved for traffic generators layered on top of the update rule;
    /// the update itself is deterministic.
    pub seed: u64,
}

impl Default for HebbianConfig {
    fn default() -> Self {
        Self {
            lambda: 0.1,
            mu: 0.05,
            shortcut_threshold: 5,
            shortcut_factor: 1.0,
            seed: 0,
        }
    }
}

impl HebbianConfig {
    pub fn validate(&self) -> Result<(), StigmergyError> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(StigmergyError::InvalidConfig(format!(
                "lambda must be > 0, got {}",
                self.lambda
            )));
        }
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return Err(StigmergyError::InvalidConfig(format!(
                "mu must lie in (0, 1), got {}",
                self.mu
            )));
        }
        if self.shortcut_threshold == 0 {
            return Err(StigmergyError::InvalidConfig(
                "shortcut_threshold must be >= 1".into(),
            ));
        }
        if !(self.shortcut_factor > 0.0 && self.shortcut_factor <= 1.0) {
            return Err(StigmergyError::InvalidConfig(format!(
                "shortcut_factor must lie in (0, 1], got {}",
                self.shortcut_factor
            )));
        }
        Ok(())
    }
}
