//! Spreading activation over the weighted link structure.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::medium::{Medium, NodeId};

use super::StigmergyError;

/// Node activation values plus the propagation parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationState {
    values: BTreeMap<NodeId, f64>,
    /// Retention factor per step, in (0, 1].
    pub decay: f64,
    /// Values below this are zeroed after each step.
    pub threshold: f64,
}

impl ActivationState {
    pub fn new(
        values: BTreeMap<NodeId, f64>,
        decay: f64,
        threshold: f64,
    ) -> Result<Self, StigmergyError> {
        if !(decay > 0.0 && decay <= 1.0) {
            return Err(StigmergyError::InvalidConfig(format!(
                "decay must lie in (0, 1], got {decay}"
            )));
        }
        if !(threshold >= 0.0 && threshold.is_finite()) {
            return Err(StigmergyError::InvalidConfig(format!(
                "threshold must be finite and >= 0, got {threshold}"
            )));
        }
        for (node, &v) in &values {
            if !(v.is_finite() && v >= 0.0) {
                return Err(StigmergyError::InvalidConfig(format!(
                    "activation of {node} must be finite and >= 0, got {v}"
                )));
            }
        }
        Ok(Self {
            values,
            decay,
            threshold,
        })
    }

    pub fn value(&self, node: &NodeId) -> f64 {
        self.values.get(node).copied().unwrap_or(0.0)
    }

    pub fn values(&self) -> &BTreeMap<NodeId, f64> {
        &self.values
    }

    pub fn total(&self) -> f64 {
        self.values.values().sum()
    }

    pub fn to_json(&self) -> Value {
        let values: BTreeMap<&str, f64> =
            self.values.iter().map(|(k, &v)| (k.as_str(), v)).collect();
        json!({
            "values": values,
            "decay": self.decay,
            "threshold": self.threshold,
        })
    }
}

/// Propagates activation for `steps` steps.
///
/// Per step every node passes `decay` times its activation along its
/// outgoing links in proportion to their weights. A node with no outgoing
/// weight (a sink) retains its own activation, scaled by the same decay, so
/// activation never silently vanishes at dangling nodes. After the transfer,
/// values below the threshold are zeroed.
///
/// Initial values on nodes missing from `init` are zero. Nodes referenced by
/// `init` must exist in the medium.
pub fn spread_activation(
    medium: &Medium,
    init: &ActivationState,
    steps: usize,
) -> Result<ActivationState, StigmergyError> {
    for node in init.values().keys() {
        if !medium.contains_node(node) {
            return Err(StigmergyError::UnknownNode(node.clone()));
        }
    }

    // dense over the medium's nodes, canonical order
    let mut current: BTreeMap<NodeId, f64> = medium
        .nodes()
        .map(|n| (n.clone(), init.value(n)))
        .collect();

    for _ in 0..steps {
        let mut next: BTreeMap<NodeId, f64> =
            medium.nodes().map(|n| (n.clone(), 0.0)).collect();
        for (node, &v) in &current {
            if v == 0.0 {
                continue;
            }
            let out_weight: f64 = medium.out_links(node).map(|(_, s)| s.weight).sum();
            if out_weight > 0.0 {
                for (to, s) in medium.out_links(node) {
                    *next.get_mut(to).expect("dense map") +=
                        init.decay * v * s.weight / out_weight;
                }
            } else {
                // sink self-retention
                *next.get_mut(node).expect("dense map") += init.decay * v;
            }
        }
        if init.threshold > 0.0 {
            for v in next.values_mut() {
                if *v < init.threshold {
                    *v = 0.0;
                }
            }
        }
        current = next;
    }

    ActivationState::new(current, init.decay, init.threshold)
}
