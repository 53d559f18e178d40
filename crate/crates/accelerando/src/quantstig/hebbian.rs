//! Hebbian link learning with path shortcutting.

use std::collections::BTreeMap;

use crate::medium::{LinkState, Medium, NodeId};

use super::{HebbianConfig, StigmergyError};

/// One update scan over the accumulated traversal counters.
///
/// Shortcut candidates are collected first, against the weights as they
/// stood when the scan began: every two-hop chain `A -> B -> C` whose two
/// hops were each traversed at least `shortcut_threshold` times, and for
/// which no direct `A -> C` link exists, proposes a shortcut with weight
/// `shortcut_factor * min(w_AB, w_BC)` and heuristic `min(eta_AB, eta_BC)`.
/// When several intermediates propose the same shortcut the strongest
/// proposal wins.
///
/// Then every link with traversals gains `lambda * traversals` weight, every
/// unused link decays by the factor `1 - mu`, the shortcuts are inserted
/// (with zero pheromone and zero traversals), and all traversal counters
/// reset. Weights are clamped into the medium's bounds throughout.
///
/// Returns the shortcuts created, in canonical order. A second scan without
/// fresh traversals creates nothing.
pub fn hebbian_update(
    medium: &mut Medium,
    cfg: &HebbianConfig,
) -> Result<Vec<(NodeId, NodeId)>, StigmergyError> {
    cfg.validate()?;

    // phase 1: collect shortcut proposals on the pre-update state
    let mut proposals: BTreeMap<(NodeId, NodeId), LinkState> = BTreeMap::new();
    let hot: Vec<(NodeId, NodeId, LinkState)> = medium
        .all_links()
        .filter(|(_, _, s)| s.traversals >= cfg.shortcut_threshold)
        .map(|(f, t, s)| (f.clone(), t.clone(), *s))
        .collect();
    for (a, b, ab) in &hot {
        for (b2, c, bc) in &hot {
            if b2 != b || c == a {
                continue;
            }
            if medium.link(a, c).is_some() {
                continue;
            }
            let candidate = LinkState::new(
                cfg.shortcut_factor * ab.weight.min(bc.weight),
                0.0,
                ab.heuristic.min(bc.heuristic),
            );
            proposals
                .entry((a.clone(), c.clone()))
                .and_modify(|existing| {
                    if candidate.weight > existing.weight {
                        *existing = candidate;
                    }
                })
                .or_insert(candidate);
        }
    }

    // phase 2: reinforce traveled links, decay the rest, reset counters
    let updates: Vec<(NodeId, NodeId, f64)> = medium
        .all_links()
        .map(|(f, t, s)| {
            let w = if s.traversals > 0 {
                s.weight + cfg.lambda * s.traversals as f64
            } else {
                s.weight * (1.0 - cfg.mu)
            };
            (f.clone(), t.clone(), w)
        })
        .collect();
    for (f, t, w) in updates {
        medium.set_weight(&f, &t, w)?;
        medium
            .link_mut(&f, &t)
            .expect("link exists")
            .traversals = 0;
    }

    // phase 3: insert the shortcuts
    let mut created = Vec::with_capacity(proposals.len());
    for ((from, to), state) in proposals {
        medium.add_link(from.clone(), to.clone(), state)?;
        created.push((from, to));
    }
    Ok(created)
}
