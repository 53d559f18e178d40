//! Link-structure node ranking by damped power iteration.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::medium::{Medium, NodeId};

use super::StigmergyError;

/// Scores every node by the links directly or indirectly pointing at it.
///
/// Power iteration on the damped, weight-proportional, row-normalized
/// transition structure with uniform teleport:
///
/// ```text
/// x'_i = (1 - d)/n + d * (sum over j->i of w_ji/W_j * x_j  +  dangling/n)
/// ```
///
/// Nodes without outgoing weight redistribute their mass uniformly. Link
/// weights (not pheromone) carry the transition mass: ranking reflects the
/// durable link structure, not volatile traffic. Iterates until the L1
/// change drops below `tol`; scores sum to 1.
pub fn rank_nodes(
    medium: &Medium,
    damping: f64,
    tol: f64,
) -> Result<BTreeMap<NodeId, f64>, StigmergyError> {
    let n = medium.node_count();
    if n == 0 {
        return Err(StigmergyError::EmptyMedium);
    }
    if !(damping > 0.0 && damping < 1.0) {
        return Err(StigmergyError::InvalidConfig(format!(
            "damping must lie in (0, 1), got {damping}"
        )));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(StigmergyError::InvalidConfig(format!(
            "tol must be finite and > 0, got {tol}"
        )));
    }

    let nodes: Vec<NodeId> = medium.nodes().cloned().collect();
    let index: BTreeMap<&NodeId, usize> = nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();

    // incoming transition fractions per node, plus the dangling set
    let mut out_weight = vec![0.0f64; n];
    for (i, node) in nodes.iter().enumerate() {
        out_weight[i] = medium.out_links(node).map(|(_, s)| s.weight).sum();
    }
    let mut incoming: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (from, to, s) in medium.all_links() {
        let fi = index[from];
        if out_weight[fi] > 0.0 && s.weight > 0.0 {
            incoming[index[to]].push((fi, s.weight / out_weight[fi]));
        }
    }

    let uniform = 1.0 / n as f64;
    let teleport = (1.0 - damping) * uniform;
    let mut scores = vec![uniform; n];
    let cap = 10 * n + 1000;
    for _ in 0..cap {
        let dangling: f64 = scores
            .iter()
            .zip(&out_weight)
            .filter(|(_, &w)| w == 0.0)
            .map(|(s, _)| s)
            .sum();
        let mut next = vec![0.0f64; n];
        for i in 0..n {
            let inflow: f64 = incoming[i].iter().map(|&(j, frac)| frac * scores[j]).sum();
            next[i] = teleport + damping * (inflow + dangling * uniform);
        }
        let change: f64 = next
            .iter()
            .zip(&scores)
            .map(|(a, b)| (a - b).abs())
            .sum();
        scores = next;
        if change < tol {
            return Ok(nodes.into_iter().zip(scores).collect());
        }
    }
    Err(StigmergyError::NoConvergence { iterations: cap })
}

/// CSV rendering: header `node,score`, rows sorted by score descending and
/// node id ascending within ties.
pub fn ranking_csv(scores: &BTreeMap<NodeId, f64>) -> String {
    let mut rows: Vec<(&NodeId, f64)> = scores.iter().map(|(n, &s)| (n, s)).collect();
    rows.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let mut out = String::from("node,score\n");
    for (node, score) in rows {
        let _ = writeln!(out, "{},{}", node.as_str(), score);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::medium::LinkState;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Brute-force oracle: dense damped power iteration written directly
    /// from the transition definition, run to near fixed-point.
    fn dense_pagerank(
        nodes: &[NodeId],
        links: &[(usize, usize, f64)],
        damping: f64,
        sweeps: usize,
    ) -> Vec<f64> {
        let n = nodes.len();
        let mut row = vec![vec![0.0f64; n]; n];
        let mut out = vec![0.0f64; n];
        for &(f, _, w) in links {
            out[f] += w;
        }
        for &(f, t, w) in links {
            if out[f] > 0.0 {
                row[f][t] = w / out[f];
            }
        }
        let mut x = vec![1.0 / n as f64; n];
        for _ in 0..sweeps {
            let dangling: f64 = (0..n).filter(|&i| out[i] == 0.0).map(|i| x[i]).sum();
            let mut next = vec![(1.0 - damping) / n as f64; n];
            for i in 0..n {
                for (j, nj) in next.iter_mut().enumerate() {
                    *nj += damping * row[i][j] * x[i];
                }
            }
            for nj in next.iter_mut() {
                *nj += damping * dangling / n as f64;
            }
            x = next;
        }
        x
    }

    #[test]
    fn mutual_pair_splits_evenly() {
        let mut m = Medium::default();
        m.add_node("a");
        m.add_node("b");
        m.add_link("a", "b", LinkState::new(0.5, 0.0, 1.0)).unwrap();
        m.add_link("b", "a", LinkState::new(0.5, 0.0, 1.0)).unwrap();
        let scores = rank_nodes(&m, 0.85, 1e-12).unwrap();
        assert_relative_eq!(scores[&"a".into()], 0.5, epsilon = 1e-10);
        assert_relative_eq!(scores[&"b".into()], 0.5, epsilon = 1e-10);
    }

    #[test]
    fn symmetric_ring_is_uniform() {
        let mut m = Medium::default();
        let n = 9;
        for i in 0..n {
            m.add_node(format!("n{i}"));
        }
        for i in 0..n {
            m.add_link(format!("n{i}"), format!("n{}", (i + 1) % n), LinkState::new(0.5, 0.0, 1.0))
                .unwrap();
        }
        let scores = rank_nodes(&m, 0.85, 1e-14).unwrap();
        for (_, s) in scores {
            assert_relative_eq!(s, 1.0 / n as f64, epsilon = 1e-10);
        }
    }

    #[test]
    fn four_link_graph_matches_dense_oracle() {
        // a->b, b->c, c->a plus a->c
        let mut m = Medium::default();
        let names = ["a", "b", "c"];
        for n in names {
            m.add_node(n);
        }
        m.add_link("a", "b", LinkState::new(1.0, 0.0, 1.0)).unwrap();
        m.add_link("b", "c", LinkState::new(1.0, 0.0, 1.0)).unwrap();
        m.add_link("c", "a", LinkState::new(1.0, 0.0, 1.0)).unwrap();
        m.add_link("a", "c", LinkState::new(1.0, 0.0, 1.0)).unwrap();
        let scores = rank_nodes(&m, 0.85, 1e-13).unwrap();

        let nodes: Vec<NodeId> = names.iter().map(|&s| s.into()).collect();
        let links = vec![(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0), (0, 2, 1.0)];
        let oracle = dense_pagerank(&nodes, &links, 0.85, 20_000);
        for (i, node) in nodes.iter().enumerate() {
            assert_relative_eq!(scores[node], oracle[i], epsilon = 1e-8);
        }
    }

    #[test]
    fn random_graphs_match_dense_oracle() {
        for seed in 0..10u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 3 + (rng.gen::<u64>() % 10) as usize;
            let mut m = Medium::default();
            let nodes: Vec<NodeId> = (0..n)
                .map(|i| {
                    let id = format!("n{i:02}");
                    m.add_node(id.as_str());
                    NodeId::new(id)
                })
                .collect();
            let mut links = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if i != j && rng.gen::<f64>() < 0.3 {
                        let w = 0.1 + 0.9 * rng.gen::<f64>();
                        m.add_link(nodes[i].clone(), nodes[j].clone(), LinkState::new(w, 0.0, 1.0))
                            .unwrap();
                        links.push((i, j, w));
                    }
                }
            }
            let scores = rank_nodes(&m, 0.85, 1e-13).unwrap();
            let oracle = dense_pagerank(&nodes, &links, 0.85, 20_000);
            let total: f64 = scores.values().sum();
            assert!((total - 1.0).abs() < 1e-10, "seed {seed}: sum {total}");
            for (i, node) in nodes.iter().enumerate() {
                assert!(
                    (scores[node] - oracle[i]).abs() < 1e-8,
                    "seed {seed}, node {node}: {} vs oracle {}",
                    scores[node],
                    oracle[i]
                );
            }
        }
    }

    #[test]
    fn ranking_order_invariant_under_weight_rescale() {
        let build = |factor: f64| {
            let mut m = Medium::new(crate::medium::WeightBounds::new(0.0, 100.0).unwrap());
            for n in ["a", "b", "c", "d"] {
                m.add_node(n);
            }
            m.add_link("a", "b", LinkState::new(0.9 * factor, 0.0, 1.0)).unwrap();
            m.add_link("b", "c", LinkState::new(0.4 * factor, 0.0, 1.0)).unwrap();
            m.add_link("c", "a", LinkState::new(0.7 * factor, 0.0, 1.0)).unwrap();
            m.add_link("d", "a", LinkState::new(0.2 * factor, 0.0, 1.0)).unwrap();
            m.add_link("b", "d", LinkState::new(0.1 * factor, 0.0, 1.0)).unwrap();
            m
        };
        let order = |m: &Medium| {
            let scores = rank_nodes(m, 0.85, 1e-13).unwrap();
            let csv = ranking_csv(&scores);
            csv.lines()
                .skip(1)
                .map(|l| l.split(',').next().unwrap().to_string())
                .collect::<Vec<_>>()
        };
        assert_eq!(order(&build(1.0)), order(&build(37.5)));
    }

    #[test]
    fn dangling_nodes_still_sum_to_one() {
        let mut m = Medium::default();
        for n in ["a", "b", "sink"] {
            m.add_node(n);
        }
        m.add_link("a", "sink", LinkState::new(0.5, 0.0, 1.0)).unwrap();
        m.add_link("b", "sink", LinkState::new(0.5, 0.0, 1.0)).unwrap();
        let scores = rank_nodes(&m, 0.85, 1e-13).unwrap();
        let total: f64 = scores.values().sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-10);
        assert!(scores[&"sink".into()] > scores[&"a".into()]);
    }

    #[test]
    fn empty_medium_is_an_error() {
        let m = Medium::default();
        assert!(matches!(
            rank_nodes(&m, 0.85, 1e-10),
            Err(StigmergyError::EmptyMedium)
        ));
    }

    #[test]
    fn csv_sorted_by_score_then_id() {
        let mut scores = BTreeMap::new();
        scores.insert(NodeId::new("z"), 0.4);
        scores.insert(NodeId::new("a"), 0.4);
        scores.insert(NodeId::new("m"), 0.2);
        let csv = ranking_csv(&scores);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "node,score");
        assert!(lines[1].starts_with("a,"));
        assert!(lines[2].starts_with("z,"));
        assert!(lines[3].starts_with("m,"));
    }
}
