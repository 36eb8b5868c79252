//! Routing networks compiled into strategy-set games.
//!
//! A directed graph with per-edge linear latencies and source/sink
//! commodities expands into a non-atomic game whose strategies are the simple
//! paths of each commodity, each path taken as its set of edge ids. Routing
//! instances then flow through the same verifiers and solvers as hand-listed
//! games.

use serde::{Deserialize, Serialize};

use crate::atomic::Facility;
use crate::error::{Error, Result};
use crate::nonatomic::{Commodity, NonatomicGame};

/// Refuse to enumerate more simple paths than this per commodity by default.
pub const DEFAULT_PATH_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: usize,
    pub tail: String,
    pub head: String,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommoditySpec {
    pub source: String,
    pub sink: String,
    pub rate: f64,
}

/// A directed routing network; `commodities` may be empty when the graph is
/// only used for path queries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    pub nodes: Vec<String>,
    pub edges: Vec<Edge>,
    #[serde(default)]
    pub commodities: Vec<CommoditySpec>,
}

impl Graph {
    fn node_index(&self, name: &str) -> Result<usize> {
        self.nodes
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::InvalidGame(format!("unknown node {name:?}")))
    }

    fn validate(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for edge in &self.edges {
            if !seen.insert(edge.id) {
                return Err(Error::InvalidGame(format!("duplicate edge id {}", edge.id)));
            }
            self.node_index(&edge.tail)?;
            self.node_index(&edge.head)?;
        }
        Ok(())
    }

    /// All simple directed paths from `source` to `sink`, each as the
    /// sequence of edge ids along the path.
    ///
    /// Outgoing edges are explored in increasing edge-id order, so the result
    /// is sorted lexicographically by edge-id sequence and is deterministic.
    pub fn enumerate_paths(&self, source: &str, sink: &str, cap: usize) -> Result<Vec<Vec<usize>>> {
        if cap == 0 {
            return Err(Error::Domain("path cap must be at least 1".into()));
        }
        self.validate()?;
        let src = self.node_index(source)?;
        let dst = self.node_index(sink)?;
        // outgoing adjacency in edge-id order
        let mut out: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.nodes.len()];
        let mut order: Vec<usize> = (0..self.edges.len()).collect();
        order.sort_by_key(|&k| self.edges[k].id);
        for k in order {
            let e = &self.edges[k];
            out[self.node_index(&e.tail)?].push((e.id, self.node_index(&e.head)?));
        }
        let mut paths = Vec::new();
        let mut on_path = vec![false; self.nodes.len()];
        let mut current = Vec::new();
        self.dfs_paths(src, dst, &out, &mut on_path, &mut current, &mut paths, cap)
            .map_err(|e| match e {
                Error::PathCap { cap, .. } => Error::PathCap {
                    from_node: source.to_string(),
                    to_node: sink.to_string(),
                    cap,
                },
                other => other,
            })?;
        if paths.is_empty() {
            return Err(Error::NoPath {
                from_node: source.to_string(),
                to_node: sink.to_string(),
            });
        }
        Ok(paths)
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs_paths(
        &self,
        node: usize,
        dst: usize,
        out: &[Vec<(usize, usize)>],
        on_path: &mut Vec<bool>,
        current: &mut Vec<usize>,
        paths: &mut Vec<Vec<usize>>,
        cap: usize,
    ) -> Result<()> {
        if node == dst {
            if paths.len() >= cap {
                // rewritten with the real endpoints by enumerate_paths
                return Err(Error::PathCap {
                    from_node: String::new(),
                    to_node: String::new(),
                    cap,
                });
            }
            paths.push(current.clone());
            return Ok(());
        }
        on_path[node] = true;
        for &(edge_id, head) in &out[node] {
            if on_path[head] {
                continue;
            }
            current.push(edge_id);
            self.dfs_paths(head, dst, out, on_path, current, paths, cap)?;
            current.pop();
        }
        on_path[node] = false;
        Ok(())
    }

    /// Expand the graph and a commodity list into a strategy-set game:
    /// facilities are the edges, strategies are the simple paths.
    pub fn expand(&self, commodities: &[CommoditySpec], cap: usize) -> Result<NonatomicGame> {
        self.validate()?;
        let facilities: Vec<Facility> = self
            .edges
            .iter()
            .map(|e| Facility {
                id: e.id,
                a: e.a,
                b: e.b,
            })
            .collect();
        let mut expanded = Vec::with_capacity(commodities.len());
        for spec in commodities {
            if spec.source == spec.sink {
                return Err(Error::InvalidGame(format!(
                    "commodity source and sink coincide at {:?}",
                    spec.source
                )));
            }
            let paths = self
                .enumerate_paths(&spec.source, &spec.sink, cap)
                .map_err(|e| match e {
                    Error::PathCap { cap, .. } => Error::PathCap {
                        from_node: spec.source.clone(),
                        to_node: spec.sink.clone(),
                        cap,
                    },
                    other => other,
                })?;
            expanded.push(Commodity {
                rate: spec.rate,
                strategies: paths,
            });
        }
        NonatomicGame::new(facilities, expanded)
    }

    /// Expand using the commodities stored on the graph itself.
    pub fn expand_self(&self, cap: usize) -> Result<NonatomicGame> {
        self.expand(&self.commodities, cap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonatomic::Flow;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_parallel_edges() -> Graph {
        Graph {
            nodes: vec!["s".into(), "t".into()],
            edges: vec![
                Edge {
                    id: 0,
                    tail: "s".into(),
                    head: "t".into(),
                    a: 1.0,
                    b: 0.0,
                },
                Edge {
                    id: 1,
                    tail: "s".into(),
                    head: "t".into(),
                    a: 0.0,
                    b: 1.0,
                },
            ],
            commodities: vec![CommoditySpec {
                source: "s".into(),
                sink: "t".into(),
                rate: 1.0,
            }],
        }
    }

    fn diamond() -> Graph {
        // s -> {u, v} -> t plus a chord u -> v
        let mk = |id, tail: &str, head: &str| Edge {
            id,
            tail: tail.into(),
            head: head.into(),
            a: 1.0,
            b: 0.0,
        };
        Graph {
            nodes: vec!["s".into(), "u".into(), "v".into(), "t".into()],
            edges: vec![
                mk(0, "s", "u"),
                mk(1, "s", "v"),
                mk(2, "u", "v"),
                mk(3, "u", "t"),
                mk(4, "v", "t"),
            ],
            commodities: vec![],
        }
    }

    #[test]
    fn parallel_edges_give_two_paths() {
        let g = two_parallel_edges();
        let paths = g.enumerate_paths("s", "t", 100).unwrap();
        assert_eq!(paths, vec![vec![0], vec![1]]);
    }

    #[test]
    fn single_edge_gives_one_path() {
        let g = Graph {
            nodes: vec!["s".into(), "t".into()],
            edges: vec![Edge {
                id: 7,
                tail: "s".into(),
                head: "t".into(),
                a: 1.0,
                b: 0.0,
            }],
            commodities: vec![],
        };
        assert_eq!(g.enumerate_paths("s", "t", 10).unwrap(), vec![vec![7]]);
    }

    #[test]
    fn missing_path_is_an_error() {
        let g = two_parallel_edges();
        match g.enumerate_paths("t", "s", 10) {
            Err(Error::NoPath { .. }) => {}
            other => panic!("expected NoPath, got {other:?}"),
        }
    }

    #[test]
    fn cap_overflow_is_an_error() {
        let g = diamond();
        match g.enumerate_paths("s", "t", 2) {
            Err(Error::PathCap { cap, .. }) => assert_eq!(cap, 2),
            other => panic!("expected PathCap, got {other:?}"),
        }
    }

    #[test]
    fn paths_are_simple_and_lexicographic() {
        let g = diamond();
        let paths = g.enumerate_paths("s", "t", 100).unwrap();
        assert_eq!(paths, vec![vec![0, 2, 4], vec![0, 3], vec![1, 4]]);
        for p in &paths {
            // no repeated node: sequence of heads must be distinct
            let mut nodes: Vec<&str> = vec!["s"];
            for id in p {
                let e = g.edges.iter().find(|e| e.id == *id).unwrap();
                assert_eq!(e.tail, *nodes.last().unwrap());
                nodes.push(&e.head);
            }
            let mut sorted = nodes.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), nodes.len(), "path revisits a node");
        }
    }

    #[test]
    fn expansion_preserves_cost_semantics() {
        let mut g = diamond();
        g.commodities = vec![CommoditySpec {
            source: "s".into(),
            sink: "t".into(),
            rate: 2.0,
        }];
        let game = g.expand_self(100).unwrap();
        assert_eq!(game.commodities()[0].strategies.len(), 3);

        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..50 {
            let raw: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..1.0) + 1e-9).collect();
            let total: f64 = raw.iter().sum();
            let weights: Vec<f64> = raw.iter().map(|w| w / total * 2.0).collect();
            let flow = Flow {
                weights: vec![weights.clone()],
            };
            // edge-based cost computed straight off the graph paths
            let paths = g.enumerate_paths("s", "t", 100).unwrap();
            let mut edge_flow = std::collections::BTreeMap::new();
            for (p, w) in paths.iter().zip(&weights) {
                for id in p {
                    *edge_flow.entry(*id).or_insert(0.0) += w;
                }
            }
            let edge_cost: f64 = g
                .edges
                .iter()
                .map(|e| {
                    let x = edge_flow.get(&e.id).copied().unwrap_or(0.0);
                    (e.a * x + e.b) * x
                })
                .sum();
            let game_cost = game.social_cost(&flow).unwrap();
            assert!(
                (edge_cost - game_cost).abs() <= 1e-9 * edge_cost.max(1.0),
                "{edge_cost} vs {game_cost}"
            );
        }
    }

    #[test]
    fn zero_latency_edges_are_carried_through() {
        let g = Graph {
            nodes: vec!["s".into(), "m".into(), "t".into()],
            edges: vec![
                Edge {
                    id: 0,
                    tail: "s".into(),
                    head: "m".into(),
                    a: 0.0,
                    b: 0.0,
                },
                Edge {
                    id: 1,
                    tail: "m".into(),
                    head: "t".into(),
                    a: 1.0,
                    b: 0.0,
                },
            ],
            commodities: vec![CommoditySpec {
                source: "s".into(),
                sink: "t".into(),
                rate: 1.0,
            }],
        };
        let game = g.expand_self(10).unwrap();
        let flow = Flow {
            weights: vec![vec![1.0]],
        };
        assert_eq!(game.social_cost(&flow).unwrap(), 1.0);
    }

    #[test]
    fn graph_json_round_trip() {
        let text = r#"{"nodes":["s","t"],
                       "edges":[{"id":0,"tail":"s","head":"t","a":1,"b":0}],
                       "commodities":[{"source":"s","sink":"t","rate":1}]}"#;
        let g: Graph = serde_json::from_str(text).unwrap();
        assert_eq!(g.nodes.len(), 2);
        let back = serde_json::to_string(&g).unwrap();
        let g2: Graph = serde_json::from_str(&back).unwrap();
        assert_eq!(g, g2);
    }
}
