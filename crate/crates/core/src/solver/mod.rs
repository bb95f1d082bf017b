//! Top-level algorithms: exact brute-force solve, the cutting-plane solve
//! with primal recovery, player symmetrization, and persuasiveness checks.

mod brute;
mod build;
mod cutting;
mod verify;

pub use brute::{brute_force_solve, brute_force_solve_with};
pub use cutting::{cutting_plane_solve, cutting_plane_solve_with};
pub use verify::{best_response_values, verify_persuasive, BestResponseValues, Persuasiveness};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::game::{ActionProfile, GameError, GameInstance, SignalingScheme};
use crate::lp::LpError;
use crate::separation::{SeparationError, SymmetricDualPoint};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("instance is not symmetric; only the brute-force solver handles per-player terminals")]
    NotSymmetric,
    #[error("no convergence after {iterations} iterations; value in [{lower_bound}, {upper_bound}]")]
    NonConvergence {
        iterations: usize,
        /// Best proven lower bound on the optimal value.
        lower_bound: f64,
        /// Value of the last restricted master, an upper bound.
        upper_bound: f64,
    },
    #[error("{what} exceeded cap {cap}")]
    CapExceeded { what: String, cap: usize },
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Separation(#[from] SeparationError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("internal: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub opt_tol: f64,
    pub max_iters: usize,
    /// Cap on simple paths enumerated per player.
    pub path_cap: usize,
    /// Cap on profile columns per state in the brute-force LP.
    pub column_cap: usize,
    /// Tolerance for the persuasiveness postcondition on returned schemes.
    pub verify_eps: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            opt_tol: 1e-7,
            max_iters: 10_000,
            path_cap: crate::game::DEFAULT_PATH_CAP,
            column_cap: 50_000,
            verify_eps: 1e-7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub value: f64,
    pub scheme: SignalingScheme,
    /// Pricing rounds performed; 1 for the brute-force solver.
    pub iterations: usize,
    /// Columns generated by the separation oracle, in discovery order.
    pub columns: Vec<(String, ActionProfile)>,
    /// Symmetric dual point certifying the value; absent for asymmetric
    /// brute-force solves, where no player-symmetric dual exists.
    pub dual: Option<SymmetricDualPoint>,
    pub duality_gap: f64,
}

/// Per-player optimal duals of the full primal LP, one entry per player for
/// the deviation rows, per player and edge for the potential rows, per
/// player for the sink-pinning rows, and per state for the distribution
/// rows.
#[derive(Debug, Clone)]
pub struct FullDualPoint {
    pub y_player: Vec<f64>,
    pub y_edge: Vec<Vec<f64>>,
    pub y_sink: Vec<f64>,
    pub y_state: Vec<f64>,
}

/// Averages the per-player duals into a player-symmetric point. Feasibility
/// is preserved because the dual constraints are convex in the per-player
/// blocks and symmetric under relabeling; the state duals, which carry the
/// objective, are untouched.
pub fn symmetrize(instance: &GameInstance, full: &FullDualPoint) -> SymmetricDualPoint {
    let n = instance.num_players() as f64;
    let y_bar = full.y_player.iter().sum::<f64>() / n;
    let y_sink = full.y_sink.iter().sum::<f64>() / n;
    let mut y_edge = BTreeMap::new();
    for (idx, edge) in instance.graph().edges().iter().enumerate() {
        let total: f64 = full.y_edge.iter().map(|per| per[idx]).sum();
        y_edge.insert(edge.id.clone(), total / n);
    }
    let y_state = instance
        .states()
        .iter()
        .zip(&full.y_state)
        .map(|(s, &v)| (s.clone(), v))
        .collect();
    SymmetricDualPoint {
        y_bar,
        y_edge,
        y_sink,
        y_state,
    }
}

/// Distances to the sink and the lexicographically-first tight successor
/// edge per node, under nonnegative edge weights. Unreachable nodes get
/// infinity and no successor.
pub(crate) fn shortest_to_sink(
    instance: &GameInstance,
    sink: usize,
    weights: &[f64],
) -> (Vec<f64>, Vec<Option<usize>>) {
    use std::cmp::Ordering;
    use std::collections::BinaryHeap;

    struct Item {
        dist: f64,
        node: usize,
    }
    impl PartialEq for Item {
        fn eq(&self, other: &Self) -> bool {
            self.cmp(other) == Ordering::Equal
        }
    }
    impl Eq for Item {}
    impl Ord for Item {
        fn cmp(&self, other: &Self) -> Ordering {
            other
                .dist
                .total_cmp(&self.dist)
                .then_with(|| other.node.cmp(&self.node))
        }
    }
    impl PartialOrd for Item {
        fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
            Some(self.cmp(other))
        }
    }

    let graph = instance.graph();
    let mut dist = vec![f64::INFINITY; graph.node_count()];
    dist[sink] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Item {
        dist: 0.0,
        node: sink,
    });
    while let Some(Item { dist: d, node: v }) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &e in graph.in_edges(v) {
            let u = graph.edge(e).from;
            let next = d + weights[e];
            if next < dist[u] {
                dist[u] = next;
                heap.push(Item {
                    dist: next,
                    node: u,
                });
            }
        }
    }

    let succ = (0..graph.node_count())
        .map(|v| {
            if v == sink || !dist[v].is_finite() {
                return None;
            }
            graph
                .out_edges(v)
                .iter()
                .copied()
                .find(|&e| {
                    let head = graph.edge(e).to;
                    dist[head].is_finite()
                        && (weights[e] + dist[head] - dist[v]).abs() <= 1e-9 * (1.0 + dist[v].abs())
                })
        })
        .collect();
    (dist, succ)
}

/// Follows tight successor edges from `from` to the sink.
pub(crate) fn extract_path(
    graph: &crate::game::Graph,
    succ: &[Option<usize>],
    from: usize,
    sink: usize,
) -> Vec<usize> {
    let mut path = Vec::new();
    let mut v = from;
    while v != sink {
        let e = succ[v].expect("tight successor exists on reachable nodes");
        path.push(e);
        v = graph.edge(e).to;
    }
    path
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::fixtures::example_one;

    #[test]
    fn symmetrize_averages_player_blocks() {
        let game = example_one();
        let full = FullDualPoint {
            y_player: vec![-2.0, 0.0, -1.0],
            y_edge: vec![
                vec![-3.0, 0.0],
                vec![0.0, -3.0],
                vec![0.0, 0.0],
            ],
            y_sink: vec![-1.0, -1.0, -1.0],
            y_state: vec![4.0, 5.0],
        };
        let y = symmetrize(&game, &full);
        assert!((y.y_bar + 1.0).abs() < 1e-12);
        assert!((y.edge_value("A") + 1.0).abs() < 1e-12);
        assert!((y.edge_value("B") + 1.0).abs() < 1e-12);
        assert!((y.y_sink + 1.0).abs() < 1e-12);
        assert_eq!(y.state_value("theta0"), 4.0);
        assert_eq!(y.state_value("theta1"), 5.0);
    }

    #[test]
    fn symmetrize_is_identity_on_symmetric_input() {
        let game = example_one();
        let full = FullDualPoint {
            y_player: vec![-1.5; 3],
            y_edge: vec![vec![-0.5, -1.0]; 3],
            y_sink: vec![-1.5; 3],
            y_state: vec![7.0, -2.0],
        };
        let y = symmetrize(&game, &full);
        assert_eq!(y.y_bar, -1.5);
        assert_eq!(y.edge_value("A"), -0.5);
        assert_eq!(y.edge_value("B"), -1.0);
        assert_eq!(y.y_sink, -1.5);
    }

    #[test]
    fn shortest_to_sink_finds_tight_successors() {
        let game = crate::game::parse_game(
            r#"{
                "n": 1,
                "nodes": ["s", "a", "t", "z"],
                "edges": [
                    {"id": "e1", "from": "s", "to": "a"},
                    {"id": "e2", "from": "a", "to": "t"},
                    {"id": "e3", "from": "s", "to": "t"}
                ],
                "states": ["theta0"],
                "prior": {"theta0": 1.0},
                "costs": {
                    "e1": {"theta0": {"alpha": 1.0, "beta": 0.0}},
                    "e2": {"theta0": {"alpha": 1.0, "beta": 0.0}},
                    "e3": {"theta0": {"alpha": 1.0, "beta": 0.0}}
                },
                "players": {"symmetric": {"source": "s", "sink": "t"}}
            }"#,
        )
        .unwrap();
        let graph = game.graph();
        let sink = graph.node_idx("t").unwrap();
        // Weight order follows edge ids: e1, e2, e3.
        let (dist, succ) = shortest_to_sink(&game, sink, &[1.0, 1.0, 3.0]);
        let s = graph.node_idx("s").unwrap();
        let z = graph.node_idx("z").unwrap();
        assert!((dist[s] - 2.0).abs() < 1e-12);
        assert!(dist[z].is_infinite());
        assert!(succ[z].is_none());
        let path = extract_path(graph, &succ, s, sink);
        assert_eq!(path, vec![0, 1]);
    }
}
