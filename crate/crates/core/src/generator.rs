//! Random symmetric instances on layered DAGs, for calibration and tests.
//!
//! A chain s -> v01 -> ... -> t guarantees connectivity; extra edges only
//! point forward, so every generated graph is acyclic and every simple path
//! reaches the sink. All sampling is driven by a caller-provided seed and
//! collections are ordered, so equal seeds give identical instances.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::game::{enumerate_paths, Cost, GameError, GameInstance, Graph, PlayerSpec};
use crate::separation::SymmetricDualPoint;

#[derive(Debug, Clone, Copy)]
pub struct RandomGameParams {
    /// Total node count including source and sink; at least 2.
    pub nodes: usize,
    /// Forward edges added on top of the connecting chain.
    pub extra_edges: usize,
    pub states: usize,
    pub players: u32,
}

impl Default for RandomGameParams {
    fn default() -> Self {
        RandomGameParams {
            nodes: 4,
            extra_edges: 2,
            states: 2,
            players: 2,
        }
    }
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

pub fn random_game(params: &RandomGameParams, seed: u64) -> Result<GameInstance, GameError> {
    if params.nodes < 2 {
        return Err(GameError::Invalid {
            field: "nodes".into(),
            message: "need at least source and sink".into(),
        });
    }
    if params.states == 0 {
        return Err(GameError::Invalid {
            field: "states".into(),
            message: "need at least one state".into(),
        });
    }
    if params.players == 0 {
        return Err(GameError::Invalid {
            field: "players".into(),
            message: "need at least one player".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Node 0 is s, node params.nodes-1 is t, the rest sit on the chain in
    // name order.
    let mut names = vec!["s".to_string()];
    for i in 1..params.nodes - 1 {
        names.push(format!("v{i:02}"));
    }
    names.push("t".to_string());

    let mut edges: Vec<(usize, usize)> = (0..params.nodes - 1).map(|i| (i, i + 1)).collect();
    for _ in 0..params.extra_edges {
        let from = rng.gen_range(0..params.nodes - 1);
        let to = rng.gen_range(from + 1..params.nodes);
        edges.push((from, to));
    }

    let states: Vec<String> = (0..params.states).map(|k| format!("theta{k}")).collect();
    let weights: Vec<f64> = (0..params.states)
        .map(|_| rng.gen_range(0.01..1.0))
        .collect();
    let total: f64 = weights.iter().sum();
    let state_prior: Vec<(String, f64)> = states
        .iter()
        .zip(&weights)
        .map(|(s, w)| (s.clone(), w / total))
        .collect();

    let mut costs: BTreeMap<String, BTreeMap<String, Cost>> = BTreeMap::new();
    let mut edge_list = Vec::new();
    for (k, &(from, to)) in edges.iter().enumerate() {
        let id = format!("e{k:02}");
        let mut per_state = BTreeMap::new();
        for s in &states {
            let alpha = round2(rng.gen_range(0.0..10.0));
            let beta = round2(rng.gen_range(0.0..10.0));
            per_state.insert(s.clone(), Cost { alpha, beta });
        }
        costs.insert(id.clone(), per_state);
        edge_list.push((id, names[from].clone(), names[to].clone()));
    }

    let graph = Graph::new(names, edge_list)?;
    let source = graph.node_idx("s").unwrap();
    let sink = graph.node_idx("t").unwrap();
    GameInstance::new(
        graph,
        params.players as usize,
        state_prior,
        costs,
        PlayerSpec::Symmetric { source, sink },
    )
}

/// Samples a dual point satisfying the sign and conservation invariants:
/// `y_edge` is a superposition of nonpositive path flows, `y_bar` their total
/// value, and state duals are unconstrained.
pub fn random_dual_point(
    instance: &GameInstance,
    rng: &mut impl Rng,
) -> Result<SymmetricDualPoint, GameError> {
    let paths = enumerate_paths(instance, 0)?;
    let mut y_edge: BTreeMap<String, f64> = instance
        .graph()
        .edges()
        .iter()
        .map(|e| (e.id.clone(), 0.0))
        .collect();
    let mut y_bar = 0.0;
    for _ in 0..rng.gen_range(0..=3usize) {
        let path = &paths[rng.gen_range(0..paths.len())];
        let w = -rng.gen_range(0.0..2.0);
        y_bar += w;
        for &e in path {
            *y_edge.get_mut(&instance.graph().edge(e).id).unwrap() += w;
        }
    }
    let y_state = instance
        .states()
        .iter()
        .map(|s| (s.clone(), rng.gen_range(-5.0..5.0)))
        .collect();
    Ok(SymmetricDualPoint {
        y_bar,
        y_edge,
        y_sink: y_bar,
        y_state,
    })
}
