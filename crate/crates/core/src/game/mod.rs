//! Game model: directed graph, affine state-dependent edge costs, players,
//! routing profiles, and signaling schemes.
//!
//! Conventions used throughout the crate:
//! * edges, states and paths are ordered lexicographically by id, so every
//!   operation that iterates over them is deterministic;
//! * an action is a simple source-to-sink path, stored as edge indices;
//! * a cost function `alpha * f + beta` applies to loads `f >= 1`; an unused
//!   edge costs nothing.

mod json;
mod paths;

pub use json::{parse_game, parse_scheme, serialize_game, serialize_scheme};
pub use paths::{enumerate_paths, enumerate_paths_with_cap, DEFAULT_PATH_CAP};

#[cfg(test)]
pub(crate) use json::tests as fixtures;

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GameError {
    #[error("json: {0}")]
    Json(String),
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
    #[error("unknown edge id {0:?}")]
    UnknownEdge(String),
    #[error("unknown state id {0:?}")]
    UnknownState(String),
    #[error("unknown node id {0:?}")]
    UnknownNode(String),
    #[error("player {player}: sink {sink:?} is unreachable from source {from:?}")]
    UnreachableSink {
        player: usize,
        from: String,
        sink: String,
    },
    #[error("path enumeration exceeded cap of {cap} paths for player {player}")]
    PathCapExceeded { player: usize, cap: usize },
    #[error("profile has {got} paths, expected one per player ({expected})")]
    WrongProfileLength { got: usize, expected: usize },
    #[error("player {player}: {message}")]
    BadPath { player: usize, message: String },
    #[error("scheme state {state:?}: {message}")]
    BadScheme { state: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> GameError {
    GameError::Invalid {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: String,
    pub from: usize,
    pub to: usize,
}

/// Directed multigraph. Parallel edges are allowed; edge ids are unique.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    nodes: Vec<String>,
    edges: Vec<Edge>,
    node_index: BTreeMap<String, usize>,
    edge_index: BTreeMap<String, usize>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from node ids and `(edge id, from, to)` triples.
    /// Nodes and edges are sorted by id; duplicate ids are rejected.
    pub fn new(
        mut nodes: Vec<String>,
        edge_triples: Vec<(String, String, String)>,
    ) -> Result<Graph, GameError> {
        nodes.sort();
        nodes.dedup();
        let node_index: BTreeMap<String, usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        if node_index.len() != nodes.len() {
            return Err(invalid("nodes", "duplicate node id"));
        }

        let mut triples = edge_triples;
        triples.sort_by(|a, b| a.0.cmp(&b.0));
        let mut edges = Vec::with_capacity(triples.len());
        let mut edge_index = BTreeMap::new();
        for (id, from, to) in triples {
            let from = *node_index
                .get(&from)
                .ok_or_else(|| GameError::UnknownNode(from.clone()))?;
            let to = *node_index
                .get(&to)
                .ok_or_else(|| GameError::UnknownNode(to.clone()))?;
            if edge_index.insert(id.clone(), edges.len()).is_some() {
                return Err(invalid(format!("edges.{id}"), "duplicate edge id"));
            }
            edges.push(Edge { id, from, to });
        }

        let mut out_edges = vec![Vec::new(); nodes.len()];
        let mut in_edges = vec![Vec::new(); nodes.len()];
        for (i, e) in edges.iter().enumerate() {
            out_edges[e.from].push(i);
            in_edges[e.to].push(i);
        }

        Ok(Graph {
            nodes,
            edges,
            node_index,
            edge_index,
            out_edges,
            in_edges,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node_id(&self, idx: usize) -> &str {
        &self.nodes[idx]
    }

    pub fn node_ids(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_idx(&self, id: &str) -> Option<usize> {
        self.node_index.get(id).copied()
    }

    pub fn edge(&self, idx: usize) -> &Edge {
        &self.edges[idx]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_idx(&self, id: &str) -> Option<usize> {
        self.edge_index.get(id).copied()
    }

    /// Outgoing edge indices of `node`, in lexicographic edge-id order.
    pub fn out_edges(&self, node: usize) -> &[usize] {
        &self.out_edges[node]
    }

    pub fn in_edges(&self, node: usize) -> &[usize] {
        &self.in_edges[node]
    }

    /// Nodes that can reach `target`, via backward search.
    pub fn reaches(&self, target: usize) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![target];
        seen[target] = true;
        while let Some(v) = stack.pop() {
            for &e in &self.in_edges[v] {
                let u = self.edges[e].from;
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen
    }
}

/// Affine cost coefficients of one edge in one state: `alpha * f + beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cost {
    pub alpha: f64,
    pub beta: f64,
}

impl Cost {
    /// Cost per unit at integer load `f`; an unused edge costs nothing.
    pub fn at(&self, load: u32) -> f64 {
        if load == 0 {
            0.0
        } else {
            self.alpha * f64::from(load) + self.beta
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlayerSpec {
    /// All players share one source/sink pair.
    Symmetric { source: usize, sink: usize },
    /// One `(source, sink)` pair per player.
    PerPlayer(Vec<(usize, usize)>),
}

/// A network congestion game with uncertain state.
#[derive(Debug, Clone, PartialEq)]
pub struct GameInstance {
    graph: Graph,
    n: usize,
    states: Vec<String>,
    prior: Vec<f64>,
    /// `costs[edge][state]`.
    costs: Vec<Vec<Cost>>,
    players: PlayerSpec,
    state_index: BTreeMap<String, usize>,
}

impl GameInstance {
    pub fn new(
        graph: Graph,
        n: usize,
        state_prior: Vec<(String, f64)>,
        mut costs_by_id: BTreeMap<String, BTreeMap<String, Cost>>,
        players: PlayerSpec,
    ) -> Result<GameInstance, GameError> {
        if n == 0 {
            return Err(invalid("n", "player count must be positive"));
        }
        if state_prior.is_empty() {
            return Err(invalid("states", "at least one state required"));
        }

        let mut state_prior = state_prior;
        state_prior.sort_by(|a, b| a.0.cmp(&b.0));
        let states: Vec<String> = state_prior.iter().map(|(s, _)| s.clone()).collect();
        let prior: Vec<f64> = state_prior.iter().map(|&(_, p)| p).collect();
        let state_index: BTreeMap<String, usize> = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        if state_index.len() != states.len() {
            return Err(invalid("states", "duplicate state id"));
        }
        for (s, &p) in states.iter().zip(&prior) {
            if !(p > 0.0) || !p.is_finite() {
                return Err(invalid(
                    format!("prior.{s}"),
                    format!("probability must be positive and finite, got {p}"),
                ));
            }
        }
        let total: f64 = prior.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid("prior", format!("sums to {total}")));
        }

        let mut costs = Vec::with_capacity(graph.edge_count());
        for edge in graph.edges() {
            let per_state = costs_by_id
                .remove(&edge.id)
                .ok_or_else(|| invalid(format!("costs.{}", edge.id), "missing"))?;
            let mut row = Vec::with_capacity(states.len());
            for s in &states {
                let c = per_state
                    .get(s)
                    .copied()
                    .ok_or_else(|| invalid(format!("costs.{}.{}", edge.id, s), "missing"))?;
                if !c.alpha.is_finite() || !c.beta.is_finite() || c.alpha < 0.0 || c.beta < 0.0 {
                    return Err(invalid(
                        format!("costs.{}.{}", edge.id, s),
                        format!(
                            "coefficients must be finite and nonnegative, got alpha={} beta={}",
                            c.alpha, c.beta
                        ),
                    ));
                }
                row.push(c);
            }
            for s in per_state.keys() {
                if !state_index.contains_key(s) {
                    return Err(GameError::UnknownState(s.clone()));
                }
            }
            costs.push(row);
        }
        if let Some(id) = costs_by_id.keys().next() {
            return Err(GameError::UnknownEdge(id.clone()));
        }

        match &players {
            PlayerSpec::Symmetric { .. } => {}
            PlayerSpec::PerPlayer(pairs) => {
                if pairs.len() != n {
                    return Err(invalid(
                        "players.list",
                        format!("has {} entries, expected n = {}", pairs.len(), n),
                    ));
                }
            }
        }

        let instance = GameInstance {
            graph,
            n,
            states,
            prior,
            costs,
            players,
            state_index,
        };
        for p in 0..n {
            let (source, sink) = instance.terminals(p);
            if !instance.graph.reaches(sink)[source] {
                return Err(GameError::UnreachableSink {
                    player: p,
                    from: instance.graph.node_id(source).to_string(),
                    sink: instance.graph.node_id(sink).to_string(),
                });
            }
        }
        Ok(instance)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn num_players(&self) -> usize {
        self.n
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_idx(&self, id: &str) -> Option<usize> {
        self.state_index.get(id).copied()
    }

    pub fn prior(&self, state: usize) -> f64 {
        self.prior[state]
    }

    pub fn cost(&self, edge: usize, state: usize) -> Cost {
        self.costs[edge][state]
    }

    pub fn is_symmetric(&self) -> bool {
        matches!(self.players, PlayerSpec::Symmetric { .. })
    }

    pub fn players(&self) -> &PlayerSpec {
        &self.players
    }

    /// `(source, sink)` node indices for `player`.
    pub fn terminals(&self, player: usize) -> (usize, usize) {
        match &self.players {
            PlayerSpec::Symmetric { source, sink } => (*source, *sink),
            PlayerSpec::PerPlayer(pairs) => pairs[player],
        }
    }

    /// Social cost of the load vector in `state`: `sum_e alpha*q^2 + beta*q`.
    pub fn social_cost_of_loads(&self, state: usize, loads: &CongestionVector) -> f64 {
        let mut total = 0.0;
        for (e, &q) in loads.load.iter().enumerate() {
            if q > 0 {
                let q = f64::from(q);
                let c = self.costs[e][state];
                total += c.alpha * q * q + c.beta * q;
            }
        }
        total
    }
}

/// One path per player, each a sequence of edge indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionProfile {
    pub paths: Vec<Vec<usize>>,
}

impl ActionProfile {
    pub fn new(paths: Vec<Vec<usize>>) -> ActionProfile {
        ActionProfile { paths }
    }

    pub fn congestion(&self, num_edges: usize) -> CongestionVector {
        let mut load = vec![0u32; num_edges];
        for path in &self.paths {
            for &e in path {
                load[e] += 1;
            }
        }
        CongestionVector { load }
    }

    /// Checks one path per player, each a simple walk from the player's
    /// source to their sink.
    pub fn validate(&self, instance: &GameInstance) -> Result<(), GameError> {
        if self.paths.len() != instance.num_players() {
            return Err(GameError::WrongProfileLength {
                got: self.paths.len(),
                expected: instance.num_players(),
            });
        }
        for (player, path) in self.paths.iter().enumerate() {
            validate_path(instance, player, path)?;
        }
        Ok(())
    }

    pub fn path_ids(&self, graph: &Graph) -> Vec<Vec<String>> {
        self.paths
            .iter()
            .map(|p| p.iter().map(|&e| graph.edge(e).id.clone()).collect())
            .collect()
    }
}

pub(crate) fn validate_path(
    instance: &GameInstance,
    player: usize,
    path: &[usize],
) -> Result<(), GameError> {
    let graph = instance.graph();
    let (source, sink) = instance.terminals(player);
    let bad = |message: String| GameError::BadPath { player, message };
    let mut at = source;
    let mut seen = vec![false; graph.node_count()];
    seen[at] = true;
    for &e in path {
        if e >= graph.edge_count() {
            return Err(bad(format!("edge index {e} out of range")));
        }
        let edge = graph.edge(e);
        if edge.from != at {
            return Err(bad(format!(
                "edge {:?} leaves {:?}, expected {:?}",
                edge.id,
                graph.node_id(edge.from),
                graph.node_id(at)
            )));
        }
        at = edge.to;
        if seen[at] {
            return Err(bad(format!(
                "path revisits node {:?}",
                graph.node_id(at)
            )));
        }
        seen[at] = true;
    }
    if at != sink {
        return Err(bad(format!(
            "path ends at {:?}, expected sink {:?}",
            graph.node_id(at),
            graph.node_id(sink)
        )));
    }
    Ok(())
}

/// Per-edge integer load.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CongestionVector {
    pub load: Vec<u32>,
}

impl CongestionVector {
    pub fn zero(num_edges: usize) -> CongestionVector {
        CongestionVector {
            load: vec![0; num_edges],
        }
    }

    pub fn total(&self) -> u64 {
        self.load.iter().map(|&q| u64::from(q)).sum()
    }
}

/// State-conditional distribution over recommended profiles.
///
/// `support[state]` lists `(probability, profile)` pairs; probabilities are
/// positive and sum to one per state.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalingScheme {
    pub support: Vec<Vec<(f64, ActionProfile)>>,
}

impl SignalingScheme {
    /// Deterministic scheme recommending `profile` in every state.
    pub fn constant(num_states: usize, profile: ActionProfile) -> SignalingScheme {
        SignalingScheme {
            support: (0..num_states).map(|_| vec![(1.0, profile.clone())]).collect(),
        }
    }

    pub fn validate(&self, instance: &GameInstance) -> Result<(), GameError> {
        if self.support.len() != instance.num_states() {
            return Err(invalid(
                "scheme.states",
                format!(
                    "covers {} states, instance has {}",
                    self.support.len(),
                    instance.num_states()
                ),
            ));
        }
        for (s, entries) in self.support.iter().enumerate() {
            let state = instance.states()[s].clone();
            if entries.is_empty() {
                return Err(GameError::BadScheme {
                    state,
                    message: "empty support".into(),
                });
            }
            let mut total = 0.0;
            for (prob, profile) in entries {
                if !(*prob > 0.0) || !prob.is_finite() {
                    return Err(GameError::BadScheme {
                        state,
                        message: format!("probability {prob} not positive"),
                    });
                }
                total += prob;
                profile.validate(instance)?;
            }
            if (total - 1.0).abs() > 1e-9 {
                return Err(GameError::BadScheme {
                    state,
                    message: format!("probabilities sum to {total}"),
                });
            }
        }
        Ok(())
    }
}

/// Cost of each player under `profile` in `state`, plus the social cost.
///
/// Returns `(per_player, social)`.
pub fn profile_cost(
    instance: &GameInstance,
    profile: &ActionProfile,
    state: &str,
) -> Result<(Vec<f64>, f64), GameError> {
    let s = instance
        .state_idx(state)
        .ok_or_else(|| GameError::UnknownState(state.to_string()))?;
    profile.validate(instance)?;
    Ok(profile_cost_indexed(instance, profile, s))
}

pub(crate) fn profile_cost_indexed(
    instance: &GameInstance,
    profile: &ActionProfile,
    state: usize,
) -> (Vec<f64>, f64) {
    let loads = profile.congestion(instance.graph().edge_count());
    let per_player: Vec<f64> = profile
        .paths
        .iter()
        .map(|path| {
            path.iter()
                .map(|&e| instance.cost(e, state).at(loads.load[e]))
                .sum()
        })
        .collect();
    let social = per_player.iter().sum();
    (per_player, social)
}

/// Expected social cost of `scheme` under the prior.
pub fn expected_social_cost(instance: &GameInstance, scheme: &SignalingScheme) -> f64 {
    let mut total = 0.0;
    for (s, entries) in scheme.support.iter().enumerate() {
        let mu = instance.prior(s);
        for (prob, profile) in entries {
            let (_, social) = profile_cost_indexed(instance, profile, s);
            total += mu * prob * social;
        }
    }
    total
}
