//! Separation oracle for the persuasiveness constraints at a
//! player-symmetric dual point.
//!
//! For each state the inner minimization over action profiles reduces to an
//! integer min-cost flow: profiles are interchangeable with their edge
//! congestion vectors, and the objective separates over edges into a convex
//! function of the load. Each edge therefore expands into n unit-capacity
//! parallel arcs priced at the marginal values delta(e,1..n), and the n
//! units of flow pick the cheapest loads greedily.

mod flow;

pub use flow::{flow_decompose, min_cost_flow};

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::game::{ActionProfile, CongestionVector, GameInstance};

#[derive(Debug, Error)]
pub enum SeparationError {
    #[error("unknown state id {0:?}")]
    UnknownState(String),
    #[error("unknown edge id {0:?} in dual point")]
    UnknownEdge(String),
    #[error("instance is not symmetric")]
    NotSymmetric,
    #[error("dual point violates {what}: {detail}")]
    InvalidDual { what: String, detail: String },
    #[error("source and sink are disconnected in the expanded graph")]
    Disconnected,
    #[error("congestion vector violates flow conservation: {0}")]
    Conservation(String),
    #[error("numerical failure in min-cost flow: {0}")]
    Numerical(String),
}

/// Player-symmetric dual point. Edge and state entries are keyed by id;
/// absent edge entries read as zero. Construction does not validate;
/// call [`SymmetricDualPoint::check`] to enforce the sign and conservation
/// invariants.
#[derive(Debug, Clone, Serialize)]
pub struct SymmetricDualPoint {
    pub y_bar: f64,
    pub y_edge: BTreeMap<String, f64>,
    pub y_sink: f64,
    pub y_state: BTreeMap<String, f64>,
}

const SIGN_TOL: f64 = 1e-9;
const FLOW_TOL: f64 = 1e-9;

impl SymmetricDualPoint {
    pub fn zero(instance: &GameInstance) -> SymmetricDualPoint {
        SymmetricDualPoint {
            y_bar: 0.0,
            y_edge: BTreeMap::new(),
            y_sink: 0.0,
            y_state: instance.states().iter().map(|s| (s.clone(), 0.0)).collect(),
        }
    }

    pub fn edge_value(&self, edge_id: &str) -> f64 {
        self.y_edge.get(edge_id).copied().unwrap_or(0.0)
    }

    pub fn state_value(&self, state_id: &str) -> f64 {
        self.y_state.get(state_id).copied().unwrap_or(0.0)
    }

    /// Per-edge values as a vector in graph edge order.
    pub fn edge_vector(&self, instance: &GameInstance) -> Vec<f64> {
        instance
            .graph()
            .edges()
            .iter()
            .map(|e| self.edge_value(&e.id))
            .collect()
    }

    /// Signs: y_bar and every y_edge nonpositive. Conservation: y_edge is a
    /// flow of value y_bar from source to sink, and y_sink equals the net
    /// inflow at the sink.
    pub fn check(&self, instance: &GameInstance) -> Result<(), SeparationError> {
        if !instance.is_symmetric() {
            return Err(SeparationError::NotSymmetric);
        }
        let graph = instance.graph();
        for id in self.y_edge.keys() {
            if graph.edge_idx(id).is_none() {
                return Err(SeparationError::UnknownEdge(id.clone()));
            }
        }
        for id in self.y_state.keys() {
            if instance.state_idx(id).is_none() {
                return Err(SeparationError::UnknownState(id.clone()));
            }
        }
        if self.y_bar > SIGN_TOL {
            return Err(SeparationError::InvalidDual {
                what: "sign of y_bar".into(),
                detail: format!("{} > 0", self.y_bar),
            });
        }
        for (id, &v) in &self.y_edge {
            if v > SIGN_TOL {
                return Err(SeparationError::InvalidDual {
                    what: format!("sign of y_edge[{id}]"),
                    detail: format!("{v} > 0"),
                });
            }
        }

        let (source, sink) = instance.terminals(0);
        let net = |node: usize| -> f64 {
            let out: f64 = graph
                .out_edges(node)
                .iter()
                .map(|&e| self.edge_value(&graph.edge(e).id))
                .sum();
            let inn: f64 = graph
                .in_edges(node)
                .iter()
                .map(|&e| self.edge_value(&graph.edge(e).id))
                .sum();
            out - inn
        };
        for node in 0..graph.node_count() {
            let expected = if node == source && node == sink {
                continue;
            } else if node == source {
                self.y_bar
            } else if node == sink {
                -self.y_sink
            } else {
                0.0
            };
            let residual = (net(node) - expected).abs();
            if residual > FLOW_TOL {
                return Err(SeparationError::InvalidDual {
                    what: format!("conservation at {}", graph.node_id(node)),
                    detail: format!("residual {residual}"),
                });
            }
        }
        Ok(())
    }
}

/// One original edge of the expanded graph: n parallel unit-capacity arcs
/// whose i-th copy costs `delta(e, i)`.
#[derive(Debug, Clone)]
pub struct ExpandedEdge {
    pub from: usize,
    pub to: usize,
    alpha: f64,
    beta: f64,
    /// Value occupying the y_edge slot of the marginal formula.
    mult: f64,
}

/// Parallel-arc expansion of one state's inner minimization. Arc costs are
/// the load marginals, so any integral flow of value n prices the congestion
/// vector it induces, up to the load-independent offset.
#[derive(Debug, Clone)]
pub struct ExpandedGraph {
    source: usize,
    sink: usize,
    num_nodes: usize,
    flow_value: u32,
    y_bar: f64,
    edges: Vec<ExpandedEdge>,
}

fn delta_formula(alpha: f64, beta: f64, y_bar: f64, mult: f64, n: u32, i: u32) -> f64 {
    (1.0 - y_bar) * (alpha * f64::from(2 * i - 1) + beta) - mult * f64::from(n - 1) * alpha
}

impl ExpandedGraph {
    pub fn expand(
        instance: &GameInstance,
        state: &str,
        y: &SymmetricDualPoint,
    ) -> Result<ExpandedGraph, SeparationError> {
        if !instance.is_symmetric() {
            return Err(SeparationError::NotSymmetric);
        }
        let state_idx = instance
            .state_idx(state)
            .ok_or_else(|| SeparationError::UnknownState(state.to_string()))?;
        let expanded = Self::with_multipliers(
            instance,
            state_idx,
            y.y_bar,
            &y.edge_vector(instance),
        );
        if cfg!(debug_assertions) {
            let n = expanded.flow_value;
            for e in 0..expanded.edges.len() {
                for i in 1..=n {
                    debug_assert!(
                        expanded.delta(e, i) >= -1e-12,
                        "negative marginal at edge {e} copy {i}"
                    );
                }
            }
        }
        Ok(expanded)
    }

    /// Expansion with explicit per-edge multipliers in the y_edge slot.
    /// The solver prices cuts through here with flipped signs, where the
    /// marginals can go negative; the public path always has mult ≤ 0.
    pub(crate) fn with_multipliers(
        instance: &GameInstance,
        state_idx: usize,
        y_bar: f64,
        mult: &[f64],
    ) -> ExpandedGraph {
        let (source, sink) = instance.terminals(0);
        let graph = instance.graph();
        let edges = graph
            .edges()
            .iter()
            .enumerate()
            .map(|(idx, e)| {
                let cost = instance.cost(idx, state_idx);
                ExpandedEdge {
                    from: e.from,
                    to: e.to,
                    alpha: cost.alpha,
                    beta: cost.beta,
                    mult: mult[idx],
                }
            })
            .collect();
        ExpandedGraph {
            source,
            sink,
            num_nodes: graph.node_count(),
            flow_value: instance.num_players() as u32,
            y_bar,
            edges,
        }
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, idx: usize) -> &ExpandedEdge {
        &self.edges[idx]
    }

    /// Required flow value, the player count n.
    pub fn flow_value(&self) -> u32 {
        self.flow_value
    }

    /// Per-unit cost of the i-th copy of an edge, 1-based.
    pub fn delta(&self, edge: usize, i: u32) -> f64 {
        let e = &self.edges[edge];
        delta_formula(e.alpha, e.beta, self.y_bar, e.mult, self.flow_value, i)
    }

    /// Cumulative edge value at load q, including the load-independent part.
    pub fn g(&self, edge: usize, q: u32) -> f64 {
        let e = &self.edges[edge];
        let n = f64::from(self.flow_value);
        let load = f64::from(q);
        (1.0 - self.y_bar) * (e.alpha * load * load + e.beta * load)
            - e.mult * (n * e.alpha * load + (n - load) * e.alpha + n * e.beta)
    }

    /// Constant part of the objective left out of the arc costs.
    pub fn offset(&self) -> f64 {
        (0..self.edges.len()).map(|e| self.g(e, 0)).sum()
    }

    /// Objective value of an arbitrary congestion vector.
    pub fn value_at(&self, q: &CongestionVector) -> f64 {
        (0..self.edges.len()).map(|e| self.g(e, q.load[e])).sum()
    }
}

/// Marginal cost of the i-th copy of an edge in the expanded graph, in
/// closed form. Panics on unknown state or edge ids; i is 1-based.
pub fn marginal_cost(
    instance: &GameInstance,
    state: &str,
    edge: &str,
    i: u32,
    y: &SymmetricDualPoint,
) -> f64 {
    let state_idx = instance.state_idx(state).expect("unknown state id");
    let edge_idx = instance.graph().edge_idx(edge).expect("unknown edge id");
    let cost = instance.cost(edge_idx, state_idx);
    let n = instance.num_players() as u32;
    assert!(i >= 1 && i <= n, "copy index {i} out of 1..={n}");
    delta_formula(
        cost.alpha,
        cost.beta,
        y.y_bar,
        y.edge_value(edge),
        n,
        i,
    )
}

/// Inner minimization value for one state and its minimizing congestion.
pub fn chi(
    instance: &GameInstance,
    state: &str,
    y: &SymmetricDualPoint,
) -> Result<(f64, CongestionVector), SeparationError> {
    let expanded = ExpandedGraph::expand(instance, state, y)?;
    let (q, cost) = min_cost_flow(&expanded)?;
    Ok((cost + expanded.offset(), q))
}

/// Same minimization with explicit multipliers; returns the exact objective
/// value re-evaluated at the flow's congestion, which guards against drift
/// when marginals are negative and cycles were canceled.
pub(crate) fn chi_with_multipliers(
    instance: &GameInstance,
    state_idx: usize,
    y_bar: f64,
    mult: &[f64],
) -> Result<(f64, CongestionVector), SeparationError> {
    let expanded = ExpandedGraph::with_multipliers(instance, state_idx, y_bar, mult);
    let (q, cost) = min_cost_flow(&expanded)?;
    let value = expanded.value_at(&q);
    debug_assert!(
        (value - (cost + expanded.offset())).abs() <= 1e-6 * (1.0 + value.abs()),
        "flow cost and direct evaluation disagree: {value} vs {}",
        cost + expanded.offset()
    );
    Ok((value, q))
}

#[derive(Debug, Clone)]
pub enum SeparationResult {
    Feasible,
    Violated {
        state: String,
        profile: ActionProfile,
        violation: f64,
        chi: f64,
    },
}

/// Checks every state's persuasiveness constraint at the dual point. The
/// per-state slack is v(θ) = μ_θ·χ(θ) − y_θ; the most negative slack below
/// -tol wins, ties broken by state order.
pub fn separate(
    instance: &GameInstance,
    y: &SymmetricDualPoint,
    tol: f64,
) -> Result<SeparationResult, SeparationError> {
    y.check(instance)?;
    let mut worst: Option<(f64, usize, f64, CongestionVector)> = None;
    for (idx, state) in instance.states().iter().enumerate() {
        let (chi_value, q) = chi(instance, state, y)?;
        let slack = instance.prior(idx) * chi_value - y.state_value(state);
        let beats = match &worst {
            Some((best, _, _, _)) => slack < best - 0.0,
            None => true,
        };
        if beats {
            worst = Some((slack, idx, chi_value, q));
        }
    }
    let (slack, idx, chi_value, q) = worst.expect("at least one state");
    if slack >= -tol {
        return Ok(SeparationResult::Feasible);
    }
    let profile = flow_decompose(instance, &q)?;
    Ok(SeparationResult::Violated {
        state: instance.states()[idx].clone(),
        profile,
        violation: -slack,
        chi: chi_value,
    })
}
