//! Integer min-cost flow on the expanded graph and flow decomposition back
//! into action profiles.
//!
//! Copies of an edge have nondecreasing costs, so the residual network only
//! ever needs one forward arc (the next copy) and one backward arc (the last
//! used copy) per original edge. Successive shortest paths with node
//! potentials handle the regular case; negative marginals, which appear when
//! the solver prices cuts with flipped multipliers, get Bellman-Ford
//! potentials and an upfront negative-cycle sweep.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::game::{ActionProfile, CongestionVector, GameInstance};

use super::{ExpandedGraph, SeparationError};

const CYCLE_TOL: f64 = 1e-9;
const REDUCED_TOL: f64 = 1e-9;
const CANCEL_CAP: usize = 10_000;

struct Residual<'a> {
    expanded: &'a ExpandedGraph,
    used: Vec<u32>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Dir {
    Forward,
    Backward,
}

impl<'a> Residual<'a> {
    fn new(expanded: &'a ExpandedGraph) -> Residual<'a> {
        Residual {
            expanded,
            used: vec![0; expanded.num_edges()],
        }
    }

    fn arcs(&self, edge: usize) -> impl Iterator<Item = (usize, usize, f64, Dir)> {
        let e = self.expanded.edge(edge);
        let (from, to) = (e.from, e.to);
        let n = self.expanded.flow_value();
        let used = self.used[edge];
        let fwd = (used < n)
            .then(|| (from, to, self.expanded.delta(edge, used + 1), Dir::Forward));
        let bwd =
            (used > 0).then(|| (to, from, -self.expanded.delta(edge, used), Dir::Backward));
        fwd.into_iter().chain(bwd)
    }

    fn apply(&mut self, edge: usize, dir: Dir) {
        match dir {
            Dir::Forward => self.used[edge] += 1,
            Dir::Backward => self.used[edge] -= 1,
        }
    }

    fn has_negative_arc(&self) -> bool {
        (0..self.used.len())
            .flat_map(|e| self.arcs(e))
            .any(|(_, _, c, _)| c < -1e-12)
    }

    /// Cancels one negative residual cycle if present. Bellman-Ford from a
    /// virtual super-source (all distances zero) finds cycles anywhere in
    /// the graph, including parts unreachable from the flow source.
    fn cancel_one_cycle(&mut self) -> bool {
        let nodes = self.expanded.num_nodes();
        let mut dist = vec![0.0f64; nodes];
        let mut pred: Vec<Option<(usize, Dir)>> = vec![None; nodes];
        let mut touched = None;
        for round in 0..nodes {
            let mut relaxed = None;
            for e in 0..self.used.len() {
                for (u, v, c, dir) in self.arcs(e) {
                    if dist[u] + c < dist[v] - 1e-12 {
                        dist[v] = dist[u] + c;
                        pred[v] = Some((e, dir));
                        relaxed = Some(v);
                    }
                }
            }
            match relaxed {
                None => return false,
                Some(v) if round + 1 == nodes => touched = Some(v),
                Some(_) => {}
            }
        }
        let Some(mut v) = touched else {
            return false;
        };
        // Walk predecessors until the path closes on itself; v then lies on
        // the cycle.
        let mut seen = vec![false; nodes];
        loop {
            if seen[v] {
                break;
            }
            seen[v] = true;
            let (e, dir) = pred[v].expect("relaxed node has a predecessor");
            let arc_tail = match dir {
                Dir::Forward => self.expanded.edge(e).from,
                Dir::Backward => self.expanded.edge(e).to,
            };
            v = arc_tail;
        }
        let start = v;
        let mut cycle = Vec::new();
        let mut cost = 0.0;
        loop {
            let (e, dir) = pred[v].expect("cycle node has a predecessor");
            cost += match dir {
                Dir::Forward => self.expanded.delta(e, self.used[e] + 1),
                Dir::Backward => -self.expanded.delta(e, self.used[e]),
            };
            cycle.push((e, dir));
            v = match dir {
                Dir::Forward => self.expanded.edge(e).from,
                Dir::Backward => self.expanded.edge(e).to,
            };
            if v == start {
                break;
            }
        }
        if cost >= -CYCLE_TOL {
            return false;
        }
        for (e, dir) in cycle {
            self.apply(e, dir);
        }
        true
    }

    /// Bellman-Ford distances from the flow source; unreachable stays +inf.
    fn distances_from_source(&self) -> Vec<f64> {
        let nodes = self.expanded.num_nodes();
        let mut dist = vec![f64::INFINITY; nodes];
        dist[self.expanded.source()] = 0.0;
        for _ in 0..nodes {
            let mut any = false;
            for e in 0..self.used.len() {
                for (u, v, c, _) in self.arcs(e) {
                    if dist[u].is_finite() && dist[u] + c < dist[v] - 1e-12 {
                        dist[v] = dist[u] + c;
                        any = true;
                    }
                }
            }
            if !any {
                break;
            }
        }
        dist
    }
}

#[derive(PartialEq)]
struct HeapItem {
    dist: f64,
    node: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed for a min-heap; ties broken by node index for determinism.
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Minimum-cost integral flow of value n through the expanded graph.
/// Returns the congestion vector and the flow cost, which excludes the
/// load-independent offset.
pub fn min_cost_flow(
    expanded: &ExpandedGraph,
) -> Result<(CongestionVector, f64), SeparationError> {
    let num_edges = expanded.num_edges();
    let mut residual = Residual::new(expanded);
    if expanded.source() == expanded.sink() {
        return Ok((CongestionVector::zero(num_edges), 0.0));
    }

    let mut canceled = 0usize;
    while residual.cancel_one_cycle() {
        canceled += 1;
        if canceled > CANCEL_CAP {
            return Err(SeparationError::Numerical(
                "negative cycle cancellation did not converge".into(),
            ));
        }
    }

    let nodes = expanded.num_nodes();
    let mut potential = if residual.has_negative_arc() {
        residual.distances_from_source()
    } else {
        vec![0.0; nodes]
    };

    for _ in 0..expanded.flow_value() {
        let mut dist = vec![f64::INFINITY; nodes];
        let mut pred: Vec<Option<(usize, Dir)>> = vec![None; nodes];
        dist[expanded.source()] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(HeapItem {
            dist: 0.0,
            node: expanded.source(),
        });
        while let Some(HeapItem { dist: d, node: u }) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for e in 0..num_edges {
                for (tail, head, cost, dir) in residual.arcs(e) {
                    if tail != u || !potential[tail].is_finite() {
                        continue;
                    }
                    let reduced = cost + potential[tail]
                        - if potential[head].is_finite() {
                            potential[head]
                        } else {
                            continue;
                        };
                    assert!(
                        reduced >= -REDUCED_TOL,
                        "reduced cost {reduced} went negative"
                    );
                    let next = d + reduced.max(0.0);
                    if next < dist[head] {
                        dist[head] = next;
                        pred[head] = Some((e, dir));
                        heap.push(HeapItem {
                            dist: next,
                            node: head,
                        });
                    }
                }
            }
        }
        if !dist[expanded.sink()].is_finite() {
            return Err(SeparationError::Disconnected);
        }
        // Unreachable nodes keep an infinite potential and stay out of play.
        let d_sink = dist[expanded.sink()];
        for v in 0..nodes {
            if potential[v].is_finite() {
                potential[v] += dist[v].min(d_sink);
            }
        }
        let mut v = expanded.sink();
        while v != expanded.source() {
            let (e, dir) = pred[v].expect("augmenting path reaches the source");
            residual.apply(e, dir);
            v = match dir {
                Dir::Forward => expanded.edge(e).from,
                Dir::Backward => expanded.edge(e).to,
            };
        }
    }

    let cost: f64 = (0..num_edges)
        .map(|e| expanded.g(e, residual.used[e]) - expanded.g(e, 0))
        .sum();
    Ok((
        CongestionVector {
            load: residual.used,
        },
        cost,
    ))
}

/// Splits a conservative congestion vector into n simple source→sink paths.
/// Directed cycles riding on top of the paths are canceled as the walks
/// find them, so the output congestion can fall short of `q` on cycle edges;
/// acyclic inputs decompose exactly.
pub fn flow_decompose(
    instance: &GameInstance,
    q: &CongestionVector,
) -> Result<ActionProfile, SeparationError> {
    if !instance.is_symmetric() {
        return Err(SeparationError::NotSymmetric);
    }
    let graph = instance.graph();
    if q.load.len() != graph.edge_count() {
        return Err(SeparationError::Conservation(format!(
            "vector has {} entries for {} edges",
            q.load.len(),
            graph.edge_count()
        )));
    }
    let n = instance.num_players();
    let (source, sink) = instance.terminals(0);

    let net = |load: &[u32], node: usize| -> i64 {
        let out: i64 = graph.out_edges(node).iter().map(|&e| i64::from(load[e])).sum();
        let inn: i64 = graph.in_edges(node).iter().map(|&e| i64::from(load[e])).sum();
        out - inn
    };
    for node in 0..graph.node_count() {
        let expected = if source == sink {
            0
        } else if node == source {
            n as i64
        } else if node == sink {
            -(n as i64)
        } else {
            0
        };
        let got = net(&q.load, node);
        if got != expected {
            return Err(SeparationError::Conservation(format!(
                "net flow {got} at {}, expected {expected}",
                graph.node_id(node)
            )));
        }
    }

    let mut remaining = q.load.clone();
    let mut paths = Vec::with_capacity(n);
    for _ in 0..n {
        if source == sink {
            paths.push(Vec::new());
            continue;
        }
        let mut walk: Vec<usize> = Vec::new();
        let mut at: Vec<usize> = vec![source];
        while *at.last().unwrap() != sink {
            let v = *at.last().unwrap();
            let next = graph
                .out_edges(v)
                .iter()
                .copied()
                .find(|&e| remaining[e] > 0);
            let Some(e) = next else {
                return Err(SeparationError::Conservation(format!(
                    "walk stuck at {} with no remaining flow",
                    graph.node_id(v)
                )));
            };
            remaining[e] -= 1;
            let head = graph.edge(e).to;
            if let Some(pos) = at.iter().position(|&u| u == head) {
                // The walk closed a cycle; drop it, its units are spent.
                walk.truncate(pos);
                at.truncate(pos + 1);
            } else {
                walk.push(e);
                at.push(head);
            }
        }
        paths.push(walk);
    }

    // Whatever is left must be circulation mass; anything with nonzero net
    // somewhere means the walks above miscounted, which conservation rules
    // out.
    for node in 0..graph.node_count() {
        debug_assert_eq!(net(&remaining, node), 0);
    }

    Ok(ActionProfile::new(paths))
}
