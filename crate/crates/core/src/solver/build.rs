//! Assembles the full primal LP over explicit profile columns: per-state
//! recommendation weights, per-player node potentials, deviation and
//! potential constraints, and the per-state distribution rows.
//!
//! Both the brute-force solver (all profiles) and the cutting-plane primal
//! recovery (recorded columns only) build through here, so their results
//! stay comparable row for row.

use crate::game::{ActionProfile, GameInstance};
use crate::lp::{Constraint, LinearProgram, LpSolution, Relation, Sense, VarBound};
use crate::game::SignalingScheme;

use super::FullDualPoint;

const SUPPORT_FLOOR: f64 = 1e-12;

pub(crate) struct ProblemOne {
    pub lp: LinearProgram,
    /// Variable index of each recommendation weight, by state and column.
    phi: Vec<Vec<usize>>,
    /// Variable index of each potential, by player and node.
    #[cfg_attr(not(test), allow(dead_code))]
    x: Vec<Vec<usize>>,
    /// Row indices: deviation per player, potential per player and edge,
    /// sink pin per player, distribution per state.
    row_deviation: Vec<usize>,
    row_potential: Vec<Vec<usize>>,
    row_sink: Vec<usize>,
    row_distribution: Vec<usize>,
    columns: Vec<Vec<ActionProfile>>,
}

pub(crate) fn build_problem_one(
    instance: &GameInstance,
    columns: &[Vec<ActionProfile>],
) -> ProblemOne {
    let n = instance.num_players();
    let graph = instance.graph();
    let nodes = graph.node_count();
    let num_edges = graph.edge_count();
    let num_states = instance.num_states();
    assert_eq!(columns.len(), num_states);

    let mut num_vars = 0;
    let phi: Vec<Vec<usize>> = columns
        .iter()
        .map(|cols| {
            cols.iter()
                .map(|_| {
                    num_vars += 1;
                    num_vars - 1
                })
                .collect()
        })
        .collect();
    let x: Vec<Vec<usize>> = (0..n)
        .map(|_| {
            (0..nodes)
                .map(|_| {
                    num_vars += 1;
                    num_vars - 1
                })
                .collect()
        })
        .collect();

    let mut bounds = vec![VarBound::NonNegative; num_vars];
    for per_player in &x {
        for &v in per_player {
            bounds[v] = VarBound::Free;
        }
    }

    // Per column: congestion, per-player path cost, social cost.
    let mut col_data: Vec<Vec<(Vec<u32>, Vec<f64>, f64)>> = Vec::with_capacity(num_states);
    for (state, cols) in columns.iter().enumerate() {
        let mut per_state = Vec::with_capacity(cols.len());
        for profile in cols {
            let loads = profile.congestion(num_edges);
            let (per_player, social) =
                crate::game::profile_cost_indexed(instance, profile, state);
            per_state.push((loads.load, per_player, social));
        }
        col_data.push(per_state);
    }

    let mut objective = vec![0.0; num_vars];
    for state in 0..num_states {
        let mu = instance.prior(state);
        for (k, &(_, _, social)) in col_data[state].iter().enumerate() {
            objective[phi[state][k]] = mu * social;
        }
    }

    let mut constraints = Vec::new();
    let mut row_deviation = Vec::with_capacity(n);
    for p in 0..n {
        let (source, _) = instance.terminals(p);
        let mut coeffs = vec![0.0; num_vars];
        for state in 0..num_states {
            let mu = instance.prior(state);
            for (k, (_, per_player, _)) in col_data[state].iter().enumerate() {
                coeffs[phi[state][k]] = mu * per_player[p];
            }
        }
        coeffs[x[p][source]] -= 1.0;
        row_deviation.push(constraints.len());
        constraints.push(Constraint {
            coeffs,
            relation: Relation::Le,
            rhs: 0.0,
        });
    }

    let mut row_potential = vec![Vec::with_capacity(num_edges); n];
    for p in 0..n {
        for (e, edge) in graph.edges().iter().enumerate() {
            let mut coeffs = vec![0.0; num_vars];
            coeffs[x[p][edge.from]] += 1.0;
            coeffs[x[p][edge.to]] -= 1.0;
            for state in 0..num_states {
                let mu = instance.prior(state);
                let cost = instance.cost(e, state);
                for (k, (loads, _, _)) in col_data[state].iter().enumerate() {
                    let on_path = columns[state][k].paths[p].contains(&e);
                    let load = loads[e] + u32::from(!on_path);
                    coeffs[phi[state][k]] -= mu * cost.at(load);
                }
            }
            row_potential[p].push(constraints.len());
            constraints.push(Constraint {
                coeffs,
                relation: Relation::Le,
                rhs: 0.0,
            });
        }
    }

    let mut row_sink = Vec::with_capacity(n);
    for p in 0..n {
        let (_, sink) = instance.terminals(p);
        let mut coeffs = vec![0.0; num_vars];
        coeffs[x[p][sink]] = 1.0;
        row_sink.push(constraints.len());
        constraints.push(Constraint {
            coeffs,
            relation: Relation::Eq,
            rhs: 0.0,
        });
    }

    let mut row_distribution = Vec::with_capacity(num_states);
    for state in 0..num_states {
        let mut coeffs = vec![0.0; num_vars];
        for &var in &phi[state] {
            coeffs[var] = 1.0;
        }
        row_distribution.push(constraints.len());
        constraints.push(Constraint {
            coeffs,
            relation: Relation::Eq,
            rhs: 1.0,
        });
    }

    ProblemOne {
        lp: LinearProgram {
            sense: Sense::Minimize,
            objective,
            constraints,
            bounds,
        },
        phi,
        x,
        row_deviation,
        row_potential,
        row_sink,
        row_distribution,
        columns: columns.to_vec(),
    }
}

impl ProblemOne {
    /// Reads the recommendation scheme off an optimal solution, dropping
    /// dust weights and renormalizing each state.
    pub fn scheme(&self, solution: &LpSolution) -> SignalingScheme {
        let support = self
            .phi
            .iter()
            .zip(&self.columns)
            .map(|(vars, cols)| {
                let mut signals: Vec<(f64, ActionProfile)> = vars
                    .iter()
                    .zip(cols)
                    .filter_map(|(&var, profile)| {
                        let weight = solution.primal[var];
                        (weight > SUPPORT_FLOOR).then(|| (weight, profile.clone()))
                    })
                    .collect();
                let total: f64 = signals.iter().map(|(w, _)| w).sum();
                for (w, _) in &mut signals {
                    *w /= total;
                }
                signals
            })
            .collect();
        SignalingScheme { support }
    }

    pub fn full_duals(&self, solution: &LpSolution) -> FullDualPoint {
        FullDualPoint {
            y_player: self
                .row_deviation
                .iter()
                .map(|&r| solution.duals[r])
                .collect(),
            y_edge: self
                .row_potential
                .iter()
                .map(|rows| rows.iter().map(|&r| solution.duals[r]).collect())
                .collect(),
            y_sink: self.row_sink.iter().map(|&r| solution.duals[r]).collect(),
            y_state: self
                .row_distribution
                .iter()
                .map(|&r| solution.duals[r])
                .collect(),
        }
    }

}
