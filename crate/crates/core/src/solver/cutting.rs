//! Cutting-plane solver for symmetric instances.
//!
//! The restricted master works on congestion columns rather than raw
//! profiles: each state carries a pool of observed outcome vectors, and a
//! shared set of node potentials enforces the obedience rows. The master's
//! LP dual is exactly the kind of point the separation oracle prices, so
//! every round either certifies near-optimality or the oracle's minimizer
//! joins the pool. Recommendations are recovered afterwards by re-solving
//! the profile LP over player rotations of the decomposed columns.

use std::collections::BTreeSet;

use crate::game::{ActionProfile, CongestionVector, Cost, GameInstance};
use crate::lp::{solve_lp, Constraint, LinearProgram, LpSolution, LpStatus, Relation, Sense, VarBound};
use crate::separation::{chi_with_multipliers, flow_decompose, SymmetricDualPoint};

use super::build::build_problem_one;
use super::verify::{verify_persuasive, Persuasiveness};
use super::{extract_path, shortest_to_sink, SolveError, SolveOptions, SolveReport};

/// Minimum improvement for a best-response move during seeding.
const IMPROVE_TOL: f64 = 1e-9;
/// Slack allowed on the seed's equilibrium certificate.
const SEED_SLACK: f64 = 1e-10;
const MOVE_CAP: usize = 10_000;

pub fn cutting_plane_solve(
    instance: &GameInstance,
    opt_tol: f64,
    max_iters: usize,
) -> Result<SolveReport, SolveError> {
    let options = SolveOptions {
        opt_tol,
        max_iters,
        ..SolveOptions::default()
    };
    cutting_plane_solve_with(instance, &options)
}

pub fn cutting_plane_solve_with(
    instance: &GameInstance,
    options: &SolveOptions,
) -> Result<SolveReport, SolveError> {
    Ok(solve_traced(instance, options)?.0)
}

/// Full solve that also returns the master value after each iteration.
pub(crate) fn solve_traced(
    instance: &GameInstance,
    options: &SolveOptions,
) -> Result<(SolveReport, Vec<f64>), SolveError> {
    if !instance.is_symmetric() {
        return Err(SolveError::NotSymmetric);
    }
    let graph = instance.graph();
    let n = instance.num_players();
    let nf = n as f64;
    let num_edges = graph.edge_count();
    let num_states = instance.num_states();

    let seed = equilibrium_seed(instance, options)?;
    let seed_q = seed.congestion(num_edges);

    let mut pools: Vec<Vec<CongestionVector>> =
        (0..num_states).map(|_| vec![seed_q.clone()]).collect();
    let mut recorded: Vec<(usize, ActionProfile)> = Vec::new();
    let mut trace = Vec::new();

    let mut outcome = None;
    let mut iterations = 0;
    let mut last_bound = f64::NEG_INFINITY;

    for iter in 1..=options.max_iters.max(1) {
        iterations = iter;
        let master = build_master(instance, &pools);
        let solution = solve_lp(&master.lp)?;
        if solution.status != LpStatus::Optimal {
            return Err(SolveError::Internal(format!(
                "restricted master reported {:?} at iteration {iter}",
                solution.status
            )));
        }
        let value = solution.objective;
        trace.push(value);
        let duals = master.read_duals(&solution, nf);

        // Price every state against the scaled master duals. The deficit
        // is the total reduced-cost mass still missing from the master.
        let mult: Vec<f64> = duals.y_edge.iter().map(|v| -v).collect();
        let mut deficit = 0.0;
        let mut pricing = Vec::with_capacity(num_states);
        for state in 0..num_states {
            let (chi, q) = chi_with_multipliers(instance, state, duals.y_bar, &mult)?;
            let reduced = instance.prior(state) * chi - duals.y_state[state];
            if reduced < 0.0 {
                deficit -= reduced;
            }
            pricing.push((state, reduced, q));
        }
        last_bound = value - deficit;
        log::debug!("iteration {iter}: master {value:.9}, deficit {deficit:.3e}");

        let threshold = 0.5 * options.opt_tol.max(1e-9) * value.abs().max(1.0);
        if deficit <= threshold {
            outcome = Some((value, duals));
            break;
        }

        pricing.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut added = false;
        for (state, reduced, q) in pricing {
            if reduced >= 0.0 {
                break;
            }
            if pools[state].iter().any(|p| p.load == q.load) {
                continue;
            }
            let profile = flow_decompose(instance, &q)?;
            recorded.push((state, profile));
            pools[state].push(q);
            added = true;
            break;
        }
        if !added {
            // The oracle only re-derives known columns, so the master
            // cannot move; stop with honest bounds instead of spinning.
            break;
        }
    }

    let Some((master_value, duals)) = outcome else {
        return Err(SolveError::NonConvergence {
            iterations,
            lower_bound: last_bound,
            upper_bound: trace.last().copied().unwrap_or(f64::INFINITY),
        });
    };

    // Primal recovery: the master's columns, decomposed into paths and
    // expanded over all player rotations, support an optimal scheme.
    let mut column_sets: Vec<BTreeSet<Vec<Vec<usize>>>> =
        (0..num_states).map(|_| BTreeSet::new()).collect();
    for set in &mut column_sets {
        for k in 0..n {
            set.insert(rotate(&seed, k));
        }
    }
    for (state, profile) in &recorded {
        for k in 0..n {
            column_sets[*state].insert(rotate(profile, k));
        }
    }
    let columns: Vec<Vec<ActionProfile>> = column_sets
        .into_iter()
        .map(|set| set.into_iter().map(ActionProfile::new).collect())
        .collect();
    let built = build_problem_one(instance, &columns);
    let solution = solve_lp(&built.lp)?;
    if solution.status != LpStatus::Optimal {
        return Err(SolveError::Internal(format!(
            "primal recovery reported {:?}",
            solution.status
        )));
    }
    let scheme = built.scheme(&solution);
    let value = solution.objective;
    let duality_gap = (master_value - value).abs();

    let dual = SymmetricDualPoint {
        y_bar: duals.y_bar,
        y_edge: graph
            .edges()
            .iter()
            .enumerate()
            .map(|(e, edge)| (edge.id.clone(), duals.y_edge[e]))
            .collect(),
        y_sink: duals.y_sink,
        y_state: instance
            .states()
            .iter()
            .enumerate()
            .map(|(s, name)| (name.clone(), duals.y_state[s]))
            .collect(),
    };

    log::info!(
        "converged after {iterations} iterations: value {value:.9}, gap {duality_gap:.3e}"
    );

    match verify_persuasive(instance, &scheme, options.verify_eps)? {
        Persuasiveness::Persuasive { .. } => {}
        Persuasiveness::NotPersuasive { player, gain, .. } => {
            return Err(SolveError::Internal(format!(
                "recovered scheme failed verification: player {player} gains {gain:.3e}"
            )));
        }
    }

    let report = SolveReport {
        value,
        scheme,
        iterations,
        columns: recorded
            .into_iter()
            .map(|(state, profile)| (instance.states()[state].clone(), profile))
            .collect(),
        dual: Some(dual),
        duality_gap,
    };
    Ok((report, trace))
}

/// Aggregate marginal of one edge: total cost change when one more player
/// crosses it while q others already do, summed over all n players.
fn kappa(cost: Cost, n: f64, q: f64) -> f64 {
    n * cost.alpha * q + (n - q) * cost.alpha + n * cost.beta
}

struct MasterDuals {
    y_bar: f64,
    y_edge: Vec<f64>,
    y_sink: f64,
    y_state: Vec<f64>,
}

struct Master {
    lp: LinearProgram,
    num_edges: usize,
    num_states: usize,
}

impl Master {
    /// Row layout is fixed: obedience row, one row per edge, the sink pin,
    /// then one distribution row per state. Potentials are per capita, so
    /// the first three blocks scale down by n.
    fn read_duals(&self, solution: &LpSolution, nf: f64) -> MasterDuals {
        let d = &solution.duals;
        MasterDuals {
            y_bar: d[0] / nf,
            y_edge: (0..self.num_edges).map(|e| d[1 + e] / nf).collect(),
            y_sink: d[1 + self.num_edges] / nf,
            y_state: (0..self.num_states)
                .map(|s| d[2 + self.num_edges + s])
                .collect(),
        }
    }
}

fn build_master(instance: &GameInstance, pools: &[Vec<CongestionVector>]) -> Master {
    let graph = instance.graph();
    let n = instance.num_players() as f64;
    let num_edges = graph.edge_count();
    let num_states = instance.num_states();
    let nodes = graph.node_count();
    let (source, sink) = instance.terminals(0);

    let mut num_vars = 0;
    let phi: Vec<Vec<usize>> = pools
        .iter()
        .map(|pool| {
            pool.iter()
                .map(|_| {
                    num_vars += 1;
                    num_vars - 1
                })
                .collect()
        })
        .collect();
    let x_base = num_vars;
    num_vars += nodes;

    let mut bounds = vec![VarBound::NonNegative; num_vars];
    for b in bounds.iter_mut().skip(x_base) {
        *b = VarBound::Free;
    }

    let social: Vec<Vec<f64>> = pools
        .iter()
        .enumerate()
        .map(|(s, pool)| {
            pool.iter()
                .map(|q| instance.social_cost_of_loads(s, q))
                .collect()
        })
        .collect();

    let mut objective = vec![0.0; num_vars];
    for s in 0..num_states {
        let mu = instance.prior(s);
        for (k, &var) in phi[s].iter().enumerate() {
            objective[var] = mu * social[s][k];
        }
    }

    let mut constraints = Vec::with_capacity(2 + num_edges + num_states);

    let mut coeffs = vec![0.0; num_vars];
    for s in 0..num_states {
        let mu = instance.prior(s);
        for (k, &var) in phi[s].iter().enumerate() {
            coeffs[var] = mu * social[s][k] / n;
        }
    }
    coeffs[x_base + source] -= 1.0;
    constraints.push(Constraint {
        coeffs,
        relation: Relation::Le,
        rhs: 0.0,
    });

    for (e, edge) in graph.edges().iter().enumerate() {
        let mut coeffs = vec![0.0; num_vars];
        coeffs[x_base + edge.from] += 1.0;
        coeffs[x_base + edge.to] -= 1.0;
        for s in 0..num_states {
            let mu = instance.prior(s);
            let c = instance.cost(e, s);
            for (k, &var) in phi[s].iter().enumerate() {
                coeffs[var] -= mu * kappa(c, n, pools[s][k].load[e] as f64) / n;
            }
        }
        constraints.push(Constraint {
            coeffs,
            relation: Relation::Le,
            rhs: 0.0,
        });
    }

    let mut coeffs = vec![0.0; num_vars];
    coeffs[x_base + sink] += 1.0;
    constraints.push(Constraint {
        coeffs,
        relation: Relation::Eq,
        rhs: 0.0,
    });

    for s in 0..num_states {
        let mut coeffs = vec![0.0; num_vars];
        for &var in &phi[s] {
            coeffs[var] = 1.0;
        }
        constraints.push(Constraint {
            coeffs,
            relation: Relation::Eq,
            rhs: 1.0,
        });
    }

    Master {
        lp: LinearProgram {
            sense: Sense::Minimize,
            objective,
            constraints,
            bounds,
        },
        num_edges,
        num_states,
    }
}

/// Pure equilibrium of the prior-expected game, found by best-response
/// dynamics from everyone on the lexicographically first path. The master
/// seeded with this profile is always feasible: at equilibrium the average
/// player cost is a lower bound on every path's per-capita marginal price.
fn equilibrium_seed(
    instance: &GameInstance,
    options: &SolveOptions,
) -> Result<ActionProfile, SolveError> {
    let graph = instance.graph();
    let n = instance.num_players();
    let num_edges = graph.edge_count();
    let (source, sink) = instance.terminals(0);

    let mut alpha = vec![0.0; num_edges];
    let mut beta = vec![0.0; num_edges];
    for state in 0..instance.num_states() {
        let mu = instance.prior(state);
        for e in 0..num_edges {
            let c = instance.cost(e, state);
            alpha[e] += mu * c.alpha;
            beta[e] += mu * c.beta;
        }
    }

    let first = crate::game::enumerate_paths_with_cap(instance, 0, options.path_cap)?
        .into_iter()
        .next()
        .ok_or_else(|| SolveError::Internal("no source-sink path".into()))?;
    let mut paths = vec![first; n];
    let mut load = vec![0u32; num_edges];
    for path in &paths {
        for &e in path {
            load[e] += 1;
        }
    }

    let mut moves = 0usize;
    for threshold in [IMPROVE_TOL, 0.0] {
        loop {
            let mut switched = false;
            for p in 0..n {
                for &e in &paths[p] {
                    load[e] -= 1;
                }
                let weights: Vec<f64> = (0..num_edges)
                    .map(|e| alpha[e] * (load[e] + 1) as f64 + beta[e])
                    .collect();
                let (dist, succ) = shortest_to_sink(instance, sink, &weights);
                let current: f64 = paths[p].iter().map(|&e| weights[e]).sum();
                if dist[source] < current - threshold {
                    paths[p] = extract_path(graph, &succ, source, sink);
                    switched = true;
                    moves += 1;
                }
                for &e in &paths[p] {
                    load[e] += 1;
                }
                if moves > MOVE_CAP {
                    return Err(SolveError::Internal(
                        "best-response seeding did not stabilize".into(),
                    ));
                }
            }
            if !switched {
                break;
            }
        }
        if seed_slack(instance, &load) >= -SEED_SLACK {
            return Ok(ActionProfile::new(paths));
        }
        // Improvements below the move threshold were left on the table;
        // polish with an exact threshold so the certificate holds.
    }
    Err(SolveError::Internal(
        "seed profile lacks an equilibrium certificate".into(),
    ))
}

/// Feasibility certificate of the seeded master: shortest path under the
/// per-capita marginal prices minus the per-capita expected social cost.
/// Nonnegative at any pure equilibrium of the expected game.
fn seed_slack(instance: &GameInstance, load: &[u32]) -> f64 {
    let nf = instance.num_players() as f64;
    let num_edges = instance.graph().edge_count();
    let (source, sink) = instance.terminals(0);

    let mut weights = vec![0.0; num_edges];
    let mut social = 0.0;
    let loads = CongestionVector {
        load: load.to_vec(),
    };
    for state in 0..instance.num_states() {
        let mu = instance.prior(state);
        for e in 0..num_edges {
            let c = instance.cost(e, state);
            weights[e] += mu * kappa(c, nf, load[e] as f64) / nf;
        }
        social += mu * instance.social_cost_of_loads(state, &loads);
    }
    let (dist, _) = shortest_to_sink(instance, sink, &weights);
    dist[source] - social / nf
}

fn rotate(profile: &ActionProfile, k: usize) -> Vec<Vec<usize>> {
    let n = profile.paths.len();
    (0..n).map(|p| profile.paths[(p + k) % n].clone()).collect()
}
