//! Ex ante persuasiveness via the shortest-path characterization: a
//! recommendation scheme is persuasive iff no player can beat their on-path
//! expected cost with a fixed deviation path, and the cheapest deviation is
//! a shortest path under expected marginal edge weights.

use crate::game::{GameInstance, SignalingScheme};

use super::{extract_path, shortest_to_sink};

/// Expected cost x_{p,v} of the best deviation continuing from each node,
/// per player. Nodes that cannot reach the player's sink hold infinity.
#[derive(Debug, Clone)]
pub struct BestResponseValues {
    /// Indexed by node, in graph node order.
    pub values: Vec<f64>,
    pub(crate) succ: Vec<Option<usize>>,
}

#[derive(Debug, Clone)]
pub enum Persuasiveness {
    Persuasive {
        /// Slack x_{p,s} - E_p per player; all at least -eps.
        margins: Vec<f64>,
    },
    NotPersuasive {
        player: usize,
        /// Edge indices of the profitable deviation path.
        deviation: Vec<usize>,
        /// Expected saving E_p - x_{p,s} of switching to it.
        gain: f64,
    },
}

/// Expected marginal weight of every edge for a deviating player: the cost
/// the player would pay on e given everyone else follows the scheme, with
/// the player's own recommended load removed when they were not on e.
pub(crate) fn deviation_weights(
    instance: &GameInstance,
    scheme: &SignalingScheme,
    player: usize,
) -> Vec<f64> {
    let edges = instance.graph().edge_count();
    let mut weights = vec![0.0; edges];
    for (state, signals) in scheme.support.iter().enumerate() {
        let mu = instance.prior(state);
        for (prob, profile) in signals {
            let loads = profile.congestion(edges);
            let mut on_path = vec![false; edges];
            for &e in &profile.paths[player] {
                on_path[e] = true;
            }
            for e in 0..edges {
                let load = loads.load[e] + u32::from(!on_path[e]);
                weights[e] += mu * prob * instance.cost(e, state).at(load);
            }
        }
    }
    weights
}

pub fn best_response_values(
    instance: &GameInstance,
    scheme: &SignalingScheme,
    player: usize,
) -> BestResponseValues {
    let weights = deviation_weights(instance, scheme, player);
    let (_, sink) = instance.terminals(player);
    let (values, succ) = shortest_to_sink(instance, sink, &weights);
    BestResponseValues { values, succ }
}

/// On-path expected cost of one player under the scheme.
fn expected_cost(instance: &GameInstance, scheme: &SignalingScheme, player: usize) -> f64 {
    let mut total = 0.0;
    for (state, signals) in scheme.support.iter().enumerate() {
        let mu = instance.prior(state);
        for (prob, profile) in signals {
            let (per_player, _) =
                crate::game::profile_cost_indexed(instance, profile, state);
            total += mu * prob * per_player[player];
        }
    }
    total
}

pub fn verify_persuasive(
    instance: &GameInstance,
    scheme: &SignalingScheme,
    eps: f64,
) -> Result<Persuasiveness, crate::game::GameError> {
    scheme.validate(instance)?;
    let mut margins = Vec::with_capacity(instance.num_players());
    for player in 0..instance.num_players() {
        let br = best_response_values(instance, scheme, player);
        let (source, sink) = instance.terminals(player);
        let deviation_cost = br.values[source];
        let on_path = expected_cost(instance, scheme, player);
        let margin = deviation_cost - on_path;
        if margin < -eps {
            let deviation = extract_path(instance.graph(), &br.succ, source, sink);
            return Ok(Persuasiveness::NotPersuasive {
                player,
                deviation,
                gain: -margin,
            });
        }
        margins.push(margin);
    }
    Ok(Persuasiveness::Persuasive { margins })
}

/// Rejects schemes the fast check rejects, by brute force: every player and
/// every alternative path, straight from the definition.
#[cfg(test)]
pub(crate) fn verify_by_enumeration(
    instance: &GameInstance,
    scheme: &SignalingScheme,
    eps: f64,
) -> bool {
    use crate::game::enumerate_paths;
    for player in 0..instance.num_players() {
        let on_path = expected_cost(instance, scheme, player);
        for alt in enumerate_paths(instance, player).unwrap() {
            let mut dev_cost = 0.0;
            for (state, signals) in scheme.support.iter().enumerate() {
                let mu = instance.prior(state);
                for (prob, profile) in signals {
                    let mut switched = profile.clone();
                    switched.paths[player] = alt.clone();
                    let loads = switched.congestion(instance.graph().edge_count());
                    let cost: f64 = alt
                        .iter()
                        .map(|&e| instance.cost(e, state).at(loads.load[e]))
                        .sum();
                    dev_cost += mu * prob * cost;
                }
            }
            if dev_cost < on_path - eps {
                return false;
            }
        }
    }
    true
}
