//! Singleton congestion games and their network encoding.
//!
//! An SCG player picks one resource from a personal menu. The encoding
//! gives every resource a two-node corridor and wires each player's
//! terminals to the corridors of her menu, so paths correspond one to one
//! with resources and the corridor edge carries the resource cost.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::game::{Cost, GameInstance, Graph, PlayerSpec};

use super::GadgetError;

#[derive(Debug, Clone, PartialEq)]
pub struct ScgResource {
    pub id: String,
    pub cost: Cost,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScgPlayer {
    pub id: String,
    /// Indices into the resource list; nonempty, duplicates removed.
    pub actions: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScgInstance {
    resources: Vec<ScgResource>,
    players: Vec<ScgPlayer>,
}

impl ScgInstance {
    pub fn new(
        resources: Vec<ScgResource>,
        players: Vec<ScgPlayer>,
    ) -> Result<Self, GadgetError> {
        let mut seen = BTreeMap::new();
        for (i, r) in resources.iter().enumerate() {
            if seen.insert(r.id.clone(), i).is_some() {
                return Err(GadgetError::Invalid(format!(
                    "duplicate resource id {:?}",
                    r.id
                )));
            }
            if !(r.cost.alpha >= 0.0 && r.cost.beta >= 0.0) {
                return Err(GadgetError::Invalid(format!(
                    "resource {:?} has negative cost coefficients",
                    r.id
                )));
            }
        }
        for p in &players {
            if p.actions.is_empty() {
                return Err(GadgetError::Invalid(format!(
                    "player {:?} has an empty action set",
                    p.id
                )));
            }
            for &r in &p.actions {
                if r >= resources.len() {
                    return Err(GadgetError::Invalid(format!(
                        "player {:?} references resource index {r}",
                        p.id
                    )));
                }
            }
        }
        Ok(ScgInstance { resources, players })
    }

    pub fn resources(&self) -> &[ScgResource] {
        &self.resources
    }

    pub fn players(&self) -> &[ScgPlayer] {
        &self.players
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn num_resources(&self) -> usize {
        self.resources.len()
    }

    /// Per-player and social cost of a pure profile, one chosen resource
    /// index per player.
    pub fn profile_cost(&self, choices: &[usize]) -> (Vec<f64>, f64) {
        assert_eq!(choices.len(), self.players.len());
        let mut load = vec![0u32; self.resources.len()];
        for (p, &r) in choices.iter().enumerate() {
            assert!(
                self.players[p].actions.contains(&r),
                "player {p} cannot use resource {r}"
            );
            load[r] += 1;
        }
        let per_player: Vec<f64> = choices
            .iter()
            .map(|&r| self.resources[r].cost.at(load[r]))
            .collect();
        // Summed in player order so the value is bit-identical to the
        // network conversion's social cost, which also sums per player.
        let social = per_player.iter().sum();
        (per_player, social)
    }
}

#[derive(Serialize, Deserialize)]
struct RawScg {
    resources: Vec<RawResource>,
    players: Vec<RawPlayer>,
}

#[derive(Serialize, Deserialize)]
struct RawResource {
    id: String,
    alpha: f64,
    beta: f64,
}

#[derive(Serialize, Deserialize)]
struct RawPlayer {
    id: String,
    actions: Vec<String>,
}

pub fn parse_scg(text: &str) -> Result<ScgInstance, GadgetError> {
    let raw: RawScg =
        serde_json::from_str(text).map_err(|e| GadgetError::Parse(e.to_string()))?;
    let index: BTreeMap<&str, usize> = raw
        .resources
        .iter()
        .enumerate()
        .map(|(i, r)| (r.id.as_str(), i))
        .collect();
    let resources = raw
        .resources
        .iter()
        .map(|r| ScgResource {
            id: r.id.clone(),
            cost: Cost {
                alpha: r.alpha,
                beta: r.beta,
            },
        })
        .collect();
    let mut players = Vec::with_capacity(raw.players.len());
    for p in &raw.players {
        let mut actions = Vec::with_capacity(p.actions.len());
        for id in &p.actions {
            let &r = index.get(id.as_str()).ok_or_else(|| {
                GadgetError::Invalid(format!(
                    "player {:?} references unknown resource {id:?}",
                    p.id
                ))
            })?;
            if !actions.contains(&r) {
                actions.push(r);
            }
        }
        players.push(ScgPlayer {
            id: p.id.clone(),
            actions,
        });
    }
    ScgInstance::new(resources, players)
}

pub fn serialize_scg(scg: &ScgInstance) -> String {
    let raw = RawScg {
        resources: scg
            .resources
            .iter()
            .map(|r| RawResource {
                id: r.id.clone(),
                alpha: r.cost.alpha,
                beta: r.cost.beta,
            })
            .collect(),
        players: scg
            .players
            .iter()
            .map(|p| RawPlayer {
                id: p.id.clone(),
                actions: p
                    .actions
                    .iter()
                    .map(|&r| scg.resources[r].id.clone())
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&raw).expect("SCG serialization cannot fail")
}

/// Encodes the SCG as a single-state network game. Each resource `r`
/// becomes a corridor `v_<r>_1 -> v_<r>_2` carrying `c_r`; each player gets
/// personal terminals wired to the corridors of her menu by free edges.
pub fn scg_to_ncg(scg: &ScgInstance) -> Result<GameInstance, GadgetError> {
    const STATE: &str = "theta0";

    let mut nodes = Vec::with_capacity(2 * scg.num_resources() + 2 * scg.num_players());
    for r in &scg.resources {
        nodes.push(format!("v_{}_1", r.id));
        nodes.push(format!("v_{}_2", r.id));
    }
    for p in &scg.players {
        nodes.push(format!("s_{}", p.id));
        nodes.push(format!("t_{}", p.id));
    }

    let mut edges = Vec::new();
    let mut costs: BTreeMap<String, BTreeMap<String, Cost>> = BTreeMap::new();
    let add = |edges: &mut Vec<(String, String, String)>,
                   costs: &mut BTreeMap<String, BTreeMap<String, Cost>>,
                   id: String,
                   from: String,
                   to: String,
                   cost: Cost| {
        costs.insert(id.clone(), BTreeMap::from([(STATE.to_string(), cost)]));
        edges.push((id, from, to));
    };
    let free = Cost {
        alpha: 0.0,
        beta: 0.0,
    };
    for r in &scg.resources {
        add(
            &mut edges,
            &mut costs,
            format!("use_{}", r.id),
            format!("v_{}_1", r.id),
            format!("v_{}_2", r.id),
            r.cost,
        );
    }
    for p in &scg.players {
        for &ri in &p.actions {
            let r = &scg.resources[ri];
            add(
                &mut edges,
                &mut costs,
                format!("in_{}_{}", p.id, r.id),
                format!("s_{}", p.id),
                format!("v_{}_1", r.id),
                free,
            );
            add(
                &mut edges,
                &mut costs,
                format!("out_{}_{}", p.id, r.id),
                format!("v_{}_2", r.id),
                format!("t_{}", p.id),
                free,
            );
        }
    }

    let graph = Graph::new(nodes, edges).map_err(GadgetError::Game)?;
    let pairs = scg
        .players
        .iter()
        .map(|p| {
            let s = graph.node_idx(&format!("s_{}", p.id)).expect("source node");
            let t = graph.node_idx(&format!("t_{}", p.id)).expect("sink node");
            (s, t)
        })
        .collect();

    GameInstance::new(
        graph,
        scg.num_players(),
        vec![(STATE.to_string(), 1.0)],
        costs,
        PlayerSpec::PerPlayer(pairs),
    )
    .map_err(GadgetError::Game)
}
