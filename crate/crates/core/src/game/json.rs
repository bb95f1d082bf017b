//! JSON wire formats for games and schemes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    ActionProfile, Cost, GameError, GameInstance, Graph, PlayerSpec, SignalingScheme,
};

/// Support probabilities below this are treated as numerical dust.
pub(crate) const PROB_FLOOR: f64 = 1e-12;

#[derive(Serialize, Deserialize)]
struct RawGame {
    n: usize,
    nodes: Vec<String>,
    edges: Vec<RawEdge>,
    states: Vec<String>,
    prior: BTreeMap<String, f64>,
    costs: BTreeMap<String, BTreeMap<String, RawCost>>,
    players: RawPlayers,
}

#[derive(Serialize, Deserialize)]
struct RawEdge {
    id: String,
    from: String,
    to: String,
}

#[derive(Serialize, Deserialize)]
struct RawCost {
    alpha: f64,
    beta: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawPlayers {
    Symmetric(RawTerminals),
    List(Vec<RawTerminals>),
}

#[derive(Serialize, Deserialize)]
struct RawTerminals {
    source: String,
    sink: String,
}

/// Parses and validates a game from its JSON description.
pub fn parse_game(text: &str) -> Result<GameInstance, GameError> {
    let raw: RawGame = serde_json::from_str(text).map_err(|e| GameError::Json(e.to_string()))?;

    let graph = Graph::new(
        raw.nodes,
        raw.edges
            .into_iter()
            .map(|e| (e.id, e.from, e.to))
            .collect(),
    )?;

    let mut state_prior = Vec::new();
    for s in &raw.states {
        let p = *raw
            .prior
            .get(s)
            .ok_or_else(|| super::invalid(format!("prior.{s}"), "missing"))?;
        state_prior.push((s.clone(), p));
    }
    for s in raw.prior.keys() {
        if !raw.states.contains(s) {
            return Err(super::invalid(
                format!("prior.{s}"),
                "not listed in states",
            ));
        }
    }

    let costs = raw
        .costs
        .into_iter()
        .map(|(edge, per_state)| {
            let per_state = per_state
                .into_iter()
                .map(|(s, c)| {
                    (
                        s,
                        Cost {
                            alpha: c.alpha,
                            beta: c.beta,
                        },
                    )
                })
                .collect();
            (edge, per_state)
        })
        .collect();

    let resolve = |field: &str, id: &str| {
        graph
            .node_idx(id)
            .ok_or_else(|| super::invalid(format!("players.{field}"), format!("unknown node {id:?}")))
    };
    let players = match raw.players {
        RawPlayers::Symmetric(t) => PlayerSpec::Symmetric {
            source: resolve("symmetric.source", &t.source)?,
            sink: resolve("symmetric.sink", &t.sink)?,
        },
        RawPlayers::List(list) => {
            let mut pairs = Vec::with_capacity(list.len());
            for (i, t) in list.iter().enumerate() {
                pairs.push((
                    resolve(&format!("list[{i}].source"), &t.source)?,
                    resolve(&format!("list[{i}].sink"), &t.sink)?,
                ));
            }
            PlayerSpec::PerPlayer(pairs)
        }
    };

    GameInstance::new(graph, raw.n, state_prior, costs, players)
}

/// Serializes a game back to its JSON description.
pub fn serialize_game(instance: &GameInstance) -> String {
    let graph = instance.graph();
    let raw = RawGame {
        n: instance.num_players(),
        nodes: graph.node_ids().to_vec(),
        edges: graph
            .edges()
            .iter()
            .map(|e| RawEdge {
                id: e.id.clone(),
                from: graph.node_id(e.from).to_string(),
                to: graph.node_id(e.to).to_string(),
            })
            .collect(),
        states: instance.states().to_vec(),
        prior: instance
            .states()
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), instance.prior(i)))
            .collect(),
        costs: graph
            .edges()
            .iter()
            .enumerate()
            .map(|(e, edge)| {
                let per_state = instance
                    .states()
                    .iter()
                    .enumerate()
                    .map(|(s, state)| {
                        let c = instance.cost(e, s);
                        (
                            state.clone(),
                            RawCost {
                                alpha: c.alpha,
                                beta: c.beta,
                            },
                        )
                    })
                    .collect();
                (edge.id.clone(), per_state)
            })
            .collect(),
        players: match instance.players() {
            PlayerSpec::Symmetric { source, sink } => RawPlayers::Symmetric(RawTerminals {
                source: graph.node_id(*source).to_string(),
                sink: graph.node_id(*sink).to_string(),
            }),
            PlayerSpec::PerPlayer(pairs) => RawPlayers::List(
                pairs
                    .iter()
                    .map(|&(source, sink)| RawTerminals {
                        source: graph.node_id(source).to_string(),
                        sink: graph.node_id(sink).to_string(),
                    })
                    .collect(),
            ),
        },
    };
    serde_json::to_string_pretty(&raw).expect("game serialization cannot fail")
}

#[derive(Serialize, Deserialize)]
struct RawScheme {
    states: BTreeMap<String, Vec<RawSignal>>,
}

#[derive(Serialize, Deserialize)]
struct RawSignal {
    prob: f64,
    profile: Vec<Vec<String>>,
}

/// Parses a scheme and validates it against `instance`.
pub fn parse_scheme(text: &str, instance: &GameInstance) -> Result<SignalingScheme, GameError> {
    let raw: RawScheme = serde_json::from_str(text).map_err(|e| GameError::Json(e.to_string()))?;
    let graph = instance.graph();

    let mut support = vec![Vec::new(); instance.num_states()];
    for (state, signals) in raw.states {
        let s = instance
            .state_idx(&state)
            .ok_or_else(|| GameError::UnknownState(state.clone()))?;
        let mut entries = Vec::with_capacity(signals.len());
        for signal in signals {
            let paths = signal
                .profile
                .iter()
                .map(|path| {
                    path.iter()
                        .map(|id| {
                            graph
                                .edge_idx(id)
                                .ok_or_else(|| GameError::UnknownEdge(id.clone()))
                        })
                        .collect::<Result<Vec<usize>, GameError>>()
                })
                .collect::<Result<Vec<_>, GameError>>()?;
            entries.push((signal.prob, ActionProfile::new(paths)));
        }
        support[s] = entries;
    }

    let scheme = SignalingScheme { support };
    scheme.validate(instance)?;
    Ok(scheme)
}

/// Serializes a scheme, dropping dust entries and renormalizing per state.
pub fn serialize_scheme(scheme: &SignalingScheme, instance: &GameInstance) -> String {
    let graph = instance.graph();
    let states = scheme
        .support
        .iter()
        .enumerate()
        .map(|(s, entries)| {
            let kept: Vec<&(f64, ActionProfile)> = entries
                .iter()
                .filter(|(prob, _)| *prob >= PROB_FLOOR)
                .collect();
            let total: f64 = kept.iter().map(|(prob, _)| prob).sum();
            let signals = kept
                .into_iter()
                .map(|(prob, profile)| RawSignal {
                    prob: prob / total,
                    profile: profile.path_ids(graph),
                })
                .collect();
            (instance.states()[s].clone(), signals)
        })
        .collect();
    serde_json::to_string_pretty(&RawScheme { states })
        .expect("scheme serialization cannot fail")
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::game::expected_social_cost;

    pub(crate) const EXAMPLE_ONE: &str = r#"{
        "n": 3,
        "nodes": ["s", "t"],
        "edges": [
            {"id": "A", "from": "s", "to": "t"},
            {"id": "B", "from": "s", "to": "t"}
        ],
        "states": ["theta0", "theta1"],
        "prior": {"theta0": 0.5, "theta1": 0.5},
        "costs": {
            "A": {"theta0": {"alpha": 30, "beta": 0}, "theta1": {"alpha": 30, "beta": 0}},
            "B": {"theta0": {"alpha": 1, "beta": 0}, "theta1": {"alpha": 0, "beta": 100}}
        },
        "players": {"symmetric": {"source": "s", "sink": "t"}}
    }"#;

    pub(crate) fn example_one() -> GameInstance {
        parse_game(EXAMPLE_ONE).unwrap()
    }

    /// Split recommendations for the two-link game: everyone routes on B when
    /// B is cheap, and in the risky state each player is sent to B with
    /// probability one third.
    pub(crate) fn example_one_scheme(game: &GameInstance) -> SignalingScheme {
        let a = game.graph().edge_idx("A").unwrap();
        let b = game.graph().edge_idx("B").unwrap();
        SignalingScheme {
            support: vec![
                vec![(1.0, ActionProfile::new(vec![vec![b], vec![b], vec![b]]))],
                vec![
                    (1.0 / 3.0, ActionProfile::new(vec![vec![a], vec![a], vec![b]])),
                    (1.0 / 3.0, ActionProfile::new(vec![vec![a], vec![b], vec![a]])),
                    (1.0 / 3.0, ActionProfile::new(vec![vec![b], vec![a], vec![a]])),
                ],
            ],
        }
    }

    #[test]
    fn parses_example_one() {
        let game = example_one();
        assert_eq!(game.num_players(), 3);
        assert_eq!(game.states(), ["theta0", "theta1"]);
        assert_eq!(game.graph().edge_count(), 2);
        assert!(game.is_symmetric());
        let b = game.graph().edge_idx("B").unwrap();
        assert_eq!(game.cost(b, 1).beta, 100.0);
    }

    #[test]
    fn game_roundtrip_is_stable() {
        let game = example_one();
        let text = serialize_game(&game);
        let reparsed = parse_game(&text).unwrap();
        assert_eq!(game, reparsed);
        assert_eq!(text, serialize_game(&reparsed));
    }

    #[test]
    fn bad_prior_reports_sum() {
        let text = EXAMPLE_ONE.replace("\"theta0\": 0.5,", "\"theta0\": 0.6,");
        let err = parse_game(&text).unwrap_err();
        assert!(err.to_string().contains("prior"));
        assert!(err.to_string().contains("1.1"));
    }

    #[test]
    fn missing_cost_entry_is_reported_with_path() {
        let text = EXAMPLE_ONE.replace(
            "\"theta0\": {\"alpha\": 1, \"beta\": 0}, ",
            "",
        );
        let err = parse_game(&text).unwrap_err();
        assert_eq!(err.to_string(), "costs.B.theta0: missing");
    }

    #[test]
    fn negative_coefficient_is_rejected() {
        let text = EXAMPLE_ONE.replace("{\"alpha\": 1, \"beta\": 0}", "{\"alpha\": -1, \"beta\": 0}");
        let err = parse_game(&text).unwrap_err();
        assert!(err.to_string().contains("costs.B.theta0"));
        assert!(err.to_string().contains("nonnegative"));
    }

    #[test]
    fn unreachable_sink_is_rejected() {
        let text = r#"{
            "n": 1,
            "nodes": ["s", "t"],
            "edges": [{"id": "E", "from": "t", "to": "s"}],
            "states": ["th"],
            "prior": {"th": 1.0},
            "costs": {"E": {"th": {"alpha": 1, "beta": 0}}},
            "players": {"symmetric": {"source": "s", "sink": "t"}}
        }"#;
        let err = parse_game(text).unwrap_err();
        assert!(matches!(err, GameError::UnreachableSink { player: 0, .. }));
    }

    #[test]
    fn scheme_roundtrip_and_value() {
        let game = example_one();
        let scheme = example_one_scheme(&game);
        scheme.validate(&game).unwrap();
        assert!((expected_social_cost(&game, &scheme) - 114.5).abs() < 1e-9);

        let text = serialize_scheme(&scheme, &game);
        let reparsed = parse_scheme(&text, &game).unwrap();
        assert_eq!(scheme.support.len(), reparsed.support.len());
        assert!((expected_social_cost(&game, &reparsed) - 114.5).abs() < 1e-9);
        assert_eq!(text, serialize_scheme(&reparsed, &game));
    }

    #[test]
    fn scheme_with_unknown_edge_is_rejected() {
        let game = example_one();
        let text = r#"{"states": {
            "theta0": [{"prob": 1.0, "profile": [["Z"], ["B"], ["B"]]}],
            "theta1": [{"prob": 1.0, "profile": [["B"], ["B"], ["B"]]}]
        }}"#;
        assert!(matches!(
            parse_scheme(text, &game),
            Err(GameError::UnknownEdge(_))
        ));
    }

    #[test]
    fn scheme_with_bad_probabilities_is_rejected() {
        let game = example_one();
        let text = r#"{"states": {
            "theta0": [{"prob": 0.7, "profile": [["B"], ["B"], ["B"]]}],
            "theta1": [{"prob": 1.0, "profile": [["B"], ["B"], ["B"]]}]
        }}"#;
        let err = parse_scheme(text, &game).unwrap_err();
        assert!(err.to_string().contains("sum to 0.7"));
    }

    #[test]
    fn serialize_scheme_drops_dust_support() {
        let game = example_one();
        let b = game.graph().edge_idx("B").unwrap();
        let a = game.graph().edge_idx("A").unwrap();
        let all_b = ActionProfile::new(vec![vec![b]; 3]);
        let all_a = ActionProfile::new(vec![vec![a]; 3]);
        let scheme = SignalingScheme {
            support: vec![
                vec![(1.0 - 1e-13, all_b.clone()), (1e-13, all_a)],
                vec![(1.0, all_b)],
            ],
        };
        let text = serialize_scheme(&scheme, &game);
        let reparsed = parse_scheme(&text, &game).unwrap();
        assert_eq!(reparsed.support[0].len(), 1);
        assert_eq!(reparsed.support[0][0].0, 1.0);
    }
}
