//! Acceptance gate: one test per release criterion, each ending in a single
//! printed pass line. Run `cargo test --test acceptance -- --nocapture` to
//! see the lines; any failed criterion panics with context instead.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bncg::{
    brute_force_solve, build_scg, chi, cutting_plane_solve, enumerate_paths,
    expected_social_cost, marginal_cost, parse_dimacs, parse_game, parse_scg, parse_scheme,
    profile_cost, random_game, scg_to_ncg, separate, solve_lp, verify_persuasive,
    ActionProfile, CongestionVector, Constraint, GadgetParams, GameInstance, LinearProgram,
    LpStatus, Persuasiveness, RandomGameParams, Relation, ScgInstance, SeparationResult, Sense,
    SymmetricDualPoint, VarBound,
};

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../testdata")
        .join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn example_one() -> GameInstance {
    parse_game(&fixture("example1.json")).expect("fixture parses")
}

/// Cartesian product of every player's path list.
fn all_profiles(game: &GameInstance) -> Vec<ActionProfile> {
    let menus: Vec<Vec<Vec<usize>>> = (0..game.num_players())
        .map(|p| enumerate_paths(game, p).expect("paths enumerable"))
        .collect();
    let mut out = Vec::new();
    let mut pick = vec![0usize; menus.len()];
    loop {
        out.push(ActionProfile::new(
            pick.iter().zip(&menus).map(|(&k, m)| m[k].clone()).collect(),
        ));
        let mut level = 0;
        loop {
            if level == menus.len() {
                return out;
            }
            pick[level] += 1;
            if pick[level] < menus[level].len() {
                break;
            }
            pick[level] = 0;
            level += 1;
        }
    }
}

/// Example 1 plus at least twenty generated symmetric instances, all small
/// enough for exhaustive cross-checks: n <= 3, at most 6 edges, at most 4
/// paths per player, at most 3 states.
fn small_instances() -> Vec<GameInstance> {
    let mut out = vec![example_one()];
    let mut seed = 0u64;
    while out.len() < 21 {
        let params = RandomGameParams {
            nodes: 2 + (seed % 2) as usize,
            extra_edges: 1 + (seed % 2) as usize,
            states: 1 + (seed % 3) as usize,
            players: 2 + (seed % 2) as u32,
        };
        let game = random_game(&params, seed).expect("generator succeeds");
        seed += 1;
        if game.graph().edge_count() > 6 {
            continue;
        }
        if enumerate_paths(&game, 0).expect("paths enumerable").len() > 4 {
            continue;
        }
        out.push(game);
    }
    out
}

/// Random dual point satisfying the sign and conservation invariants: the
/// edge values are a superposition of nonpositive path flows, so they form
/// a flow of value y_bar with y_sink equal to the inflow at the sink.
fn random_dual(
    game: &GameInstance,
    paths: &[Vec<usize>],
    rng: &mut ChaCha8Rng,
) -> SymmetricDualPoint {
    let graph = game.graph();
    let mut y_edge: BTreeMap<String, f64> = BTreeMap::new();
    let mut y_bar = 0.0;
    for _ in 0..rng.gen_range(1..=2) {
        let path = &paths[rng.gen_range(0..paths.len())];
        let weight = -rng.gen_range(0.0..0.5);
        y_bar += weight;
        for &e in path {
            *y_edge.entry(graph.edges()[e].id.clone()).or_insert(0.0) += weight;
        }
    }
    let y_state = game
        .states()
        .iter()
        .map(|s| (s.clone(), rng.gen_range(-5.0..5.0)))
        .collect();
    SymmetricDualPoint {
        y_bar,
        y_edge,
        y_sink: y_bar,
        y_state,
    }
}

/// Objective of the inner separation problem at one congestion vector,
/// recomputed from the cost coefficients alone.
fn separation_objective(
    game: &GameInstance,
    state: usize,
    q: &CongestionVector,
    y: &SymmetricDualPoint,
) -> f64 {
    let n = game.num_players() as f64;
    let mut total = 0.0;
    for (e, edge) in game.graph().edges().iter().enumerate() {
        let c = game.cost(e, state);
        let load = f64::from(q.load[e]);
        let social = c.alpha * load * load + c.beta * load;
        let kappa =
            load * (c.alpha * load + c.beta) + (n - load) * (c.alpha * (load + 1.0) + c.beta);
        total += (1.0 - y.y_bar) * social - y.edge_value(&edge.id) * kappa;
    }
    total
}

#[test]
fn example_one_regression() {
    let start = Instant::now();
    let game = example_one();
    let scheme = parse_scheme(&fixture("reference_scheme.json"), &game).expect("scheme parses");

    let value = expected_social_cost(&game, &scheme);
    assert!(
        (value - 114.5).abs() <= 1e-9,
        "expected social cost {value}, want 114.5"
    );

    let want_margin = 50.0 - 229.0 / 6.0;
    match verify_persuasive(&game, &scheme, 1e-9).expect("verify runs") {
        Persuasiveness::Persuasive { margins } => {
            assert_eq!(margins.len(), 3);
            for (p, margin) in margins.iter().enumerate() {
                assert!(
                    (margin - want_margin).abs() <= 1e-9,
                    "player {p} margin {margin}, want {want_margin}"
                );
            }
        }
        other => panic!("reference scheme must be persuasive, got {other:?}"),
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 0.1, "took {elapsed:?}");
    println!("acceptance pass: example regression (value 114.5, margin 71/6, {elapsed:?})");
}

#[test]
fn solvers_agree_on_small_instances() {
    let start = Instant::now();
    let games = small_instances();
    for (i, game) in games.iter().enumerate() {
        let exact = brute_force_solve(game).expect("brute solve");
        let fast = cutting_plane_solve(game, 1e-7, 10_000).expect("cutting solve");
        let diff = (exact.value - fast.value).abs();
        assert!(
            diff <= 1e-6 * (1.0 + exact.value.abs()),
            "instance {i}: brute {} vs cutting {}",
            exact.value,
            fast.value
        );
        for (which, report) in [("brute", &exact), ("cutting", &fast)] {
            match verify_persuasive(game, &report.scheme, 1e-7).expect("verify runs") {
                Persuasiveness::Persuasive { .. } => {}
                other => panic!("instance {i}: {which} scheme not persuasive: {other:?}"),
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "acceptance pass: solver equivalence on {} instances ({elapsed:?})",
        games.len()
    );
}

#[test]
fn separation_matches_exhaustive_enumeration() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut pairs = 0usize;
    let mut seed = 1_000u64;
    while pairs < 200 {
        let params = RandomGameParams {
            nodes: 2 + (seed % 2) as usize,
            extra_edges: 1 + (seed % 2) as usize,
            states: 1 + (seed % 3) as usize,
            players: 2 + (seed % 2) as u32,
        };
        let game = random_game(&params, seed).expect("generator succeeds");
        seed += 1;
        let paths = enumerate_paths(&game, 0).expect("paths enumerable");
        if paths.len() > 6 {
            continue;
        }
        let profiles = all_profiles(&game);
        let num_edges = game.graph().edge_count();

        for _ in 0..4 {
            let dual = random_dual(&game, &paths, &mut rng);
            dual.check(&game).expect("constructed dual is valid");

            let mut min_slack = f64::INFINITY;
            for s in 0..game.num_states() {
                let state = &game.states()[s];
                let enumerated = profiles
                    .iter()
                    .map(|p| separation_objective(&game, s, &p.congestion(num_edges), &dual))
                    .fold(f64::INFINITY, f64::min);
                let (oracle, _) = chi(&game, state, &dual).expect("oracle runs");
                assert!(
                    (oracle - enumerated).abs() <= 1e-9,
                    "state {state}: oracle {oracle} vs enumeration {enumerated}"
                );
                min_slack = min_slack.min(game.prior(s) * enumerated - dual.state_value(state));
            }

            match separate(&game, &dual, 1e-9).expect("separation runs") {
                SeparationResult::Feasible => {
                    assert!(min_slack >= -1e-9 - 1e-9, "missed violation {min_slack}");
                }
                SeparationResult::Violated { violation, .. } => {
                    // The oracle reports the magnitude of the worst slack.
                    assert!(
                        (violation + min_slack).abs() <= 1e-9,
                        "violation {violation} vs enumerated minimum {min_slack}"
                    );
                }
            }
            pairs += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!("acceptance pass: separation equivalence on {pairs} dual points ({elapsed:?})");
}

#[test]
fn perfect_information_variant_is_free() {
    let big = 1e6;
    let json = format!(
        r#"{{
          "n": 3,
          "nodes": ["s", "t"],
          "edges": [
            {{"id": "a", "from": "s", "to": "t"}},
            {{"id": "b", "from": "s", "to": "t"}}
          ],
          "states": ["hitA", "hitB"],
          "prior": {{"hitA": 0.5, "hitB": 0.5}},
          "costs": {{
            "a": {{"hitA": {{"alpha": 0.0, "beta": {big}}}, "hitB": {{"alpha": 0.0, "beta": 0.0}}}},
            "b": {{"hitA": {{"alpha": 0.0, "beta": 0.0}}, "hitB": {{"alpha": 0.0, "beta": {big}}}}}
          }},
          "players": {{"symmetric": {{"source": "s", "sink": "t"}}}}
        }}"#
    );
    let game = parse_game(&json).expect("variant parses");

    let report = cutting_plane_solve(&game, 1e-7, 10_000).expect("solves");
    assert!(report.value.abs() <= 1e-6, "value {}", report.value);

    // Without signals the receivers commit to one profile for both states,
    // and every profile pays the penalty edge in at least one state.
    let best_pure = all_profiles(&game)
        .iter()
        .map(|profile| {
            (0..game.num_states())
                .map(|s| {
                    let (_, social) =
                        profile_cost(&game, profile, &game.states()[s]).expect("profile valid");
                    game.prior(s) * social
                })
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min);
    assert!(
        best_pure >= big / 2.0,
        "best uninformed pure profile costs {best_pure}"
    );
    println!(
        "acceptance pass: perfect information (value {:.2e}, pure floor {best_pure:.2e})",
        report.value
    );
}

/// Cheapest scheme that commits to one pure profile per state while staying
/// persuasive; combos are pruned by the first violated obedience row.
fn best_pure_state_scheme(game: &GameInstance) -> f64 {
    let n = game.num_players();
    let paths = enumerate_paths(game, 0).expect("paths enumerable");
    let profiles = all_profiles(game);
    let num_states = game.num_states();
    let num_edges = game.graph().edge_count();

    let mut social = vec![vec![0.0; profiles.len()]; num_states];
    // gain[s][a][p][d]: obedience cost minus the cost of deviating to path d.
    let mut gain = vec![vec![vec![vec![0.0; paths.len()]; n]; profiles.len()]; num_states];
    for s in 0..num_states {
        let state = &game.states()[s];
        for (a, profile) in profiles.iter().enumerate() {
            let (per_player, sc) = profile_cost(game, profile, state).expect("profile valid");
            social[s][a] = sc;
            let q = profile.congestion(num_edges);
            for p in 0..n {
                for (d, path) in paths.iter().enumerate() {
                    let mut deviation = 0.0;
                    for &e in path {
                        let others = q.load[e] - u32::from(profile.paths[p].contains(&e));
                        deviation += game.cost(e, s).at(others + 1);
                    }
                    gain[s][a][p][d] = per_player[p] - deviation;
                }
            }
        }
    }

    let mut combo = vec![0usize; num_states];
    let mut best = f64::INFINITY;
    'combos: loop {
        let persuasive = (0..n).all(|p| {
            (0..paths.len()).all(|d| {
                (0..num_states)
                    .map(|s| game.prior(s) * gain[s][combo[s]][p][d])
                    .sum::<f64>()
                    <= 1e-9
            })
        });
        if persuasive {
            let value = (0..num_states)
                .map(|s| game.prior(s) * social[s][combo[s]])
                .sum();
            best = f64::min(best, value);
        }
        let mut level = 0;
        loop {
            if level == num_states {
                break 'combos;
            }
            combo[level] += 1;
            if combo[level] < profiles.len() {
                break;
            }
            combo[level] = 0;
            level += 1;
        }
    }
    assert!(
        best.is_finite(),
        "a per-state pure equilibrium scheme always exists"
    );
    best
}

#[test]
fn value_sits_between_first_best_and_pure_schemes() {
    let games = small_instances();
    for (i, game) in games.iter().enumerate() {
        let report = cutting_plane_solve(game, 1e-7, 10_000).expect("solves");
        let value = report.value;

        let profiles = all_profiles(game);
        let first_best: f64 = (0..game.num_states())
            .map(|s| {
                let cheapest = profiles
                    .iter()
                    .map(|p| profile_cost(game, p, &game.states()[s]).expect("valid").1)
                    .fold(f64::INFINITY, f64::min);
                game.prior(s) * cheapest
            })
            .sum();
        let pure_scheme = best_pure_state_scheme(game);

        let slack = 1e-6 * (1.0 + value.abs());
        assert!(
            first_best <= value + slack,
            "instance {i}: first best {first_best} above value {value}"
        );
        assert!(
            value <= pure_scheme + slack,
            "instance {i}: value {value} above pure-scheme bound {pure_scheme}"
        );
    }
    println!(
        "acceptance pass: bounds sandwich on {} instances",
        games.len()
    );
}

#[test]
fn marginal_costs_are_nonnegative_monotone_and_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut duals = 0usize;
    let mut seed = 5_000u64;
    while duals < 1_000 {
        let params = RandomGameParams {
            nodes: 2 + (seed % 3) as usize,
            extra_edges: 1 + (seed % 2) as usize,
            states: 1 + (seed % 3) as usize,
            players: 2 + (seed % 3) as u32,
        };
        let game = random_game(&params, seed).expect("generator succeeds");
        seed += 1;
        let paths = enumerate_paths(&game, 0).expect("paths enumerable");
        let n = game.num_players() as u32;
        let nf = f64::from(n);

        for _ in 0..25 {
            let dual = random_dual(&game, &paths, &mut rng);
            dual.check(&game).expect("constructed dual is valid");
            for s in 0..game.num_states() {
                let state = game.states()[s].clone();
                for (e, edge) in game.graph().edges().iter().enumerate() {
                    let c = game.cost(e, s);
                    let y_e = dual.edge_value(&edge.id);
                    // Cumulative edge value of the separation objective.
                    let g = |q: f64| {
                        (1.0 - dual.y_bar) * (c.alpha * q * q + c.beta * q)
                            - y_e * (q * (c.alpha * q + c.beta)
                                + (nf - q) * (c.alpha * (q + 1.0) + c.beta))
                    };
                    let mut previous = f64::NEG_INFINITY;
                    for i in 1..=n {
                        let delta = marginal_cost(&game, &state, &edge.id, i, &dual);
                        assert!(delta >= -1e-12, "negative marginal {delta}");
                        assert!(
                            delta >= previous - 1e-12,
                            "marginals decreased: {previous} then {delta}"
                        );
                        let diff = g(f64::from(i)) - g(f64::from(i - 1));
                        assert!(
                            (delta - diff).abs() <= 1e-10,
                            "closed form {delta} vs difference {diff}"
                        );
                        previous = delta;
                    }
                }
            }
            duals += 1;
        }
    }
    println!("acceptance pass: marginal-cost properties on {duals} dual points");
}

/// Optimal coarse correlated equilibrium of a singleton congestion game,
/// by direct LP over the product profile space.
fn cce_value(scg: &ScgInstance) -> f64 {
    let menus: Vec<&[usize]> = scg.players().iter().map(|p| p.actions.as_slice()).collect();
    let mut profiles: Vec<Vec<usize>> = Vec::new();
    let mut pick = vec![0usize; menus.len()];
    'product: loop {
        profiles.push(pick.iter().zip(&menus).map(|(&k, m)| m[k]).collect());
        let mut level = 0;
        loop {
            if level == menus.len() {
                break 'product;
            }
            pick[level] += 1;
            if pick[level] < menus[level].len() {
                break;
            }
            pick[level] = 0;
            level += 1;
        }
    }

    let costs: Vec<(Vec<f64>, f64)> = profiles.iter().map(|c| scg.profile_cost(c)).collect();
    let objective: Vec<f64> = costs.iter().map(|(_, social)| *social).collect();
    let mut constraints = Vec::new();
    for p in 0..menus.len() {
        for &r in menus[p] {
            let coeffs = profiles
                .iter()
                .zip(&costs)
                .map(|(choices, (per_player, _))| {
                    let others = choices
                        .iter()
                        .enumerate()
                        .filter(|&(q, &rr)| q != p && rr == r)
                        .count() as u32;
                    per_player[p] - scg.resources()[r].cost.at(others + 1)
                })
                .collect();
            constraints.push(Constraint {
                coeffs,
                relation: Relation::Le,
                rhs: 0.0,
            });
        }
    }
    constraints.push(Constraint {
        coeffs: vec![1.0; profiles.len()],
        relation: Relation::Eq,
        rhs: 1.0,
    });
    let lp = LinearProgram {
        sense: Sense::Minimize,
        objective,
        constraints,
        bounds: vec![VarBound::NonNegative; profiles.len()],
    };
    let solution = solve_lp(&lp).expect("cce lp solves");
    assert_eq!(solution.status, LpStatus::Optimal);
    solution.objective
}

#[test]
fn gadget_structure_counts_costs_and_cce_value() {
    let formulas = [
        "p cnf 2 2\n1 -2 2 0\n-1 2 1 0\n",
        "p cnf 2 3\n1 2 -1 0\n-1 -2 1 0\n1 -2 -1 0\n",
        "p cnf 3 3\n1 2 3 0\n-1 -2 3 0\n2 -3 1 0\n",
        "p cnf 3 4\n1 2 -3 0\n-2 3 1 0\n-1 -3 2 0\n3 1 2 0\n",
        "p cnf 4 5\n1 2 3 0\n-1 2 -4 0\n4 -3 2 0\n-2 -4 1 0\n3 4 -1 0\n",
    ];
    let params = GadgetParams {
        z: 10,
        u: 2,
        eps: 0.1,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(77);

    for text in formulas {
        let formula = parse_dimacs(text).expect("formula parses");
        let s = formula.num_vars();
        let m = formula.num_clauses();
        let scg = build_scg(&formula, &params).expect("gadget builds");

        assert_eq!(scg.num_players(), s + 3 * m + 4 * 2 * s + 10, "player count");
        assert_eq!(scg.num_resources(), 1 + 6 * s, "resource count");

        // Coefficients and menus, resource by resource and player by player.
        let resource = |id: &str| {
            scg.resources()
                .iter()
                .find(|r| r.id == id)
                .unwrap_or_else(|| panic!("missing resource {id}"))
        };
        let menu = |id: &str| -> Vec<String> {
            let player = scg
                .players()
                .iter()
                .find(|p| p.id == id)
                .unwrap_or_else(|| panic!("missing player {id}"));
            player
                .actions
                .iter()
                .map(|&r| scg.resources()[r].id.clone())
                .collect()
        };
        let sink = resource("r_t");
        assert_eq!((sink.cost.alpha, sink.cost.beta), (1.0, 0.0));
        for v in 1..=s {
            for id in [format!("r_v{v}"), format!("r_nv{v}")] {
                let lit = resource(&id);
                assert_eq!((lit.cost.alpha, lit.cost.beta), (0.1, 10.0 + 1.0 - 0.1));
                for guard_id in [format!("{id}_1"), format!("{id}_2")] {
                    let guard = resource(&guard_id);
                    assert_eq!((guard.cost.alpha, guard.cost.beta), (1.0, 10.0 + 1.0 - 2.0));
                }
            }
            assert_eq!(
                menu(&format!("p_v{v}")),
                vec![format!("r_v{v}"), format!("r_nv{v}"), "r_t".to_string()]
            );
            for tag in ["v", "nv"] {
                for j in 1..=4 {
                    assert_eq!(
                        menu(&format!("p_{tag}{v}_{j}")),
                        vec![
                            format!("r_{tag}{v}"),
                            format!("r_{tag}{v}_1"),
                            format!("r_{tag}{v}_2"),
                        ]
                    );
                }
            }
        }
        for (c, clause) in formula.clauses().iter().enumerate() {
            let mut expected: Vec<String> = Vec::new();
            for lit in clause {
                let id = if lit.negated {
                    format!("r_nv{}", lit.var + 1)
                } else {
                    format!("r_v{}", lit.var + 1)
                };
                if !expected.contains(&id) {
                    expected.push(id);
                }
            }
            for q in 1..=3 {
                assert_eq!(menu(&format!("p_c{}_{q}", c + 1)), expected);
            }
        }
        for i in 1..=10 {
            assert_eq!(menu(&format!("p_t{i}")), vec!["r_t".to_string()]);
        }

        // The network conversion must reproduce every profile's costs bit
        // for bit: same coefficients, same loads, just routed over paths.
        let game = scg_to_ncg(&scg).expect("conversion succeeds");
        let corridor_of = |path: &Vec<usize>| -> usize {
            let id = &game.graph().edges()[path[1]].id;
            let rid = id.strip_prefix("use_").expect("corridor edge");
            scg.resources()
                .iter()
                .position(|r| r.id == rid)
                .expect("known resource")
        };
        let menus: Vec<Vec<Vec<usize>>> = (0..scg.num_players())
            .map(|p| enumerate_paths(&game, p).expect("paths enumerable"))
            .collect();
        for _ in 0..20 {
            let profile = ActionProfile::new(
                menus
                    .iter()
                    .map(|paths| paths[rng.gen_range(0..paths.len())].clone())
                    .collect(),
            );
            let choices: Vec<usize> = profile.paths.iter().map(corridor_of).collect();
            let (ncg_costs, ncg_social) =
                profile_cost(&game, &profile, "theta0").expect("profile valid");
            let (scg_costs, scg_social) = scg.profile_cost(&choices);
            assert_eq!(ncg_costs, scg_costs, "per-player costs drifted");
            assert_eq!(ncg_social, scg_social, "social cost drifted");
        }
    }

    // On a tiny singleton game the converted network's optimum is exactly
    // the optimal coarse correlated equilibrium value.
    let tiny = parse_scg(
        r#"{
          "resources": [
            {"id": "x", "alpha": 1.0, "beta": 0.0},
            {"id": "y", "alpha": 2.0, "beta": 0.5},
            {"id": "w", "alpha": 0.5, "beta": 1.5}
          ],
          "players": [
            {"id": "a", "actions": ["x", "y"]},
            {"id": "b", "actions": ["y", "w"]},
            {"id": "c", "actions": ["x", "w"]}
          ]
        }"#,
    )
    .expect("tiny scg parses");
    let expected = cce_value(&tiny);
    let report = brute_force_solve(&scg_to_ncg(&tiny).expect("converts")).expect("solves");
    assert!(
        (report.value - expected).abs() <= 1e-9,
        "network optimum {} vs cce lp {expected}",
        report.value
    );
    println!(
        "acceptance pass: gadget structure on 5 formulas, cce cross-check {expected:.6}"
    );
}

fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Minimum objective over basic feasible points: every choice of as many
/// active constraints as variables, solved directly and feasibility-checked.
fn vertex_minimum(lp: &LinearProgram) -> Option<f64> {
    let n = lp.bounds.len();
    let mut pool: Vec<(Vec<f64>, f64)> = lp
        .constraints
        .iter()
        .map(|c| (c.coeffs.clone(), c.rhs))
        .collect();
    for i in 0..n {
        let mut unit = vec![0.0; n];
        unit[i] = 1.0;
        pool.push((unit, 0.0));
    }

    let feasible = |x: &[f64]| -> bool {
        if x.iter().any(|&v| v < -1e-9) {
            return false;
        }
        lp.constraints.iter().all(|c| {
            let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            match c.relation {
                Relation::Le => lhs <= c.rhs + 1e-9,
                Relation::Ge => lhs >= c.rhs - 1e-9,
                Relation::Eq => (lhs - c.rhs).abs() <= 1e-9,
            }
        })
    };

    let mut best: Option<f64> = None;
    for mask in 0u32..1 << pool.len() {
        if mask.count_ones() as usize != n {
            continue;
        }
        let rows: Vec<usize> = (0..pool.len()).filter(|i| mask >> i & 1 == 1).collect();
        let a: Vec<Vec<f64>> = rows.iter().map(|&i| pool[i].0.clone()).collect();
        let b: Vec<f64> = rows.iter().map(|&i| pool[i].1).collect();
        let Some(x) = solve_linear(a, b) else {
            continue;
        };
        if !feasible(&x) {
            continue;
        }
        let objective: f64 = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        best = Some(best.map_or(objective, |cur| f64::min(cur, objective)));
    }
    best
}

#[test]
fn lp_kernel_matches_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for case in 0..100 {
        let n = rng.gen_range(2..=4);
        let rows = rng.gen_range(1..=4);
        // Feasibility is pinned at a random nonnegative point and positive
        // objective coefficients keep the minimum bounded.
        let anchor: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..3.0)).collect();
        let objective: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..2.0)).collect();
        let constraints: Vec<Constraint> = (0..rows)
            .map(|_| {
                let coeffs: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let at_anchor: f64 = coeffs.iter().zip(&anchor).map(|(a, v)| a * v).sum();
                let (relation, rhs) = match rng.gen_range(0..3) {
                    0 => (Relation::Le, at_anchor + rng.gen_range(0.0..2.0)),
                    1 => (Relation::Ge, at_anchor - rng.gen_range(0.0..2.0)),
                    _ => (Relation::Eq, at_anchor),
                };
                Constraint {
                    coeffs,
                    relation,
                    rhs,
                }
            })
            .collect();
        let lp = LinearProgram {
            sense: Sense::Minimize,
            objective,
            constraints,
            bounds: vec![VarBound::NonNegative; n],
        };

        let solution = solve_lp(&lp).expect("kernel runs");
        assert_eq!(solution.status, LpStatus::Optimal, "case {case}");
        let oracle = vertex_minimum(&lp).expect("bounded feasible lp has a vertex optimum");
        assert!(
            (solution.objective - oracle).abs() <= 1e-8,
            "case {case}: simplex {} vs vertices {oracle}",
            solution.objective
        );

        let dual_value: f64 = solution
            .duals
            .iter()
            .zip(&lp.constraints)
            .map(|(y, c)| y * c.rhs)
            .sum();
        assert!(
            (solution.objective - dual_value).abs() <= 1e-7,
            "case {case}: strong duality residual {}",
            (solution.objective - dual_value).abs()
        );
    }
    println!("acceptance pass: lp kernel on 100 random programs");
}
