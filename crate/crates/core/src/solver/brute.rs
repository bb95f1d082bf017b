//! Exact reference solver: enumerate every action profile, solve the full
//! LP in one shot. Exponential in players, usable only at test scale, but
//! it handles asymmetric instances and serves as ground truth for the
//! cutting-plane path.

use crate::game::{ActionProfile, GameInstance};
use crate::lp::{solve_lp, LpStatus};

use super::build::build_problem_one;
use super::verify::{verify_persuasive, Persuasiveness};
use super::{symmetrize, SolveError, SolveOptions, SolveReport};

pub fn brute_force_solve(instance: &GameInstance) -> Result<SolveReport, SolveError> {
    brute_force_solve_with(instance, &SolveOptions::default())
}

pub fn brute_force_solve_with(
    instance: &GameInstance,
    options: &SolveOptions,
) -> Result<SolveReport, SolveError> {
    let n = instance.num_players();
    let per_player: Vec<Vec<Vec<usize>>> = (0..n)
        .map(|p| crate::game::enumerate_paths_with_cap(instance, p, options.path_cap))
        .collect::<Result<_, _>>()?;

    let mut count: usize = 1;
    for paths in &per_player {
        count = count
            .checked_mul(paths.len())
            .filter(|&c| c <= options.column_cap)
            .ok_or(SolveError::CapExceeded {
                what: "profile columns per state".into(),
                cap: options.column_cap,
            })?;
    }

    let mut profiles = Vec::with_capacity(count);
    let mut pick = vec![0usize; n];
    'outer: loop {
        profiles.push(ActionProfile::new(
            pick.iter()
                .enumerate()
                .map(|(p, &k)| per_player[p][k].clone())
                .collect(),
        ));
        let mut pos = n;
        loop {
            if pos == 0 {
                break 'outer;
            }
            pos -= 1;
            pick[pos] += 1;
            if pick[pos] < per_player[pos].len() {
                break;
            }
            pick[pos] = 0;
        }
    }

    log::info!(
        "enumerated {} profiles per state across {} states",
        profiles.len(),
        instance.num_states()
    );
    let columns: Vec<Vec<ActionProfile>> = (0..instance.num_states())
        .map(|_| profiles.clone())
        .collect();
    let built = build_problem_one(instance, &columns);
    let solution = solve_lp(&built.lp)?;
    if solution.status != LpStatus::Optimal {
        // The constant scheme on any single profile is always feasible and
        // costs are bounded below by zero, so anything else is a bug.
        return Err(SolveError::Internal(format!(
            "full profile LP reported {:?}",
            solution.status
        )));
    }

    let scheme = built.scheme(&solution);
    let full = built.full_duals(&solution);
    let dual_value: f64 = full.y_state.iter().sum();
    let duality_gap = (solution.objective - dual_value).abs();
    let dual = instance
        .is_symmetric()
        .then(|| symmetrize(instance, &full));

    match verify_persuasive(instance, &scheme, options.verify_eps)? {
        Persuasiveness::Persuasive { .. } => {}
        Persuasiveness::NotPersuasive { player, gain, .. } => {
            return Err(SolveError::Internal(format!(
                "optimal scheme failed verification: player {player} gains {gain:.3e}"
            )));
        }
    }

    Ok(SolveReport {
        value: solution.objective,
        scheme,
        iterations: 1,
        columns: Vec::new(),
        dual,
        duality_gap,
    })
}
