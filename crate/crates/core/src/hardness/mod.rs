//! 3SAT reduction gadgets.
//!
//! A formula maps to a singleton congestion game whose cheap outcomes
//! encode satisfying assignments, and any singleton game maps to a network
//! game of polynomial size. Both constructions are implemented exactly;
//! the headline parameters (z on the order of m^30) are kept as defaults
//! but gated behind a player cap, since materializing them is hopeless and
//! the threshold arguments are not claimed at toy scale. The threshold
//! gamma is reported for whatever parameters are in force.

mod dimacs;
mod scg;

pub use dimacs::{parse_dimacs, CnfFormula, Literal};
pub use scg::{parse_scg, scg_to_ncg, serialize_scg, ScgInstance, ScgPlayer, ScgResource};

use thiserror::Error;

use crate::game::{Cost, GameError};

/// Refuse to materialize gadgets with more players than this by default.
pub const DEFAULT_PLAYER_CAP: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum GadgetError {
    #[error("cannot parse input: {0}")]
    Parse(String),
    #[error("clause {index} has {len} literals, expected exactly 3")]
    ClauseLength { index: usize, len: usize },
    #[error("{clauses} clauses for {variables} variables; pad the formula so clauses >= variables")]
    FewerClausesThanVariables { clauses: usize, variables: usize },
    #[error("invalid singleton game: {0}")]
    Invalid(String),
    #[error("invalid gadget parameters: {0}")]
    BadParams(String),
    #[error(
        "gadget would have {players} players, above the cap of {cap}; scale down z/u or raise the cap"
    )]
    PlayerCap { players: u128, cap: usize },
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Scale parameters of the reduction. `gamma` is derived, not stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GadgetParams {
    pub z: u128,
    pub u: u128,
    pub eps: f64,
}

impl GadgetParams {
    /// Headline parameters z = m^30, u = m^12, eps = 1/m^4 for a formula
    /// with m clauses. Far beyond [`DEFAULT_PLAYER_CAP`] for any m > 1.
    pub fn reduction_defaults(formula: &CnfFormula) -> Result<GadgetParams, GadgetError> {
        let m = formula.num_clauses() as u128;
        let pow = |k: u32| {
            m.checked_pow(k).ok_or_else(|| {
                GadgetError::BadParams(format!("m^{k} overflows for m = {m}; supply overrides"))
            })
        };
        let params = GadgetParams {
            z: pow(30)?,
            u: pow(12)?,
            eps: (formula.num_clauses() as f64).powi(-4),
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), GadgetError> {
        if self.u < 1 || self.z <= self.u {
            return Err(GadgetError::BadParams(format!(
                "need z > u >= 1, got z = {}, u = {}",
                self.z, self.u
            )));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(GadgetError::BadParams(format!(
                "need 0 < eps < 1, got {}",
                self.eps
            )));
        }
        Ok(())
    }
}

/// Number of gadget players: s + 3m + 4us + z.
fn player_count(formula: &CnfFormula, params: &GadgetParams) -> Option<u128> {
    let s = formula.num_vars() as u128;
    let m = formula.num_clauses() as u128;
    let literal_side = params.u.checked_mul(4)?.checked_mul(s)?;
    (s + 3 * m).checked_add(literal_side)?.checked_add(params.z)
}

pub fn build_scg(
    formula: &CnfFormula,
    params: &GadgetParams,
) -> Result<ScgInstance, GadgetError> {
    build_scg_capped(formula, params, DEFAULT_PLAYER_CAP)
}

pub fn build_scg_capped(
    formula: &CnfFormula,
    params: &GadgetParams,
    cap: usize,
) -> Result<ScgInstance, GadgetError> {
    params.validate()?;
    let players =
        player_count(formula, params).unwrap_or(u128::MAX);
    if players > cap as u128 {
        return Err(GadgetError::PlayerCap { players, cap });
    }

    let s = formula.num_vars();
    let z = params.z as f64;
    let u = params.u as f64;
    let eps = params.eps;
    let two_u = (2 * params.u) as usize;

    // Resource order: the shared sink resource first, then the six
    // per-variable resources. Literal resource ids double as lookups for
    // the clause players below.
    let pos = |v: usize| format!("r_v{}", v + 1);
    let neg = |v: usize| format!("r_nv{}", v + 1);
    let mut resources = vec![ScgResource {
        id: "r_t".into(),
        cost: Cost {
            alpha: 1.0,
            beta: 0.0,
        },
    }];
    for v in 0..s {
        let literal = Cost {
            alpha: eps,
            beta: z + 1.0 - eps,
        };
        let guard = Cost {
            alpha: 1.0,
            beta: z + 1.0 - u,
        };
        for (id, cost) in [
            (pos(v), literal),
            (neg(v), literal),
            (format!("{}_1", pos(v)), guard),
            (format!("{}_2", pos(v)), guard),
            (format!("{}_1", neg(v)), guard),
            (format!("{}_2", neg(v)), guard),
        ] {
            resources.push(ScgResource { id, cost });
        }
    }
    let index = |id: &str| -> usize {
        resources
            .iter()
            .position(|r| r.id == id)
            .expect("resource ids are constructed above")
    };

    let mut players = Vec::new();
    for v in 0..s {
        players.push(ScgPlayer {
            id: format!("p_v{}", v + 1),
            actions: vec![index(&pos(v)), index(&neg(v)), 0],
        });
    }
    for (c, clause) in formula.clauses().iter().enumerate() {
        for q in 1..=3 {
            let mut actions = Vec::new();
            for lit in clause {
                let id = if lit.negated { neg(lit.var) } else { pos(lit.var) };
                let r = index(&id);
                if !actions.contains(&r) {
                    actions.push(r);
                }
            }
            players.push(ScgPlayer {
                id: format!("p_c{}_{q}", c + 1),
                actions,
            });
        }
    }
    for v in 0..s {
        for (base, tag) in [(pos(v), "v"), (neg(v), "nv")] {
            for j in 1..=two_u {
                players.push(ScgPlayer {
                    id: format!("p_{tag}{}_{j}", v + 1),
                    actions: vec![
                        index(&base),
                        index(&format!("{base}_1")),
                        index(&format!("{base}_2")),
                    ],
                });
            }
        }
    }
    for i in 1..=params.z as usize {
        players.push(ScgPlayer {
            id: format!("p_t{i}"),
            actions: vec![0],
        });
    }

    ScgInstance::new(resources, players)
}

/// CCE social-cost threshold: z^2 + (4us + s + 3m)(z - u) + 3z/m^9,
/// evaluated in floating point.
pub fn gamma(formula: &CnfFormula, params: &GadgetParams) -> f64 {
    let s = formula.num_vars() as f64;
    let m = formula.num_clauses() as f64;
    let z = params.z as f64;
    let u = params.u as f64;
    z * z + (4.0 * u * s + s + 3.0 * m) * (z - u) + 3.0 * z / m.powi(9)
}
