//! Signaling in Bayesian network congestion games.
//!
//! A principal observes the state of a network whose edge costs are
//! state-dependent and affine in load, and commits to a signaling scheme:
//! per state, a distribution over action profiles recommended to the
//! players. The scheme must be persuasive (no player gains by deviating
//! from a recommendation) and should minimize expected social cost.
//!
//! The crate is organized around that pipeline: [`game`] holds instances,
//! profiles, and schemes; [`lp`] is a small dense simplex kernel;
//! [`separation`] prices violated persuasiveness cuts via min-cost flows;
//! [`solver`] runs the cutting-plane loop and a brute-force reference;
//! [`hardness`] builds the reduction gadgets; [`generator`] samples random
//! instances for calibration.

pub mod game;
pub mod generator;
pub mod hardness;
pub mod lp;
pub mod separation;
pub mod solver;

pub use game::{
    enumerate_paths, expected_social_cost, parse_game, parse_scheme, profile_cost,
    serialize_game, serialize_scheme, ActionProfile, CongestionVector, GameError, GameInstance,
    Graph, SignalingScheme,
};
pub use generator::{random_game, RandomGameParams};
pub use hardness::{
    build_scg, build_scg_capped, gamma, parse_dimacs, parse_scg, scg_to_ncg, serialize_scg,
    CnfFormula, GadgetError, GadgetParams, ScgInstance, DEFAULT_PLAYER_CAP,
};
pub use lp::{
    solve_lp, Constraint, LinearProgram, LpError, LpSolution, LpStatus, Relation, Sense,
    VarBound,
};
pub use separation::{
    chi, flow_decompose, marginal_cost, min_cost_flow, separate, ExpandedGraph,
    SeparationError, SeparationResult, SymmetricDualPoint,
};
pub use solver::{
    best_response_values, brute_force_solve, brute_force_solve_with, cutting_plane_solve,
    cutting_plane_solve_with, symmetrize, verify_persuasive, BestResponseValues, FullDualPoint,
    Persuasiveness, SolveError, SolveOptions, SolveReport,
};
