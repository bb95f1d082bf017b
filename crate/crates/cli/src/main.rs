//! Command-line front end: solve, brute-force, verify, gadget generation,
//! and random-instance generation, all over JSON files.
//!
//! Exit codes are a stable automation surface: 0 ok, 1 verification failure,
//! 2 unsupported input, 3 non-convergence, 4 cap exceeded, 5 parse or input
//! error, 10 internal fault.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use bncg::{
    brute_force_solve_with, build_scg_capped, cutting_plane_solve_with, gamma, parse_dimacs,
    parse_game, parse_scheme, random_game, scg_to_ncg, serialize_game, serialize_scg,
    serialize_scheme, verify_persuasive, GadgetError, GadgetParams, GameInstance,
    Persuasiveness, RandomGameParams, SignalingScheme, SolveError, SolveOptions, SolveReport,
    DEFAULT_PLAYER_CAP,
};

#[derive(Parser)]
#[command(name = "bncg", version, about = "Signaling schemes for Bayesian network congestion games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a symmetric game by column generation and write the optimal scheme.
    Solve {
        /// Game JSON file.
        game: PathBuf,
        /// Relative optimality tolerance for the duality gap.
        #[arg(long, default_value_t = 1e-7)]
        opt_tol: f64,
        /// Pricing-round budget.
        #[arg(long, default_value_t = 10_000)]
        max_iters: usize,
        /// Persuasiveness tolerance for the returned scheme.
        #[arg(long, default_value_t = 1e-7)]
        eps: f64,
        /// Cap on simple paths enumerated per player.
        #[arg(long)]
        path_cap: Option<usize>,
        /// Cap on profile columns per state.
        #[arg(long)]
        column_cap: Option<usize>,
        /// Write the scheme JSON here in addition to the stdout report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve by full profile enumeration; handles asymmetric games.
    Brute {
        /// Game JSON file.
        game: PathBuf,
        /// Persuasiveness tolerance for the returned scheme.
        #[arg(long, default_value_t = 1e-7)]
        eps: f64,
        /// Cap on simple paths enumerated per player.
        #[arg(long)]
        path_cap: Option<usize>,
        /// Cap on profile columns per state.
        #[arg(long)]
        column_cap: Option<usize>,
        /// Write the scheme JSON here in addition to the stdout report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check whether a scheme is ex ante persuasive for a game.
    Verify {
        /// Game JSON file.
        game: PathBuf,
        /// Scheme JSON file.
        scheme: PathBuf,
        /// Obedience slack tolerance.
        #[arg(long, default_value_t = 1e-7)]
        eps: f64,
    },
    /// Build the hardness gadget for a 3-CNF formula in DIMACS format.
    Gadget {
        /// DIMACS CNF file with exactly three literals per clause.
        cnf: PathBuf,
        /// Scale parameter z; defaults to m^30.
        #[arg(long)]
        z: Option<u64>,
        /// Scale parameter u; defaults to m^12.
        #[arg(long)]
        u: Option<u64>,
        /// Variable-resource slope; defaults to m^-4.
        #[arg(long)]
        eps: Option<f64>,
        /// Emit the singleton congestion game or its network conversion.
        #[arg(long, value_enum, default_value_t = GadgetFormat::Ncg)]
        format: GadgetFormat,
        /// Refuse gadgets with more players than this.
        #[arg(long, default_value_t = DEFAULT_PLAYER_CAP)]
        player_cap: usize,
        /// Write the bare instance JSON here in addition to the stdout report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a random symmetric game on a layered DAG.
    Random {
        /// Node count including source and sink.
        #[arg(long, default_value_t = 4)]
        nodes: usize,
        /// Forward edges beyond the connecting chain.
        #[arg(long, default_value_t = 2)]
        extra_edges: usize,
        #[arg(long, default_value_t = 2)]
        states: usize,
        #[arg(long, default_value_t = 2)]
        players: u32,
        /// Generator seed; identical seeds give byte-identical output.
        #[arg(long)]
        seed: u64,
        /// Write the game JSON here in addition to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GadgetFormat {
    Scg,
    Ncg,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<SolveError> for Failure {
    fn from(err: SolveError) -> Failure {
        let code = match &err {
            SolveError::NotSymmetric => 2,
            SolveError::NonConvergence { .. } => 3,
            SolveError::CapExceeded { .. } => 4,
            SolveError::Game(_) => 5,
            SolveError::Separation(_) | SolveError::Lp(_) | SolveError::Internal(_) => 10,
        };
        let message = match &err {
            SolveError::NotSymmetric => format!(
                "{err}; the asymmetric problem is NP-hard in general, try `bncg brute` on small instances"
            ),
            _ => err.to_string(),
        };
        Failure::new(code, message)
    }
}

impl From<GadgetError> for Failure {
    fn from(err: GadgetError) -> Failure {
        let code = match &err {
            GadgetError::PlayerCap { .. } => 4,
            GadgetError::Game(_) => 10,
            _ => 5,
        };
        Failure::new(code, err.to_string())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("BNCG_LOG", "off"))
        .format_timestamp(None)
        .init();
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Solve {
            game,
            opt_tol,
            max_iters,
            eps,
            path_cap,
            column_cap,
            out,
        } => {
            check_positive(opt_tol, "--opt-tol")?;
            check_positive(eps, "--eps")?;
            let instance = load_game(&game)?;
            let mut options = SolveOptions {
                opt_tol,
                max_iters,
                verify_eps: eps,
                ..SolveOptions::default()
            };
            apply_caps(&mut options, path_cap, column_cap);
            log::info!("solving {} by column generation", game.display());
            let report = cutting_plane_solve_with(&instance, &options)?;
            emit_report("solve", &instance, &report, eps, out.as_deref())
        }
        Command::Brute {
            game,
            eps,
            path_cap,
            column_cap,
            out,
        } => {
            check_positive(eps, "--eps")?;
            let instance = load_game(&game)?;
            let mut options = SolveOptions {
                verify_eps: eps,
                ..SolveOptions::default()
            };
            apply_caps(&mut options, path_cap, column_cap);
            log::info!("solving {} by enumeration", game.display());
            let report = brute_force_solve_with(&instance, &options)?;
            emit_report("brute", &instance, &report, eps, out.as_deref())
        }
        Command::Verify { game, scheme, eps } => {
            check_positive(eps, "--eps")?;
            let instance = load_game(&game)?;
            let text = read_input(&scheme)?;
            let scheme = parse_scheme(&text, &instance)
                .map_err(|e| Failure::new(5, format!("{}: {e}", scheme.display())))?;
            match verify_persuasive(&instance, &scheme, eps)
                .map_err(|e| Failure::new(5, e.to_string()))?
            {
                Persuasiveness::Persuasive { margins } => {
                    let min = margins.iter().copied().fold(f64::INFINITY, f64::min);
                    print_json(&json!({
                        "persuasive": true,
                        "margins": margins,
                        "min_margin": min,
                    }));
                    Ok(())
                }
                Persuasiveness::NotPersuasive {
                    player,
                    deviation,
                    gain,
                } => {
                    let graph = instance.graph();
                    let path: Vec<String> = deviation
                        .iter()
                        .map(|&e| graph.edges()[e].id.clone())
                        .collect();
                    print_json(&json!({
                        "persuasive": false,
                        "player": player,
                        "deviation": path,
                        "gain": gain,
                    }));
                    Err(Failure::new(
                        1,
                        format!("player {player} gains {gain:.6} by deviating"),
                    ))
                }
            }
        }
        Command::Gadget {
            cnf,
            z,
            u,
            eps,
            format,
            player_cap,
            out,
        } => {
            let text = read_input(&cnf)?;
            let formula =
                parse_dimacs(&text).map_err(|e| Failure::new(5, format!("{}: {e}", cnf.display())))?;
            let mut params = GadgetParams::reduction_defaults(&formula)?;
            if let Some(z) = z {
                params.z = z as u128;
            }
            if let Some(u) = u {
                params.u = u as u128;
            }
            if let Some(eps) = eps {
                params.eps = eps;
            }
            let scg = build_scg_capped(&formula, &params, player_cap)?;
            let metadata = json!({
                "m": formula.num_clauses(),
                "s": formula.num_vars(),
                "z": params.z as u64,
                "u": params.u as u64,
                "eps": params.eps,
                "gamma": gamma(&formula, &params),
                "players": scg.players().len(),
                "resources": scg.resources().len(),
            });
            let (key, artifact) = match format {
                GadgetFormat::Scg => ("scg", serialize_scg(&scg)),
                GadgetFormat::Ncg => {
                    let game = scg_to_ncg(&scg)?;
                    ("game", serialize_game(&game))
                }
            };
            let value: Value = serde_json::from_str(&artifact)
                .map_err(|e| Failure::new(10, format!("internal: emitted bad JSON: {e}")))?;
            print_json(&json!({ "metadata": metadata, key: value }));
            write_artifact(out.as_deref(), &artifact)
        }
        Command::Random {
            nodes,
            extra_edges,
            states,
            players,
            seed,
            out,
        } => {
            let params = RandomGameParams {
                nodes,
                extra_edges,
                states,
                players,
            };
            let game = random_game(&params, seed).map_err(|e| Failure::new(5, e.to_string()))?;
            let text = serialize_game(&game);
            println!("{text}");
            write_artifact(out.as_deref(), &text)
        }
    }
}

fn check_positive(value: f64, flag: &str) -> Result<(), Failure> {
    if !(value > 0.0 && value.is_finite()) {
        return Err(Failure::new(5, format!("{flag} must be a positive number")));
    }
    Ok(())
}

fn apply_caps(options: &mut SolveOptions, path_cap: Option<usize>, column_cap: Option<usize>) {
    if let Some(cap) = path_cap {
        options.path_cap = cap;
    }
    if let Some(cap) = column_cap {
        options.column_cap = cap;
    }
}

fn load_game(path: &Path) -> Result<GameInstance, Failure> {
    let text = read_input(path)?;
    parse_game(&text).map_err(|e| Failure::new(5, format!("{}: {e}", path.display())))
}

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(5, format!("{}: {e}", path.display())))
}

fn emit_report(
    command: &str,
    instance: &GameInstance,
    report: &SolveReport,
    eps: f64,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let margins = margins_of(instance, &report.scheme, eps)?;
    let scheme_text = serialize_scheme(&report.scheme, instance);
    let scheme: Value = serde_json::from_str(&scheme_text)
        .map_err(|e| Failure::new(10, format!("internal: emitted bad JSON: {e}")))?;
    print_json(&json!({
        "command": command,
        "value": report.value,
        "iterations": report.iterations,
        "duality_gap": report.duality_gap,
        "margins": margins,
        "scheme": scheme,
    }));
    write_artifact(out, &scheme_text)
}

/// Obedience slacks of a scheme the solvers have already certified.
fn margins_of(
    instance: &GameInstance,
    scheme: &SignalingScheme,
    eps: f64,
) -> Result<Vec<f64>, Failure> {
    match verify_persuasive(instance, scheme, eps)
        .map_err(|e| Failure::new(10, format!("internal: {e}")))?
    {
        Persuasiveness::Persuasive { margins } => Ok(margins),
        Persuasiveness::NotPersuasive { player, gain, .. } => Err(Failure::new(
            10,
            format!("internal: solver returned a non-persuasive scheme: player {player} gains {gain:.3e}"),
        )),
    }
}

fn print_json(value: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report serialization cannot fail")
    );
}

fn write_artifact(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    if let Some(path) = out {
        fs::write(path, text).map_err(|e| Failure::new(10, format!("{}: {e}", path.display())))?;
    }
    Ok(())
}
