//! Sequential bidding games: one item per round, best first, with an
//! exact two-player solver and strategies for the n-player game.

mod adversary;
mod game;
mod grid;
mod solver;
mod step;
mod strategies;

pub use adversary::{exhaustive_adversary, exhaustive_adversary_value, AdversaryReport, DEFAULT_ADVERSARY_CAP};
pub use game::{best_remaining, run_game, AgentView, GameOutcome, GameState, Opponents, RoundRecord, Strategy, TieBreak};
pub use grid::{common_denominator, first_bid_value, grid_value, monotone_grid_value, to_units, TailCertificate};
pub use solver::{solve_two_player, solve_with_cap, ThresholdVector, TwoPlayerSolution, DEFAULT_SOLVER_CAP};
pub use step::StepFunction;
pub use strategies::{
    coarsen, k2_table, strategy_by_name, AllIn, Approx, BidYourValue, Optimal, Safe, ZeroBid, STRATEGY_NAMES,
};
