//! Auxiliary games behind the clique and star bounds: the rectangle box game
//! and the two greedy deletion processes, each with an exhaustive adversary.

mod boxgame;
mod deletion;

pub use boxgame::{
    boxgame_playout, boxmaker_condition, BoxBreakerPolicy, BoxGame, BoxOutcome, Rectangle, CONDITION_REL_TOL,
};
pub use deletion::{
    deletion_bound, deletion_brute_max, deletion_for_each_trace, deletion_tight_start, paired_brute_max,
    paired_linear_bound, paired_sharp_bound, DeletionProcess, DeletionTrace, PairedProcess, DELETION_MAX_K,
    PAIRED_MAX_K, PAIR_LIMIT,
};
