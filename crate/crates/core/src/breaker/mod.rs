//! Breaker strategies, one per structured bias, plus baseline adversaries.

mod baseline;
mod clique;
mod matching;
mod star;

pub use baseline::{GreedyBreaker, RandomBreaker};
pub use clique::{CliqueConnectivity, CliqueTriangle, GroupPlan};
pub use matching::Factorization;
pub use star::{IsolationPlan, StarConnectivity};

use crate::board::{bits, Edge, GameState};

/// Unclaimed edges of the star at `center` towards `leaves`, lowest first,
/// at most `limit` of them.
pub(crate) fn star_edges(state: &GameState, center: usize, leaves: u128, limit: usize) -> Vec<Edge> {
    bits(state.unclaimed_adj(center) & leaves)
        .take(limit)
        .map(|x| Edge::new(center, x))
        .collect()
}
