//! Baseline Makers used as adversaries for Breaker strategies.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::board::{Edge, GameState};
use crate::strategy::{random_edge, FailureKind, MakerStrategy, StrategyFailure};
use crate::win::{maker_graph, WinCondition};

#[derive(Clone, Debug)]
pub struct RandomMaker {
    rng: ChaCha8Rng,
}

impl RandomMaker {
    pub fn new(seed: u64) -> RandomMaker {
        RandomMaker {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl MakerStrategy for RandomMaker {
    fn id(&self) -> &'static str {
        "maker.baseline.random"
    }

    fn next_edge(&mut self, state: &GameState) -> Result<Edge, StrategyFailure> {
        random_edge(state, &mut self.rng).ok_or_else(|| StrategyFailure::new(FailureKind::Blocked, "board exhausted"))
    }
}

/// One-ply greedy Maker: closes triangles, joins components and answers
/// Breaker pressure, breaking ties with a seeded shuffle.
#[derive(Clone, Debug)]
pub struct GreedyMaker {
    rng: ChaCha8Rng,
}

impl GreedyMaker {
    pub fn new(seed: u64) -> GreedyMaker {
        GreedyMaker {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn score(state: &GameState, components: &[usize], e: Edge) -> i64 {
        let (u, v) = (e.u(), e.v());
        let d_b = (state.breaker_degree(u) + state.breaker_degree(v)) as i64;
        let d_m = (state.maker_degree(u) + state.maker_degree(v)) as i64;
        match state.win() {
            WinCondition::Triangle => {
                let closes = state.maker_adj(u) & state.maker_adj(v) != 0;
                1_000_000 * closes as i64 + 10 * d_m - d_b
            }
            _ => {
                let joins = components[u] != components[v];
                1_000 * joins as i64 + 10 * d_b - d_m
            }
        }
    }
}

impl MakerStrategy for GreedyMaker {
    fn id(&self) -> &'static str {
        "maker.baseline.greedy"
    }

    fn next_edge(&mut self, state: &GameState) -> Result<Edge, StrategyFailure> {
        let g = maker_graph(state);
        let mut label = vec![0; state.n()];
        for (i, comp) in g.connected_components().iter().enumerate() {
            for &v in comp {
                label[v] = i;
            }
        }
        let mut pool = state.unclaimed_edges();
        pool.shuffle(&mut self.rng);
        pool.into_iter()
            .rev()
            .max_by_key(|&e| Self::score(state, &label, e))
            .ok_or_else(|| StrategyFailure::new(FailureKind::Blocked, "board exhausted"))
    }
}
