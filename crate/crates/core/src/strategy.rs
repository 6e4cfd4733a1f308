//! Shared strategy plumbing: the Maker/Breaker traits, failure signals and
//! per-game reports.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::board::{bits, BiasFamily, Edge, GameState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureKind {
    /// The strategy's own rule found no eligible move.
    Forfeit,
    /// No move satisfying the strategy's structural invariant exists.
    Blocked,
    /// Breaker has separated Maker's components.
    Cut,
    /// A staged strategy could not complete a stage.
    StageFailure,
    /// The board or bias is outside the strategy's declared domain.
    Unsupported,
    /// The goal is already reached; nothing to play.
    Finished,
}

impl FailureKind {
    pub fn name(self) -> &'static str {
        match self {
            FailureKind::Forfeit => "forfeit",
            FailureKind::Blocked => "blocked",
            FailureKind::Cut => "cut",
            FailureKind::StageFailure => "stage-failure",
            FailureKind::Unsupported => "unsupported",
            FailureKind::Finished => "finished",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("{}: {detail}", kind.name())]
pub struct StrategyFailure {
    pub kind: FailureKind,
    pub detail: String,
}

impl StrategyFailure {
    pub fn new(kind: FailureKind, detail: impl Into<String>) -> StrategyFailure {
        StrategyFailure {
            kind,
            detail: detail.into(),
        }
    }
}

/// Diagnostics a strategy accumulates over one game.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct StrategyReport {
    /// Internal invariants that failed, with the turn they failed on.
    pub violations: Vec<String>,
    /// Named integer measurements (stage entries, counts, maxima).
    pub metrics: BTreeMap<String, i64>,
}

impl StrategyReport {
    pub fn set(&mut self, key: &str, value: i64) {
        self.metrics.insert(key.to_string(), value);
    }

    pub fn bump(&mut self, key: &str) {
        *self.metrics.entry(key.to_string()).or_insert(0) += 1;
    }

    pub fn raise(&mut self, key: &str, value: i64) {
        let slot = self.metrics.entry(key.to_string()).or_insert(value);
        *slot = (*slot).max(value);
    }

    pub fn metric(&self, key: &str) -> Option<i64> {
        self.metrics.get(key).copied()
    }
}

pub trait MakerStrategy: Send {
    fn id(&self) -> &'static str;

    fn next_edge(&mut self, state: &GameState) -> Result<Edge, StrategyFailure>;

    /// Move played by the runner after a failure; uniform random by default.
    fn fallback_edge(&mut self, state: &GameState, rng: &mut ChaCha8Rng) -> Option<Edge> {
        state.unclaimed_edges().choose(rng).copied()
    }

    fn report(&self) -> StrategyReport {
        StrategyReport::default()
    }
}

pub trait BreakerStrategy: Send {
    fn id(&self) -> &'static str;

    fn next_edges(&mut self, state: &GameState) -> Result<Vec<Edge>, StrategyFailure>;

    fn report(&self) -> StrategyReport {
        StrategyReport::default()
    }
}

impl fmt::Debug for dyn MakerStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MakerStrategy({})", self.id())
    }
}

impl fmt::Debug for dyn BreakerStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BreakerStrategy({})", self.id())
    }
}

/// Lowest unclaimed edge that completes a Maker triangle.
pub fn closing_edge(state: &GameState) -> Option<Edge> {
    state
        .unclaimed_edges()
        .into_iter()
        .find(|e| state.maker_adj(e.u()) & state.maker_adj(e.v()) != 0)
}

/// Every unclaimed edge that completes a Maker triangle, canonical order.
pub fn closing_edges(state: &GameState) -> Vec<Edge> {
    state
        .unclaimed_edges()
        .into_iter()
        .filter(|e| state.maker_adj(e.u()) & state.maker_adj(e.v()) != 0)
        .collect()
}

/// A random legal Breaker move that cannot be extended within the bias.
///
/// Matchings and cliques are grown greedily in random order, so the result
/// is maximal but not uniform over all maximal structures.
pub fn random_maximal_move(state: &GameState, rng: &mut ChaCha8Rng) -> Vec<Edge> {
    let mut pool = state.unclaimed_edges();
    if pool.is_empty() {
        return pool;
    }
    pool.shuffle(rng);
    let bias = state.bias();
    let mut out = match bias.family {
        BiasFamily::Free => {
            pool.truncate(bias.size);
            pool
        }
        BiasFamily::Matching => {
            let mut used: u128 = 0;
            let mut picked = Vec::new();
            for e in pool {
                if picked.len() == bias.size {
                    break;
                }
                let mask = 1u128 << e.u() | 1u128 << e.v();
                if used & mask == 0 {
                    used |= mask;
                    picked.push(e);
                }
            }
            picked
        }
        BiasFamily::Star => {
            let centers: Vec<usize> = (0..state.n()).filter(|&v| state.unclaimed_adj(v) != 0).collect();
            let mut c = *centers.choose(rng).expect("an unclaimed edge exists");
            // a lone edge at c may still grow into a star at its far end
            if state.unclaimed_degree(c) == 1 {
                let far = bits(state.unclaimed_adj(c)).next().expect("degree one");
                if state.unclaimed_degree(far) > 1 {
                    c = far;
                }
            }
            let mut leaves: Vec<usize> = bits(state.unclaimed_adj(c)).collect();
            leaves.shuffle(rng);
            leaves.truncate(bias.size);
            leaves.into_iter().map(|x| Edge::new(c, x)).collect()
        }
        BiasFamily::Clique => {
            // sweep the shuffled pool until no edge fits; disjoint edges count too
            let mut chosen: u128 = 0;
            loop {
                let mut grew = false;
                for e in &pool {
                    let mask = 1u128 << e.u() | 1u128 << e.v();
                    let added = (mask & !chosen).count_ones() as usize;
                    if added > 0 && chosen.count_ones() as usize + added <= bias.size {
                        chosen |= mask;
                        grew = true;
                    }
                }
                if !grew {
                    break;
                }
            }
            clique_edges(state, chosen)
        }
    };
    out.sort();
    out
}

/// Unclaimed edges with both endpoints in `vertices`.
pub fn clique_edges(state: &GameState, vertices: u128) -> Vec<Edge> {
    bits(vertices)
        .flat_map(|u| {
            bits(state.unclaimed_adj(u) & vertices)
                .filter(move |&v| v > u)
                .map(move |v| Edge::new(u, v))
        })
        .collect()
}

/// A uniformly random unclaimed edge.
pub fn random_edge(state: &GameState, rng: &mut ChaCha8Rng) -> Option<Edge> {
    let count = state.unclaimed_count();
    if count == 0 {
        return None;
    }
    let k = rng.gen_range(0..count);
    state.unclaimed_edges().get(k).copied()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::{BiasSpec, Player};
    use crate::win::WinCondition;
    use rand::SeedableRng;

    fn fresh(n: usize, bias: BiasSpec) -> GameState {
        GameState::new(n, bias, WinCondition::Triangle, Player::Breaker).unwrap()
    }

    #[test]
    fn random_maximal_matching_on_k4_is_perfect_and_seeded() {
        let s = fresh(4, BiasSpec::matching(2));
        let perfect = [
            vec![Edge::new(0, 1), Edge::new(2, 3)],
            vec![Edge::new(0, 2), Edge::new(1, 3)],
            vec![Edge::new(0, 3), Edge::new(1, 2)],
        ];
        for seed in 0..20 {
            let a = random_maximal_move(&s, &mut ChaCha8Rng::seed_from_u64(seed));
            let b = random_maximal_move(&s, &mut ChaCha8Rng::seed_from_u64(seed));
            assert_eq!(a, b);
            assert!(perfect.contains(&a), "{a:?}");
        }
    }

    #[test]
    fn random_maximal_moves_are_legal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for bias in [
            BiasSpec::clique(4),
            BiasSpec::matching(3),
            BiasSpec::star(3),
            BiasSpec::free(5),
        ] {
            let mut s = fresh(9, bias);
            while !s.is_exhausted() {
                let mv = random_maximal_move(&s, &mut rng);
                s.play_breaker(&mv).unwrap();
                if let Some(e) = random_edge(&s, &mut rng) {
                    s.play_maker(e).unwrap();
                } else {
                    break;
                }
            }
        }
    }

    #[test]
    fn clique_move_after_heavy_play_stays_legal() {
        let mut s = fresh(6, BiasSpec::clique(4));
        let k4: Vec<Edge> = crate::board::all_edges(4).collect();
        s.play_breaker(&k4).unwrap();
        s.play_maker(Edge::new(4, 5)).unwrap();
        for seed in 0..10 {
            let mv = random_maximal_move(&s, &mut ChaCha8Rng::seed_from_u64(seed));
            assert!(s.legal_breaker_move(&mv));
            // two hub vertices and two of {0..3}, or one hub and three
            assert!(mv.len() >= 3, "{mv:?}");
        }
    }
}
