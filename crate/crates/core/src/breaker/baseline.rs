//! Baseline Breakers used to stress Maker strategies.

use std::cmp::Reverse;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::board::{BiasFamily, Edge, GameState};
use crate::strategy::{clique_edges, random_maximal_move, BreakerStrategy, StrategyFailure};
use crate::win::{maker_graph, WinCondition};

#[derive(Clone, Debug)]
pub struct RandomBreaker {
    rng: ChaCha8Rng,
}

impl RandomBreaker {
    pub fn new(seed: u64) -> RandomBreaker {
        RandomBreaker {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl BreakerStrategy for RandomBreaker {
    fn id(&self) -> &'static str {
        "breaker.baseline.random"
    }

    fn next_edges(&mut self, state: &GameState) -> Result<Vec<Edge>, StrategyFailure> {
        Ok(random_maximal_move(state, &mut self.rng))
    }
}

/// Greedy blocker: scores every unclaimed edge by the Maker threat it kills
/// and packs the best-scoring legal structure for the bias family.
#[derive(Clone, Debug)]
pub struct GreedyBreaker {
    rng: ChaCha8Rng,
}

impl GreedyBreaker {
    pub fn new(seed: u64) -> GreedyBreaker {
        GreedyBreaker {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn scores(state: &GameState) -> Vec<(Edge, i64)> {
        let mut label = vec![0; state.n()];
        for (i, comp) in maker_graph(state).connected_components().iter().enumerate() {
            for &v in comp {
                label[v] = i;
            }
        }
        state
            .unclaimed_edges()
            .into_iter()
            .map(|e| {
                let (u, v) = (e.u(), e.v());
                let threat = state.maker_adj(u) & state.maker_adj(v) != 0;
                let mut score = 1000 * threat as i64;
                match state.win() {
                    WinCondition::Triangle => {
                        score += 5 * ((state.maker_degree(u) > 0) as i64 + (state.maker_degree(v) > 0) as i64);
                    }
                    _ => {
                        score += 10 * (label[u] != label[v]) as i64;
                        score += (state.maker_degree(u) == 0) as i64 + (state.maker_degree(v) == 0) as i64;
                    }
                }
                (e, score)
            })
            .collect()
    }
}

impl BreakerStrategy for GreedyBreaker {
    fn id(&self) -> &'static str {
        "breaker.baseline.greedy"
    }

    fn next_edges(&mut self, state: &GameState) -> Result<Vec<Edge>, StrategyFailure> {
        let mut ranked = Self::scores(state);
        if ranked.is_empty() {
            return Ok(Vec::new());
        }
        ranked.shuffle(&mut self.rng);
        ranked.sort_by_key(|&(_, s)| Reverse(s));
        let bias = state.bias();
        let mut out: Vec<Edge> = match bias.family {
            BiasFamily::Free => ranked.iter().take(bias.size).map(|&(e, _)| e).collect(),
            BiasFamily::Matching => {
                let mut used = 0u128;
                let mut picked = Vec::new();
                for &(e, _) in &ranked {
                    let mask = 1u128 << e.u() | 1u128 << e.v();
                    if picked.len() < bias.size && used & mask == 0 {
                        used |= mask;
                        picked.push(e);
                    }
                }
                picked
            }
            BiasFamily::Star => {
                let mut centers: Vec<usize> = Vec::new();
                for &(e, _) in &ranked {
                    for c in [e.u(), e.v()] {
                        if !centers.contains(&c) {
                            centers.push(c);
                        }
                    }
                }
                let value = |c: usize| -> (i64, Vec<Edge>) {
                    let best: Vec<(Edge, i64)> = ranked
                        .iter()
                        .filter(|(e, _)| e.touches(c))
                        .take(bias.size)
                        .copied()
                        .collect();
                    (
                        best.iter().map(|&(_, s)| s).sum(),
                        best.into_iter().map(|(e, _)| e).collect(),
                    )
                };
                let mut top: Option<(i64, Vec<Edge>)> = None;
                for c in centers {
                    let candidate = value(c);
                    if top.as_ref().is_none_or(|t| candidate.0 > t.0) {
                        top = Some(candidate);
                    }
                }
                top.map(|t| t.1).unwrap_or_default()
            }
            BiasFamily::Clique => {
                let (seed, _) = ranked[0];
                let mut chosen: u128 = 1 << seed.u() | 1 << seed.v();
                let score_of = |e: Edge| ranked.iter().find(|(f, _)| *f == e).map_or(0, |&(_, s)| s);
                while (chosen.count_ones() as usize) < bias.size {
                    let gain = |x: usize| -> Option<i64> {
                        let open = state.unclaimed_adj(x) & chosen;
                        (open != 0).then(|| crate::board::bits(open).map(|y| score_of(Edge::new(x, y))).sum::<i64>())
                    };
                    let next = ranked
                        .iter()
                        .flat_map(|&(e, _)| [e.u(), e.v()])
                        .filter(|&x| chosen >> x & 1 == 0)
                        .filter_map(|x| gain(x).map(|g| (g, x)))
                        .max_by_key(|&(g, _)| g);
                    match next {
                        Some((_, x)) => chosen |= 1 << x,
                        None => break,
                    }
                }
                clique_edges(state, chosen)
            }
        };
        out.sort();
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::{BiasSpec, Player};

    #[test]
    fn greedy_kills_the_threat_under_star_bias() {
        let mut s = GameState::new(8, BiasSpec::star(2), WinCondition::Triangle, Player::Maker).unwrap();
        s.play_maker(Edge::new(0, 1)).unwrap();
        s.play_breaker(&[Edge::new(5, 6), Edge::new(5, 7)]).unwrap();
        s.play_maker(Edge::new(0, 2)).unwrap();
        for seed in 0..10 {
            let mv = GreedyBreaker::new(seed).next_edges(&s).unwrap();
            assert!(mv.contains(&Edge::new(1, 2)), "{mv:?}");
            assert!(s.legal_breaker_move(&mv));
        }
    }

    #[test]
    fn greedy_moves_are_legal_for_every_family() {
        for bias in [
            BiasSpec::clique(4),
            BiasSpec::matching(3),
            BiasSpec::star(3),
            BiasSpec::free(3),
        ] {
            for win in [WinCondition::Triangle, WinCondition::Connectivity] {
                let mut s = GameState::new(9, bias, win, Player::Breaker).unwrap();
                let mut br = GreedyBreaker::new(1);
                let mut rng = ChaCha8Rng::seed_from_u64(2);
                while !s.is_exhausted() {
                    let mv = br.next_edges(&s).unwrap();
                    assert!(!mv.is_empty());
                    s.play_breaker(&mv).unwrap();
                    match crate::strategy::random_edge(&s, &mut rng) {
                        Some(e) => s.play_maker(e).unwrap(),
                        None => break,
                    }
                }
            }
        }
    }

    #[test]
    fn random_breaker_is_seeded() {
        let s = GameState::new(9, BiasSpec::star(3), WinCondition::Triangle, Player::Breaker).unwrap();
        assert_eq!(
            RandomBreaker::new(5).next_edges(&s).unwrap(),
            RandomBreaker::new(5).next_edges(&s).unwrap()
        );
    }
}
