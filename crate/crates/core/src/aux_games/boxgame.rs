use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::board::Player;
use crate::error::AuxError;

/// Relative tolerance for the winning-condition comparison.
pub const CONDITION_REL_TOL: f64 = 1e-12;

fn validate(p: usize, q: usize, m: usize) -> Result<(), AuxError> {
    if p == 0 || q == 0 || m < 4 || m % 2 == 1 {
        return Err(AuxError::InvalidParameters(format!(
            "need p, q >= 1 and even m >= 4, got p={p}, q={q}, m={m}"
        )));
    }
    Ok(())
}

/// `(1 - 2/m)^(2p/m) > 2p/(mq) + 1/q`, where the left side must beat the
/// right by more than [`CONDITION_REL_TOL`] relative to the larger side.
pub fn boxmaker_condition(p: usize, q: usize, m: usize) -> Result<bool, AuxError> {
    validate(p, q, m)?;
    let (p, q, m) = (p as f64, q as f64, m as f64);
    let lhs = (1.0 - 2.0 / m).powf(2.0 * p / m);
    let rhs = 2.0 * p / (m * q) + 1.0 / q;
    Ok(lhs - rhs > CONDITION_REL_TOL * lhs.abs().max(rhs.abs()))
}

/// One BoxMaker move: `depth` elements from each listed box.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rectangle {
    pub boxes: Vec<usize>,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoxGame {
    m: usize,
    remaining: Vec<usize>,
    deleted: Vec<bool>,
}

impl BoxGame {
    pub fn new(p: usize, q: usize, m: usize) -> Result<BoxGame, AuxError> {
        validate(p, q, m)?;
        Ok(BoxGame {
            m,
            remaining: vec![p; q],
            deleted: vec![false; q],
        })
    }

    pub fn remaining(&self) -> &[usize] {
        &self.remaining
    }

    pub fn is_deleted(&self, id: usize) -> bool {
        self.deleted[id]
    }

    pub fn live(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.remaining.len()).filter(|&i| !self.deleted[i])
    }

    /// BoxMaker has fully claimed a box that is still in play.
    pub fn maker_won(&self) -> bool {
        self.live().any(|i| self.remaining[i] == 0)
    }

    /// Claims `m/2` elements from each of the `m/2` fullest live boxes
    /// (ties to the lowest id); fewer boxes are used when fewer survive.
    pub fn balancing_move(&mut self) -> Rectangle {
        let half = self.m / 2;
        let mut order: Vec<usize> = self.live().collect();
        order.sort_by_key(|&i| (std::cmp::Reverse(self.remaining[i]), i));
        order.truncate(half);
        for &i in &order {
            self.remaining[i] = self.remaining[i].saturating_sub(half);
        }
        order.sort();
        Rectangle {
            boxes: order,
            depth: half,
        }
    }

    pub fn delete(&mut self, id: usize) -> Result<(), AuxError> {
        if id >= self.deleted.len() || self.deleted[id] {
            return Err(AuxError::InvalidParameters(format!("box {id} cannot be deleted")));
        }
        self.deleted[id] = true;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoxBreakerPolicy {
    /// Minimax over every deletion sequence, within a node budget.
    Exhaustive {
        budget: u64,
    },
    /// Delete the live box with the fewest unclaimed elements.
    Heuristic,
    Random {
        seed: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoxOutcome {
    pub winner: Player,
    /// BoxMaker moves played (exhaustive mode: along BoxBreaker's best line).
    pub rounds: usize,
    pub nodes: u64,
}

/// Plays balancing BoxMaker (moving first) against the given BoxBreaker.
pub fn boxgame_playout(p: usize, q: usize, m: usize, policy: BoxBreakerPolicy) -> Result<BoxOutcome, AuxError> {
    let game = BoxGame::new(p, q, m)?;
    match policy {
        BoxBreakerPolicy::Exhaustive { budget } => {
            let mut search = Exhaustive {
                half: m / 2,
                memo: HashMap::new(),
                nodes: 0,
                budget,
            };
            let (breaker_wins, rounds) = search.solve(vec![p; q])?;
            Ok(BoxOutcome {
                winner: if breaker_wins { Player::Breaker } else { Player::Maker },
                rounds,
                nodes: search.nodes,
            })
        }
        BoxBreakerPolicy::Heuristic => Ok(play_out(game, |g, _| {
            g.live().min_by_key(|&i| (g.remaining[i], i)).expect("a live box")
        })),
        BoxBreakerPolicy::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(play_out(game, move |g, _| {
                let live: Vec<usize> = g.live().collect();
                *live.choose(&mut rng).expect("a live box")
            }))
        }
    }
}

fn play_out(mut game: BoxGame, mut pick: impl FnMut(&BoxGame, usize) -> usize) -> BoxOutcome {
    let mut rounds = 0;
    loop {
        game.balancing_move();
        rounds += 1;
        if game.maker_won() {
            return BoxOutcome {
                winner: Player::Maker,
                rounds,
                nodes: rounds as u64,
            };
        }
        let id = pick(&game, rounds);
        game.delete(id).expect("policy picks a live box");
        if game.live().next().is_none() {
            return BoxOutcome {
                winner: Player::Breaker,
                rounds,
                nodes: rounds as u64,
            };
        }
    }
}

/// Search over multisets of live-box counts; BoxMaker's move depends only on
/// the multiset, so ids can be forgotten.
struct Exhaustive {
    half: usize,
    memo: HashMap<Vec<usize>, (bool, usize)>,
    nodes: u64,
    budget: u64,
}

impl Exhaustive {
    /// Returns (BoxBreaker wins, BoxMaker moves until the end).
    fn solve(&mut self, mut live: Vec<usize>) -> Result<(bool, usize), AuxError> {
        live.sort_unstable_by(|a, b| b.cmp(a));
        if let Some(&hit) = self.memo.get(&live) {
            return Ok(hit);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(AuxError::BudgetExceeded { nodes: self.nodes });
        }
        let key = live.clone();
        for slot in live.iter_mut().take(self.half) {
            *slot = slot.saturating_sub(self.half);
        }
        let result = if live.contains(&0) {
            (false, 1)
        } else if live.len() == 1 {
            (true, 1)
        } else {
            let mut choices = live.clone();
            choices.dedup();
            let mut best: Option<(bool, usize)> = None;
            for value in choices {
                let mut next = live.clone();
                let at = next.iter().position(|&x| x == value).expect("value present");
                next.remove(at);
                let (breaker_wins, rounds) = self.solve(next)?;
                let candidate = (breaker_wins, rounds + 1);
                best = Some(match best {
                    None => candidate,
                    Some(b) if candidate.0 && !b.0 => candidate,
                    Some(b) if candidate.0 == b.0 && candidate.1 > b.1 => candidate,
                    Some(b) => b,
                });
                if candidate.0 {
                    break;
                }
            }
            best.expect("at least two live boxes")
        };
        self.memo.insert(key, result);
        Ok(result)
    }
}
