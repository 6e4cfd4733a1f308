//! Plays one strategy-vs-strategy game to the end.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::board::{BiasSpec, Edge, GameState, Player};
use crate::error::GameError;
use crate::graph::{find_hamilton_cycle, posa_path, DEFAULT_EXACT_CAP};
use crate::strategy::{random_maximal_move, BreakerStrategy, FailureKind, MakerStrategy, StrategyReport};
use crate::win::{breaker_blocks, maker_graph, maker_wins, BlockWitness, WinCondition};

/// Salt separating the runner's fallback stream from strategy seeds.
pub const FALLBACK_SALT: u64 = 0x5eed_fa11_bac4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchConfig {
    pub n: usize,
    pub bias: BiasSpec,
    pub win: WinCondition,
    pub first: Player,
    pub seed: u64,
    pub exact_cap: usize,
    /// End the game as soon as a Breaker win is certified.
    pub stop_on_block: bool,
}

impl MatchConfig {
    pub fn new(n: usize, bias: BiasSpec, win: WinCondition, first: Player, seed: u64) -> MatchConfig {
        MatchConfig {
            n,
            bias,
            win,
            first,
            seed,
            exact_cap: DEFAULT_EXACT_CAP,
            stop_on_block: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EndReason {
    MakerGoal,
    BreakerBlock,
    Exhausted,
}

/// A turn on which a strategy did not supply its own legal move.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FailureEvent {
    pub player: Player,
    /// Index into the game history of the move that replaced it.
    pub half_move: usize,
    pub kind: FailureKind,
    pub detail: String,
    /// The strategy returned a move the board rejected.
    pub illegal: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GameOutcome {
    pub winner: Player,
    pub reason: EndReason,
    pub maker_moves: usize,
    pub breaker_moves: usize,
    pub failures: Vec<FailureEvent>,
    pub witness: Option<BlockWitness>,
    /// False when a Hamiltonian goal above the exact cap was judged heuristically.
    pub exact_verdict: bool,
    pub maker_report: StrategyReport,
    pub breaker_report: StrategyReport,
    #[serde(skip)]
    pub state: GameState,
}

impl GameOutcome {
    pub fn failures_of(&self, player: Player) -> impl Iterator<Item = &FailureEvent> {
        self.failures.iter().filter(move |f| f.player == player)
    }

    pub fn illegal_moves(&self) -> usize {
        self.failures.iter().filter(|f| f.illegal).count()
    }
}

/// Goal check used by the runner; Hamiltonian goals above the exact cap fall
/// back to rotation-extension, which can only under-report a win.
pub fn goal_reached(state: &GameState, win: WinCondition, exact_cap: usize) -> (bool, bool) {
    match maker_wins(state, win, exact_cap) {
        Ok(done) => (done, true),
        Err(GameError::ExceedsExactCap { .. }) => {
            let g = maker_graph(state);
            let n = g.order();
            let done = match win {
                WinCondition::HamiltonCycle => find_hamilton_cycle(&g).is_some(),
                _ => g.is_connected() && (0..n).any(|s| posa_path(&g, s).len() == n),
            };
            (done, false)
        }
        Err(e) => unreachable!("goal check failed: {e}"),
    }
}

/// Asks `maker` for an edge; a failure or an unavailable edge is recorded and
/// replaced by the strategy's fallback.
pub fn maker_turn(
    state: &GameState,
    maker: &mut dyn MakerStrategy,
    rng: &mut ChaCha8Rng,
) -> (Edge, Option<FailureEvent>) {
    let chosen = match maker.next_edge(state) {
        Ok(e) if e.v() < state.n() && state.is_unclaimed(e) => return (e, None),
        Ok(e) => (FailureKind::Forfeit, format!("returned unavailable edge {e}"), true),
        Err(f) => (f.kind, f.detail, false),
    };
    let (kind, detail, illegal) = chosen;
    let edge = maker
        .fallback_edge(state, rng)
        .filter(|e| state.is_unclaimed(*e))
        .unwrap_or_else(|| state.unclaimed_edges()[0]);
    let event = FailureEvent {
        player: Player::Maker,
        half_move: state.history().len(),
        kind,
        detail,
        illegal,
    };
    (edge, Some(event))
}

/// Asks `breaker` for a move; a failure or an illegal set is recorded and
/// replaced by a random maximal move.
pub fn breaker_turn(
    state: &GameState,
    breaker: &mut dyn BreakerStrategy,
    rng: &mut ChaCha8Rng,
) -> (Vec<Edge>, Option<FailureEvent>) {
    let (kind, detail, illegal) = match breaker.next_edges(state) {
        Ok(mv) => match state.check_breaker_move(&mv) {
            Ok(_) => return (mv, None),
            Err(e) => (FailureKind::Forfeit, format!("illegal move: {e}"), true),
        },
        Err(f) => (f.kind, f.detail, false),
    };
    let event = FailureEvent {
        player: Player::Breaker,
        half_move: state.history().len(),
        kind,
        detail,
        illegal,
    };
    (random_maximal_move(state, rng), Some(event))
}

/// How the game stands after the move just played, if it is over.
/// The flag is false when a Hamiltonian goal was judged heuristically.
pub fn verdict(
    state: &GameState,
    exact_cap: usize,
    stop_on_block: bool,
) -> (Option<(EndReason, Player, Option<BlockWitness>)>, bool) {
    let (done, exact) = goal_reached(state, state.win(), exact_cap);
    if done {
        return (Some((EndReason::MakerGoal, Player::Maker, None)), exact);
    }
    if state.is_exhausted() {
        return (Some((EndReason::Exhausted, Player::Breaker, None)), exact);
    }
    if stop_on_block {
        if let Some(w) = breaker_blocks(state, state.win()) {
            return (Some((EndReason::BreakerBlock, Player::Breaker, Some(w))), exact);
        }
    }
    (None, exact)
}

pub fn play_game(
    config: &MatchConfig,
    maker: &mut dyn MakerStrategy,
    breaker: &mut dyn BreakerStrategy,
) -> Result<GameOutcome, GameError> {
    let mut state = GameState::new(config.n, config.bias, config.win, config.first)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ FALLBACK_SALT);
    let mut failures = Vec::new();
    let mut exact = true;
    let (reason, winner, witness) = loop {
        if state.is_exhausted() {
            break (EndReason::Exhausted, Player::Breaker, None);
        }
        match state.to_move() {
            Player::Maker => {
                let (edge, failure) = maker_turn(&state, maker, &mut rng);
                failures.extend(failure);
                state.play_maker(edge)?;
                let (done, is_exact) = goal_reached(&state, config.win, config.exact_cap);
                exact &= is_exact;
                if done {
                    break (EndReason::MakerGoal, Player::Maker, None);
                }
            }
            Player::Breaker => {
                let (mv, failure) = breaker_turn(&state, breaker, &mut rng);
                failures.extend(failure);
                state.play_breaker(&mv)?;
                if config.stop_on_block {
                    if let Some(w) = breaker_blocks(&state, config.win) {
                        break (EndReason::BreakerBlock, Player::Breaker, Some(w));
                    }
                }
            }
        }
    };
    Ok(GameOutcome {
        winner,
        reason,
        maker_moves: state.turns_taken(Player::Maker),
        breaker_moves: state.turns_taken(Player::Breaker),
        failures,
        witness,
        exact_verdict: exact,
        maker_report: maker.report(),
        breaker_report: breaker.report(),
        state,
    })
}
