//! Exhaustive minimax for tiny boards.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::board::{Edge, GameState, Mark, MoveRecord, Player};
use crate::strategy::MakerStrategy;
use crate::win::{breaker_blocks, goal_met, maker_graph};

/// Boards above this order do not fit the 64-bit position key.
pub const SOLVER_MAX_ORDER: usize = 11;
pub const DEFAULT_NODE_BUDGET: u64 = 5_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("solver supports n <= {SOLVER_MAX_ORDER}, got {0}")]
    BoardTooLarge(usize),
    #[error("node budget exceeded after {nodes} nodes")]
    BudgetExceeded { nodes: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BreakerMoves {
    /// Only legal moves no unclaimed edge can be added to.
    Maximal,
    /// Every nonempty legal move.
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverOptions {
    pub budget: u64,
    pub memoize: bool,
    pub breaker_moves: BreakerMoves,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            budget: DEFAULT_NODE_BUDGET,
            memoize: true,
            breaker_moves: BreakerMoves::Maximal,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolveResult {
    pub winner: Player,
    pub principal_variation: Vec<MoveRecord>,
    pub nodes: u64,
}

/// All nonempty legal Breaker moves, each sorted, in lexicographic order.
pub fn breaker_moves(state: &GameState, kind: BreakerMoves) -> Vec<Vec<Edge>> {
    let open = state.unclaimed_edges();
    let bias = state.bias();
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn grow(
        open: &[Edge],
        from: usize,
        current: &mut Vec<Edge>,
        bias: crate::board::BiasSpec,
        out: &mut Vec<Vec<Edge>>,
    ) {
        for i in from..open.len() {
            current.push(open[i]);
            if bias.fits(current) {
                out.push(current.clone());
                grow(open, i + 1, current, bias, out);
            }
            current.pop();
        }
    }
    grow(&open, 0, &mut current, bias, &mut out);
    if kind == BreakerMoves::Maximal {
        out.retain(|mv| {
            open.iter().filter(|e| !mv.contains(e)).all(|&e| {
                let mut bigger = mv.clone();
                bigger.push(e);
                !bias.fits(&bigger)
            })
        });
    }
    out
}

type Key = (u64, u64, bool);

fn key(state: &GameState) -> Key {
    let (mut maker, mut breaker) = (0u64, 0u64);
    for (i, mark) in state.ownership().iter().enumerate() {
        match mark {
            Mark::Maker => maker |= 1 << i,
            Mark::Breaker => breaker |= 1 << i,
            Mark::Unclaimed => {}
        }
    }
    (maker, breaker, state.to_move() == Player::Maker)
}

fn maker_done(state: &GameState) -> bool {
    goal_met(&maker_graph(state), state.win(), state.n()).expect("solver boards are tiny")
}

/// Winner of a position with no further play, if it is terminal.
fn terminal(state: &GameState) -> Option<Player> {
    if maker_done(state) {
        Some(Player::Maker)
    } else if state.is_exhausted() || breaker_blocks(state, state.win()).is_some() {
        Some(Player::Breaker)
    } else {
        None
    }
}

struct Search {
    opts: SolverOptions,
    nodes: u64,
    memo: HashMap<Key, (Player, Vec<Edge>)>,
}

impl Search {
    fn children(&self, state: &GameState) -> Vec<Vec<Edge>> {
        match state.to_move() {
            Player::Maker => state.unclaimed_edges().into_iter().map(|e| vec![e]).collect(),
            Player::Breaker => breaker_moves(state, self.opts.breaker_moves),
        }
    }

    /// Winner under perfect play plus the move realising it.
    fn value(&mut self, state: &GameState) -> Result<(Player, Vec<Edge>), SolveError> {
        if let Some(w) = terminal(state) {
            return Ok((w, Vec::new()));
        }
        let k = key(state);
        if self.opts.memoize {
            if let Some(hit) = self.memo.get(&k) {
                return Ok(hit.clone());
            }
        }
        self.nodes += 1;
        if self.nodes > self.opts.budget {
            return Err(SolveError::BudgetExceeded { nodes: self.nodes });
        }
        let me = state.to_move();
        let mut fallback: Option<Vec<Edge>> = None;
        let mut result = None;
        for mv in self.children(state) {
            let mut next = state.clone();
            next.play(me, &mv).expect("generated moves are legal");
            let (w, _) = self.value(&next)?;
            if w == me {
                result = Some((me, mv));
                break;
            }
            fallback.get_or_insert(mv);
        }
        let result = result.unwrap_or_else(|| (me.opponent(), fallback.expect("a nonterminal position has a move")));
        if self.opts.memoize {
            self.memo.insert(k, result.clone());
        }
        Ok(result)
    }
}

pub fn solve(state: &GameState, opts: SolverOptions) -> Result<SolveResult, SolveError> {
    if state.n() > SOLVER_MAX_ORDER {
        return Err(SolveError::BoardTooLarge(state.n()));
    }
    let mut search = Search {
        opts,
        nodes: 0,
        memo: HashMap::new(),
    };
    let (winner, _) = search.value(state)?;
    let mut pv = Vec::new();
    let mut cur = state.clone();
    while terminal(&cur).is_none() {
        let (_, mv) = search.value(&cur)?;
        let player = cur.to_move();
        cur.play(player, &mv).expect("best moves are legal");
        pv.push(MoveRecord { player, edges: mv });
    }
    Ok(SolveResult {
        winner,
        principal_variation: pv,
        nodes: search.nodes,
    })
}

/// Result of playing a Maker strategy against every Breaker reply.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrategyCheck {
    pub maker_always_wins: bool,
    /// A Breaker line that beats the strategy, when one exists.
    pub refutation: Option<Vec<MoveRecord>>,
    /// Most Maker moves the strategy needed on any line it won.
    pub max_maker_moves: usize,
    /// Turns on which the strategy failed and its fallback was played.
    pub fallbacks: u64,
    pub nodes: u64,
}

/// Plays `maker` from `state` against every Breaker move family member
/// (maximal moves), cloning the strategy at each branch.
pub fn strategy_vs_all_breakers<M: MakerStrategy + Clone>(
    state: &GameState,
    maker: &M,
    opts: SolverOptions,
) -> Result<StrategyCheck, SolveError> {
    if state.n() > SOLVER_MAX_ORDER {
        return Err(SolveError::BoardTooLarge(state.n()));
    }
    let mut check = StrategyCheck {
        maker_always_wins: true,
        refutation: None,
        max_maker_moves: 0,
        fallbacks: 0,
        nodes: 0,
    };
    fn walk<M: MakerStrategy + Clone>(
        state: &GameState,
        maker: &M,
        opts: SolverOptions,
        check: &mut StrategyCheck,
    ) -> Result<bool, SolveError> {
        if let Some(w) = terminal(state) {
            if w == Player::Maker {
                check.max_maker_moves = check.max_maker_moves.max(state.turns_taken(Player::Maker));
            } else if check.refutation.is_none() {
                check.refutation = Some(state.history().to_vec());
            }
            return Ok(w == Player::Maker);
        }
        check.nodes += 1;
        if check.nodes > opts.budget {
            return Err(SolveError::BudgetExceeded { nodes: check.nodes });
        }
        match state.to_move() {
            Player::Maker => {
                let mut me = maker.clone();
                let e = match me.next_edge(state) {
                    Ok(e) if state.is_unclaimed(e) => e,
                    _ => {
                        check.fallbacks += 1;
                        let mut rng = ChaCha8Rng::seed_from_u64(check.nodes);
                        me.fallback_edge(state, &mut rng).expect("board not exhausted")
                    }
                };
                let mut next = state.clone();
                next.play_maker(e).expect("unclaimed edge");
                walk(&next, &me, opts, check)
            }
            Player::Breaker => {
                let mut all = true;
                for mv in breaker_moves(state, opts.breaker_moves) {
                    let mut next = state.clone();
                    next.play_breaker(&mv).expect("generated moves are legal");
                    all &= walk(&next, maker, opts, check)?;
                    if !all {
                        break;
                    }
                }
                Ok(all)
            }
        }
    }
    check.maker_always_wins = walk(state, maker, opts, &mut check)?;
    Ok(check)
}
