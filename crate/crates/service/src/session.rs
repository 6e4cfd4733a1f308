//! Sessions without the HTTP layer: creation, human moves and engine replies.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use structbias_core::board::{BiasFamily, BiasSpec, Edge, GameState, MoveRecord, Player};
use structbias_core::error::GameError;
use structbias_core::graph::DEFAULT_EXACT_CAP;
use structbias_core::registry::{self, StrategyOptions};
use structbias_core::runner::{breaker_turn, maker_turn, verdict, EndReason, FailureEvent, FALLBACK_SALT};
use structbias_core::strategy::{BreakerStrategy, MakerStrategy};
use structbias_core::win::{BlockWitness, WinCondition};

use crate::error::ApiError;

/// Largest board a session may use.
pub const MAX_SESSION_ORDER: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewSession {
    pub n: usize,
    pub bias: BiasSpec,
    pub win: WinCondition,
    pub human: Player,
    pub strategy: String,
    #[serde(default)]
    pub seed: u64,
    /// Defaults to the first mover the engine strategy was built for.
    #[serde(default)]
    pub first: Option<Player>,
    #[serde(default)]
    pub exact_cap: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "state", rename_all = "kebab-case")]
pub enum Status {
    AwaitingHuman,
    AwaitingEngine,
    Finished {
        winner: Player,
        reason: EndReason,
        witness: Option<BlockWitness>,
    },
}

/// The move shape the human must submit, restated for clients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MoveHint {
    pub role: Player,
    /// `single-edge`, or the bias family name for Breaker.
    pub structure: &'static str,
    pub max_edges: usize,
    /// Clique bias: distinct endpoints allowed per move.
    pub max_vertices: Option<usize>,
    pub vertex_disjoint: bool,
    pub common_vertex: bool,
}

impl MoveHint {
    fn for_role(role: Player, bias: BiasSpec) -> MoveHint {
        match role {
            Player::Maker => MoveHint {
                role,
                structure: "single-edge",
                max_edges: 1,
                max_vertices: None,
                vertex_disjoint: false,
                common_vertex: false,
            },
            Player::Breaker => MoveHint {
                role,
                structure: bias.family.name(),
                max_edges: bias.max_edges(),
                max_vertices: (bias.family == BiasFamily::Clique).then_some(bias.size),
                vertex_disjoint: bias.family == BiasFamily::Matching,
                common_vertex: bias.family == BiasFamily::Star,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoardView {
    pub maker: Vec<Edge>,
    pub breaker: Vec<Edge>,
    pub unclaimed: Vec<Edge>,
}

/// Read-only snapshot returned by every endpoint.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SessionView {
    pub id: String,
    pub n: usize,
    pub bias: BiasSpec,
    pub win: WinCondition,
    pub human: Player,
    pub engine: String,
    pub first: Player,
    pub to_move: Player,
    pub status: Status,
    pub board: BoardView,
    pub history: Vec<MoveRecord>,
    pub last_engine_move: Option<Vec<Edge>>,
    /// Turns on which the engine's strategy failed and a fallback was played.
    pub engine_failures: Vec<FailureEvent>,
    pub hint: MoveHint,
}

enum Engine {
    Maker(Box<dyn MakerStrategy>),
    Breaker(Box<dyn BreakerStrategy>),
}

pub struct Session {
    id: String,
    engine_id: String,
    engine: Engine,
    human: Player,
    state: GameState,
    status: Status,
    exact_cap: usize,
    rng: ChaCha8Rng,
    last_engine_move: Option<Vec<Edge>>,
    engine_failures: Vec<FailureEvent>,
}

fn illegal(e: GameError) -> ApiError {
    ApiError::IllegalMove {
        reason: e.reason(),
        message: e.to_string(),
    }
}

impl Session {
    pub fn create(id: String, req: &NewSession) -> Result<Session, ApiError> {
        let info = registry::info(&req.strategy).map_err(|_| ApiError::UnknownStrategy(req.strategy.clone()))?;
        if info.role == req.human {
            return Err(ApiError::Incompatible(format!(
                "`{}` plays {}; the human must take the other side",
                info.id, info.role
            )));
        }
        if req.n > MAX_SESSION_ORDER {
            return Err(ApiError::InvalidRequest(format!(
                "sessions support n <= {MAX_SESSION_ORDER}"
            )));
        }
        info.check(req.bias, req.win)
            .map_err(|e| ApiError::Incompatible(e.to_string()))?;
        let bias =
            BiasSpec::new(req.bias.family, req.bias.size).map_err(|e| ApiError::InvalidRequest(e.to_string()))?;
        let first = req.first.unwrap_or(info.first_mover);
        let state = GameState::new(req.n, bias, req.win, first).map_err(|e| ApiError::InvalidRequest(e.to_string()))?;
        let exact_cap = req.exact_cap.unwrap_or(DEFAULT_EXACT_CAP);
        let opts = StrategyOptions {
            exact_cap,
            ..StrategyOptions::seeded(req.seed)
        };
        let engine = match info.role {
            Player::Maker => Engine::Maker(registry::build_maker(info.id, &opts).expect("role checked")),
            Player::Breaker => Engine::Breaker(registry::build_breaker(info.id, &opts).expect("role checked")),
        };
        let mut session = Session {
            id,
            engine_id: info.id.to_string(),
            engine,
            human: req.human,
            state,
            status: Status::AwaitingEngine,
            exact_cap,
            rng: ChaCha8Rng::seed_from_u64(req.seed ^ FALLBACK_SALT),
            last_engine_move: None,
            engine_failures: Vec::new(),
        };
        session.settle();
        Ok(session)
    }

    pub fn state(&self) -> &GameState {
        &self.state
    }

    pub fn status(&self) -> &Status {
        &self.status
    }

    /// Applies a legal human move, then the engine's reply if the game goes on.
    pub fn submit(&mut self, edges: &[Edge]) -> Result<(), ApiError> {
        if matches!(self.status, Status::Finished { .. }) {
            return Err(ApiError::SessionFinished);
        }
        if self.state.to_move() != self.human {
            return Err(illegal(GameError::WrongTurn {
                expected: self.state.to_move(),
                got: self.human,
            }));
        }
        self.state.play(self.human, edges).map_err(illegal)?;
        self.last_engine_move = None;
        self.settle();
        Ok(())
    }

    /// Runs engine turns until the human is to move or the game is over.
    fn settle(&mut self) {
        loop {
            if self.state.history().last().is_some() {
                let (end, _) = verdict(&self.state, self.exact_cap, true);
                if let Some((reason, winner, witness)) = end {
                    self.status = Status::Finished {
                        winner,
                        reason,
                        witness,
                    };
                    return;
                }
            }
            if self.state.to_move() == self.human {
                self.status = Status::AwaitingHuman;
                return;
            }
            let mv = match &mut self.engine {
                Engine::Maker(m) => {
                    let (e, failure) = maker_turn(&self.state, m.as_mut(), &mut self.rng);
                    self.engine_failures.extend(failure);
                    vec![e]
                }
                Engine::Breaker(b) => {
                    let (mv, failure) = breaker_turn(&self.state, b.as_mut(), &mut self.rng);
                    self.engine_failures.extend(failure);
                    mv
                }
            };
            let player = self.state.to_move();
            self.state
                .play(player, &mv)
                .expect("engine moves are checked before play");
            self.last_engine_move = self.state.history().last().map(|m| m.edges.clone());
        }
    }

    pub fn view(&self) -> SessionView {
        let s = &self.state;
        SessionView {
            id: self.id.clone(),
            n: s.n(),
            bias: s.bias(),
            win: s.win(),
            human: self.human,
            engine: self.engine_id.clone(),
            first: s.first_mover(),
            to_move: s.to_move(),
            status: self.status.clone(),
            board: BoardView {
                maker: s.maker_edges(),
                breaker: s.breaker_edges(),
                unclaimed: s.unclaimed_edges(),
            },
            history: s.history().to_vec(),
            last_engine_move: self.last_engine_move.clone(),
            engine_failures: self.engine_failures.clone(),
            hint: MoveHint::for_role(self.human, s.bias()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request(n: usize, bias: BiasSpec, win: WinCondition, human: Player, strategy: &str) -> NewSession {
        NewSession {
            n,
            bias,
            win,
            human,
            strategy: strategy.into(),
            seed: 1,
            first: None,
            exact_cap: None,
        }
    }

    #[test]
    fn engine_maker_waits_for_breaker_under_star_bias() {
        let req = request(
            10,
            BiasSpec::star(3),
            WinCondition::Triangle,
            Player::Breaker,
            "maker.triangle.star",
        );
        let s = Session::create("a".into(), &req).unwrap();
        assert_eq!(s.status(), &Status::AwaitingHuman);
        assert!(s.state().history().is_empty());
        assert_eq!(s.view().board.unclaimed.len(), 45);
    }

    #[test]
    fn factorization_opens_with_the_first_factor() {
        let req = request(
            8,
            BiasSpec::matching(4),
            WinCondition::Connectivity,
            Player::Maker,
            "breaker.matching.factorization",
        );
        let s = Session::create("b".into(), &req).unwrap();
        let first = &s.state().history()[0];
        assert_eq!(first.player, Player::Breaker);
        assert_eq!(first.edges.len(), 4);
        let factor = &structbias_core::graph::one_factorization(8).unwrap()[0];
        assert_eq!(&first.edges, factor);
        assert_eq!(s.status(), &Status::AwaitingHuman);
    }

    #[test]
    fn wrong_structure_is_rejected_without_changing_the_board() {
        let req = request(
            10,
            BiasSpec::star(3),
            WinCondition::Triangle,
            Player::Breaker,
            "maker.triangle.star",
        );
        let mut s = Session::create("c".into(), &req).unwrap();
        let err = s.submit(&[Edge::new(0, 1), Edge::new(2, 3)]).unwrap_err();
        assert!(matches!(
            err,
            ApiError::IllegalMove {
                reason: "wrong-structure",
                ..
            }
        ));
        assert!(s.state().history().is_empty());
        s.submit(&[Edge::new(0, 1), Edge::new(0, 2)]).unwrap();
        assert!(s.view().last_engine_move.is_some());
        assert_eq!(s.state().history().len(), 2);
    }

    #[test]
    fn human_maker_closing_a_triangle_finishes() {
        let mut req = request(
            6,
            BiasSpec::free(1),
            WinCondition::Triangle,
            Player::Maker,
            "breaker.baseline.random",
        );
        req.first = Some(Player::Maker);
        let mut s = Session::create("d".into(), &req).unwrap();
        // keep closing whatever triangle the board still allows
        while !matches!(s.status(), Status::Finished { .. }) {
            let st = s.state();
            let pick = st
                .unclaimed_edges()
                .into_iter()
                .max_by_key(|e| (st.maker_adj(e.u()) & st.maker_adj(e.v())).count_ones())
                .unwrap();
            s.submit(&[pick]).unwrap();
        }
        let Status::Finished { winner, .. } = s.status() else {
            unreachable!()
        };
        let triangle = structbias_core::win::has_triangle(&structbias_core::win::maker_graph(s.state()));
        assert_eq!(*winner == Player::Maker, triangle);
        assert!(matches!(s.submit(&[]), Err(ApiError::SessionFinished)));
    }

    #[test]
    fn creation_errors() {
        let unknown = request(
            8,
            BiasSpec::star(2),
            WinCondition::Triangle,
            Player::Breaker,
            "maker.none",
        );
        assert!(matches!(
            Session::create("e".into(), &unknown),
            Err(ApiError::UnknownStrategy(_))
        ));
        let same_side = request(
            8,
            BiasSpec::star(2),
            WinCondition::Triangle,
            Player::Maker,
            "maker.triangle.star",
        );
        assert!(matches!(
            Session::create("f".into(), &same_side),
            Err(ApiError::Incompatible(_))
        ));
        let wrong_family = request(
            8,
            BiasSpec::clique(3),
            WinCondition::Triangle,
            Player::Breaker,
            "maker.triangle.star",
        );
        assert!(matches!(
            Session::create("g".into(), &wrong_family),
            Err(ApiError::Incompatible(_))
        ));
    }
}
