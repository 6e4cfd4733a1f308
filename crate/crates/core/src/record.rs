//! One-line JSON game records.
//!
//! ```text
//! {"version":1,"n":5,"bias":{"family":"star","size":2},"win":"triangle","first":"B","moves":[{"p":"B","e":[[0,1],[0,2]]}]}
//! ```
//!
//! Edge `(u, v)` with `u < v` sits at ownership index
//! `u * (2n - u - 1) / 2 + (v - u - 1)`; records store edges, not indices.

use serde::{Deserialize, Serialize};

use crate::board::{BiasSpec, Edge, GameState, Player};
use crate::error::RecordError;
use crate::win::WinCondition;

pub const RECORD_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct RecordDoc {
    version: u32,
    n: usize,
    bias: BiasSpec,
    win: WinCondition,
    first: String,
    moves: Vec<RecordMove>,
}

#[derive(Serialize, Deserialize)]
struct RecordMove {
    p: String,
    e: Vec<Edge>,
}

fn player(tag: &str) -> Result<Player, RecordError> {
    Player::from_tag(tag).ok_or_else(|| RecordError::Parse(format!("unknown player tag `{tag}`")))
}

pub fn encode_record(state: &GameState) -> String {
    let doc = RecordDoc {
        version: RECORD_VERSION,
        n: state.n(),
        bias: state.bias(),
        win: state.win(),
        first: state.first_mover().tag().to_string(),
        moves: state
            .history()
            .iter()
            .map(|m| RecordMove {
                p: m.player.tag().to_string(),
                e: m.edges.clone(),
            })
            .collect(),
    };
    serde_json::to_string(&doc).expect("records always serialize")
}

/// Parses a record and replays every move, rejecting the first illegal one.
pub fn decode_record(text: &str) -> Result<GameState, RecordError> {
    let doc: RecordDoc = serde_json::from_str(text.trim()).map_err(|e| RecordError::Parse(e.to_string()))?;
    if doc.version != RECORD_VERSION {
        return Err(RecordError::Parse(format!(
            "unsupported record version {}",
            doc.version
        )));
    }
    let first = player(&doc.first)?;
    let mut state = GameState::new(doc.n, doc.bias, doc.win, first).map_err(|e| RecordError::Parse(e.to_string()))?;
    for (index, mv) in doc.moves.iter().enumerate() {
        let who = player(&mv.p)?;
        state
            .play(who, &mv.e)
            .map_err(|source| RecordError::IllegalReplay { index, source })?;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_game_round_trips() {
        let s = GameState::new(5, BiasSpec::star(2), WinCondition::Triangle, Player::Breaker).unwrap();
        let text = encode_record(&s);
        assert_eq!(
            text,
            r#"{"version":1,"n":5,"bias":{"family":"star","size":2},"win":"triangle","first":"B","moves":[]}"#
        );
        assert_eq!(decode_record(&text).unwrap(), s);
    }

    #[test]
    fn shared_vertex_matching_is_rejected_at_its_index() {
        let text = r#"{"version":1,"n":6,"bias":{"family":"matching","size":2},"win":"connectivity","first":"M","moves":[{"p":"M","e":[[0,1]]},{"p":"B","e":[[1,2],[2,3]]}]}"#;
        match decode_record(text) {
            Err(RecordError::IllegalReplay { index: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn truncated_text_is_a_parse_error() {
        let text = r#"{"version":1,"n":6,"bias":{"family":"matching""#;
        assert!(matches!(decode_record(text), Err(RecordError::Parse(_))));
    }
}
