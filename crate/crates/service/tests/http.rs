use std::collections::HashSet;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tower::ServiceExt;

use structbias_core::board::{BiasFamily, BiasSpec, Edge, GameState, MoveRecord, Player};
use structbias_core::graph::one_factorization;
use structbias_core::registry;
use structbias_core::strategy::random_maximal_move;
use structbias_core::win::WinCondition;
use structbias_service::{router, AppState, NewSession, SessionView, Status};

fn app() -> Router {
    router(Arc::new(AppState::new(None)), None)
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let request = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap()
    };
    (status, value)
}

fn star_request() -> Value {
    json!({
        "n": 10,
        "bias": {"family": "star", "size": 3},
        "win": "triangle",
        "human": "breaker",
        "strategy": "maker.triangle.star",
        "seed": 7
    })
}

async fn create(app: &Router, req: Value) -> Value {
    let (status, body) = call(app, "POST", "/sessions", Some(req)).await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    body
}

fn edges(value: &Value) -> Vec<[usize; 2]> {
    serde_json::from_value(value.clone()).unwrap()
}

#[tokio::test]
async fn star_session_waits_for_the_human_breaker() {
    let app = app();
    let s = create(&app, star_request()).await;
    assert_eq!(s["status"]["state"], "awaiting-human");
    assert_eq!(s["to_move"], "breaker");
    assert_eq!(s["history"].as_array().unwrap().len(), 0);
    assert_eq!(edges(&s["board"]["unclaimed"]).len(), 45);
    assert_eq!(s["hint"]["structure"], "star");
    assert_eq!(s["hint"]["max_edges"], 3);
    assert_eq!(s["hint"]["common_vertex"], true);

    let (status, again) = call(&app, "GET", &format!("/sessions/{}", s["id"].as_str().unwrap()), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(again, s);
}

#[tokio::test]
async fn factorization_engine_opens_with_the_first_factor() {
    let app = app();
    let s = create(
        &app,
        json!({
            "n": 8,
            "bias": {"family": "matching", "size": 4},
            "win": "connectivity",
            "human": "maker",
            "strategy": "breaker.matching.factorization"
        }),
    )
    .await;
    let opening = &s["history"][0];
    assert_eq!(opening["player"], "breaker");
    let factor: Vec<[usize; 2]> = one_factorization(8).unwrap()[0].iter().map(|&e| e.into()).collect();
    assert_eq!(edges(&opening["edges"]), factor);
    assert_eq!(s["status"]["state"], "awaiting-human");
    assert_eq!(s["hint"]["structure"], "single-edge");
}

#[tokio::test]
async fn unknown_ids() {
    let app = app();
    let mut req = star_request();
    req["strategy"] = json!("maker.nonexistent");
    let (status, body) = call(&app, "POST", "/sessions", Some(req)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "unknown-strategy");
    assert!(body["message"].as_str().unwrap().contains("maker.nonexistent"));

    let (status, body) = call(&app, "GET", "/sessions/nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["code"], "unknown-session");
    let (_, body) = call(&app, "POST", "/sessions/nope/moves", Some(json!({"edges": [[0, 1]]}))).await;
    assert_eq!(body["code"], "unknown-session");
}

#[tokio::test]
async fn incompatible_and_malformed_requests() {
    let app = app();
    let mut wrong_family = star_request();
    wrong_family["bias"] = json!({"family": "clique", "size": 3});
    let (_, body) = call(&app, "POST", "/sessions", Some(wrong_family)).await;
    assert_eq!(body["code"], "incompatible-config");

    let mut same_side = star_request();
    same_side["human"] = json!("maker");
    let (_, body) = call(&app, "POST", "/sessions", Some(same_side)).await;
    assert_eq!(body["code"], "incompatible-config");

    let (status, body) = call(&app, "POST", "/sessions", Some(json!({"n": 10}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "invalid-request");

    let mut huge = star_request();
    huge["n"] = json!(200);
    let (status, body) = call(&app, "POST", "/sessions", Some(huge)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "invalid-request");
}

#[tokio::test]
async fn illegal_moves_carry_a_reason_and_change_nothing() {
    let app = app();
    let s = create(&app, star_request()).await;
    let moves = format!("/sessions/{}/moves", s["id"].as_str().unwrap());

    let cases = [
        (json!([[0, 1], [2, 3]]), "wrong-structure"),
        (json!([[0, 1], [0, 2], [0, 3], [0, 4]]), "wrong-structure"),
        (json!([[0, 10]]), "invalid-edge"),
        (json!([[4, 4]]), "invalid-edge"),
    ];
    for (edges, reason) in cases {
        let (status, body) = call(&app, "POST", &moves, Some(json!({ "edges": edges }))).await;
        assert_eq!(status, StatusCode::CONFLICT, "{body}");
        assert_eq!(body["code"], "illegal-move");
        assert_eq!(body["detail"]["reason"], reason, "{edges}");
    }
    let (_, unchanged) = call(&app, "GET", &format!("/sessions/{}", s["id"].as_str().unwrap()), None).await;
    assert_eq!(unchanged, s);

    let (status, after) = call(&app, "POST", &moves, Some(json!({"edges": [[0, 1], [0, 2]]}))).await;
    assert_eq!(status, StatusCode::OK);
    let reply = edges(&after["last_engine_move"]);
    assert_eq!(reply.len(), 1);
    assert_eq!(after["history"].as_array().unwrap().len(), 2);

    let (_, body) = call(&app, "POST", &moves, Some(json!({"edges": [[0, 1]]}))).await;
    assert_eq!(body["detail"]["reason"], "claimed-edge");

    let (status, body) = call(&app, "POST", &moves, Some(json!({"edge": [[0, 1]]}))).await;
    assert!(status.is_client_error());
    assert_eq!(body["code"], "invalid-request");
}

#[tokio::test]
async fn human_maker_claims_one_edge_per_turn() {
    let state = AppState::new(None);
    let req: NewSession = serde_json::from_value(json!({
        "n": 6,
        "bias": {"family": "free", "size": 1},
        "win": "triangle",
        "human": "maker",
        "strategy": "breaker.baseline.random",
        "first": "breaker"
    }))
    .unwrap();
    let view = state.create(&req).unwrap();
    assert_eq!(view.to_move, Player::Maker);
    assert_eq!(view.history.len(), 1);
    let err = state.submit(&view.id, &[Edge::new(0, 1), Edge::new(2, 3)]).unwrap_err();
    assert_eq!(err.body().detail["reason"], "wrong-structure");
}

/// Replays the history of a JSON session view.
fn replay_json(view: &Value) -> GameState {
    let bias: BiasSpec = serde_json::from_value(view["bias"].clone()).unwrap();
    let win: WinCondition = serde_json::from_value(view["win"].clone()).unwrap();
    let first: Player = serde_json::from_value(view["first"].clone()).unwrap();
    let history: Vec<MoveRecord> = serde_json::from_value(view["history"].clone()).unwrap();
    let mut state = GameState::new(view["n"].as_u64().unwrap() as usize, bias, win, first).unwrap();
    for m in &history {
        state.play(m.player, &m.edges).unwrap();
    }
    state
}

/// The open edge closing a triangle, or else the one best placed to.
fn triangle_pick(state: &GameState) -> Edge {
    state
        .unclaimed_edges()
        .into_iter()
        .max_by_key(|e| {
            let common = (state.maker_adj(e.u()) & state.maker_adj(e.v())).count_ones();
            (common, state.maker_degree(e.u()) + state.maker_degree(e.v()))
        })
        .unwrap()
}

#[tokio::test]
async fn human_maker_closing_a_triangle_wins_and_the_record_is_kept() {
    let dir = std::env::temp_dir().join(format!("structbias-records-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("games.jsonl");
    let _ = std::fs::remove_file(&path);
    let app = router(Arc::new(AppState::new(Some(path.clone()))), None);
    let mut view = create(
        &app,
        json!({
            "n": 7,
            "bias": {"family": "free", "size": 1},
            "win": "triangle",
            "human": "maker",
            "strategy": "breaker.baseline.random",
            "first": "maker",
            "seed": 3
        }),
    )
    .await;
    let moves = format!("/sessions/{}/moves", view["id"].as_str().unwrap());
    while view["status"]["state"] == "awaiting-human" {
        let e = triangle_pick(&replay_json(&view));
        let (status, body) = call(&app, "POST", &moves, Some(json!({"edges": [[e.u(), e.v()]]}))).await;
        assert_eq!(status, StatusCode::OK, "{body}");
        view = body;
    }
    assert_eq!(view["status"]["state"], "finished");
    assert_eq!(view["status"]["winner"], "maker");
    assert_eq!(view["status"]["reason"], "maker-goal");
    let (status, body) = call(&app, "POST", &moves, Some(json!({"edges": [[0, 1]]}))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["code"], "session-finished");

    let lines = std::fs::read_to_string(&path).unwrap();
    let recorded: Vec<&str> = lines.lines().collect();
    assert_eq!(recorded.len(), 1);
    let state = structbias_core::record::decode_record(recorded[0]).unwrap();
    assert_eq!(state, replay_json(&view));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[tokio::test]
async fn strategy_list_covers_the_registry() {
    let (status, body) = call(&app(), "GET", "/strategies", None).await;
    assert_eq!(status, StatusCode::OK);
    let listed: HashSet<String> = body
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["id"].as_str().unwrap().to_string())
        .collect();
    let expected: HashSet<String> = registry::strategies().iter().map(|s| s.id.to_string()).collect();
    assert_eq!(listed, expected);
    assert!(listed.iter().any(|id| id.starts_with("maker.")));
    assert!(listed.iter().any(|id| id.starts_with("breaker.")));
    assert!(body[0].get("families").is_some() && body[0].get("first_mover").is_some());
}

#[tokio::test]
async fn cors_headers_follow_the_configured_origin() {
    let app = router(Arc::new(AppState::new(None)), Some("http://localhost:5173"));
    let request = Request::builder()
        .uri("/strategies")
        .header("origin", "http://localhost:5173")
        .body(Body::empty())
        .unwrap();
    let response = app.oneshot(request).await.unwrap();
    assert_eq!(
        response.headers().get("access-control-allow-origin").unwrap(),
        "http://localhost:5173"
    );
}

fn replay(view: &SessionView) -> GameState {
    let mut state = GameState::new(view.n, view.bias, view.win, view.first).unwrap();
    for m in &view.history {
        state.play(m.player, &m.edges).unwrap();
    }
    state
}

/// Legality from the structure definitions, independent of the board's checker.
fn legal_by_definition(state: &GameState, player: Player, edges: &[Edge]) -> bool {
    if state.to_move() != player || edges.iter().any(|e| e.v() >= state.n() || !state.is_unclaimed(*e)) {
        return false;
    }
    let distinct: HashSet<Edge> = edges.iter().copied().collect();
    if distinct.len() != edges.len() {
        return false;
    }
    if player == Player::Maker {
        return edges.len() == 1;
    }
    if edges.is_empty() {
        return state.is_exhausted();
    }
    let bias = state.bias();
    let vertices: HashSet<usize> = edges.iter().flat_map(|e| [e.u(), e.v()]).collect();
    match bias.family {
        BiasFamily::Free => edges.len() <= bias.size,
        BiasFamily::Clique => vertices.len() <= bias.size,
        BiasFamily::Matching => edges.len() <= bias.size && vertices.len() == 2 * edges.len(),
        BiasFamily::Star => edges.len() <= bias.size && vertices.iter().any(|&c| edges.iter().all(|e| e.touches(c))),
    }
}

fn board_matches(view: &SessionView, state: &GameState) -> bool {
    view.board.maker == state.maker_edges()
        && view.board.breaker == state.breaker_edges()
        && view.board.unclaimed == state.unclaimed_edges()
        && view.to_move == state.to_move()
}

/// A submission: mostly junk, sometimes a legal move so games progress.
fn submission(state: &GameState, player: Player, rng: &mut ChaCha8Rng) -> Vec<Edge> {
    let n = state.n();
    if rng.gen_bool(0.4) && !state.is_exhausted() {
        return match player {
            Player::Maker => vec![state.unclaimed_edges()[rng.gen_range(0..state.unclaimed_count())]],
            Player::Breaker => random_maximal_move(state, rng),
        };
    }
    let len = rng.gen_range(0..5);
    (0..len)
        .filter_map(|_| Edge::try_new(rng.gen_range(0..=n), rng.gen_range(0..=n)))
        .collect()
}

fn config() -> impl Strategy<Value = (usize, BiasSpec, WinCondition, Player)> {
    let family = prop_oneof![
        Just(BiasFamily::Clique),
        Just(BiasFamily::Matching),
        Just(BiasFamily::Star),
        Just(BiasFamily::Free),
    ];
    let win = prop_oneof![
        Just(WinCondition::Triangle),
        Just(WinCondition::Connectivity),
        Just(WinCondition::HamiltonCycle),
        (1u32..3).prop_map(WinCondition::MinDegree),
    ];
    let human = prop_oneof![Just(Player::Maker), Just(Player::Breaker)];
    (5usize..=9, family, 1usize..=3, win, human).prop_map(|(n, family, raw, win, human)| {
        let size = if family == BiasFamily::Clique { raw + 1 } else { raw };
        (n, BiasSpec::new(family, size).unwrap(), win, human)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fuzzed_submissions_never_apply_an_illegal_move(
        (n, bias, win, human) in config(),
        pick in any::<prop::sample::Index>(),
        seed in any::<u64>(),
        rounds in 1usize..40,
    ) {
        let engines: Vec<&'static str> = registry::strategies()
            .into_iter()
            .filter(|s| s.role != human && s.check(bias, win).is_ok())
            .map(|s| s.id)
            .collect();
        let strategy = engines[pick.index(engines.len())];
        let app = AppState::new(None);
        let req = NewSession { n, bias, win, human, strategy: strategy.into(), seed, first: None, exact_cap: None };
        let mut view = app.create(&req).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..rounds {
            let before = replay(&view);
            prop_assert!(board_matches(&view, &before));
            let edges = submission(&before, human, &mut rng);
            let finished = matches!(view.status, Status::Finished { .. });
            match app.submit(&view.id, &edges) {
                Ok(after) => {
                    prop_assert!(!finished);
                    prop_assert!(legal_by_definition(&before, human, &edges), "{edges:?} accepted");
                    let applied = &after.history[view.history.len()];
                    prop_assert_eq!(applied.player, human);
                    let mut sorted = edges.clone();
                    sorted.sort();
                    prop_assert_eq!(&applied.edges, &sorted);
                    view = after;
                }
                Err(e) => {
                    prop_assert!(finished || !legal_by_definition(&before, human, &edges), "{edges:?} refused: {e}");
                    let unchanged = app.get(&view.id).unwrap();
                    prop_assert_eq!(&*unchanged, &*view);
                }
            }
            // every applied move, engine replies included, replays legally
            let state = replay(&view);
            prop_assert!(board_matches(&view, &state));
            prop_assert_eq!(&*app.get(&view.id).unwrap(), &*view);
        }
    }
}
