//! Python bindings: games, seeded matches, the exact solver and lemma suites.
//!
//! Biases are `family:size` strings, goals are win-condition ids and players
//! are `"maker"` / `"breaker"`. Structured results come back as plain dicts.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

use structbias_core::board::{BiasSpec, Edge, GameState, Player};
use structbias_core::experiment::{run_lemma_suite, LemmaOptions, Suite};
use structbias_core::graph::DEFAULT_EXACT_CAP;
use structbias_core::record::{decode_record, encode_record};
use structbias_core::registry::{self, build_breaker, build_maker, StrategyOptions};
use structbias_core::runner::{play_game as run_game, verdict, MatchConfig};
use structbias_core::solver::{solve as solve_exact, SolverOptions, DEFAULT_NODE_BUDGET};
use structbias_core::win::WinCondition;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Hands a serializable value to Python through its `json` module.
fn to_py<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(value_error)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn player(s: &str) -> PyResult<Player> {
    Player::parse(s).ok_or_else(|| value_error(format!("`{s}` is not maker or breaker")))
}

fn bias(s: &str) -> PyResult<BiasSpec> {
    s.parse().map_err(value_error)
}

fn win(s: &str) -> PyResult<WinCondition> {
    s.parse().map_err(value_error)
}

fn edges(pairs: Vec<(usize, usize)>) -> PyResult<Vec<Edge>> {
    pairs
        .into_iter()
        .map(|(a, b)| Edge::try_new(a, b).ok_or_else(|| value_error(format!("({a},{b}) is a loop"))))
        .collect()
}

fn pairs(edges: &[Edge]) -> Vec<(usize, usize)> {
    edges.iter().map(|e| (e.u(), e.v())).collect()
}

/// A position on `K_n` that Python code can play forward.
#[pyclass(module = "structbias")]
struct Game {
    state: GameState,
}

#[pymethods]
impl Game {
    #[new]
    #[pyo3(signature = (n, bias, win, first = "breaker"))]
    fn new(n: usize, bias: &str, win: &str, first: &str) -> PyResult<Game> {
        let state = GameState::new(n, self::bias(bias)?, self::win(win)?, player(first)?).map_err(value_error)?;
        Ok(Game { state })
    }

    /// Rebuilds a game by replaying a record; illegal records raise `ValueError`.
    #[staticmethod]
    fn from_record(text: &str) -> PyResult<Game> {
        decode_record(text).map(|state| Game { state }).map_err(value_error)
    }

    #[getter]
    fn n(&self) -> usize {
        self.state.n()
    }

    #[getter]
    fn to_move(&self) -> String {
        self.state.to_move().to_string()
    }

    #[getter]
    fn maker_edges(&self) -> Vec<(usize, usize)> {
        pairs(&self.state.maker_edges())
    }

    #[getter]
    fn breaker_edges(&self) -> Vec<(usize, usize)> {
        pairs(&self.state.breaker_edges())
    }

    #[getter]
    fn unclaimed_edges(&self) -> Vec<(usize, usize)> {
        pairs(&self.state.unclaimed_edges())
    }

    #[getter]
    fn history(&self) -> Vec<(String, Vec<(usize, usize)>)> {
        self.state
            .history()
            .iter()
            .map(|m| (m.player.to_string(), pairs(&m.edges)))
            .collect()
    }

    fn legal_breaker_move(&self, edges: Vec<(usize, usize)>) -> PyResult<bool> {
        Ok(self.state.legal_breaker_move(&self::edges(edges)?))
    }

    /// Plays `edges` for the side to move.
    fn play(&mut self, edges: Vec<(usize, usize)>) -> PyResult<()> {
        let edges = self::edges(edges)?;
        let mover = self.state.to_move();
        self.state
            .play(mover, &edges)
            .map_err(|e| value_error(format!("{}: {e}", e.reason())))
    }

    /// `None` while the game is open, else winner, reason and any block witness.
    #[pyo3(signature = (exact_cap = DEFAULT_EXACT_CAP))]
    fn result<'py>(&self, py: Python<'py>, exact_cap: usize) -> PyResult<Option<Bound<'py, PyAny>>> {
        if self.state.history().is_empty() {
            return Ok(None);
        }
        match verdict(&self.state, exact_cap, true).0 {
            None => Ok(None),
            Some((reason, winner, witness)) => {
                let doc = serde_json::json!({ "winner": winner, "reason": reason, "witness": witness });
                to_py(py, &doc).map(Some)
            }
        }
    }

    fn record(&self) -> String {
        encode_record(&self.state)
    }

    fn __repr__(&self) -> String {
        format!(
            "Game(K_{}, {}, {}, {} moves, {} to move)",
            self.state.n(),
            self.state.bias(),
            self.state.win(),
            self.state.history().len(),
            self.state.to_move()
        )
    }
}

/// Registered strategies with their compatibility metadata.
#[pyfunction]
fn strategies(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &registry::strategies())
}

/// Plays one seeded game between two registered strategies.
#[pyfunction]
#[pyo3(signature = (maker, breaker, n, bias, win, first = None, seed = 0, exact_cap = DEFAULT_EXACT_CAP, stop_on_block = true))]
#[allow(clippy::too_many_arguments)]
fn play_match<'py>(
    py: Python<'py>,
    maker: &str,
    breaker: &str,
    n: usize,
    bias: &str,
    win: &str,
    first: Option<&str>,
    seed: u64,
    exact_cap: usize,
    stop_on_block: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let (bias, win) = (self::bias(bias)?, self::win(win)?);
    let opts = StrategyOptions {
        exact_cap,
        ..StrategyOptions::seeded(seed)
    };
    let mut m = build_maker(maker, &opts).map_err(value_error)?;
    let mut b = build_breaker(breaker, &opts).map_err(value_error)?;
    let first = match first {
        Some(p) => player(p)?,
        None => registry::info(maker).map_err(value_error)?.first_mover,
    };
    let mut cfg = MatchConfig::new(n, bias, win, first, seed);
    cfg.exact_cap = exact_cap;
    cfg.stop_on_block = stop_on_block;
    let out = py
        .detach(|| run_game(&cfg, m.as_mut(), b.as_mut()))
        .map_err(value_error)?;
    let doc = serde_json::json!({
        "winner": out.winner,
        "reason": out.reason,
        "maker_moves": out.maker_moves,
        "breaker_moves": out.breaker_moves,
        "failures": out.failures,
        "exact": out.exact_verdict,
        "record": encode_record(&out.state),
    });
    to_py(py, &doc)
}

/// Exact perfect-play verdict for a tiny board, or for the end of `record`.
#[pyfunction]
#[pyo3(signature = (n = None, bias = None, win = None, first = "breaker", record = None, budget = DEFAULT_NODE_BUDGET))]
fn solve<'py>(
    py: Python<'py>,
    n: Option<usize>,
    bias: Option<&str>,
    win: Option<&str>,
    first: &str,
    record: Option<&str>,
    budget: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let state = match (record, n, bias, win) {
        (Some(text), ..) => decode_record(text).map_err(value_error)?,
        (None, Some(n), Some(b), Some(w)) => {
            GameState::new(n, self::bias(b)?, self::win(w)?, player(first)?).map_err(value_error)?
        }
        _ => return Err(value_error("pass either record or all of n, bias and win")),
    };
    let opts = SolverOptions {
        budget,
        ..SolverOptions::default()
    };
    let result = py.detach(|| solve_exact(&state, opts)).map_err(value_error)?;
    to_py(py, &result)
}

/// Runs one lemma suite (`box`, `deletion`, `paired` or `expander`).
#[pyfunction]
#[pyo3(signature = (suite, seed = 0, graphs = 10_000))]
fn lemma_suite<'py>(py: Python<'py>, suite: &str, seed: u64, graphs: usize) -> PyResult<Bound<'py, PyAny>> {
    let suite: Suite = suite.parse().map_err(value_error)?;
    let opts = LemmaOptions {
        seed,
        expander_graphs: graphs,
        ..LemmaOptions::default()
    };
    let report = py.detach(|| run_lemma_suite(suite, &opts)).map_err(value_error)?;
    let mut doc = serde_json::to_value(&report).map_err(value_error)?;
    doc["passed"] = report.passed().into();
    to_py(py, &doc)
}

#[pymodule]
fn structbias(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Game>()?;
    m.add_function(wrap_pyfunction!(strategies, m)?)?;
    m.add_function(wrap_pyfunction!(play_match, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(lemma_suite, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argument_parsing() {
        assert_eq!(bias("matching:3").unwrap(), BiasSpec::matching(3));
        assert_eq!(win("min-degree:2").unwrap(), WinCondition::MinDegree(2));
        assert_eq!(player("breaker").unwrap(), Player::Breaker);
        assert_eq!(edges(vec![(3, 1)]).unwrap(), vec![Edge::new(1, 3)]);
    }
}
