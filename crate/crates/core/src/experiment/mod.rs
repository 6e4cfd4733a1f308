//! Batch harness: seeded matches, bias sweeps and lemma suites, written as
//! versioned CSV.

mod config;
mod expr;
mod lemmas;

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::board::{BiasFamily, Player};
use crate::error::GameError;
use crate::record::encode_record;
use crate::registry::{build_breaker, build_maker};
use crate::runner::{play_game, EndReason, GameOutcome, MatchConfig};

pub use config::{Cell, ConfigError, ExperimentConfig, NRange, OneOrMany, ScanRange};
pub use expr::{ExprError, SizeRule};
pub use lemmas::{run_lemma_suite, LemmaOptions, LemmaReport, Suite};

/// First line of every CSV the harness writes.
pub const CSV_VERSION_LINE: &str = "# structbias-csv v1";

/// Keeps Breaker's random stream apart from Maker's when both share a seed.
const BREAKER_SEED_SALT: u64 = 0xb7ea_4e55_0000_0001;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("game setup failed: {0}")]
    Game(#[from] GameError),
    #[error("cannot build thread pool: {0}")]
    Pool(String),
    #[error("write failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// One finished game.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchRow {
    pub cell: usize,
    pub n: usize,
    pub family: BiasFamily,
    pub bias: usize,
    pub win: String,
    pub maker: String,
    pub breaker: String,
    pub first: Player,
    pub seed: u64,
    pub winner: Player,
    pub reason: EndReason,
    pub maker_moves: usize,
    pub breaker_moves: usize,
    pub maker_failures: usize,
    pub breaker_failures: usize,
    pub illegal_moves: usize,
    /// Distinct failure kinds, `;`-separated.
    pub failure_kinds: String,
    pub exact: bool,
    pub violations: usize,
    pub record: String,
}

/// Win rate of one cell of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub n: usize,
    pub family: BiasFamily,
    pub bias: usize,
    pub maker: String,
    pub breaker: String,
    pub games: u64,
    pub maker_wins: u64,
    pub win_rate: f64,
    pub games_with_failures: u64,
}

fn in_pool<T: Send>(jobs: Option<usize>, work: impl FnOnce() -> T + Send) -> Result<T, ExperimentError> {
    match jobs {
        None => Ok(work()),
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| ExperimentError::Pool(e.to_string()))?;
            Ok(pool.install(work))
        }
    }
}

fn play_cell(cfg: &ExperimentConfig, cell: &Cell, seed: u64) -> Result<GameOutcome, GameError> {
    let mut maker = build_maker(&cell.maker, &cfg.strategy_options(seed)).expect("checked by match_cells");
    let mut breaker =
        build_breaker(&cell.breaker, &cfg.strategy_options(seed ^ BREAKER_SEED_SALT)).expect("checked by match_cells");
    let mut game = MatchConfig::new(cell.n, cell.bias, cfg.win, cell.first, seed);
    game.exact_cap = cfg.exact_cap;
    game.stop_on_block = cfg.stop_on_block;
    play_game(&game, maker.as_mut(), breaker.as_mut())
}

fn row(cfg: &ExperimentConfig, index: usize, cell: &Cell, seed: u64, out: &GameOutcome) -> MatchRow {
    let mut kinds: Vec<&str> = out.failures.iter().map(|f| f.kind.name()).collect();
    kinds.sort_unstable();
    kinds.dedup();
    MatchRow {
        cell: index,
        n: cell.n,
        family: cell.bias.family,
        bias: cell.bias.size,
        win: cfg.win.id(),
        maker: cell.maker.clone(),
        breaker: cell.breaker.clone(),
        first: cell.first,
        seed,
        winner: out.winner,
        reason: out.reason,
        maker_moves: out.maker_moves,
        breaker_moves: out.breaker_moves,
        maker_failures: out.failures_of(Player::Maker).count(),
        breaker_failures: out.failures_of(Player::Breaker).count(),
        illegal_moves: out.illegal_moves(),
        failure_kinds: kinds.join(";"),
        exact: out.exact_verdict,
        violations: out.maker_report.violations.len() + out.breaker_report.violations.len(),
        record: encode_record(&out.state),
    }
}

fn play_all(
    cfg: &ExperimentConfig,
    cells: &[Cell],
    jobs: Option<usize>,
) -> Result<Vec<(usize, u64, GameOutcome)>, ExperimentError> {
    let games: Vec<(usize, u64)> = (0..cells.len())
        .flat_map(|c| (0..cfg.seeds).map(move |i| (c, cfg.seed.wrapping_add(i))))
        .collect();
    let outcomes = in_pool(jobs, || {
        games
            .par_iter()
            .map(|&(c, seed)| play_cell(cfg, &cells[c], seed).map(|out| (c, seed, out)))
            .collect::<Result<Vec<_>, GameError>>()
    })??;
    Ok(outcomes)
}

/// Plays `seeds` games per cell. Rows come back ordered by (cell, seed)
/// whatever the thread count.
pub fn run_match(cfg: &ExperimentConfig, jobs: Option<usize>) -> Result<Vec<MatchRow>, ExperimentError> {
    let cells = cfg.match_cells()?;
    Ok(play_all(cfg, &cells, jobs)?
        .iter()
        .map(|(c, seed, out)| row(cfg, *c, &cells[*c], *seed, out))
        .collect())
}

/// Maker win rate for every (n, bias size, strategy pair) in the sweep.
pub fn run_threshold_scan(cfg: &ExperimentConfig, jobs: Option<usize>) -> Result<Vec<ScanRow>, ExperimentError> {
    let cells = cfg.scan_cells()?;
    let outcomes = play_all(cfg, &cells, jobs)?;
    Ok(cells
        .iter()
        .enumerate()
        .map(|(c, cell)| {
            let games: Vec<&GameOutcome> = outcomes
                .iter()
                .filter(|(oc, _, _)| *oc == c)
                .map(|(_, _, o)| o)
                .collect();
            let maker_wins = games.iter().filter(|o| o.winner == Player::Maker).count() as u64;
            ScanRow {
                n: cell.n,
                family: cell.bias.family,
                bias: cell.bias.size,
                maker: cell.maker.clone(),
                breaker: cell.breaker.clone(),
                games: games.len() as u64,
                maker_wins,
                win_rate: maker_wins as f64 / games.len() as f64,
                games_with_failures: games.iter().filter(|o| !o.failures.is_empty()).count() as u64,
            }
        })
        .collect())
}

/// Writes the version line, a header and one line per row.
pub fn write_csv<R: Serialize>(rows: &[R], out: impl Write) -> Result<(), ExperimentError> {
    let mut out = out;
    writeln!(out, "{CSV_VERSION_LINE}")?;
    let mut writer = csv::Writer::from_writer(out);
    for r in rows {
        writer.serialize(r)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::decode_record;

    fn config(text: &str) -> ExperimentConfig {
        ExperimentConfig::from_toml(text).unwrap()
    }

    const MATCHING: &str = r#"
        n = 10
        family = "matching"
        bias = "n/2"
        win = "triangle"
        maker = "maker.triangle.matching"
        breaker = "breaker.baseline.random"
        first = "maker"
        seeds = 40
    "#;

    #[test]
    fn matching_triangle_rows() {
        let rows = run_match(&config(MATCHING), None).unwrap();
        assert_eq!(rows.len(), 40);
        assert!(rows.iter().all(|r| r.winner == Player::Maker && r.maker_moves <= 4));
        assert_eq!(
            rows.iter().map(|r| r.seed).collect::<Vec<_>>(),
            (0..40).collect::<Vec<_>>()
        );
        for r in rows.iter().step_by(7) {
            let state = decode_record(&r.record).unwrap();
            assert_eq!(state.turns_taken(Player::Maker), r.maker_moves);
        }
    }

    #[test]
    fn csv_is_identical_across_thread_counts() {
        let cfg = config(MATCHING);
        let mut one = Vec::new();
        write_csv(&run_match(&cfg, Some(1)).unwrap(), &mut one).unwrap();
        let mut four = Vec::new();
        write_csv(&run_match(&cfg, Some(4)).unwrap(), &mut four).unwrap();
        assert_eq!(one, four);
        let text = String::from_utf8(one).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_VERSION_LINE));
        assert!(lines
            .next()
            .unwrap()
            .starts_with("cell,n,family,bias,win,maker,breaker,first,seed,winner"));
    }

    #[test]
    fn tree_growth_and_factorization() {
        let tree = config(
            r#"
            n = 8
            family = "matching"
            bias = "n/2"
            win = "connectivity"
            maker = "maker.connectivity.tree"
            breaker = "breaker.baseline.greedy"
            seeds = 10
            "#,
        );
        let rows = run_match(&tree, None).unwrap();
        assert!(rows
            .iter()
            .all(|r| r.winner == Player::Maker && r.maker_moves == 7 && r.first == Player::Maker));

        let fact = config(
            r#"
            n = 8
            family = "matching"
            bias = "4"
            win = "connectivity"
            maker = "maker.baseline.random"
            breaker = "breaker.matching.factorization"
            seeds = 10
            "#,
        );
        let rows = run_match(&fact, None).unwrap();
        assert!(rows
            .iter()
            .all(|r| r.winner == Player::Breaker && r.first == Player::Breaker));
    }

    #[test]
    fn star_triangle_scan_shape() {
        let cfg = config(
            r#"
            n = 12
            family = "star"
            scan = { from = "1", to = "3" }
            win = "triangle"
            maker = "maker.triangle.star"
            breaker = ["breaker.baseline.random", "breaker.baseline.greedy"]
            seeds = 30
            "#,
        );
        let rows = run_threshold_scan(&cfg, None).unwrap();
        assert_eq!(rows.len(), 6);
        assert!(rows.iter().all(|r| r.games == 30 && r.win_rate == 1.0), "{rows:?}");
    }
}
