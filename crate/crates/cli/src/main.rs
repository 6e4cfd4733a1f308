//! `structbias`: batch experiments, lemma suites, the exact solver, record
//! inspection and the play service.
//!
//! Exit codes: 0 ok, 1 invariant violation, 2 config or usage error.

mod inspect;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use structbias_core::board::{BiasSpec, GameState, Player};
use structbias_core::experiment::{
    run_lemma_suite, run_match, run_threshold_scan, write_csv, ExperimentConfig, LemmaOptions, LemmaReport, Suite,
};
use structbias_core::record::decode_record;
use structbias_core::solver::{solve, BreakerMoves, SolveError, SolverOptions, DEFAULT_NODE_BUDGET};
use structbias_core::win::WinCondition;
use structbias_service::{port_from_env, ServiceConfig};

#[derive(Parser)]
#[command(name = "structbias", version, about = "Structure-biased Maker-Breaker games on K_n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Play every strategy pair of a config for a range of seeds; one CSV row per game.
    Play(RunArgs),
    /// Sweep bias sizes and report the Maker win rate per cell.
    Scan(RunArgs),
    /// Run lemma suites over their fixed grids.
    Lemmas(LemmaArgs),
    /// Solve a small position exactly and print the result as JSON.
    Solve(SolveArgs),
    /// Replay and summarize game records (JSON lines or a match CSV).
    Record(RecordArgs),
    /// Serve the HTTP play API.
    Serve(ServeArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Seed of the first game; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Games per cell; overrides the config.
    #[arg(long)]
    seeds: Option<u64>,
    /// CSV destination, `-` for stdout; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    exact_cap: Option<usize>,
}

#[derive(Args)]
struct LemmaArgs {
    /// Suites to run: box, deletion, paired, expander. All when omitted.
    suites: Vec<Suite>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random graphs in the expander corpus.
    #[arg(long, default_value_t = 10_000)]
    graphs: usize,
    #[arg(long)]
    exact_cap: Option<usize>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Full reports as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, required_unless_present = "record")]
    n: Option<usize>,
    /// `family:size`, e.g. `star:2`.
    #[arg(long, required_unless_present = "record")]
    bias: Option<BiasSpec>,
    #[arg(long, required_unless_present = "record")]
    win: Option<WinCondition>,
    #[arg(long, default_value = "breaker", value_parser = parse_player)]
    first: Player,
    /// Solve the position a record ends in instead.
    #[arg(long, conflicts_with_all = ["n", "bias", "win"])]
    record: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
    /// Let Breaker play every legal move, not only maximal ones.
    #[arg(long)]
    full: bool,
    #[arg(long)]
    no_memo: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RecordArgs {
    path: PathBuf,
    /// Print every move of each record.
    #[arg(long)]
    moves: bool,
    #[arg(long)]
    exact_cap: Option<usize>,
}

#[derive(Args)]
struct ServeArgs {
    /// Defaults to PLAY_PORT, then 8642.
    #[arg(long)]
    port: Option<u16>,
    #[arg(long, default_value = "127.0.0.1")]
    host: IpAddr,
    /// Append finished games to this file, one record per line.
    #[arg(long)]
    records: Option<PathBuf>,
    /// Origin allowed by CORS; any when omitted.
    #[arg(long)]
    origin: Option<String>,
}

fn parse_player(s: &str) -> Result<Player, String> {
    Player::parse(s).ok_or_else(|| format!("`{s}` is not maker or breaker"))
}

/// A failed command and the exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    Violation(String),
    Config(String),
}

impl Failure {
    fn config(e: impl std::fmt::Display) -> Failure {
        Failure::Config(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match path {
        None => Ok(Box::new(io::stdout().lock())),
        Some(p) if p == Path::new("-") => Ok(Box::new(io::stdout().lock())),
        Some(p) => {
            let file = File::create(p).map_err(|e| Failure::Config(format!("cannot write {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(file)))
        }
    }
}

fn load_config(args: &RunArgs) -> Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig::load(&args.config).map_err(Failure::config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(seeds) = args.seeds {
        cfg.seeds = seeds;
    }
    if let Some(cap) = args.exact_cap {
        cfg.exact_cap = cap;
    }
    if args.out.is_some() {
        cfg.out.clone_from(&args.out);
    }
    Ok(cfg)
}

fn play(args: RunArgs) -> CmdResult {
    let cfg = load_config(&args)?;
    let rows = run_match(&cfg, args.jobs).map_err(Failure::config)?;
    write_csv(&rows, output(cfg.out.as_deref())?).map_err(Failure::config)?;

    let maker_wins = rows.iter().filter(|r| r.winner == Player::Maker).count();
    let with_failures = rows
        .iter()
        .filter(|r| r.maker_failures + r.breaker_failures > 0)
        .count();
    eprintln!(
        "{} games: Maker won {maker_wins}, {with_failures} with strategy failures",
        rows.len()
    );
    let mut problems = Vec::new();
    for r in &rows {
        if r.violations > 0 {
            problems.push(format!(
                "cell {} seed {}: {} strategy invariant violations",
                r.cell, r.seed, r.violations
            ));
        }
        match decode_record(&r.record) {
            Ok(state) if state.history().len() == r.maker_moves + r.breaker_moves => {}
            Ok(_) => problems.push(format!(
                "cell {} seed {}: record length disagrees with move counts",
                r.cell, r.seed
            )),
            Err(e) => problems.push(format!("cell {} seed {}: record does not replay: {e}", r.cell, r.seed)),
        }
    }
    violations(problems)
}

fn violations(problems: Vec<String>) -> CmdResult {
    if problems.is_empty() {
        return Ok(());
    }
    for p in problems.iter().take(20) {
        eprintln!("violation: {p}");
    }
    Err(Failure::Violation(format!("{} violations", problems.len())))
}

fn scan(args: RunArgs) -> CmdResult {
    let cfg = load_config(&args)?;
    let rows = run_threshold_scan(&cfg, args.jobs).map_err(Failure::config)?;
    write_csv(&rows, output(cfg.out.as_deref())?).map_err(Failure::config)?;
    eprintln!("{} cells, {} games each", rows.len(), cfg.seeds);
    Ok(())
}

fn lemmas(args: LemmaArgs) -> CmdResult {
    let suites = if args.suites.is_empty() {
        Suite::ALL.to_vec()
    } else {
        args.suites
    };
    let opts = LemmaOptions {
        seed: args.seed,
        expander_graphs: args.graphs,
        exact_cap: args.exact_cap.unwrap_or(LemmaOptions::default().exact_cap),
    };
    let run = || -> Result<Vec<LemmaReport>, Failure> {
        suites
            .iter()
            .map(|&s| run_lemma_suite(s, &opts).map_err(Failure::config))
            .collect()
    };
    let reports = match args.jobs {
        None => run()?,
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(Failure::config)?
            .install(run)?,
    };
    for r in &reports {
        let verdict = if r.passed() { "pass" } else { "FAIL" };
        println!(
            "{}: {verdict}, {} cases, {} violations",
            r.suite,
            r.cases,
            r.violations.len()
        );
        for v in r.violations.iter().take(10) {
            println!("  violation: {v}");
        }
        for note in &r.notes {
            println!("  {note}");
        }
    }
    if let Some(path) = &args.out {
        let mut out = output(Some(path))?;
        serde_json::to_writer_pretty(&mut out, &reports).map_err(Failure::config)?;
        writeln!(out).map_err(Failure::config)?;
    }
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.suite.to_string())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Violation(format!(
            "suites with violations: {}",
            failed.join(", ")
        )))
    }
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    n: usize,
    bias: BiasSpec,
    win: WinCondition,
    first: Player,
    moves_played: usize,
    to_move: Player,
    #[serde(flatten)]
    result: &'a structbias_core::solver::SolveResult,
}

fn solve_cmd(args: SolveArgs) -> CmdResult {
    let state = match &args.record {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
            decode_record(&text).map_err(|e| Failure::Violation(format!("{}: {e}", path.display())))?
        }
        None => {
            let (n, bias, win) = (args.n.unwrap_or_default(), args.bias.unwrap(), args.win.unwrap());
            GameState::new(n, bias, win, args.first).map_err(Failure::config)?
        }
    };
    let opts = SolverOptions {
        budget: args.budget,
        memoize: !args.no_memo,
        breaker_moves: if args.full {
            BreakerMoves::Full
        } else {
            BreakerMoves::Maximal
        },
    };
    let result = match solve(&state, opts) {
        Ok(r) => r,
        Err(e @ SolveError::BudgetExceeded { .. }) => return Err(Failure::Config(format!("no verdict: {e}"))),
        Err(e) => return Err(Failure::config(e)),
    };
    let report = SolveOutput {
        n: state.n(),
        bias: state.bias(),
        win: state.win(),
        first: state.first_mover(),
        moves_played: state.history().len(),
        to_move: state.to_move(),
        result: &result,
    };
    let mut out = output(args.out.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &report).map_err(Failure::config)?;
    writeln!(out).map_err(Failure::config)
}

fn serve(args: ServeArgs) -> CmdResult {
    let port = match args.port {
        Some(p) => p,
        None => port_from_env().map_err(Failure::Config)?,
    };
    let config = ServiceConfig {
        records: args.records,
        ui_origin: args.origin,
    };
    let runtime = tokio::runtime::Runtime::new().map_err(Failure::config)?;
    runtime
        .block_on(structbias_service::serve(SocketAddr::new(args.host, port), config))
        .map_err(|e| Failure::Config(format!("cannot serve on {}:{port}: {e}", args.host)))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Play(a) => play(a),
        Command::Scan(a) => scan(a),
        Command::Lemmas(a) => lemmas(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Record(a) => inspect::run(&a.path, a.moves, a.exact_cap),
        Command::Serve(a) => serve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
