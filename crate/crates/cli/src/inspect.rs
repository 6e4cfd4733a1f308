//! `structbias record`: replays records and prints what they contain.

use std::path::Path;

use structbias_core::board::GameState;
use structbias_core::experiment::CSV_VERSION_LINE;
use structbias_core::graph::DEFAULT_EXACT_CAP;
use structbias_core::record::decode_record;
use structbias_core::runner::verdict;

use crate::{CmdResult, Failure};

fn summary(state: &GameState, exact_cap: usize) -> String {
    let head = format!(
        "K_{} {} {}, {} first, {} moves",
        state.n(),
        state.bias(),
        state.win(),
        state.first_mover(),
        state.history().len()
    );
    let end = if state.history().is_empty() {
        None
    } else {
        verdict(state, exact_cap, true).0
    };
    match end {
        Some((reason, winner, _)) => format!("{head}, {winner} wins ({})", reason_name(reason)),
        None => format!("{head}, {} to move", state.to_move()),
    }
}

fn reason_name(reason: structbias_core::runner::EndReason) -> String {
    serde_json::to_value(reason)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn print_moves(state: &GameState) {
    for (i, m) in state.history().iter().enumerate() {
        let edges: Vec<String> = m.edges.iter().map(ToString::to_string).collect();
        println!("  {:>3} {}: {}", i + 1, m.player.tag(), edges.join(" "));
    }
}

/// Record texts in the file, each with a label for messages.
fn records(path: &Path, text: &str) -> Result<Vec<(String, String)>, Failure> {
    if text.starts_with(CSV_VERSION_LINE) {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let column = reader
            .headers()
            .map_err(Failure::config)?
            .iter()
            .position(|h| h == "record")
            .ok_or_else(|| Failure::Config(format!("{} has no record column", path.display())))?;
        return reader
            .records()
            .enumerate()
            .map(|(i, row)| {
                let row = row.map_err(Failure::config)?;
                Ok((
                    format!("row {}", i + 1),
                    row.get(column).unwrap_or_default().to_string(),
                ))
            })
            .collect();
    }
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    if lines.len() > 1
        && lines
            .iter()
            .all(|l| l.trim_start().starts_with('{') && l.trim_end().ends_with('}'))
    {
        return Ok(lines
            .iter()
            .enumerate()
            .map(|(i, l)| (format!("line {}", i + 1), l.to_string()))
            .collect());
    }
    Ok(vec![("record".to_string(), text.to_string())])
}

pub fn run(path: &Path, moves: bool, exact_cap: Option<usize>) -> CmdResult {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    let exact_cap = exact_cap.unwrap_or(DEFAULT_EXACT_CAP);
    let all = records(path, &text)?;
    let is_csv = text.starts_with(CSV_VERSION_LINE);
    let mut bad = Vec::new();
    for (label, record) in &all {
        match decode_record(record) {
            Ok(state) => {
                if !is_csv || moves {
                    println!("{label}: {}", summary(&state, exact_cap));
                }
                if moves {
                    print_moves(&state);
                }
            }
            Err(e) => {
                println!("{label}: INVALID {e}");
                bad.push(label.clone());
            }
        }
    }
    println!("{} of {} records replay legally", all.len() - bad.len(), all.len());
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::Violation(format!("{} records do not replay", bad.len())))
    }
}
