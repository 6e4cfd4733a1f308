use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::aux_games::{
    boxgame_playout, boxmaker_condition, deletion_bound, deletion_brute_max, deletion_tight_start, paired_brute_max,
    paired_linear_bound, paired_sharp_bound, BoxBreakerPolicy,
};
use crate::board::{all_edges, Player};
use crate::error::AuxError;
use crate::graph::{boosters, is_hamiltonian_cycle, max_expansion, SimpleGraph, DEFAULT_EXPANDER_BUDGET};

const PAIRED_BUDGET: u64 = 20_000_000;
const BOX_BUDGET: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Box,
    Deletion,
    Paired,
    Expander,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Box, Suite::Deletion, Suite::Paired, Suite::Expander];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Box => "box",
            Suite::Deletion => "deletion",
            Suite::Paired => "paired",
            Suite::Expander => "expander",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Suite, String> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}` (box, deletion, paired, expander)"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LemmaOptions {
    pub seed: u64,
    /// Random graphs in the expander corpus.
    pub expander_graphs: usize,
    pub exact_cap: usize,
}

impl Default for LemmaOptions {
    fn default() -> Self {
        LemmaOptions {
            seed: 0,
            expander_graphs: 10_000,
            exact_cap: crate::graph::DEFAULT_EXACT_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaReport {
    pub suite: Suite,
    pub cases: u64,
    /// Counterexamples; empty when the suite passes.
    pub violations: Vec<String>,
    /// Cases worth a look that are not failures (tight bounds, for instance).
    pub notes: Vec<String>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Runs one suite over its fixed grid.
pub fn run_lemma_suite(suite: Suite, opts: &LemmaOptions) -> Result<LemmaReport, AuxError> {
    let mut report = LemmaReport {
        suite,
        cases: 0,
        violations: Vec::new(),
        notes: Vec::new(),
    };
    match suite {
        Suite::Deletion => deletion_grid(&mut report)?,
        Suite::Paired => paired_grid(&mut report)?,
        Suite::Box => box_grid(&mut report)?,
        Suite::Expander => expander(&mut report, opts),
    }
    Ok(report)
}

/// Start values `0..base` in every coordinate.
fn grid(k: usize, base: i64) -> impl Iterator<Item = Vec<i64>> {
    let cells = (base as usize).pow(k as u32);
    (0..cells).map(move |code| {
        (0..k)
            .map(|i| (code / (base as usize).pow(i as u32) % base as usize) as i64)
            .collect()
    })
}

fn deletion_grid(report: &mut LemmaReport) -> Result<(), AuxError> {
    for k in 2..=6 {
        for c in 2..=6 {
            let bound = deletion_bound(k, c);
            let mut tight = 0;
            for start in grid(k, 3) {
                let value = deletion_brute_max(k, c, &start)?;
                report.cases += 1;
                if value > bound {
                    report
                        .violations
                        .push(format!("k={k} c={c} start {start:?}: {value} > {bound}"));
                } else if value == bound {
                    tight += 1;
                }
            }
            let start = deletion_tight_start(k, c);
            let value = deletion_brute_max(k, c, &start)?;
            report.cases += 1;
            if value != bound {
                report.violations.push(format!(
                    "k={k} c={c}: tight start {start:?} gives {value}, bound {bound}"
                ));
            }
            report
                .notes
                .push(format!("k={k} c={c}: bound {bound} attained by {tight} grid starts"));
        }
    }
    Ok(())
}

fn paired_grid(report: &mut LemmaReport) -> Result<(), AuxError> {
    for k in 2..=3 {
        for c in k..=6 {
            let (sharp, linear) = (paired_sharp_bound(k, c), paired_linear_bound(k, c));
            let mut worst = None;
            for start in grid(k, 2) {
                let paired: Vec<(i64, u8)> = start.iter().map(|&a| (a, 0)).collect();
                let value = paired_brute_max(k, c, &paired, PAIRED_BUDGET)?;
                report.cases += 1;
                if value > sharp || value > linear {
                    report
                        .violations
                        .push(format!("k={k} c={c} start {start:?}: {value} above {sharp} / {linear}"));
                }
                worst = Some(worst.map_or(value, |w: num_rational::Ratio<i64>| w.max(value)));
            }
            if let Some(w) = worst {
                report
                    .notes
                    .push(format!("k={k} c={c}: max {w}, bounds {sharp} and {linear}"));
            }
        }
    }
    Ok(())
}

fn box_grid(report: &mut LemmaReport) -> Result<(), AuxError> {
    for m in [4, 6] {
        for p in 1..=6 {
            for q in 1..=8 {
                report.cases += 1;
                if !boxmaker_condition(p, q, m)? {
                    continue;
                }
                let out = boxgame_playout(p, q, m, BoxBreakerPolicy::Exhaustive { budget: BOX_BUDGET })?;
                if out.winner != Player::Maker {
                    report
                        .violations
                        .push(format!("p={p} q={q} m={m}: condition holds, BoxBreaker wins"));
                }
            }
        }
    }
    Ok(())
}

/// The corpus is deterministic in the seed; graphs are checked in parallel.
fn expander(report: &mut LemmaReport, opts: &LemmaOptions) {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let corpus: Vec<SimpleGraph> = (0..opts.expander_graphs)
        .map(|_| {
            let n = rng.gen_range(6..=14);
            let p: f64 = rng.gen_range(0.15..0.7);
            SimpleGraph::from_edges(n, all_edges(n).filter(|_| rng.gen_bool(p)).collect::<Vec<_>>())
        })
        .collect();
    let findings: Vec<(bool, Option<String>)> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, g)| expander_facts(i, g, opts.exact_cap))
        .collect();
    report.cases = corpus.len() as u64;
    let expanders = findings.iter().filter(|f| f.0).count();
    report.violations.extend(findings.into_iter().filter_map(|f| f.1));
    report.notes.push(format!(
        "{expanders} of {} graphs are k-expanders for some k >= 1",
        corpus.len()
    ));
}

/// (is an expander, violation).
fn expander_facts(index: usize, g: &SimpleGraph, cap: usize) -> (bool, Option<String>) {
    let n = g.order();
    let k = match max_expansion(g, n / 3, DEFAULT_EXPANDER_BUDGET) {
        Ok(k) => k,
        Err(e) => return (false, Some(format!("graph {index}: {e}"))),
    };
    if k == 0 {
        return (false, None);
    }
    let smallest = g.connected_components().iter().map(Vec::len).min().unwrap_or(0);
    if smallest < 3 * k {
        return (
            true,
            Some(format!(
                "graph {index}: {k}-expander has a component of {smallest} vertices"
            )),
        );
    }
    if !g.is_connected() || is_hamiltonian_cycle(g, cap).unwrap_or(true) {
        return (true, None);
    }
    match boosters(g, cap) {
        Ok(found) if 2 * found.len() < (k + 1) * (k + 1) => (
            true,
            Some(format!(
                "graph {index}: connected non-Hamiltonian {k}-expander with {} boosters",
                found.len()
            )),
        ),
        Ok(_) => (true, None),
        Err(e) => (true, Some(format!("graph {index}: {e}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_on_small_settings() {
        let opts = LemmaOptions {
            expander_graphs: 300,
            ..LemmaOptions::default()
        };
        for suite in [Suite::Box, Suite::Deletion, Suite::Expander] {
            let report = run_lemma_suite(suite, &opts).unwrap();
            assert!(report.passed(), "{suite}: {:?}", report.violations);
            assert!(report.cases > 0);
        }
    }

    #[test]
    fn deletion_grid_size() {
        let report = run_lemma_suite(Suite::Deletion, &LemmaOptions::default()).unwrap();
        // sum over k of 5 * (3^k + 1)
        let expected: u64 = (2..=6u32).map(|k| 5 * (3u64.pow(k) + 1)).sum();
        assert_eq!(report.cases, expected);
    }

    #[test]
    fn suite_names_parse() {
        for suite in Suite::ALL {
            assert_eq!(suite.name().parse::<Suite>().unwrap(), suite);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }
}
