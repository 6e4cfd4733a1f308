use crate::board::{BiasFamily, Edge, GameState};
use crate::graph::one_factorization;
use crate::strategy::{BreakerStrategy, FailureKind, StrategyFailure, StrategyReport};

/// Connectivity Breaker for `Matching(n/2)` on even `n`: claim the remaining
/// edges of one perfect matching of a fixed 1-factorization per turn.
///
/// Factors already fully claimed are skipped, so the board is exhausted after
/// at most `n - 1` Breaker turns and Maker holds at most `n - 2` edges.
#[derive(Clone, Debug, Default)]
pub struct Factorization {
    factors: Vec<Vec<Edge>>,
    cursor: usize,
    report: StrategyReport,
}

impl Factorization {
    pub fn new() -> Factorization {
        Factorization::default()
    }

    pub fn factors(&self) -> &[Vec<Edge>] {
        &self.factors
    }
}

impl BreakerStrategy for Factorization {
    fn id(&self) -> &'static str {
        "breaker.matching.factorization"
    }

    fn next_edges(&mut self, state: &GameState) -> Result<Vec<Edge>, StrategyFailure> {
        let n = state.n();
        let bias = state.bias();
        if n % 2 == 1 || bias.family != BiasFamily::Matching || bias.size < n / 2 {
            return Err(StrategyFailure::new(
                FailureKind::Unsupported,
                format!("needs even n and a matching bias of at least n/2, got n={n}, {bias}"),
            ));
        }
        if self.factors.is_empty() {
            self.factors = one_factorization(n).expect("n is even");
        }
        while let Some(factor) = self.factors.get(self.cursor) {
            self.cursor += 1;
            let open: Vec<Edge> = factor.iter().copied().filter(|e| state.is_unclaimed(*e)).collect();
            if !open.is_empty() {
                self.report.set("factor", self.cursor as i64);
                return Ok(open);
            }
            self.report.bump("skipped_factors");
        }
        Ok(Vec::new())
    }

    fn report(&self) -> StrategyReport {
        self.report.clone()
    }
}
