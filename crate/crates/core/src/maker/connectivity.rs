use rand::seq::IteratorRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::board::{bits, BiasFamily, Edge, GameState};
use crate::danger::{
    average_never_increases, effective_bias, DangerLedger, DangerMode, PickRecord, DEFAULT_DEGREE_TARGET,
};
use crate::graph::SimpleGraph;
use crate::strategy::{FailureKind, MakerStrategy, StrategyFailure, StrategyReport};
use crate::win::{maker_graph, WinCondition};

/// Lowest canonical unclaimed edge with exactly one endpoint in `side`.
fn crossing_edge(state: &GameState, side: u128) -> Option<Edge> {
    state
        .unclaimed_edges()
        .into_iter()
        .find(|e| (side >> e.u() & 1) != (side >> e.v() & 1))
}

/// Grows one Maker tree, never closing a cycle.
#[derive(Clone, Debug, Default)]
pub struct TreeGrowth {
    root: Option<usize>,
    report: StrategyReport,
}

impl TreeGrowth {
    pub fn new() -> TreeGrowth {
        TreeGrowth::default()
    }

    fn check_invariant(&mut self, state: &GameState, tree: u128) {
        if state.bias().family != BiasFamily::Matching {
            return;
        }
        let i = state.maker_edges().len();
        let max_breaker = (0..state.n()).map(|v| state.breaker_degree(v)).max().unwrap_or(0);
        let size = tree.count_ones() as usize;
        self.report.raise("max_breaker_degree", max_breaker as i64);
        if max_breaker > i || size != i + 1 {
            self.report.violations.push(format!(
                "after {i} Maker moves: max Breaker degree {max_breaker}, tree size {size}"
            ));
        }
    }
}

impl MakerStrategy for TreeGrowth {
    fn id(&self) -> &'static str {
        "maker.connectivity.tree"
    }

    fn next_edge(&mut self, state: &GameState) -> Result<Edge, StrategyFailure> {
        let Some(root) = self.root else {
            let e = *state
                .unclaimed_edges()
                .first()
                .ok_or_else(|| StrategyFailure::new(FailureKind::Blocked, "board exhausted"))?;
            self.root = Some(e.u());
            return Ok(e);
        };
        let tree = maker_graph(state).component_mask(root);
        self.check_invariant(state, tree);
        if tree.count_ones() as usize == state.n() {
            return Err(StrategyFailure::new(FailureKind::Finished, "tree is spanning"));
        }
        crossing_edge(state, tree)
            .ok_or_else(|| StrategyFailure::new(FailureKind::Blocked, "no unclaimed edge leaves the tree"))
    }

    fn report(&self) -> StrategyReport {
        self.report.clone()
    }
}

/// Connectivity Maker driven by the component-based danger ledger: join the
/// component of the most endangered active vertex to another component and
/// deactivate that vertex.
#[derive(Clone, Debug, Default)]
pub struct ConnectivityDanger {
    ledger: Option<DangerLedger>,
    trace: Vec<PickRecord>,
    report: StrategyReport,
}

impl ConnectivityDanger {
    pub fn new() -> ConnectivityDanger {
        ConnectivityDanger::default()
    }

    pub fn ledger(&self) -> Option<&DangerLedger> {
        self.ledger.as_ref()
    }

    pub fn trace(&self) -> &[PickRecord] {
        &self.trace
    }

    fn join_edge(state: &GameState, g: &SimpleGraph, anchor: usize) -> Option<Edge> {
        let comp = g.component_mask(anchor);
        bits(state.unclaimed_adj(anchor) & !comp)
            .next()
            .map(|x| Edge::new(anchor, x))
            .or_else(|| crossing_edge(state, comp))
    }
}

impl MakerStrategy for ConnectivityDanger {
    fn id(&self) -> &'static str {
        "maker.connectivity.danger"
    }

    fn next_edge(&mut self, state: &GameState) -> Result<Edge, StrategyFailure> {
        let n = state.n();
        let ledger = self
            .ledger
            .get_or_insert_with(|| DangerLedger::new(n, DangerMode::component(n, effective_bias(state.bias()))));
        ledger.sync(state);
        let g = maker_graph(state);
        if g.is_connected() {
            return Err(StrategyFailure::new(FailureKind::Finished, "Maker graph is connected"));
        }
        let pick = ledger.argmax_active();
        let anchor = pick.unwrap_or_else(|| {
            (0..n)
                .find(|&v| g.component_mask(v).count_ones() as usize != n)
                .expect("graph is disconnected")
        });
        let edge = Self::join_edge(state, &g, anchor).ok_or_else(|| {
            StrategyFailure::new(
                FailureKind::Cut,
                format!("no unclaimed edge leaves the component of {anchor}"),
            )
        })?;
        let before = ledger.dangers().to_vec();
        if let Some(v) = pick {
            ledger.record_pick(v);
        }
        let mut preview = ledger.clone();
        preview.observe_maker_edge(edge);
        self.trace.push(PickRecord {
            pick,
            before,
            after: preview.dangers().to_vec(),
        });
        Ok(edge)
    }

    fn report(&self) -> StrategyReport {
        let mut report = self.report.clone();
        if let Err((turn, last)) = average_never_increases(&self.trace) {
            report.violations.push(format!(
                "average danger rose on Maker move {} (final vertex {last})",
                turn + 1
            ));
        }
        report.set("picks", self.trace.iter().filter(|r| r.pick.is_some()).count() as i64);
        report
    }
}

/// Minimum-degree Maker: take the active vertex of largest degree-danger and
/// claim a uniformly random unclaimed edge at it.
#[derive(Clone, Debug)]
pub struct MinDegreeDanger {
    target: Option<usize>,
    ledger: Option<DangerLedger>,
    rng: ChaCha8Rng,
    report: StrategyReport,
}

impl MinDegreeDanger {
    /// `target` overrides the degree goal; otherwise it is read from the
    /// game's `min-degree:d` condition, defaulting to 16.
    pub fn new(seed: u64, target: Option<usize>) -> MinDegreeDanger {
        MinDegreeDanger {
            target,
            ledger: None,
            rng: ChaCha8Rng::seed_from_u64(seed),
            report: StrategyReport::default(),
        }
    }

    pub fn target_for(&self, state: &GameState) -> usize {
        self.target.unwrap_or(match state.win() {
            WinCondition::MinDegree(d) => d as usize,
            _ => DEFAULT_DEGREE_TARGET,
        })
    }

    pub fn ledger(&self) -> Option<&DangerLedger> {
        self.ledger.as_ref()
    }
}

impl MakerStrategy for MinDegreeDanger {
    fn id(&self) -> &'static str {
        "maker.mindegree.danger"
    }

    fn next_edge(&mut self, state: &GameState) -> Result<Edge, StrategyFailure> {
        let target = self.target_for(state);
        let n = state.n();
        let ledger = self
            .ledger
            .get_or_insert_with(|| DangerLedger::new(n, DangerMode::degree(target, effective_bias(state.bias()))));
        ledger.sync(state);
        let worst = (0..n)
            .filter(|&v| ledger.is_active(v))
            .map(|v| state.breaker_degree(v))
            .max();
        if let Some(d) = worst {
            self.report.raise("max_active_breaker_degree", d as i64);
        }
        let v = ledger
            .argmax_active()
            .ok_or_else(|| StrategyFailure::new(FailureKind::Finished, format!("every vertex has degree {target}")))?;
        let x = bits(state.unclaimed_adj(v)).choose(&mut self.rng).ok_or_else(|| {
            StrategyFailure::new(
                FailureKind::Blocked,
                format!(
                    "vertex {v} has no unclaimed edge (Breaker degree {})",
                    state.breaker_degree(v)
                ),
            )
        })?;
        ledger.record_pick(v);
        Ok(Edge::new(v, x))
    }

    fn report(&self) -> StrategyReport {
        self.report.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::{BiasSpec, Player};

    #[test]
    fn tree_growth_opening_and_lowest_crossing_edge() {
        let mut s = GameState::new(8, BiasSpec::matching(4), WinCondition::Connectivity, Player::Maker).unwrap();
        let mut m = TreeGrowth::new();
        assert_eq!(m.next_edge(&s).unwrap(), Edge::new(0, 1));
        s.play_maker(Edge::new(0, 1)).unwrap();
        s.play_breaker(&[Edge::new(0, 2), Edge::new(1, 3)]).unwrap();
        assert_eq!(m.next_edge(&s).unwrap(), Edge::new(0, 3));
        assert!(m.report().violations.is_empty());
    }

    #[test]
    fn connectivity_danger_opening_and_star_response() {
        let s = GameState::new(12, BiasSpec::star(3), WinCondition::Connectivity, Player::Maker).unwrap();
        let mut m = ConnectivityDanger::new();
        assert_eq!(m.next_edge(&s).unwrap(), Edge::new(0, 1));
        assert_eq!(m.ledger().unwrap().deactivated(), &[0]);

        let mut s = GameState::new(12, BiasSpec::star(3), WinCondition::Connectivity, Player::Breaker).unwrap();
        s.play_breaker(&[Edge::new(5, 0), Edge::new(5, 1), Edge::new(5, 2)])
            .unwrap();
        let mut m = ConnectivityDanger::new();
        let e = m.next_edge(&s).unwrap();
        assert!(e.touches(5), "{e}");
        assert_eq!(m.ledger().unwrap().deactivated(), &[5]);
    }

    #[test]
    fn min_degree_maker_is_seeded_and_starts_at_zero() {
        let s = GameState::new(10, BiasSpec::matching(2), WinCondition::MinDegree(3), Player::Maker).unwrap();
        let a = MinDegreeDanger::new(7, None).next_edge(&s).unwrap();
        let b = MinDegreeDanger::new(7, None).next_edge(&s).unwrap();
        assert_eq!(a, b);
        assert!(a.touches(0));
    }
}
