//! Three-stage Hamiltonicity Maker: minimum degree by danger, then
//! connectivity, then boosters until a Hamiltonian cycle appears.

use serde::{Deserialize, Serialize};

use crate::board::{BiasFamily, Edge, GameState};
use crate::graph::{
    boosters, find_hamilton_cycle, is_hamiltonian_cycle, is_k_expander, rotation_boosters, SimpleGraph,
    DEFAULT_EXACT_CAP, DEFAULT_EXPANDER_BUDGET,
};
use crate::maker::MinDegreeDanger;
use crate::strategy::{FailureKind, MakerStrategy, StrategyFailure, StrategyReport};
use crate::win::maker_graph;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HamiltonConfig {
    /// Expansion parameter, strictly between 0 and 1.
    pub delta: f64,
    /// Bias constant; `None` means half of `min(delta^10 / 36, c(delta))`.
    pub c0: Option<f64>,
    /// Expander parameter; `None` means `floor(delta^5 n)`.
    pub k: Option<usize>,
    /// Stage-1 degree goal, clamped to `n - 1`.
    pub min_degree: usize,
    /// Stage 1 ends after `stage1_factor * n` Maker moves at the latest.
    pub stage1_factor: usize,
}

impl Default for HamiltonConfig {
    fn default() -> Self {
        HamiltonConfig {
            delta: 0.1,
            c0: None,
            k: None,
            min_degree: 16,
            stage1_factor: 16,
        }
    }
}

impl HamiltonConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        if let Some(c0) = self.c0 {
            if c0 <= 0.0 {
                return Err(format!("c0 must be positive, got {c0}"));
            }
        }
        if self.min_degree == 0 || self.stage1_factor == 0 {
            return Err("min_degree and stage1_factor must be positive".into());
        }
        Ok(())
    }

    /// The constant `c` in `(0, 1)` with `a c - 2 c ln c = 1 - delta`, where
    /// `a` is 31 for matchings and 49 for stars.
    pub fn degree_constant(delta: f64, family: BiasFamily) -> f64 {
        let a = if family == BiasFamily::Star { 49.0 } else { 31.0 };
        let f = |c: f64| a * c - 2.0 * c * c.ln() - (1.0 - delta);
        let (mut lo, mut hi) = (1e-12, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn effective_c0(&self, family: BiasFamily) -> f64 {
        self.c0
            .unwrap_or_else(|| 0.5 * (self.delta.powi(10) / 36.0).min(Self::degree_constant(self.delta, family)))
    }

    pub fn asymptotic_k(&self, n: usize) -> f64 {
        self.delta.powi(5) * n as f64
    }

    pub fn effective_k(&self, n: usize) -> usize {
        self.k.unwrap_or(self.asymptotic_k(n).floor() as usize)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Degree,
    Connect,
    Boost,
}

#[derive(Clone, Debug)]
pub struct HamiltonThreeStage {
    config: HamiltonConfig,
    exact_cap: usize,
    stage: Stage,
    seed: u64,
    degree: Option<MinDegreeDanger>,
    stage1_moves: usize,
    report: StrategyReport,
}

impl HamiltonThreeStage {
    pub fn new(seed: u64, config: HamiltonConfig, exact_cap: usize) -> HamiltonThreeStage {
        HamiltonThreeStage {
            seed,
            degree: None,
            config,
            exact_cap,
            stage: Stage::Degree,
            stage1_moves: 0,
            report: StrategyReport::default(),
        }
    }

    pub fn with_defaults(seed: u64) -> HamiltonThreeStage {
        HamiltonThreeStage::new(seed, HamiltonConfig::default(), DEFAULT_EXACT_CAP)
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    fn is_hamiltonian(&self, g: &SimpleGraph) -> bool {
        if g.order() <= self.exact_cap {
            is_hamiltonian_cycle(g, self.exact_cap).unwrap_or(false)
        } else {
            find_hamilton_cycle(g).is_some()
        }
    }

    /// Expander parameter used for the entry checks: the configured `k`, or
    /// the largest `k` the graph actually achieves within the subset budget.
    fn entry_k(&self, g: &SimpleGraph) -> Option<usize> {
        match self.config.k {
            Some(k) => Some(k),
            None => {
                let mut best = 0;
                for k in 1..=g.order() / 3 {
                    if !Self::is_expander(g, k) {
                        break;
                    }
                    best = k;
                }
                Some(best)
            }
        }
    }

    fn is_expander(g: &SimpleGraph, k: usize) -> bool {
        k > 0
            && is_k_expander(g, k, DEFAULT_EXPANDER_BUDGET)
                .map(|c| c.expander)
                .unwrap_or(false)
    }

    fn enter_connect(&mut self, g: &SimpleGraph) {
        self.stage = Stage::Connect;
        let comps = g.connected_components();
        let smallest = comps.iter().map(Vec::len).min().unwrap_or(0);
        self.report.set("stage2_entry_move", self.stage1_moves as i64);
        self.report.set("stage2_components", comps.len() as i64);
        self.report.set("stage2_min_component", smallest as i64);
        if let Some(k) = self.entry_k(g) {
            self.report.set("stage2_k", k as i64);
            if Self::is_expander(g, k) && smallest < 3 * k {
                self.report.violations.push(format!(
                    "stage 2 entry: {k}-expander with a component of size {smallest} < {}",
                    3 * k
                ));
            }
        }
    }

    fn enter_boost(&mut self, state: &GameState, g: &SimpleGraph) {
        self.stage = Stage::Boost;
        if g.order() > self.exact_cap {
            return;
        }
        let Ok(all) = boosters(g, self.exact_cap) else {
            return;
        };
        let open = all.iter().filter(|e| state.is_unclaimed(**e)).count();
        self.report.set("stage3_boosters", all.len() as i64);
        self.report.set("stage3_open_boosters", open as i64);
        if let Some(k) = self.entry_k(g) {
            self.report.set("stage3_k", k as i64);
            let hamiltonian = self.is_hamiltonian(g);
            if Self::is_expander(g, k) && !hamiltonian && 2 * all.len() < (k + 1) * (k + 1) {
                self.report.violations.push(format!(
                    "stage 3 entry: connected {k}-expander with only {} boosters",
                    all.len()
                ));
            }
        }
    }

    fn booster_move(&self, state: &GameState, g: &SimpleGraph) -> Option<Edge> {
        let candidates = if g.order() <= self.exact_cap {
            boosters(g, self.exact_cap).unwrap_or_default()
        } else {
            rotation_boosters(g)
        };
        candidates.into_iter().find(|e| state.is_unclaimed(*e))
    }
}

impl MakerStrategy for HamiltonThreeStage {
    fn id(&self) -> &'static str {
        "maker.ham.threestage"
    }

    fn next_edge(&mut self, state: &GameState) -> Result<Edge, StrategyFailure> {
        let n = state.n();
        let g = maker_graph(state);
        if self.is_hamiltonian(&g) {
            return Err(StrategyFailure::new(
                FailureKind::Finished,
                "Maker graph is Hamiltonian",
            ));
        }
        let target = self.config.min_degree.min(n - 1);
        loop {
            match self.stage {
                Stage::Degree => {
                    let done = (0..n).all(|v| g.degree(v) >= target);
                    if done || self.stage1_moves >= self.config.stage1_factor * n {
                        self.enter_connect(&g);
                        continue;
                    }
                    let seed = self.seed;
                    let degree = self
                        .degree
                        .get_or_insert_with(|| MinDegreeDanger::new(seed, Some(target)));
                    match degree.next_edge(state) {
                        Ok(e) => {
                            self.stage1_moves += 1;
                            return Ok(e);
                        }
                        Err(_) => {
                            self.report.set("stage1_blocked", 1);
                            self.enter_connect(&g);
                        }
                    }
                }
                Stage::Connect => {
                    if g.is_connected() {
                        self.enter_boost(state, &g);
                        continue;
                    }
                    let comps = g.connected_components();
                    let smallest = comps.iter().min_by_key(|c| c.len()).expect("disconnected");
                    let side = smallest.iter().fold(0u128, |acc, &v| acc | 1 << v);
                    let edge = state
                        .unclaimed_edges()
                        .into_iter()
                        .find(|e| (side >> e.u() & 1) != (side >> e.v() & 1));
                    return edge.ok_or_else(|| {
                        StrategyFailure::new(FailureKind::StageFailure, "stage 2: Breaker cut a component off")
                    });
                }
                Stage::Boost => {
                    return self.booster_move(state, &g).ok_or_else(|| {
                        StrategyFailure::new(FailureKind::StageFailure, "stage 3: no unclaimed booster")
                    });
                }
            }
        }
    }

    fn report(&self) -> StrategyReport {
        let mut report = self.report.clone();
        if let Some(degree) = &self.degree {
            report.metrics.extend(degree.report().metrics);
        }
        report.set("stage1_moves", self.stage1_moves as i64);
        report
    }
}
