//! Per-vertex danger bookkeeping for the danger-driven Maker strategies.
//!
//! Two activity rules are supported:
//!
//! * [`DangerMode::ComponentActive`]: a vertex is active while its Maker
//!   component is smaller than a threshold and Maker has not picked it;
//!   danger is its Breaker degree while active.
//! * [`DangerMode::DegreeActive`]: a vertex is active while its Maker degree is
//!   below a target; danger is `d_B(v) - 2 b d_M(v)` while active.
//!
//! The ledger is updated incrementally from the game history. [`DangerLedger::recompute`]
//! rebuilds the same values from a [`GameState`] and serves as its oracle.

use serde::Serialize;

use crate::board::{BiasFamily, BiasSpec, Edge, GameState, Player};
use crate::dsu::UnionFind;
use crate::graph::SimpleGraph;
use crate::win::maker_graph;

/// Maker degree at which a vertex leaves the degree-based danger ledger.
pub const DEFAULT_DEGREE_TARGET: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum DangerMode {
    ComponentActive { threshold: usize },
    DegreeActive { target: usize, bias: usize },
}

impl DangerMode {
    /// Component rule with threshold `n - 2b` (zero if `2b >= n`).
    pub fn component(n: usize, bias: usize) -> DangerMode {
        DangerMode::ComponentActive {
            threshold: n.saturating_sub(2 * bias),
        }
    }

    pub fn degree(target: usize, bias: usize) -> DangerMode {
        DangerMode::DegreeActive { target, bias }
    }
}

/// Number of edges Breaker may claim per turn under `bias`; cliques count
/// every edge of `K_m`.
pub fn effective_bias(bias: BiasSpec) -> usize {
    match bias.family {
        BiasFamily::Clique => bias.size * (bias.size - 1) / 2,
        _ => bias.size,
    }
}

#[derive(Clone, Debug)]
pub struct DangerLedger {
    mode: DangerMode,
    maker_degree: Vec<usize>,
    breaker_degree: Vec<usize>,
    picked: Vec<bool>,
    component_small: Vec<bool>,
    deactivated: Vec<usize>,
    danger: Vec<i64>,
    components: UnionFind,
    seen: usize,
}

impl DangerLedger {
    pub fn new(n: usize, mode: DangerMode) -> DangerLedger {
        let small = match mode {
            DangerMode::ComponentActive { threshold } => 1 < threshold,
            DangerMode::DegreeActive { .. } => true,
        };
        DangerLedger {
            mode,
            maker_degree: vec![0; n],
            breaker_degree: vec![0; n],
            picked: vec![false; n],
            component_small: vec![small; n],
            deactivated: Vec::new(),
            danger: vec![0; n],
            components: UnionFind::new(n),
            seen: 0,
        }
    }

    pub fn mode(&self) -> DangerMode {
        self.mode
    }

    pub fn order(&self) -> usize {
        self.danger.len()
    }

    pub fn danger(&self, v: usize) -> i64 {
        self.danger[v]
    }

    pub fn dangers(&self) -> &[i64] {
        &self.danger
    }

    /// Vertices picked by Maker, in order (repeats allowed in degree mode).
    pub fn deactivated(&self) -> &[usize] {
        &self.deactivated
    }

    pub fn is_active(&self, v: usize) -> bool {
        match self.mode {
            DangerMode::ComponentActive { .. } => self.component_small[v] && !self.picked[v],
            DangerMode::DegreeActive { target, .. } => self.maker_degree[v] < target,
        }
    }

    /// Active vertex of maximum danger, lowest index on ties.
    pub fn argmax_active(&self) -> Option<usize> {
        (0..self.order())
            .filter(|&v| self.is_active(v))
            .fold(None, |best: Option<usize>, v| match best {
                Some(b) if self.danger[b] >= self.danger[v] => Some(b),
                _ => Some(v),
            })
    }

    fn refresh(&mut self, v: usize) {
        self.danger[v] = if !self.is_active(v) {
            0
        } else {
            match self.mode {
                DangerMode::ComponentActive { .. } => self.breaker_degree[v] as i64,
                DangerMode::DegreeActive { bias, .. } => {
                    self.breaker_degree[v] as i64 - 2 * bias as i64 * self.maker_degree[v] as i64
                }
            }
        };
    }

    pub fn observe_maker_edge(&mut self, e: Edge) {
        for x in [e.u(), e.v()] {
            self.maker_degree[x] += 1;
        }
        if let DangerMode::ComponentActive { threshold } = self.mode {
            if let Some(root) = self.components.union(e.u(), e.v()) {
                if self.components.component_size(root) >= threshold {
                    for w in 0..self.order() {
                        if self.component_small[w] && self.components.find(w) == root {
                            self.component_small[w] = false;
                            self.refresh(w);
                        }
                    }
                }
            }
        }
        self.refresh(e.u());
        self.refresh(e.v());
    }

    pub fn observe_breaker_edges(&mut self, edges: &[Edge]) {
        for e in edges {
            for x in [e.u(), e.v()] {
                self.breaker_degree[x] += 1;
                self.refresh(x);
            }
        }
    }

    /// Records Maker's pick of `v`; in component mode this deactivates it.
    pub fn record_pick(&mut self, v: usize) {
        self.deactivated.push(v);
        self.picked[v] = true;
        self.refresh(v);
    }

    /// Folds in every history entry not yet observed.
    pub fn sync(&mut self, state: &GameState) {
        let history = state.history();
        for m in &history[self.seen.min(history.len())..] {
            match m.player {
                Player::Maker => {
                    for &e in &m.edges {
                        self.observe_maker_edge(e);
                    }
                }
                Player::Breaker => self.observe_breaker_edges(&m.edges),
            }
        }
        self.seen = history.len();
    }

    /// Activity flags recomputed from `state` and the recorded picks.
    pub fn recompute_active(&self, state: &GameState) -> Vec<bool> {
        let n = state.n();
        match self.mode {
            DangerMode::ComponentActive { threshold } => {
                let g: SimpleGraph = maker_graph(state);
                (0..n)
                    .map(|v| {
                        let size = g.component_mask(v).count_ones() as usize;
                        size < threshold && !self.deactivated.contains(&v)
                    })
                    .collect()
            }
            DangerMode::DegreeActive { target, .. } => (0..n).map(|v| state.maker_degree(v) < target).collect(),
        }
    }

    /// Danger values recomputed from scratch.
    pub fn recompute(&self, state: &GameState) -> Vec<i64> {
        let active = self.recompute_active(state);
        (0..state.n())
            .map(|v| {
                if !active[v] {
                    return 0;
                }
                let d_b = state.breaker_degree(v) as i64;
                match self.mode {
                    DangerMode::ComponentActive { .. } => d_b,
                    DangerMode::DegreeActive { bias, .. } => d_b - 2 * bias as i64 * state.maker_degree(v) as i64,
                }
            })
            .collect()
    }

    /// Whether the incremental values match the from-scratch oracle.
    pub fn consistent_with(&self, state: &GameState) -> bool {
        let active: Vec<bool> = (0..self.order()).map(|v| self.is_active(v)).collect();
        active == self.recompute_active(state) && self.danger == self.recompute(state)
    }
}

/// Danger snapshot around one Maker move.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PickRecord {
    pub pick: Option<usize>,
    pub before: Vec<i64>,
    pub after: Vec<i64>,
}

/// Checks that no Maker move raised the average danger of the tracked set.
///
/// For a final vertex `last`, the tracked set before move `i` is the set of
/// picks from `i` on together with `last`; after the move it loses pick `i`.
/// Every vertex is tried as `last`. Returns the first `(move, last)` that
/// violates the property. Averages are compared by cross-multiplication.
pub fn average_never_increases(trace: &[PickRecord]) -> Result<(), (usize, usize)> {
    let Some(first) = trace.first() else {
        return Ok(());
    };
    let n = first.before.len();
    let picks: Vec<Option<usize>> = trace.iter().map(|r| r.pick).collect();
    for last in 0..n {
        for (i, rec) in trace.iter().enumerate() {
            let tracked = |from: usize| -> Vec<usize> {
                let mut set: Vec<usize> = picks[from..].iter().flatten().copied().collect();
                set.push(last);
                set.sort();
                set.dedup();
                set
            };
            let before_set = tracked(i);
            let after_set = tracked(i + 1);
            let sum = |set: &[usize], values: &[i64]| set.iter().map(|&v| values[v]).sum::<i64>();
            let lhs = sum(&after_set, &rec.after) * before_set.len() as i64;
            let rhs = sum(&before_set, &rec.before) * after_set.len() as i64;
            if lhs > rhs {
                return Err((i, last));
            }
        }
    }
    Ok(())
}
