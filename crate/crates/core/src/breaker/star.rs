use serde::Serialize;

use crate::board::{full_mask, BiasFamily, Edge, GameState};
use crate::breaker::star_edges;
use crate::strategy::{BreakerStrategy, FailureKind, StrategyFailure, StrategyReport};

/// Vertex roles for the two-stage star connectivity Breaker.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsolationPlan {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub probes: Vec<usize>,
    /// Required target count `8b - 3n`.
    pub t: usize,
    /// `u_1..u_t`, fixed on entry to the second stage.
    pub targets: Vec<usize>,
}

impl IsolationPlan {
    pub fn new(n: usize, b: usize) -> Result<IsolationPlan, StrategyFailure> {
        if 2 * b >= n || 8 * b <= 3 * n || n - 1 - 2 * b > b {
            return Err(StrategyFailure::new(
                FailureKind::Unsupported,
                format!("star bias {b} on n={n} needs 3n < 8b, 2b < n and n-1-2b <= b"),
            ));
        }
        Ok(IsolationPlan {
            a: (0..b).collect(),
            b: (b..2 * b).collect(),
            probes: (2 * b..n).collect(),
            t: 8 * b - 3 * n,
            targets: Vec::new(),
        })
    }

    fn mask(vs: &[usize]) -> u128 {
        vs.iter().fold(0, |acc, &v| acc | 1 << v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    Probe { index: usize, step: u8 },
    Isolate { index: usize },
}

/// Star connectivity Breaker: probe each outside vertex with stars into `A`
/// and `B`, then chain stars through a Breaker-independent target set until
/// the last target is isolated.
#[derive(Clone, Debug)]
pub struct StarConnectivity {
    plan: Option<IsolationPlan>,
    phase: Phase,
    report: StrategyReport,
}

impl Default for StarConnectivity {
    fn default() -> Self {
        StarConnectivity {
            plan: None,
            phase: Phase::Probe { index: 0, step: 0 },
            report: StrategyReport::default(),
        }
    }
}

impl StarConnectivity {
    pub fn new() -> StarConnectivity {
        StarConnectivity::default()
    }

    pub fn plan(&self) -> Option<&IsolationPlan> {
        self.plan.as_ref()
    }

    /// Lowest Maker-free vertex whose remaining edges fit in one star.
    fn isolation_target(state: &GameState, b: usize) -> Option<usize> {
        (0..state.n()).find(|&v| {
            let open = state.unclaimed_degree(v);
            state.maker_degree(v) == 0 && open > 0 && open <= b
        })
    }

    fn choose_targets(&mut self, state: &GameState) -> Result<(), StrategyFailure> {
        let n = state.n();
        let plan = self.plan.as_mut().expect("plan exists");
        let b = plan.a.len();
        let candidates: Vec<usize> = plan
            .a
            .iter()
            .chain(&plan.b)
            .copied()
            .filter(|&v| state.maker_degree(v) == 0 && state.breaker_degree(v) >= n - 2 * b)
            .collect();
        self.report.set("stage2_candidates", candidates.len() as i64);
        self.report.set("stage2_required", plan.t as i64);
        plan.targets = candidates.into_iter().take(plan.t).collect();
        let mask = IsolationPlan::mask(&plan.targets);
        if plan.targets.iter().any(|&u| state.breaker_adj(u) & mask != 0) {
            self.report
                .violations
                .push("stage 2 targets are adjacent in Breaker's graph".into());
        }
        if plan.targets.len() < plan.t {
            self.report.violations.push(format!(
                "stage 2 entry: {} targets, need {}",
                plan.targets.len(),
                plan.t
            ));
            return Err(StrategyFailure::new(
                FailureKind::StageFailure,
                format!("only {} of {} targets survived stage 1", plan.targets.len(), plan.t),
            ));
        }
        Ok(())
    }
}

impl BreakerStrategy for StarConnectivity {
    fn id(&self) -> &'static str {
        "breaker.star.connectivity"
    }

    fn next_edges(&mut self, state: &GameState) -> Result<Vec<Edge>, StrategyFailure> {
        let n = state.n();
        let bias = state.bias();
        if bias.family != BiasFamily::Star {
            return Err(StrategyFailure::new(
                FailureKind::Unsupported,
                format!("needs a star bias, got {bias}"),
            ));
        }
        let b = bias.size;
        if self.plan.is_none() {
            self.plan = Some(IsolationPlan::new(n, b)?);
        }
        if state.is_exhausted() {
            return Ok(Vec::new());
        }
        if let Some(v) = Self::isolation_target(state, b) {
            let plan = self.plan.as_ref().expect("plan exists");
            if let Phase::Probe { index, step: 2 } = self.phase {
                if plan.probes.get(index) == Some(&v) {
                    self.report.bump("probe_deviations");
                }
            }
            self.report.bump("isolation_moves");
            return Ok(star_edges(state, v, full_mask(n), b));
        }
        loop {
            let plan = self.plan.as_ref().expect("plan exists");
            match self.phase {
                Phase::Probe { index, step } => {
                    let Some(&v) = plan.probes.get(index) else {
                        self.choose_targets(state)?;
                        self.phase = Phase::Isolate { index: 0 };
                        continue;
                    };
                    let leaves = match step {
                        0 => IsolationPlan::mask(&plan.a),
                        1 => IsolationPlan::mask(&plan.b),
                        _ => {
                            self.phase = Phase::Probe {
                                index: index + 1,
                                step: 0,
                            };
                            continue;
                        }
                    };
                    self.phase = Phase::Probe { index, step: step + 1 };
                    let edges = star_edges(state, v, leaves, b);
                    if !edges.is_empty() {
                        self.report.bump("stage1_moves");
                        return Ok(edges);
                    }
                }
                Phase::Isolate { index } => {
                    let Some(&u) = plan.targets.get(index) else {
                        return Err(StrategyFailure::new(
                            FailureKind::StageFailure,
                            "stage 2 finished without isolating a target",
                        ));
                    };
                    self.phase = Phase::Isolate { index: index + 1 };
                    let later = IsolationPlan::mask(&plan.targets[index + 1..]);
                    let mut edges = star_edges(state, u, later, b);
                    for e in star_edges(state, u, full_mask(n) & !later, b) {
                        if edges.len() >= b {
                            break;
                        }
                        edges.push(e);
                    }
                    edges.sort();
                    if !edges.is_empty() {
                        self.report.bump("stage2_moves");
                        return Ok(edges);
                    }
                }
            }
        }
    }

    fn report(&self) -> StrategyReport {
        self.report.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::{BiasSpec, Player};
    use crate::win::{breaker_blocks, BlockWitness, WinCondition};

    fn fresh(n: usize, b: usize) -> GameState {
        GameState::new(n, BiasSpec::star(b), WinCondition::Connectivity, Player::Breaker).unwrap()
    }

    #[test]
    fn plan_sizes_at_fourteen() {
        let plan = IsolationPlan::new(14, 6).unwrap();
        assert_eq!(plan.t, 6);
        assert_eq!(plan.probes, vec![12, 13]);
        assert!(IsolationPlan::new(14, 5).is_err());
    }

    #[test]
    fn final_star_fits_the_budget() {
        for n in 14usize..=70 {
            let b = (3 * n).div_ceil(7);
            if let Ok(plan) = IsolationPlan::new(n, b) {
                assert!(plan.t - 1 + (n - 2 * b) + b >= n - 1, "n={n}");
            }
        }
    }

    #[test]
    fn unanswered_probe_is_isolated() {
        let mut s = fresh(14, 6);
        let mut br = StarConnectivity::new();
        let first = br.next_edges(&s).unwrap();
        assert!(first.iter().all(|e| e.touches(12)));
        s.play_breaker(&first).unwrap();
        s.play_maker(Edge::new(0, 1)).unwrap();
        let second = br.next_edges(&s).unwrap();
        s.play_breaker(&second).unwrap();
        s.play_maker(Edge::new(0, 2)).unwrap();
        let third = br.next_edges(&s).unwrap();
        s.play_breaker(&third).unwrap();
        assert_eq!(
            breaker_blocks(&s, WinCondition::Connectivity),
            Some(BlockWitness::IsolatedVertex { vertex: 12 })
        );
        assert_eq!(br.report().metric("probe_deviations"), Some(1));
    }

    #[test]
    fn answered_probes_reach_stage_two_with_enough_targets() {
        let mut s = fresh(14, 6);
        let mut br = StarConnectivity::new();
        for _ in 0..40 {
            if s.is_exhausted() || breaker_blocks(&s, WinCondition::Connectivity).is_some() {
                break;
            }
            let mv = br.next_edges(&s).unwrap();
            s.play_breaker(&mv).unwrap();
            // answer at the probe or target Breaker just starred
            let c = crate::board::star_center(&mv).unwrap();
            let reply = s
                .unclaimed_edges()
                .into_iter()
                .find(|e| e.touches(c))
                .or_else(|| s.unclaimed_edges().first().copied());
            match reply {
                Some(e) => s.play_maker(e).unwrap(),
                None => break,
            }
        }
        let report = br.report();
        assert!(report.violations.is_empty(), "{:?}", report.violations);
        assert!(report.metric("stage2_candidates").unwrap() >= 6);
        assert!(breaker_blocks(&s, WinCondition::Connectivity).is_some());
    }
}
