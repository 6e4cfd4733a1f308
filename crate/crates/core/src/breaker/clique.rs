use serde::Serialize;

use crate::board::{bits, full_mask, BiasFamily, Edge, GameState, Player};
use crate::breaker::star_edges;
use crate::strategy::{clique_edges, closing_edges, BreakerStrategy, FailureKind, StrategyFailure, StrategyReport};

fn require_clique(state: &GameState) -> Result<usize, StrategyFailure> {
    let bias = state.bias();
    if bias.family != BiasFamily::Clique {
        return Err(StrategyFailure::new(
            FailureKind::Unsupported,
            format!("needs a clique bias, got {bias}"),
        ));
    }
    Ok(bias.size)
}

fn last_maker_edge(state: &GameState) -> Option<Edge> {
    state
        .history()
        .iter()
        .rev()
        .find(|r| r.player == Player::Maker)
        .and_then(|r| r.edges.first().copied())
}

fn span(edges: &[Edge]) -> u128 {
    edges.iter().fold(0, |acc, e| acc | 1 << e.u() | 1 << e.v())
}

/// Double-star triangle Breaker with budget `floor(m/2)` edges per turn, so
/// every response fits inside one `K_m`.
#[derive(Clone, Debug, Default)]
pub struct CliqueTriangle {
    report: StrategyReport,
}

impl CliqueTriangle {
    pub fn new() -> CliqueTriangle {
        CliqueTriangle::default()
    }

    pub fn budget(m: usize) -> usize {
        (m / 2).max(1)
    }
}

impl BreakerStrategy for CliqueTriangle {
    fn id(&self) -> &'static str {
        "breaker.clique.triangle"
    }

    fn next_edges(&mut self, state: &GameState) -> Result<Vec<Edge>, StrategyFailure> {
        let m = require_clique(state)?;
        if state.is_exhausted() {
            return Ok(Vec::new());
        }
        let budget = Self::budget(m);
        let mut picked: Vec<Edge> = Vec::with_capacity(budget);
        let take = |picked: &mut Vec<Edge>, e: Edge| {
            if picked.len() < budget && state.is_unclaimed(e) && !picked.contains(&e) {
                picked.push(e);
            }
        };
        match last_maker_edge(state) {
            None => {
                for e in star_edges(state, 0, full_mask(state.n()), budget) {
                    take(&mut picked, e);
                }
            }
            Some(xy) => {
                let (x, y) = (xy.u(), xy.v());
                let mut fresh: Vec<Edge> = bits(state.maker_adj(x) & !(1 << y))
                    .map(|z| Edge::new(y, z))
                    .chain(bits(state.maker_adj(y) & !(1 << x)).map(|t| Edge::new(x, t)))
                    .collect();
                fresh.sort();
                for e in fresh.into_iter().chain(closing_edges(state)) {
                    take(&mut picked, e);
                }
                let at_x: Vec<usize> = bits(state.unclaimed_adj(x)).collect();
                let at_y: Vec<usize> = bits(state.unclaimed_adj(y)).collect();
                for i in 0..at_x.len().max(at_y.len()) {
                    if let Some(&z) = at_x.get(i) {
                        take(&mut picked, Edge::new(x, z));
                    }
                    if let Some(&t) = at_y.get(i) {
                        take(&mut picked, Edge::new(y, t));
                    }
                }
            }
        }
        for e in state.unclaimed_edges() {
            if picked.len() >= budget {
                break;
            }
            take(&mut picked, e);
        }
        let open_threats = closing_edges(state).iter().filter(|e| !picked.contains(e)).count();
        if open_threats > 0 {
            self.report.bump("unanswered_threat_turns");
        }
        assert!(
            span(&picked).count_ones() as usize <= m,
            "double-star response spans more than {m} vertices"
        );
        picked.sort();
        Ok(picked)
    }

    fn report(&self) -> StrategyReport {
        self.report.clone()
    }
}

/// Vertex groups for the first stage of the clique connectivity Breaker.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupPlan {
    /// Consecutive blocks of `floor(m/2)` vertices.
    pub groups: Vec<Vec<usize>>,
    /// Every unordered pair of groups once, lexicographic; a lone group is
    /// scheduled with itself.
    pub schedule: Vec<(usize, usize)>,
}

impl GroupPlan {
    pub fn new(n: usize, m: usize) -> GroupPlan {
        let h = (m / 2).max(1);
        let g = ((m + 2) / 4).max(1).min(n / h).max(1);
        let groups: Vec<Vec<usize>> = (0..g).map(|i| (i * h..(i + 1) * h).collect()).collect();
        let mut schedule: Vec<(usize, usize)> = (0..g).flat_map(|i| (i + 1..g).map(move |j| (i, j))).collect();
        if schedule.is_empty() {
            schedule.push((0, 0));
        }
        GroupPlan { groups, schedule }
    }

    pub fn group_mask(&self, i: usize) -> u128 {
        self.groups[i].iter().fold(0, |acc, &v| acc | 1 << v)
    }

    pub fn vertices(&self) -> u128 {
        (0..self.groups.len()).fold(0, |acc, i| acc | self.group_mask(i))
    }
}

/// Two-stage clique connectivity Breaker: build a Breaker clique out of group
/// pairs, then play the box-game balancing strategy on its Maker-free
/// vertices until one is isolated.
#[derive(Clone, Debug, Default)]
pub struct CliqueConnectivity {
    plan: Option<GroupPlan>,
    cursor: usize,
    survivors: Option<Vec<usize>>,
    report: StrategyReport,
}

impl CliqueConnectivity {
    pub fn new() -> CliqueConnectivity {
        CliqueConnectivity::default()
    }

    pub fn plan(&self) -> Option<&GroupPlan> {
        self.plan.as_ref()
    }

    fn enter_stage_two(&mut self, state: &GameState, plan: &GroupPlan) -> Vec<usize> {
        let survivors: Vec<usize> = bits(plan.vertices()).filter(|&v| state.maker_degree(v) == 0).collect();
        let maker_moves = state.turns_taken(Player::Maker) as i64;
        let size = plan.vertices().count_ones() as i64;
        self.report.set("stage1_maker_moves", maker_moves);
        self.report.set("stage2_survivors", survivors.len() as i64);
        if (survivors.len() as i64) < size - 2 * maker_moves {
            self.report.violations.push(format!(
                "{} survivors after {maker_moves} Maker moves from {size} group vertices",
                survivors.len()
            ));
        }
        let mask = survivors.iter().fold(0u128, |acc, &v| acc | 1 << v);
        if survivors
            .iter()
            .any(|&v| state.breaker_adj(v) & mask != mask & !(1 << v))
        {
            self.report
                .violations
                .push("survivors do not form a Breaker clique".into());
        }
        survivors
    }

    fn balancing_move(state: &GameState, survivors: &[usize], m: usize) -> Vec<Edge> {
        let isolate = survivors
            .iter()
            .copied()
            .filter(|&v| state.unclaimed_degree(v) > 0 && state.unclaimed_degree(v) < m)
            .min_by_key(|&v| (state.unclaimed_degree(v), v));
        if let Some(v) = isolate {
            return clique_edges(state, 1 << v | state.unclaimed_adj(v));
        }
        let mut rows: Vec<usize> = survivors.to_vec();
        rows.sort_by_key(|&v| (std::cmp::Reverse(state.unclaimed_degree(v)), v));
        rows.truncate((m / 2).max(1));
        let chosen = rows.iter().fold(0u128, |acc, &v| acc | 1 << v);
        let mut columns: Vec<(usize, usize)> = (0..state.n())
            .filter(|&x| chosen >> x & 1 == 0)
            .map(|x| ((state.unclaimed_adj(x) & chosen).count_ones() as usize, x))
            .filter(|&(weight, _)| weight > 0)
            .collect();
        columns.sort_by_key(|&(weight, x)| (std::cmp::Reverse(weight), x));
        let width = m - rows.len();
        let cols = columns.iter().take(width).fold(0u128, |acc, &(_, x)| acc | 1 << x);
        clique_edges(state, chosen | cols)
    }
}

impl BreakerStrategy for CliqueConnectivity {
    fn id(&self) -> &'static str {
        "breaker.clique.connectivity"
    }

    fn next_edges(&mut self, state: &GameState) -> Result<Vec<Edge>, StrategyFailure> {
        let m = require_clique(state)?;
        if state.is_exhausted() {
            return Ok(Vec::new());
        }
        let plan = self.plan.get_or_insert_with(|| GroupPlan::new(state.n(), m)).clone();
        if self.survivors.is_none() {
            while self.cursor < plan.schedule.len() {
                let (i, j) = plan.schedule[self.cursor];
                self.cursor += 1;
                let edges = clique_edges(state, plan.group_mask(i) | plan.group_mask(j));
                if !edges.is_empty() {
                    self.report.bump("stage1_moves");
                    return Ok(edges);
                }
            }
            let survivors = self.enter_stage_two(state, &plan);
            self.survivors = Some(survivors);
        }
        let survivors = self.survivors.as_mut().expect("stage 2 entered");
        survivors.retain(|&v| state.maker_degree(v) == 0);
        if survivors.is_empty() {
            return Err(StrategyFailure::new(
                FailureKind::StageFailure,
                "Maker touched every surviving clique vertex",
            ));
        }
        self.report.bump("stage2_moves");
        let edges = Self::balancing_move(state, survivors, m);
        if edges.is_empty() {
            return Ok(vec![state.unclaimed_edges()[0]]);
        }
        Ok(edges)
    }

    fn report(&self) -> StrategyReport {
        self.report.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::BiasSpec;
    use crate::win::{breaker_blocks, WinCondition};

    fn state(n: usize, m: usize, win: WinCondition, first: Player) -> GameState {
        GameState::new(n, BiasSpec::clique(m), win, first).unwrap()
    }

    #[test]
    fn first_response_is_a_double_star_at_the_maker_edge() {
        let mut s = state(10, 6, WinCondition::Triangle, Player::Maker);
        s.play_maker(Edge::new(0, 1)).unwrap();
        let mv = CliqueTriangle::new().next_edges(&s).unwrap();
        assert_eq!(mv.len(), 3);
        assert!(mv.iter().all(|e| e.touches(0) || e.touches(1)), "{mv:?}");
        assert!(s.legal_breaker_move(&mv));
    }

    #[test]
    fn threat_edge_is_claimed() {
        let mut s = state(10, 4, WinCondition::Triangle, Player::Maker);
        s.play_maker(Edge::new(0, 1)).unwrap();
        s.play_breaker(&[Edge::new(5, 6)]).unwrap();
        s.play_maker(Edge::new(0, 2)).unwrap();
        let mv = CliqueTriangle::new().next_edges(&s).unwrap();
        assert!(mv.contains(&Edge::new(1, 2)), "{mv:?}");
        assert!(s.legal_breaker_move(&mv));
    }

    #[test]
    fn group_plan_shapes() {
        let plan = GroupPlan::new(40, 10);
        assert_eq!(plan.groups.len(), 3);
        assert!(plan.groups.iter().all(|g| g.len() == 5));
        assert_eq!(plan.schedule, vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(GroupPlan::new(12, 4).schedule, vec![(0, 0)]);
    }

    #[test]
    fn balancing_rectangle_on_eight_vertices() {
        let mut s = state(20, 8, WinCondition::Connectivity, Player::Breaker);
        let group: Vec<Edge> = clique_edges(&s, 0b1111);
        s.play_breaker(&group).unwrap();
        s.play_maker(Edge::new(18, 19)).unwrap();
        let mv = CliqueConnectivity::balancing_move(&s, &[0, 1, 2, 3], 8);
        let crossing = mv.iter().filter(|e| (e.u() < 4) != (e.v() < 4)).count();
        assert_eq!(crossing, 16);
        assert_eq!(span(&mv).count_ones(), 8);
        assert!(s.legal_breaker_move(&mv));
    }

    #[test]
    fn survivor_is_isolated_when_maker_looks_away() {
        let mut s = state(8, 4, WinCondition::Connectivity, Player::Breaker);
        let mut br = CliqueConnectivity::new();
        for turn in 0..8 {
            let mv = br.next_edges(&s).unwrap();
            if turn == 0 {
                assert_eq!(mv, vec![Edge::new(0, 1)]);
            }
            s.play_breaker(&mv).unwrap();
            if breaker_blocks(&s, WinCondition::Connectivity).is_some() {
                assert!(br.report().violations.is_empty());
                return;
            }
            let e = *s.unclaimed_edges().iter().find(|e| e.u() > 1).unwrap();
            s.play_maker(e).unwrap();
        }
        panic!("no isolation");
    }
}
