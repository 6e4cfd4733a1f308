//! Goal detectors: has Maker completed her goal, and has Breaker already made
//! it unreachable?

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::board::{bits, full_mask, Edge, GameState, MoveRecord, Player};
use crate::dsu::UnionFind;
use crate::error::GameError;
use crate::graph::{self, SimpleGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum WinCondition {
    Triangle,
    Connectivity,
    HamiltonPath,
    HamiltonCycle,
    MinDegree(u32),
}

impl WinCondition {
    pub fn id(self) -> String {
        match self {
            WinCondition::Triangle => "triangle".into(),
            WinCondition::Connectivity => "connectivity".into(),
            WinCondition::HamiltonPath => "ham-path".into(),
            WinCondition::HamiltonCycle => "ham-cycle".into(),
            WinCondition::MinDegree(d) => format!("min-degree:{d}"),
        }
    }

    /// The id without its parameter, e.g. `min-degree`.
    pub fn kind(self) -> &'static str {
        match self {
            WinCondition::Triangle => "triangle",
            WinCondition::Connectivity => "connectivity",
            WinCondition::HamiltonPath => "ham-path",
            WinCondition::HamiltonCycle => "ham-cycle",
            WinCondition::MinDegree(_) => "min-degree",
        }
    }
}

impl From<WinCondition> for String {
    fn from(w: WinCondition) -> Self {
        w.id()
    }
}

impl TryFrom<String> for WinCondition {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl fmt::Display for WinCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for WinCondition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "triangle" => Ok(WinCondition::Triangle),
            "connectivity" => Ok(WinCondition::Connectivity),
            "ham-path" | "hamilton-path" => Ok(WinCondition::HamiltonPath),
            "ham-cycle" | "hamilton-cycle" | "hamiltonicity" => Ok(WinCondition::HamiltonCycle),
            _ => {
                let d = s
                    .strip_prefix("min-degree:")
                    .and_then(|d| d.parse::<u32>().ok())
                    .ok_or_else(|| format!("unknown win condition `{s}`"))?;
                if d == 0 {
                    return Err("min-degree needs d >= 1".into());
                }
                Ok(WinCondition::MinDegree(d))
            }
        }
    }
}

/// Why Maker can no longer reach her goal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BlockWitness {
    /// Every edge at this vertex is Breaker's.
    IsolatedVertex { vertex: usize },
    /// No non-Breaker edge crosses between the two sides.
    Cut { side_a: Vec<usize>, side_b: Vec<usize> },
    /// Too few non-Breaker edges remain at this vertex.
    LowDegree {
        vertex: usize,
        available: usize,
        needed: usize,
    },
    /// Every triangle contains a Breaker edge.
    NoCompletableTriangle,
    /// Non-Breaker graph is connected but has no Hamiltonian cycle/path.
    NotHamiltonian,
}

pub fn maker_graph(state: &GameState) -> SimpleGraph {
    SimpleGraph::from_adjacency((0..state.n()).map(|v| state.maker_adj(v)).collect())
}

/// Maker's edges together with every unclaimed edge.
pub fn open_graph(state: &GameState) -> SimpleGraph {
    let full = full_mask(state.n());
    SimpleGraph::from_adjacency(
        (0..state.n())
            .map(|v| full & !(1u128 << v) & !state.breaker_adj(v))
            .collect(),
    )
}

pub fn has_triangle(g: &SimpleGraph) -> bool {
    (0..g.order()).any(|u| {
        bits(g.neighbors(u))
            .filter(|&v| v > u)
            .any(|v| g.neighbors(u) & g.neighbors(v) != 0)
    })
}

/// Whether Maker's graph satisfies `win`. Hamiltonian goals use exact search
/// and refuse boards larger than `exact_cap`.
pub fn maker_wins(state: &GameState, win: WinCondition, exact_cap: usize) -> Result<bool, GameError> {
    let g = maker_graph(state);
    goal_met(&g, win, exact_cap)
}

pub(crate) fn goal_met(g: &SimpleGraph, win: WinCondition, exact_cap: usize) -> Result<bool, GameError> {
    Ok(match win {
        WinCondition::Triangle => has_triangle(g),
        WinCondition::Connectivity => g.is_connected(),
        WinCondition::HamiltonPath => {
            graph::check_cap(g, exact_cap)?;
            g.is_connected() && graph::has_hamiltonian_path(g, exact_cap)?
        }
        WinCondition::HamiltonCycle => {
            graph::check_cap(g, exact_cap)?;
            (0..g.order()).all(|v| g.degree(v) >= 2) && graph::is_hamiltonian_cycle(g, exact_cap)?
        }
        WinCondition::MinDegree(d) => (0..g.order()).all(|v| g.degree(v) >= d as usize),
    })
}

/// A certificate that no continuation lets Maker reach `win`, if one is found
/// by the cheap structural checks (isolation, cuts, degrees, triangles).
pub fn breaker_blocks(state: &GameState, win: WinCondition) -> Option<BlockWitness> {
    let open = open_graph(state);
    let n = state.n();
    match win {
        WinCondition::Triangle => (!has_triangle(&open)).then_some(BlockWitness::NoCompletableTriangle),
        WinCondition::Connectivity | WinCondition::HamiltonPath | WinCondition::HamiltonCycle => {
            if let Some(w) = cut_witness(&open) {
                return Some(w);
            }
            if win == WinCondition::HamiltonCycle {
                if let Some(v) = (0..n).find(|&v| open.degree(v) <= 1) {
                    return Some(BlockWitness::LowDegree {
                        vertex: v,
                        available: open.degree(v),
                        needed: 2,
                    });
                }
            }
            None
        }
        WinCondition::MinDegree(d) => (0..n)
            .find(|&v| open.degree(v) < d as usize)
            .map(|v| BlockWitness::LowDegree {
                vertex: v,
                available: open.degree(v),
                needed: d as usize,
            }),
    }
}

fn cut_witness(open: &SimpleGraph) -> Option<BlockWitness> {
    if let Some(v) = (0..open.order()).find(|&v| open.degree(v) == 0) {
        return Some(BlockWitness::IsolatedVertex { vertex: v });
    }
    let comps = open.connected_components();
    if comps.len() <= 1 {
        return None;
    }
    let side_a = comps[0].clone();
    let mut side_b: Vec<usize> = comps[1..].iter().flatten().copied().collect();
    side_b.sort();
    Some(BlockWitness::Cut { side_a, side_b })
}

/// Incrementally maintained connectivity of Maker's graph.
#[derive(Clone, Debug)]
pub struct ConnectivityTracker {
    uf: UnionFind,
    seen: usize,
}

impl ConnectivityTracker {
    pub fn new(n: usize) -> ConnectivityTracker {
        ConnectivityTracker {
            uf: UnionFind::new(n),
            seen: 0,
        }
    }

    pub fn add_maker_edge(&mut self, e: Edge) {
        self.uf.union(e.u(), e.v());
    }

    /// Folds in every history entry not yet seen.
    pub fn sync(&mut self, history: &[MoveRecord]) {
        for m in &history[self.seen..] {
            if m.player == Player::Maker {
                for e in &m.edges {
                    self.uf.union(e.u(), e.v());
                }
            }
        }
        self.seen = history.len();
    }

    pub fn is_spanning_connected(&self) -> bool {
        self.uf.components() == 1
    }

    pub fn components(&self) -> usize {
        self.uf.components()
    }

    pub fn same_component(&mut self, a: usize, b: usize) -> bool {
        self.uf.same(a, b)
    }

    pub fn component_size(&mut self, v: usize) -> usize {
        self.uf.component_size(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::BiasSpec;
    use crate::graph::DEFAULT_EXACT_CAP;

    fn play_maker_edges(n: usize, edges: &[Edge]) -> GameState {
        let mut s = GameState::new(n, BiasSpec::free(1), WinCondition::Triangle, Player::Maker).unwrap();
        let mut spare = crate::board::all_edges(n).filter(|e| !edges.contains(e));
        for (i, e) in edges.iter().enumerate() {
            s.play_maker(*e).unwrap();
            if i + 1 < edges.len() {
                let b = spare.find(|x| s.is_unclaimed(*x)).unwrap();
                s.play_breaker(&[b]).unwrap();
            }
        }
        s
    }

    #[test]
    fn triangle_detected() {
        let e = Edge::new;
        let s = play_maker_edges(5, &[e(0, 1), e(0, 2), e(1, 2)]);
        assert!(maker_wins(&s, WinCondition::Triangle, DEFAULT_EXACT_CAP).unwrap());
    }

    #[test]
    fn spanning_star_connected_but_no_hamilton_path() {
        let e = Edge::new;
        let star = [e(0, 1), e(0, 2), e(0, 3), e(0, 4)];
        let g = SimpleGraph::from_edges(5, star);
        assert!(goal_met(&g, WinCondition::Connectivity, 16).unwrap());
        assert!(!goal_met(&g, WinCondition::HamiltonPath, 16).unwrap());
        let c5 = SimpleGraph::cycle(5);
        assert!(goal_met(&c5, WinCondition::HamiltonCycle, 16).unwrap());
        assert!(goal_met(&c5, WinCondition::MinDegree(2), 16).unwrap());
        assert!(!goal_met(&c5, WinCondition::MinDegree(3), 16).unwrap());
    }

    #[test]
    fn hamilton_detectors_respect_cap() {
        let s = GameState::new(17, BiasSpec::free(1), WinCondition::HamiltonCycle, Player::Maker).unwrap();
        assert_eq!(
            maker_wins(&s, WinCondition::HamiltonCycle, 16),
            Err(GameError::ExceedsExactCap { n: 17, cap: 16 })
        );
        assert!(!maker_wins(&s, WinCondition::Connectivity, 16).unwrap());
    }

    #[test]
    fn isolated_vertex_witness() {
        let mut s = GameState::new(5, BiasSpec::star(4), WinCondition::Connectivity, Player::Breaker).unwrap();
        assert_eq!(breaker_blocks(&s, WinCondition::Connectivity), None);
        let star: Vec<Edge> = [0, 1, 2, 4].iter().map(|&x| Edge::new(3, x)).collect();
        s.play_breaker(&star).unwrap();
        assert_eq!(
            breaker_blocks(&s, WinCondition::Connectivity),
            Some(BlockWitness::IsolatedVertex { vertex: 3 })
        );
    }

    #[test]
    fn cut_witness_between_two_sides() {
        // Breaker owns every edge between {0,1} and {2,3,4}
        let mut s = GameState::new(5, BiasSpec::free(6), WinCondition::Connectivity, Player::Breaker).unwrap();
        let cross: Vec<Edge> = [0, 1]
            .iter()
            .flat_map(|&a| [2, 3, 4].map(|b| Edge::new(a, b)))
            .collect();
        s.play_breaker(&cross).unwrap();
        assert_eq!(
            breaker_blocks(&s, WinCondition::Connectivity),
            Some(BlockWitness::Cut {
                side_a: vec![0, 1],
                side_b: vec![2, 3, 4]
            })
        );
        assert!(breaker_blocks(&s, WinCondition::HamiltonCycle).is_some());
    }

    #[test]
    fn win_condition_ids_roundtrip() {
        for w in [
            WinCondition::Triangle,
            WinCondition::Connectivity,
            WinCondition::HamiltonPath,
            WinCondition::HamiltonCycle,
            WinCondition::MinDegree(16),
        ] {
            assert_eq!(w.id().parse::<WinCondition>().unwrap(), w);
        }
        assert!("min-degree:0".parse::<WinCondition>().is_err());
    }
}
