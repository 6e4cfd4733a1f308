//! Triangle-building Makers for the three structured biases.

use rand_chacha::ChaCha8Rng;

use crate::board::{bits, star_center, BiasFamily, Edge, GameState, Player};
use crate::strategy::{closing_edge, FailureKind, MakerStrategy, StrategyFailure, StrategyReport};

fn unsupported(detail: String) -> StrategyFailure {
    StrategyFailure::new(FailureKind::Unsupported, detail)
}

fn forfeit(detail: &str) -> StrategyFailure {
    StrategyFailure::new(FailureKind::Forfeit, detail)
}

/// Fan Maker against clique bias.
///
/// Picks a centre `v` untouched by Breaker and keeps adding leaves `u_i` of
/// Breaker degree 0. Once two leaves exist, Breaker must touch every leaf each
/// turn or leave a closing edge, and the clique bias cannot cover them all.
#[derive(Clone, Debug, Default)]
pub struct TriangleVsClique {
    center: Option<usize>,
    leaves: Vec<usize>,
    turn: usize,
    report: StrategyReport,
}

impl TriangleVsClique {
    pub fn new() -> TriangleVsClique {
        TriangleVsClique::default()
    }

    pub fn center(&self) -> Option<usize> {
        self.center
    }

    pub fn leaves(&self) -> &[usize] {
        &self.leaves
    }

    fn fresh_leaf(&self, state: &GameState, v: usize, need_untouched: bool) -> Option<usize> {
        (0..state.n()).find(|&u| {
            u != v
                && !self.leaves.contains(&u)
                && (!need_untouched || state.breaker_degree(u) == 0)
                && state.unclaimed_adj(v) >> u & 1 == 1
        })
    }

    fn check_forcing(&mut self, state: &GameState) {
        if self.leaves.len() < 2 {
            return;
        }
        let all_touched = self.leaves.iter().all(|&u| state.breaker_degree(u) >= 1);
        if !all_touched && closing_edge(state).is_none() {
            self.report
                .violations
                .push(format!("turn {}: an untouched leaf without a closing edge", self.turn));
        }
    }
}

impl MakerStrategy for TriangleVsClique {
    fn id(&self) -> &'static str {
        "maker.triangle.clique"
    }

    fn next_edge(&mut self, state: &GameState) -> Result<Edge, StrategyFailure> {
        if state.bias().family != BiasFamily::Clique {
            return Err(unsupported(format!("needs clique bias, got {}", state.bias())));
        }
        self.turn += 1;
        self.check_forcing(state);
        if let Some(e) = closing_edge(state) {
            return Ok(e);
        }
        match self.center {
            None => {
                for v in (0..state.n()).filter(|&v| state.breaker_degree(v) == 0) {
                    if let Some(u) = self.fresh_leaf(state, v, true) {
                        self.center = Some(v);
                        self.leaves.push(u);
                        self.report.bump("fan_moves");
                        return Ok(Edge::new(v, u));
                    }
                }
                self.report.bump("forfeits");
                Err(forfeit("no Breaker-free vertex pair for the fan centre"))
            }
            Some(v) => match self.fresh_leaf(state, v, true) {
                Some(u) => {
                    self.leaves.push(u);
                    self.report.bump("fan_moves");
                    Ok(Edge::new(v, u))
                }
                None => {
                    self.report.bump("forfeits");
                    Err(forfeit("no Breaker-free vertex left to extend the fan"))
                }
            },
        }
    }

    /// Keeps growing the fan through any vertex still joinable to the centre.
    fn fallback_edge(&mut self, state: &GameState, rng: &mut ChaCha8Rng) -> Option<Edge> {
        if let Some(v) = self.center {
            if let Some(u) = self.fresh_leaf(state, v, false) {
                self.leaves.push(u);
                return Some(Edge::new(v, u));
            }
        }
        crate::strategy::random_edge(state, rng)
    }

    fn report(&self) -> StrategyReport {
        self.report.clone()
    }
}

/// Four-move Maker against matching bias: a cherry `u_1 v u_2`, then an edge
/// `v u` whose two triangle completions are both open. A matching cannot
/// claim both `u_1 u` and `u_2 u`. The cherry is the one leaving the most
/// third-leaf candidates open, ties to the lowest centre and leaf.
#[derive(Clone, Debug, Default)]
pub struct TriangleVsMatching {
    center: Option<usize>,
    leaves: Vec<usize>,
    report: StrategyReport,
}

impl TriangleVsMatching {
    pub fn new() -> TriangleVsMatching {
        TriangleVsMatching::default()
    }
}

impl MakerStrategy for TriangleVsMatching {
    fn id(&self) -> &'static str {
        "maker.triangle.matching"
    }

    fn next_edge(&mut self, state: &GameState) -> Result<Edge, StrategyFailure> {
        let n = state.n();
        if n < 10 {
            return Err(unsupported(format!("needs n >= 10, got {n}")));
        }
        if let Some(e) = closing_edge(state) {
            return Ok(e);
        }
        let open = |a: usize, b: usize| state.unclaimed_adj(a) >> b & 1 == 1;
        match self.leaves.len() {
            0 => {
                let e = *state
                    .unclaimed_edges()
                    .first()
                    .ok_or_else(|| forfeit("board exhausted"))?;
                self.leaves.push(e.u());
                self.leaves.push(e.v());
                Ok(e)
            }
            2 if self.center.is_none() => {
                let (a, b) = (self.leaves[0], self.leaves[1]);
                // third-leaf candidates still fully open after this move
                let viable = |c: usize, other: usize, u: usize| {
                    (0..n)
                        .filter(|&w| w != c && w != other && w != u)
                        .filter(|&w| open(c, w) && open(other, w) && open(u, w))
                        .count()
                };
                let pick = [(a, b), (b, a)]
                    .into_iter()
                    .flat_map(|(c, other)| {
                        (0..n)
                            .filter(move |&u| u != other && u != c && open(c, u))
                            .map(move |u| (c, other, u))
                    })
                    .max_by_key(|&(c, other, u)| (viable(c, other, u), std::cmp::Reverse((c, u))));
                match pick {
                    Some((c, other, u)) => {
                        self.center = Some(c);
                        self.leaves = vec![other, u];
                        Ok(Edge::new(c, u))
                    }
                    None => Err(forfeit("neither endpoint of the first edge can be extended")),
                }
            }
            2 => {
                let v = self.center.expect("centre fixed on move 2");
                let (u1, u2) = (self.leaves[0], self.leaves[1]);
                let pick = (0..n).find(|&u| u != v && u != u1 && u != u2 && open(v, u) && open(u1, u) && open(u2, u));
                match pick {
                    Some(u) => {
                        self.leaves.push(u);
                        Ok(Edge::new(v, u))
                    }
                    None => {
                        self.report.bump("forfeits");
                        Err(forfeit("no third leaf with both completions open"))
                    }
                }
            }
            _ => {
                self.report.bump("forfeits");
                Err(forfeit("both triangle completions were claimed"))
            }
        }
    }

    fn report(&self) -> StrategyReport {
        self.report.clone()
    }
}

/// Hub Maker against star bias: after one edge `w_1 w_2` away from Breaker's
/// first star, Maker grows a star at a hub `w` through leaves `x_i` that keep
/// at least one open edge to an earlier leaf.
#[derive(Clone, Debug, Default)]
pub struct TriangleVsStar {
    first: Option<Edge>,
    hub: Option<usize>,
    leaves: Vec<usize>,
    report: StrategyReport,
}

impl TriangleVsStar {
    pub fn new() -> TriangleVsStar {
        TriangleVsStar::default()
    }

    /// Whether `b < C(n-1, 2) / n`.
    pub fn bias_in_range(n: usize, b: usize) -> bool {
        2 * b * n < (n - 1) * (n - 2)
    }

    pub fn hub(&self) -> Option<usize> {
        self.hub
    }

    fn choose_hub(&self, state: &GameState, first: Edge) -> (usize, usize) {
        let (w1, w2) = (first.u(), first.v());
        let last_center = state
            .history()
            .iter()
            .rev()
            .find(|m| m.player == Player::Breaker)
            .and_then(|m| star_center(&m.edges));
        match last_center {
            Some(c) if c == w1 => (w2, w1),
            Some(c) if c == w2 => (w1, w2),
            _ if state.breaker_degree(w2) < state.breaker_degree(w1) => (w2, w1),
            _ => (w1, w2),
        }
    }
}

impl MakerStrategy for TriangleVsStar {
    fn id(&self) -> &'static str {
        "maker.triangle.star"
    }

    fn next_edge(&mut self, state: &GameState) -> Result<Edge, StrategyFailure> {
        let (n, bias) = (state.n(), state.bias());
        if bias.family != BiasFamily::Star || !Self::bias_in_range(n, bias.size) {
            return Err(unsupported(format!(
                "needs star bias b < C(n-1,2)/n, got {bias} on n = {n}"
            )));
        }
        if let Some(e) = closing_edge(state) {
            return Ok(e);
        }
        let Some(first) = self.first else {
            let e = state
                .unclaimed_edges()
                .into_iter()
                .find(|e| state.breaker_degree(e.u()) == 0 && state.breaker_degree(e.v()) == 0)
                .ok_or_else(|| forfeit("every vertex pair touches Breaker's first star"))?;
            self.first = Some(e);
            return Ok(e);
        };
        let w = match self.hub {
            Some(w) => w,
            None => {
                let (w, x1) = self.choose_hub(state, first);
                self.hub = Some(w);
                self.leaves.push(x1);
                w
            }
        };
        let earlier: u128 = self.leaves.iter().fold(0, |acc, &x| acc | 1 << x);
        let pick = (0..n).find(|&x| {
            x != w
                && earlier >> x & 1 == 0
                && state.unclaimed_adj(w) >> x & 1 == 1
                && state.unclaimed_adj(x) & earlier != 0
        });
        match pick {
            Some(x) => {
                self.leaves.push(x);
                Ok(Edge::new(w, x))
            }
            None => {
                self.report.bump("forfeits");
                let untouched = bits(state.unclaimed_adj(w)).count();
                Err(forfeit(&format!(
                    "no leaf with an open edge to an earlier leaf ({untouched} open hub edges)"
                )))
            }
        }
    }

    fn report(&self) -> StrategyReport {
        self.report.clone()
    }
}
