//! Edge-ownership board on `K_n` with structure-constrained Breaker moves.
//!
//! Vertices are `0..n`. Edges are stored canonically (`u < v`) and the
//! ownership array is indexed by the row-major upper-triangle pairing
//!
//! ```text
//! index(u, v) = u * (2n - u - 1) / 2 + (v - u - 1)
//! ```
//!
//! so index order coincides with the lexicographic order of `(u, v)`.
//! Records written on one machine therefore replay identically anywhere.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::GameError;
use crate::win::WinCondition;

/// Largest supported board order; adjacency rows are `u128` bitsets.
pub const MAX_ORDER: usize = 128;

/// An edge of `K_n` in canonical order `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "[usize; 2]", try_from = "[usize; 2]")]
pub struct Edge {
    u: usize,
    v: usize,
}

impl Edge {
    /// Builds the canonical edge on `{a, b}`.
    ///
    /// Panics if `a == b`; use [`Edge::try_new`] for untrusted input.
    pub fn new(a: usize, b: usize) -> Edge {
        Edge::try_new(a, b).expect("loops are not edges")
    }

    pub fn try_new(a: usize, b: usize) -> Option<Edge> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Edge { u: a, v: b }),
            std::cmp::Ordering::Greater => Some(Edge { u: b, v: a }),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn u(self) -> usize {
        self.u
    }

    pub fn v(self) -> usize {
        self.v
    }

    pub fn touches(self, x: usize) -> bool {
        self.u == x || self.v == x
    }

    /// The endpoint that is not `x`.
    pub fn other(self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }

    /// Position of this edge in the flat ownership array of `K_n`.
    pub fn index(self, n: usize) -> usize {
        self.u * (2 * n - self.u - 1) / 2 + (self.v - self.u - 1)
    }

    /// Inverse of [`Edge::index`].
    pub fn from_index(n: usize, mut idx: usize) -> Edge {
        for u in 0..n {
            let row = n - u - 1;
            if idx < row {
                return Edge { u, v: u + 1 + idx };
            }
            idx -= row;
        }
        panic!("edge index out of range for K_{n}");
    }
}

impl From<Edge> for [usize; 2] {
    fn from(e: Edge) -> Self {
        [e.u, e.v]
    }
}

impl TryFrom<[usize; 2]> for Edge {
    type Error = String;

    fn try_from([a, b]: [usize; 2]) -> Result<Self, Self::Error> {
        Edge::try_new(a, b).ok_or_else(|| format!("({a},{b}) is a loop"))
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.u, self.v)
    }
}

/// Number of edges of `K_n`.
pub fn edge_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// All edges of `K_n` in canonical order.
pub fn all_edges(n: usize) -> impl Iterator<Item = Edge> {
    (0..n).flat_map(move |u| (u + 1..n).map(move |v| Edge { u, v }))
}

/// Iterates the set bits of an adjacency row.
pub fn bits(mut word: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if word == 0 {
            None
        } else {
            let i = word.trailing_zeros() as usize;
            word &= word - 1;
            Some(i)
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Maker,
    Breaker,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Maker => Player::Breaker,
            Player::Breaker => Player::Maker,
        }
    }

    /// One-letter tag used in game records.
    pub fn tag(self) -> &'static str {
        match self {
            Player::Maker => "M",
            Player::Breaker => "B",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Player> {
        match tag {
            "M" => Some(Player::Maker),
            "B" => Some(Player::Breaker),
            _ => None,
        }
    }

    pub fn parse(s: &str) -> Option<Player> {
        match s.to_ascii_lowercase().as_str() {
            "m" | "maker" => Some(Player::Maker),
            "b" | "breaker" => Some(Player::Breaker),
            _ => None,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Maker => "maker",
            Player::Breaker => "breaker",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mark {
    Unclaimed,
    Maker,
    Breaker,
}

/// The structure family Breaker's per-turn edge set must fit into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BiasFamily {
    /// A subgraph of `K_m` (edges spanning at most `m` vertices).
    Clique,
    /// At most `b` pairwise vertex-disjoint edges.
    Matching,
    /// At most `b` edges sharing one common vertex.
    Star,
    /// Any `b` edges (the classical bias).
    Free,
}

impl BiasFamily {
    pub const ALL: [BiasFamily; 4] = [
        BiasFamily::Clique,
        BiasFamily::Matching,
        BiasFamily::Star,
        BiasFamily::Free,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BiasFamily::Clique => "clique",
            BiasFamily::Matching => "matching",
            BiasFamily::Star => "star",
            BiasFamily::Free => "free",
        }
    }

    pub fn parse(s: &str) -> Option<BiasFamily> {
        BiasFamily::ALL.into_iter().find(|f| f.name() == s.to_ascii_lowercase())
    }
}

impl fmt::Display for BiasFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Breaker's move structure: family plus size (`m` for cliques, `b` otherwise).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BiasSpec {
    pub family: BiasFamily,
    pub size: usize,
}

impl BiasSpec {
    pub fn new(family: BiasFamily, size: usize) -> Result<BiasSpec, GameError> {
        let min = if family == BiasFamily::Clique { 2 } else { 1 };
        if size < min {
            return Err(GameError::InvalidBias(format!(
                "{family} bias needs size >= {min}, got {size}"
            )));
        }
        Ok(BiasSpec { family, size })
    }

    pub fn clique(m: usize) -> BiasSpec {
        BiasSpec::new(BiasFamily::Clique, m).expect("clique size >= 2")
    }

    pub fn matching(b: usize) -> BiasSpec {
        BiasSpec::new(BiasFamily::Matching, b).expect("matching size >= 1")
    }

    pub fn star(b: usize) -> BiasSpec {
        BiasSpec::new(BiasFamily::Star, b).expect("star size >= 1")
    }

    pub fn free(b: usize) -> BiasSpec {
        BiasSpec::new(BiasFamily::Free, b).expect("free size >= 1")
    }

    /// Maximum number of edges one Breaker move may claim.
    pub fn max_edges(self) -> usize {
        match self.family {
            BiasFamily::Clique => edge_count(self.size),
            _ => self.size,
        }
    }

    /// Checks the shape constraint only (ownership is not consulted).
    /// The empty set fits every family.
    pub fn fits(self, edges: &[Edge]) -> bool {
        match self.family {
            BiasFamily::Free => edges.len() <= self.size,
            BiasFamily::Clique => {
                let mut seen: u128 = 0;
                let mut wide: Vec<usize> = Vec::new();
                for e in edges {
                    for x in [e.u, e.v] {
                        if x < 128 {
                            seen |= 1 << x;
                        } else if !wide.contains(&x) {
                            wide.push(x);
                        }
                    }
                }
                seen.count_ones() as usize + wide.len() <= self.size
            }
            BiasFamily::Matching => {
                if edges.len() > self.size {
                    return false;
                }
                let mut used: Vec<usize> = Vec::with_capacity(2 * edges.len());
                for e in edges {
                    if used.contains(&e.u) || used.contains(&e.v) {
                        return false;
                    }
                    used.push(e.u);
                    used.push(e.v);
                }
                true
            }
            BiasFamily::Star => {
                if edges.len() > self.size {
                    return false;
                }
                star_center(edges).is_some() || edges.is_empty()
            }
        }
    }
}

impl fmt::Display for BiasSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.family, self.size)
    }
}

/// Parses the `family:size` form printed by `Display`.
impl std::str::FromStr for BiasSpec {
    type Err = GameError;

    fn from_str(s: &str) -> Result<BiasSpec, GameError> {
        let bad = || GameError::InvalidBias(format!("`{s}` is not family:size"));
        let (family, size) = s.split_once(':').ok_or_else(bad)?;
        let family = BiasFamily::parse(family.trim()).ok_or_else(bad)?;
        let size = size.trim().parse().map_err(|_| bad())?;
        BiasSpec::new(family, size)
    }
}

/// A vertex shared by every edge, preferring the lower endpoint of a lone edge.
pub fn star_center(edges: &[Edge]) -> Option<usize> {
    let first = edges.first()?;
    [first.u, first.v]
        .into_iter()
        .find(|&c| edges.iter().all(|e| e.touches(c)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveRecord {
    pub player: Player,
    /// Canonically sorted, pairwise distinct.
    pub edges: Vec<Edge>,
}

/// A position of a structure-biased Maker-Breaker game on `K_n`.
///
/// Transitions either return a new state (`apply_*`) or mutate in place
/// (`play_*`); both validate identically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameState {
    n: usize,
    ownership: Vec<Mark>,
    to_move: Player,
    bias: BiasSpec,
    win: WinCondition,
    first_mover: Player,
    history: Vec<MoveRecord>,
    maker_adj: Vec<u128>,
    breaker_adj: Vec<u128>,
    unclaimed: usize,
}

impl GameState {
    pub fn new(n: usize, bias: BiasSpec, win: WinCondition, first_mover: Player) -> Result<GameState, GameError> {
        if !(3..=MAX_ORDER).contains(&n) {
            return Err(GameError::InvalidBoard(n));
        }
        BiasSpec::new(bias.family, bias.size)?;
        Ok(GameState {
            n,
            ownership: vec![Mark::Unclaimed; edge_count(n)],
            to_move: first_mover,
            bias,
            win,
            first_mover,
            history: Vec::new(),
            maker_adj: vec![0; n],
            breaker_adj: vec![0; n],
            unclaimed: edge_count(n),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bias(&self) -> BiasSpec {
        self.bias
    }

    pub fn win(&self) -> WinCondition {
        self.win
    }

    pub fn first_mover(&self) -> Player {
        self.first_mover
    }

    pub fn to_move(&self) -> Player {
        self.to_move
    }

    pub fn history(&self) -> &[MoveRecord] {
        &self.history
    }

    pub fn owner(&self, e: Edge) -> Mark {
        self.ownership[e.index(self.n)]
    }

    pub fn is_unclaimed(&self, e: Edge) -> bool {
        self.owner(e) == Mark::Unclaimed
    }

    pub fn ownership(&self) -> &[Mark] {
        &self.ownership
    }

    pub fn unclaimed_count(&self) -> usize {
        self.unclaimed
    }

    pub fn is_exhausted(&self) -> bool {
        self.unclaimed == 0
    }

    pub fn maker_adj(&self, v: usize) -> u128 {
        self.maker_adj[v]
    }

    pub fn breaker_adj(&self, v: usize) -> u128 {
        self.breaker_adj[v]
    }

    /// Vertices joined to `v` by an unclaimed edge.
    pub fn unclaimed_adj(&self, v: usize) -> u128 {
        let all = full_mask(self.n) & !(1u128 << v);
        all & !self.maker_adj[v] & !self.breaker_adj[v]
    }

    pub fn maker_degree(&self, v: usize) -> usize {
        self.maker_adj[v].count_ones() as usize
    }

    pub fn breaker_degree(&self, v: usize) -> usize {
        self.breaker_adj[v].count_ones() as usize
    }

    pub fn unclaimed_degree(&self, v: usize) -> usize {
        self.unclaimed_adj(v).count_ones() as usize
    }

    /// Unclaimed edges in canonical order.
    pub fn unclaimed_edges(&self) -> Vec<Edge> {
        self.edges_marked(Mark::Unclaimed)
    }

    pub fn maker_edges(&self) -> Vec<Edge> {
        self.edges_marked(Mark::Maker)
    }

    pub fn breaker_edges(&self) -> Vec<Edge> {
        self.edges_marked(Mark::Breaker)
    }

    fn edges_marked(&self, mark: Mark) -> Vec<Edge> {
        all_edges(self.n)
            .zip(self.ownership.iter())
            .filter(|(_, &m)| m == mark)
            .map(|(e, _)| e)
            .collect()
    }

    /// Number of completed turns by `player`.
    pub fn turns_taken(&self, player: Player) -> usize {
        self.history.iter().filter(|m| m.player == player).count()
    }

    fn check_edge(&self, e: Edge) -> Result<(), GameError> {
        if e.v >= self.n {
            return Err(GameError::InvalidEdge {
                u: e.u,
                v: e.v,
                n: self.n,
            });
        }
        Ok(())
    }

    /// Validates a Breaker edge set against ownership and the bias structure,
    /// returning it canonically sorted.
    pub fn check_breaker_move(&self, edges: &[Edge]) -> Result<Vec<Edge>, GameError> {
        let mut sorted = edges.to_vec();
        sorted.sort();
        for e in &sorted {
            self.check_edge(*e)?;
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(GameError::IllegalStructure("edge listed twice in one move".into()));
        }
        if let Some(e) = sorted.iter().find(|e| !self.is_unclaimed(**e)) {
            return Err(GameError::EdgeAlreadyClaimed(*e));
        }
        if sorted.is_empty() && self.unclaimed > 0 {
            return Err(GameError::IllegalStructure(
                "Breaker must claim at least one edge while unclaimed edges remain".into(),
            ));
        }
        if !self.bias.fits(&sorted) {
            return Err(GameError::IllegalStructure(format!(
                "edge set does not fit a {} structure",
                self.bias
            )));
        }
        Ok(sorted)
    }

    /// Predicate form of [`GameState::check_breaker_move`].
    pub fn legal_breaker_move(&self, edges: &[Edge]) -> bool {
        self.check_breaker_move(edges).is_ok()
    }

    pub fn apply_maker_move(&self, e: Edge) -> Result<GameState, GameError> {
        let mut next = self.clone();
        next.play_maker(e)?;
        Ok(next)
    }

    pub fn apply_breaker_move(&self, edges: &[Edge]) -> Result<GameState, GameError> {
        let mut next = self.clone();
        next.play_breaker(edges)?;
        Ok(next)
    }

    pub fn play_maker(&mut self, e: Edge) -> Result<(), GameError> {
        if self.to_move != Player::Maker {
            return Err(GameError::WrongTurn {
                expected: self.to_move,
                got: Player::Maker,
            });
        }
        self.check_edge(e)?;
        if !self.is_unclaimed(e) {
            return Err(GameError::EdgeAlreadyClaimed(e));
        }
        self.claim(e, Mark::Maker);
        self.history.push(MoveRecord {
            player: Player::Maker,
            edges: vec![e],
        });
        self.to_move = Player::Breaker;
        Ok(())
    }

    pub fn play_breaker(&mut self, edges: &[Edge]) -> Result<(), GameError> {
        if self.to_move != Player::Breaker {
            return Err(GameError::WrongTurn {
                expected: self.to_move,
                got: Player::Breaker,
            });
        }
        let sorted = self.check_breaker_move(edges)?;
        for &e in &sorted {
            self.claim(e, Mark::Breaker);
        }
        self.history.push(MoveRecord {
            player: Player::Breaker,
            edges: sorted,
        });
        self.to_move = Player::Maker;
        Ok(())
    }

    /// Plays one move for whichever player is to move.
    pub fn play(&mut self, player: Player, edges: &[Edge]) -> Result<(), GameError> {
        match player {
            Player::Maker => match edges {
                [e] => self.play_maker(*e),
                _ => Err(GameError::IllegalStructure(format!(
                    "Maker claims exactly one edge per turn, got {}",
                    edges.len()
                ))),
            },
            Player::Breaker => self.play_breaker(edges),
        }
    }

    fn claim(&mut self, e: Edge, mark: Mark) {
        let idx = e.index(self.n);
        debug_assert_eq!(self.ownership[idx], Mark::Unclaimed);
        self.ownership[idx] = mark;
        self.unclaimed -= 1;
        let adj = match mark {
            Mark::Maker => &mut self.maker_adj,
            Mark::Breaker => &mut self.breaker_adj,
            Mark::Unclaimed => unreachable!(),
        };
        adj[e.u] |= 1 << e.v;
        adj[e.v] |= 1 << e.u;
    }
}

pub(crate) fn full_mask(n: usize) -> u128 {
    if n >= 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}
