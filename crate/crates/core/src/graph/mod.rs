//! Simple graphs on at most 128 vertices and the exact predicates the
//! strategies rely on: components, expansion, longest paths, Hamiltonicity,
//! boosters and 1-factorizations.

mod exact;
mod rotation;

pub(crate) use exact::check_cap;
pub use exact::{
    boosters, has_hamiltonian_path, is_hamiltonian_cycle, is_k_expander, longest_path_length, max_expansion,
    ExpanderCheck, DEFAULT_EXPANDER_BUDGET, HARD_EXACT_LIMIT,
};
pub use rotation::{find_hamilton_cycle, posa_path, rotation_boosters};

use crate::board::{bits, full_mask, Edge, MAX_ORDER};
use crate::error::GraphError;

/// Default vertex cap for exponential exact searches.
pub const DEFAULT_EXACT_CAP: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimpleGraph {
    n: usize,
    adj: Vec<u128>,
}

impl SimpleGraph {
    pub fn new(n: usize) -> SimpleGraph {
        assert!(n <= MAX_ORDER, "graphs are limited to {MAX_ORDER} vertices");
        SimpleGraph { n, adj: vec![0; n] }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = Edge>) -> SimpleGraph {
        let mut g = SimpleGraph::new(n);
        for e in edges {
            g.add_edge(e);
        }
        g
    }

    pub(crate) fn from_adjacency(adj: Vec<u128>) -> SimpleGraph {
        SimpleGraph { n: adj.len(), adj }
    }

    pub fn complete(n: usize) -> SimpleGraph {
        SimpleGraph::from_edges(n, crate::board::all_edges(n))
    }

    pub fn cycle(n: usize) -> SimpleGraph {
        SimpleGraph::from_edges(n, (0..n).map(|i| Edge::new(i, (i + 1) % n)))
    }

    pub fn path(n: usize) -> SimpleGraph {
        SimpleGraph::from_edges(n, (1..n).map(|i| Edge::new(i - 1, i)))
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, e: Edge) {
        assert!(e.v() < self.n, "edge {e} outside K_{}", self.n);
        self.adj[e.u()] |= 1 << e.v();
        self.adj[e.v()] |= 1 << e.u();
    }

    pub fn with_edge(&self, e: Edge) -> SimpleGraph {
        let mut g = self.clone();
        g.add_edge(e);
        g
    }

    pub fn has_edge(&self, e: Edge) -> bool {
        e.v() < self.n && self.adj[e.u()] >> e.v() & 1 == 1
    }

    pub fn neighbors(&self, v: usize) -> u128 {
        self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<Edge> {
        (0..self.n)
            .flat_map(|u| bits(self.adj[u]).filter(move |&v| v > u).map(move |v| Edge::new(u, v)))
            .collect()
    }

    pub fn non_edges(&self) -> Vec<Edge> {
        crate::board::all_edges(self.n).filter(|e| !self.has_edge(*e)).collect()
    }

    /// External neighbourhood `N(U) \ U` of a vertex set given as a bitmask.
    pub fn external_neighborhood(&self, set: u128) -> u128 {
        bits(set).fold(0u128, |acc, v| acc | self.adj[v]) & !set
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut seen: u128 = 0;
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen >> s & 1 == 1 {
                continue;
            }
            let comp = self.component_mask(s);
            seen |= comp;
            out.push(bits(comp).collect());
        }
        out
    }

    /// Bitmask of the component containing `s`.
    pub fn component_mask(&self, s: usize) -> u128 {
        let mut comp: u128 = 1 << s;
        let mut frontier = comp;
        while frontier != 0 {
            let next = self.external_neighborhood(frontier) & !comp;
            comp |= next;
            frontier = next;
        }
        comp
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.component_mask(0) == full_mask(self.n)
    }
}

/// Circle-method 1-factorization of `K_n`: vertex `n-1` is fixed and the
/// rest rotate. Returns `n - 1` perfect matchings partitioning the edges.
pub fn one_factorization(n: usize) -> Result<Vec<Vec<Edge>>, GraphError> {
    if n < 2 || n % 2 == 1 {
        return Err(GraphError::InvalidOrder(n, "1-factorization needs even n >= 2"));
    }
    let m = n - 1;
    let factors = (0..m)
        .map(|r| {
            let mut factor = vec![Edge::new(r, n - 1)];
            for i in 1..n / 2 {
                factor.push(Edge::new((r + i) % m, (r + m - i) % m));
            }
            factor.sort();
            factor
        })
        .collect();
    Ok(factors)
}
