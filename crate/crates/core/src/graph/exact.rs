//! Exponential exact searches, all guarded by an explicit vertex cap.
//!
//! Longest paths use the subset dynamic program `ends[S]` = set of vertices
//! at which some path with vertex set exactly `S` ends.

use crate::board::Edge;
use crate::error::GraphError;
use crate::graph::SimpleGraph;

/// Above this order the subset tables no longer fit comfortably in memory.
pub const HARD_EXACT_LIMIT: usize = 24;

/// Default subset budget for expander checks: all `|U| <= 4` on 20 vertices.
pub const DEFAULT_EXPANDER_BUDGET: u128 = 6196;

pub(crate) fn check_cap(g: &SimpleGraph, cap: usize) -> Result<(), GraphError> {
    let cap = cap.min(HARD_EXACT_LIMIT);
    if g.order() > cap {
        return Err(GraphError::ExceedsExactCap { n: g.order(), cap });
    }
    Ok(())
}

fn small_adj(g: &SimpleGraph) -> Vec<u32> {
    (0..g.order()).map(|v| g.neighbors(v) as u32).collect()
}

/// `ends[S]` for every vertex subset `S`.
fn path_ends(adj: &[u32]) -> Vec<u32> {
    let n = adj.len();
    let size = 1usize << n;
    let mut ends = vec![0u32; size];
    for v in 0..n {
        ends[1 << v] = 1 << v;
    }
    for mask in 1..size {
        let mut e = ends[mask];
        while e != 0 {
            let v = e.trailing_zeros() as usize;
            e &= e - 1;
            let mut ext = adj[v] & !(mask as u32);
            while ext != 0 {
                let u = ext.trailing_zeros() as usize;
                ext &= ext - 1;
                ends[mask | 1 << u] |= 1 << u;
            }
        }
    }
    ends
}

/// Endpoints of Hamiltonian paths starting at `s`.
fn hamiltonian_path_ends_from(adj: &[u32], s: usize) -> u32 {
    let n = adj.len();
    let size = 1usize << n;
    let mut ends = vec![0u32; size];
    ends[1 << s] = 1 << s;
    for mask in 1..size {
        if mask >> s & 1 == 0 {
            continue;
        }
        let mut e = ends[mask];
        while e != 0 {
            let v = e.trailing_zeros() as usize;
            e &= e - 1;
            let mut ext = adj[v] & !(mask as u32);
            while ext != 0 {
                let u = ext.trailing_zeros() as usize;
                ext &= ext - 1;
                ends[mask | 1 << u] |= 1 << u;
            }
        }
    }
    ends[size - 1]
}

/// Number of vertices on a longest path (0 for the empty graph).
pub fn longest_path_length(g: &SimpleGraph, cap: usize) -> Result<usize, GraphError> {
    check_cap(g, cap)?;
    if g.order() == 0 {
        return Ok(0);
    }
    let ends = path_ends(&small_adj(g));
    Ok(longest_from_table(&ends))
}

fn longest_from_table(ends: &[u32]) -> usize {
    ends.iter()
        .enumerate()
        .filter(|(_, e)| **e != 0)
        .map(|(m, _)| m.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// Whether `g` has a Hamiltonian cycle. Graphs on fewer than 3 vertices have none.
pub fn is_hamiltonian_cycle(g: &SimpleGraph, cap: usize) -> Result<bool, GraphError> {
    check_cap(g, cap)?;
    let n = g.order();
    if n < 3 {
        return Ok(false);
    }
    let adj = small_adj(g);
    Ok(hamiltonian_path_ends_from(&adj, 0) & adj[0] != 0)
}

pub fn has_hamiltonian_path(g: &SimpleGraph, cap: usize) -> Result<bool, GraphError> {
    check_cap(g, cap)?;
    let n = g.order();
    if n == 0 {
        return Ok(false);
    }
    let ends = path_ends(&small_adj(g));
    Ok(ends[(1usize << n) - 1] != 0)
}

/// Non-edges `e` such that `g + e` is Hamiltonian or has a strictly longer
/// longest path. A graph that already has a Hamiltonian cycle has no boosters.
pub fn boosters(g: &SimpleGraph, cap: usize) -> Result<Vec<Edge>, GraphError> {
    check_cap(g, cap)?;
    let n = g.order();
    if n < 2 || is_hamiltonian_cycle(g, cap)? {
        return Ok(Vec::new());
    }
    let adj = small_adj(g);
    let ends = path_ends(&adj);
    let full = (1usize << n) - 1;
    let longest = longest_from_table(&ends);
    let mut hit = vec![false; n * n];

    if longest == n {
        // g + st is Hamiltonian exactly when some Hamiltonian path runs s..t.
        let mut starts = ends[full];
        while starts != 0 {
            let s = starts.trailing_zeros() as usize;
            starts &= starts - 1;
            let mut t_set = hamiltonian_path_ends_from(&adj, s);
            while t_set != 0 {
                let t = t_set.trailing_zeros() as usize;
                t_set &= t_set - 1;
                hit[s * n + t] = true;
                hit[t * n + s] = true;
            }
        }
    } else {
        // A longer path in g + ab must use ab, so it splits into disjoint
        // paths ending at a and at b with |P_a| + |P_b| > longest.
        let size = full + 1;
        let mut best = vec![0u8; n * size];
        for b in 0..n {
            let row = &mut best[b * size..(b + 1) * size];
            for (mask, e) in ends.iter().enumerate() {
                if e >> b & 1 == 1 {
                    row[mask] = mask.count_ones() as u8;
                }
            }
            for i in 0..n {
                let bit = 1usize << i;
                for mask in 0..size {
                    if mask & bit != 0 && row[mask ^ bit] > row[mask] {
                        row[mask] = row[mask ^ bit];
                    }
                }
            }
        }
        for (m1, e) in ends.iter().enumerate() {
            if *e == 0 {
                continue;
            }
            let len1 = m1.count_ones() as usize;
            let rest = full ^ m1;
            let mut a_set = *e;
            while a_set != 0 {
                let a = a_set.trailing_zeros() as usize;
                a_set &= a_set - 1;
                let mut cand = !adj[a] & rest as u32;
                while cand != 0 {
                    let b = cand.trailing_zeros() as usize;
                    cand &= cand - 1;
                    if !hit[a * n + b] && len1 + best[b * size + rest] as usize > longest {
                        hit[a * n + b] = true;
                        hit[b * n + a] = true;
                    }
                }
            }
        }
    }

    Ok(g.non_edges().into_iter().filter(|e| hit[e.u() * n + e.v()]).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpanderCheck {
    pub expander: bool,
    /// A set `U` with `|N(U)| < 2|U|`, when one exists.
    pub witness: Option<Vec<usize>>,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Exact `k`-expander test: every `U` with `1 <= |U| <= k` has an external
/// neighbourhood of size at least `2|U|`.
pub fn is_k_expander(g: &SimpleGraph, k: usize, budget: u128) -> Result<ExpanderCheck, GraphError> {
    let n = g.order();
    let needed: u128 = (1..=k.min(n)).map(|i| binomial(n, i)).sum();
    if needed > budget {
        return Err(GraphError::BudgetExceeded { needed, budget });
    }
    for size in 1..=k.min(n) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let set = idx.iter().fold(0u128, |acc, &v| acc | 1 << v);
            if (g.external_neighborhood(set).count_ones() as usize) < 2 * size {
                return Ok(ExpanderCheck {
                    expander: false,
                    witness: Some(idx),
                });
            }
            // next combination in lexicographic order
            let mut i = size;
            while i > 0 && idx[i - 1] == n - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    Ok(ExpanderCheck {
        expander: true,
        witness: None,
    })
}

/// Largest `k <= k_max` for which `g` is a `k`-expander (0 if not even a 1-expander).
pub fn max_expansion(g: &SimpleGraph, k_max: usize, budget: u128) -> Result<usize, GraphError> {
    let mut best = 0;
    for k in 1..=k_max {
        if is_k_expander(g, k, budget)?.expander {
            best = k;
        } else {
            break;
        }
    }
    Ok(best)
}
