//! Pósa rotation-extension: a polynomial heuristic for long paths and boosters
//! beyond the exact cap.
//!
//! For a path `v0 .. vl` and a neighbour `vi` of `vl` (with `i < l - 1`), the
//! rotation `v0 .. vi vl vl-1 .. vi+1` is another path on the same vertex set
//! with new endpoint `vi+1`. If `P` is a longest path of a connected graph,
//! every closing pair `{v0, x}` over rotation endpoints `x` is a booster.

use std::collections::VecDeque;

use crate::board::{bits, Edge};
use crate::graph::SimpleGraph;

fn on_path(path: &[usize]) -> u128 {
    path.iter().fold(0u128, |acc, &v| acc | 1 << v)
}

fn greedy_extend(g: &SimpleGraph, path: &mut Vec<usize>) {
    let mut used = on_path(path);
    while let Some(&end) = path.last() {
        match bits(g.neighbors(end) & !used).next() {
            Some(w) => {
                path.push(w);
                used |= 1 << w;
            }
            None => break,
        }
    }
}

/// All paths reachable from `path` by rotations with `path[0]` fixed, one per
/// distinct endpoint, in discovery order (the input path first).
fn rotation_closure(g: &SimpleGraph, path: &[usize]) -> Vec<Vec<usize>> {
    let mut seen_ends: u128 = 1 << path[path.len() - 1];
    let mut out = vec![path.to_vec()];
    let mut queue = VecDeque::from([path.to_vec()]);
    while let Some(p) = queue.pop_front() {
        let l = p.len() - 1;
        let end = p[l];
        for i in 0..l.saturating_sub(1) {
            if g.neighbors(end) >> p[i] & 1 == 0 {
                continue;
            }
            let new_end = p[i + 1];
            if seen_ends >> new_end & 1 == 1 {
                continue;
            }
            seen_ends |= 1 << new_end;
            let mut q = p[..=i].to_vec();
            q.extend(p[i + 1..].iter().rev());
            out.push(q.clone());
            queue.push_back(q);
        }
    }
    out
}

/// Tries one improvement step; returns a strictly longer path if found.
fn improve(g: &SimpleGraph, path: &[usize]) -> Option<Vec<usize>> {
    let n = g.order();
    let mut reversed = path.to_vec();
    reversed.reverse();
    for oriented in [path.to_vec(), reversed] {
        for q in rotation_closure(g, &oriented) {
            let used = on_path(&q);
            let end = q[q.len() - 1];
            if let Some(w) = bits(g.neighbors(end) & !used).next() {
                let mut longer = q;
                longer.push(w);
                return Some(longer);
            }
            // closed cycle on V(q): open it next to an outside neighbour
            if q.len() >= 3 && q.len() < n && g.neighbors(end) >> q[0] & 1 == 1 {
                for (i, &x) in q.iter().enumerate() {
                    if let Some(w) = bits(g.neighbors(x) & !used).next() {
                        let mut longer: Vec<usize> = q[i + 1..].to_vec();
                        longer.extend_from_slice(&q[..=i]);
                        longer.push(w);
                        return Some(longer);
                    }
                }
            }
        }
    }
    None
}

/// A path from `start` that no rotation-extension step can lengthen.
pub fn posa_path(g: &SimpleGraph, start: usize) -> Vec<usize> {
    let mut path = vec![start];
    greedy_extend(g, &mut path);
    while let Some(mut longer) = improve(g, &path) {
        greedy_extend(g, &mut longer);
        path = longer;
    }
    path
}

/// A Hamiltonian cycle found by rotation-extension, if any (heuristic: `None`
/// does not prove non-Hamiltonicity).
pub fn find_hamilton_cycle(g: &SimpleGraph) -> Option<Vec<usize>> {
    let n = g.order();
    if n < 3 {
        return None;
    }
    let path = posa_path(g, 0);
    if path.len() < n {
        return None;
    }
    rotation_closure(g, &path)
        .into_iter()
        .find(|q| g.neighbors(q[q.len() - 1]) >> q[0] & 1 == 1)
}

/// Closing pairs over two rounds of rotations from a rotation-extension
/// maximal path. Sound (every returned pair is a booster) whenever that path
/// is a longest path of a connected graph; the exact search is the oracle.
pub fn rotation_boosters(g: &SimpleGraph) -> Vec<Edge> {
    let n = g.order();
    if n < 2 || find_hamilton_cycle(g).is_some() {
        return Vec::new();
    }
    let path = posa_path(g, 0);
    if path.len() < 2 {
        return Vec::new();
    }
    let mut found: Vec<Edge> = Vec::new();
    let v0 = path[0];
    for p in rotation_closure(g, &path) {
        let x = p[p.len() - 1];
        if let Some(e) = Edge::try_new(v0, x) {
            if !g.has_edge(e) {
                found.push(e);
            }
        }
        let mut back = p;
        back.reverse();
        for q in rotation_closure(g, &back) {
            let y = q[q.len() - 1];
            if let Some(e) = Edge::try_new(x, y) {
                if !g.has_edge(e) {
                    found.push(e);
                }
            }
        }
    }
    found.sort();
    found.dedup();
    found
}
