use std::collections::HashMap;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::AuxError;

/// Largest `k` the single-deletion brute force accepts.
pub const DELETION_MAX_K: usize = 7;
/// Largest `k` the paired-counter brute force accepts.
pub const PAIRED_MAX_K: usize = 4;
/// A pair is deleted when its counter reaches this value.
pub const PAIR_LIMIT: u8 = 16;

type Q = Ratio<i64>;

fn average(values: impl Iterator<Item = i64>, k: usize) -> Q {
    Q::new(values.sum(), k as i64)
}

/// `c + k - 2 - (c - 1)/k`.
pub fn deletion_bound(k: usize, c: usize) -> Q {
    let (k, c) = (k as i64, c as i64);
    Q::from_integer(c + k - 2) - Q::new(c - 1, k)
}

/// `(0, ..., 0, c - 1)`, on which the bound is attained.
pub fn deletion_tight_start(k: usize, c: usize) -> Vec<i64> {
    let mut v = vec![0; k];
    if let Some(last) = v.last_mut() {
        *last = c as i64 - 1;
    }
    v
}

/// Each turn adds `c` to one survivor and 1 to the others, then deletes the
/// largest (ties to the lowest id).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeletionProcess {
    c: i64,
    /// `(id, value)` in id order.
    survivors: Vec<(usize, i64)>,
}

impl DeletionProcess {
    pub fn new(values: &[i64], c: usize) -> DeletionProcess {
        DeletionProcess {
            c: c as i64,
            survivors: values.iter().copied().enumerate().collect(),
        }
    }

    pub fn survivors(&self) -> &[(usize, i64)] {
        &self.survivors
    }

    pub fn is_done(&self) -> bool {
        self.survivors.len() <= 1
    }

    pub fn max_value(&self) -> i64 {
        self.survivors.iter().map(|&(_, a)| a).max().expect("a survivor")
    }

    /// Applies one turn with the `c` bonus on survivor `target`; returns the
    /// deleted `(id, value)`.
    pub fn step(&mut self, target: usize) -> Result<(usize, i64), AuxError> {
        if self.is_done() || !self.survivors.iter().any(|&(id, _)| id == target) {
            return Err(AuxError::InvalidParameters(format!("{target} is not a live survivor")));
        }
        for (id, a) in &mut self.survivors {
            *a += if *id == target { self.c } else { 1 };
        }
        let pos = (0..self.survivors.len())
            .max_by_key(|&i| (self.survivors[i].1, std::cmp::Reverse(self.survivors[i].0)))
            .expect("a survivor");
        Ok(self.survivors.remove(pos))
    }
}

fn check_deletion_args(k: usize, c: usize, initial: &[i64]) -> Result<(), AuxError> {
    if k < 2 || c < 2 || initial.len() != k {
        return Err(AuxError::InvalidParameters(format!(
            "need k, c >= 2 and k start values, got k={k}, c={c}, {} values",
            initial.len()
        )));
    }
    if k > DELETION_MAX_K {
        return Err(AuxError::BudgetExceeded { nodes: 0 });
    }
    Ok(())
}

/// Largest `a' - a` over every choice of bonus targets.
pub fn deletion_brute_max(k: usize, c: usize, initial: &[i64]) -> Result<Q, AuxError> {
    check_deletion_args(k, c, initial)?;
    // Equal values are interchangeable, so a sorted multiset is a full state.
    fn best(values: Vec<i64>, c: i64, memo: &mut HashMap<Vec<i64>, i64>) -> i64 {
        if values.len() == 1 {
            return values[0];
        }
        if let Some(&v) = memo.get(&values) {
            return v;
        }
        let mut top = i64::MIN;
        let mut tried: Option<i64> = None;
        for (i, &a) in values.iter().enumerate() {
            if tried == Some(a) {
                continue;
            }
            tried = Some(a);
            let mut next: Vec<i64> = values.iter().map(|x| x + 1).collect();
            next[i] += c - 1;
            let max_at = (0..next.len()).max_by_key(|&j| next[j]).expect("nonempty");
            next.remove(max_at);
            next.sort_unstable();
            top = top.max(best(next, c, memo));
        }
        memo.insert(values, top);
        top
    }
    let mut start = initial.to_vec();
    start.sort_unstable();
    let last = best(start, c as i64, &mut HashMap::new());
    Ok(Q::from_integer(last) - average(initial.iter().copied(), k))
}

/// Per-turn maxima `m(0..k-1)` and deleted values `d(1..k-1)` of one play.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeletionTrace {
    pub targets: Vec<usize>,
    pub m: Vec<i64>,
    pub d: Vec<i64>,
    pub last: i64,
}

impl DeletionTrace {
    /// The bookkeeping facts behind the bound, first failure as a message.
    pub fn check(&self, c: i64) -> Result<(), String> {
        for i in 1..self.m.len() {
            let (prev, cur, del) = (self.m[i - 1], self.m[i], self.d[i - 1]);
            if cur > prev + 1 {
                return Err(format!("turn {i}: m rose from {prev} to {cur}"));
            }
            if del < cur {
                return Err(format!("turn {i}: deleted {del} below the new maximum {cur}"));
            }
            if del < prev + 1 || del > prev + c {
                return Err(format!("turn {i}: deleted {del} outside [{}, {}]", prev + 1, prev + c));
            }
        }
        if self.m.last() != Some(&self.last) {
            return Err("final maximum differs from the last survivor".into());
        }
        Ok(())
    }
}

/// Visits every play of the process (all `k!` target sequences, ids kept),
/// without memoization.
pub fn deletion_for_each_trace(
    k: usize,
    c: usize,
    initial: &[i64],
    mut visit: impl FnMut(&DeletionTrace),
) -> Result<(), AuxError> {
    check_deletion_args(k, c, initial)?;
    fn walk(p: DeletionProcess, trace: &mut DeletionTrace, visit: &mut dyn FnMut(&DeletionTrace)) {
        if p.is_done() {
            trace.last = p.survivors()[0].1;
            visit(trace);
            return;
        }
        for &(id, _) in p.survivors() {
            let mut next = p.clone();
            let (_, deleted) = next.step(id).expect("live target");
            trace.targets.push(id);
            trace.d.push(deleted);
            trace.m.push(next.max_value());
            walk(next, trace, visit);
            trace.targets.pop();
            trace.d.pop();
            trace.m.pop();
        }
    }
    let p = DeletionProcess::new(initial, c);
    let mut trace = DeletionTrace {
        targets: Vec::new(),
        m: vec![p.max_value()],
        d: Vec::new(),
        last: 0,
    };
    walk(p, &mut trace, &mut visit);
    Ok(())
}

/// `c + 17k`.
pub fn paired_linear_bound(k: usize, c: usize) -> Q {
    Q::from_integer(c as i64 + 17 * k as i64)
}

/// `c + 17k - 19 + (19 - 2c)/(k + 1)`.
pub fn paired_sharp_bound(k: usize, c: usize) -> Q {
    let (k, c) = (k as i64, c as i64);
    Q::from_integer(c + 17 * k - 19) + Q::new(19 - 2 * c, k + 1)
}

/// Each turn adds `c` to one survivor and 1 to the rest; the largest pair
/// (ties to the lowest id) bumps its counter and is deleted at
/// [`PAIR_LIMIT`], otherwise it drops by `2c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PairedProcess {
    c: i64,
    /// `(value, counter)` per id; `None` once deleted.
    pairs: Vec<Option<(i64, u8)>>,
}

impl PairedProcess {
    pub fn new(initial: &[(i64, u8)], c: usize) -> Result<PairedProcess, AuxError> {
        if let Some(&(_, t)) = initial.iter().find(|&&(_, t)| t >= PAIR_LIMIT) {
            return Err(AuxError::InvalidParameters(format!(
                "counter {t} is not below {PAIR_LIMIT}"
            )));
        }
        Ok(PairedProcess {
            c: c as i64,
            pairs: initial.iter().map(|&p| Some(p)).collect(),
        })
    }

    pub fn live(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.pairs.len()).filter(|&i| self.pairs[i].is_some())
    }

    pub fn is_done(&self) -> bool {
        self.live().count() <= 1
    }

    pub fn last_value(&self) -> Option<i64> {
        let mut live = self.live();
        match (live.next(), live.next()) {
            (Some(i), None) => self.pairs[i].map(|(a, _)| a),
            _ => None,
        }
    }

    pub fn step(&mut self, target: usize) -> Result<(), AuxError> {
        if self.is_done() || self.pairs.get(target).copied().flatten().is_none() {
            return Err(AuxError::InvalidParameters(format!("{target} is not a live pair")));
        }
        for (id, slot) in self.pairs.iter_mut().enumerate() {
            if let Some((a, _)) = slot {
                *a += if id == target { self.c } else { 1 };
            }
        }
        let top = self
            .live()
            .max_by_key(|&i| (self.pairs[i].expect("live").0, std::cmp::Reverse(i)))
            .expect("a live pair");
        let (a, t) = self.pairs[top].expect("live");
        self.pairs[top] = if t + 1 == PAIR_LIMIT {
            None
        } else {
            Some((a - 2 * self.c, t + 1))
        };
        Ok(())
    }
}

/// Largest `a' - mean(a)` over every choice of bonus targets, with a cap on
/// distinct positions explored.
pub fn paired_brute_max(k: usize, c: usize, initial: &[(i64, u8)], budget: u64) -> Result<Q, AuxError> {
    if k < 1 || c < k || initial.len() != k {
        return Err(AuxError::InvalidParameters(format!(
            "need c >= k >= 1 and k start pairs, got k={k}, c={c}, {} pairs",
            initial.len()
        )));
    }
    if k > PAIRED_MAX_K {
        return Err(AuxError::BudgetExceeded { nodes: 0 });
    }
    struct Search {
        memo: HashMap<PairedProcess, i64>,
        budget: u64,
    }
    impl Search {
        fn best(&mut self, p: &PairedProcess) -> Result<i64, AuxError> {
            if let Some(a) = p.last_value() {
                return Ok(a);
            }
            if let Some(&v) = self.memo.get(p) {
                return Ok(v);
            }
            if self.memo.len() as u64 >= self.budget {
                return Err(AuxError::BudgetExceeded {
                    nodes: self.memo.len() as u64,
                });
            }
            let mut top = i64::MIN;
            for target in p.live().collect::<Vec<_>>() {
                let mut next = p.clone();
                next.step(target)?;
                top = top.max(self.best(&next)?);
            }
            self.memo.insert(p.clone(), top);
            Ok(top)
        }
    }
    let start = PairedProcess::new(initial, c)?;
    let mut search = Search {
        memo: HashMap::new(),
        budget,
    };
    let last = search.best(&start)?;
    Ok(Q::from_integer(last) - average(initial.iter().map(|&(a, _)| a), k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_formulas() {
        assert_eq!(deletion_bound(2, 2), Q::new(3, 2));
        assert_eq!(paired_linear_bound(2, 2), Q::from_integer(36));
        assert_eq!(paired_sharp_bound(2, 2), Q::from_integer(22));
    }

    #[test]
    fn tight_start_at_two_two() {
        assert_eq!(deletion_brute_max(2, 2, &[0, 1]).unwrap(), Q::new(3, 2));
    }

    #[test]
    fn hand_trace_from_equal_start() {
        let mut p = DeletionProcess::new(&[0, 0], 2);
        assert_eq!(p.step(0).unwrap(), (0, 2));
        assert_eq!(p.survivors(), &[(1, 1)]);
    }

    #[test]
    fn ties_delete_the_lowest_id() {
        let mut p = DeletionProcess::new(&[0, 1, 0], 2);
        assert_eq!(p.step(0).unwrap(), (0, 2));
        assert_eq!(p.survivors(), &[(1, 2), (2, 1)]);
    }

    #[test]
    fn single_pair_ends_immediately() {
        assert_eq!(paired_brute_max(1, 2, &[(5, 0)], 10).unwrap(), Q::from_integer(0));
    }

    #[test]
    fn brute_force_refuses_large_k() {
        assert!(matches!(
            deletion_brute_max(8, 2, &[0; 8]),
            Err(AuxError::BudgetExceeded { .. })
        ));
    }
}
