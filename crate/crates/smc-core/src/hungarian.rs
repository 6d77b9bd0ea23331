//! Exact assignment machinery shared by `classic` and `decompose`:
//! a potentials-based Hungarian algorithm over lexicographic rational
//! costs, and a plain augmenting-path bipartite matcher.

use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::instance::Rat;

/// Two-component cost compared lexicographically. The secondary component
/// carries the deterministic tie-break preference.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct LexCost(pub Rat, pub Rat);

impl LexCost {
    pub fn zero() -> Self {
        LexCost(Rat::zero(), Rat::zero())
    }
}

impl Add for LexCost {
    type Output = LexCost;
    fn add(self, rhs: LexCost) -> LexCost {
        LexCost(self.0 + rhs.0, self.1 + rhs.1)
    }
}

impl Sub for LexCost {
    type Output = LexCost;
    fn sub(self, rhs: LexCost) -> LexCost {
        LexCost(self.0 - rhs.0, self.1 - rhs.1)
    }
}

/// 2^-(i*n + j + 1): a per-cell preference weight whose subset sums order
/// matchings by lexicographically smallest pair list.
pub(crate) fn cell_preference(i: usize, j: usize, n: usize) -> Rat {
    let shift = i * n + j + 1;
    Rat::new(BigInt::one(), BigInt::one() << shift)
}

/// Minimum-cost perfect assignment on a complete square cost matrix.
/// Returns `assign[i] = j`. Deterministic; exact over rationals.
pub(crate) fn min_cost_assignment(cost: &[Vec<LexCost>]) -> Vec<usize> {
    let n = cost.len();
    // Potentials formulation, 1-based with a virtual row/column 0.
    let mut u = vec![LexCost::zero(); n + 1];
    let mut v = vec![LexCost::zero(); n + 1];
    let mut p = vec![0usize; n + 1]; // p[j] = row matched to column j (1-based)
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv: Vec<Option<LexCost>> = vec![None; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta: Option<LexCost> = None;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1].clone() - u[i0].clone() - v[j].clone();
                if minv[j].as_ref().is_none_or(|m| &cur < m) {
                    minv[j] = Some(cur);
                    way[j] = j0;
                }
                if delta.as_ref().is_none_or(|d| minv[j].as_ref().unwrap() < d) {
                    delta = minv[j].clone();
                    j1 = j;
                }
            }
            let delta = delta.expect("complete matrix always yields a next column");
            for j in 0..=n {
                if used[j] {
                    u[p[j]] = u[p[j]].clone() + delta.clone();
                    v[j] = v[j].clone() - delta.clone();
                } else if let Some(m) = &minv[j] {
                    minv[j] = Some(m.clone() - delta.clone());
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0usize; n];
    for j in 1..=n {
        assign[p[j] - 1] = j - 1;
    }
    assign
}

/// Maximum-cardinality bipartite matching by augmenting paths.
/// `adj[i]` lists the columns available to row `i`; returns, per column,
/// the matched row if any.
pub(crate) fn max_bipartite_matching(adj: &[Vec<usize>], cols: usize) -> Vec<Option<usize>> {
    fn try_augment(
        row: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        col_match: &mut [Option<usize>],
    ) -> bool {
        for &col in &adj[row] {
            if seen[col] {
                continue;
            }
            seen[col] = true;
            if col_match[col].is_none()
                || try_augment(col_match[col].unwrap(), adj, seen, col_match)
            {
                col_match[col] = Some(row);
                return true;
            }
        }
        false
    }

    let mut col_match = vec![None; cols];
    for row in 0..adj.len() {
        let mut seen = vec![false; cols];
        try_augment(row, adj, &mut seen, &mut col_match);
    }
    col_match
}
