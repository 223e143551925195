//! Exhaustive search for a GMMS allocation.

use std::time::Instant;

use serde::Serialize;

use crate::combinatorics::Combinations;
use crate::error::Result;
use crate::instance::{weight_of, with_weights, Allocation, Instance, Weight};
use crate::maximin::mu_above;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchStatus {
    /// A GMMS allocation was found.
    Found,
    /// Every allocation was examined and none is GMMS.
    Exhausted,
    /// The leaf budget or deadline ran out first.
    Budget,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    pub status: SearchStatus,
    pub allocation: Option<Allocation>,
    /// Complete assignments examined (leaves in pruned subtrees are not
    /// counted).
    pub visited: u64,
}

/// Limits for [`exact_gmms_search_with`].
#[derive(Clone, Copy, Debug)]
pub struct SearchLimits {
    pub max_leaves: u64,
    pub deadline: Option<Instant>,
}

impl SearchLimits {
    pub fn leaves(max_leaves: u64) -> Self {
        SearchLimits {
            max_leaves,
            deadline: None,
        }
    }
}

/// Walks assignment vectors (good 0 most significant) in lexicographic order
/// and returns the first GMMS allocation, examining at most `budget`
/// complete assignments. Subtrees in which no completion can be EFX are
/// skipped; skipped leaves do not count towards `visited`.
pub fn exact_gmms_search(instance: &Instance, budget: u64) -> Result<SearchOutcome> {
    exact_gmms_search_with(instance, SearchLimits::leaves(budget))
}

pub fn exact_gmms_search_with(instance: &Instance, limits: SearchLimits) -> Result<SearchOutcome> {
    Ok(with_weights!(instance, |w| search(w, instance.num_agents(), limits)))
}

fn search<T: Weight>(w: &[Vec<T>], n: usize, limits: SearchLimits) -> SearchOutcome {
    let m = w.first().map_or(0, Vec::len);
    // suffix[r][g] = v_r(goods g..m)
    let suffix = w
        .iter()
        .map(|row| {
            let mut acc = vec![T::zero(); m + 1];
            for g in (0..m).rev() {
                acc[g] = acc[g + 1].clone() + row[g].clone();
            }
            acc
        })
        .collect();
    let mut s = Dfs {
        w,
        n,
        m,
        owner: vec![0; m],
        bundles: vec![Vec::new(); n],
        values: vec![vec![T::zero(); n]; n],
        suffix,
        limits,
        visited: 0,
        stopped: false,
        found: None,
    };
    s.run(0);
    let status = if s.found.is_some() {
        SearchStatus::Found
    } else if s.stopped {
        SearchStatus::Budget
    } else {
        SearchStatus::Exhausted
    };
    SearchOutcome {
        status,
        allocation: s.found,
        visited: s.visited,
    }
}

struct Dfs<'a, T> {
    w: &'a [Vec<T>],
    n: usize,
    m: usize,
    owner: Vec<usize>,
    bundles: Vec<Vec<usize>>,
    /// values[r][a] = v_r(bundle of a)
    values: Vec<Vec<T>>,
    suffix: Vec<Vec<T>>,
    limits: SearchLimits,
    visited: u64,
    stopped: bool,
    found: Option<Allocation>,
}

impl<T: Weight> Dfs<'_, T> {
    /// GMMS implies EFX. For a fixed `j`, `v_i(A_j) - min_{g ∈ A_j, v_i(g) > 0} v_i(g)`
    /// never decreases as goods are added to `A_j`, so if it already exceeds
    /// everything agent `i` could still reach, no completion is EFX.
    fn efx_unreachable(&self, g: usize) -> bool {
        for i in 0..self.n {
            let row = &self.w[i];
            let reach = self.values[i][i].clone() + self.suffix[i][g].clone();
            for j in 0..self.n {
                if j == i || self.values[i][j] <= reach {
                    continue;
                }
                let least = self.bundles[j]
                    .iter()
                    .map(|&h| &row[h])
                    .filter(|v| **v > T::zero())
                    .min()
                    .expect("positive bundle has a positive good");
                if self.values[i][j].clone() - least.clone() > reach {
                    return true;
                }
            }
        }
        false
    }

    /// Returns true when the search should unwind.
    fn run(&mut self, g: usize) -> bool {
        if self.efx_unreachable(g) {
            return false;
        }
        if g == self.m {
            if self.visited >= self.limits.max_leaves {
                self.stopped = true;
                return true;
            }
            self.visited += 1;
            if self.visited.is_multiple_of(4096) {
                if let Some(d) = self.limits.deadline {
                    if Instant::now() >= d {
                        self.stopped = true;
                        return true;
                    }
                }
            }
            let allocation = Allocation::from_assignment(self.n, &self.owner);
            if groups_fair(self.w, &allocation) {
                self.found = Some(allocation);
                return true;
            }
            return false;
        }
        for a in 0..self.n {
            self.owner[g] = a;
            self.bundles[a].push(g);
            for r in 0..self.n {
                self.values[r][a] += &self.w[r][g];
            }
            let stop = self.run(g + 1);
            for r in 0..self.n {
                self.values[r][a] -= &self.w[r][g];
            }
            self.bundles[a].pop();
            if stop {
                return true;
            }
        }
        false
    }
}

/// Every agent clears `μ` over every group containing it.
fn groups_fair<T: Weight>(w: &[Vec<T>], a: &Allocation) -> bool {
    let n = a.num_agents();
    for (i, row) in w.iter().enumerate() {
        let own = weight_of(row, a.bundle(i).goods());
        let others: Vec<(usize, T)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (j, weight_of(row, a.bundle(j).goods())))
            .filter(|(_, v)| *v > T::zero())
            .collect();
        for size in 1..=others.len() {
            let t = T::from(size as u64 + 1);
            for pick in Combinations::new(others.len(), size) {
                let mut total = own.clone();
                for &x in &pick {
                    total += &others[x].1;
                }
                if total / t.clone() <= own {
                    continue;
                }
                let mut pooled: Vec<usize> = a.bundle(i).goods().to_vec();
                for &x in &pick {
                    pooled.extend_from_slice(a.bundle(others[x].0).goods());
                }
                if mu_above(row, &pooled, size + 1, &own, true).is_some() {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fairness::is_gmms;

    #[test]
    fn three_agents_five_unit_goods() {
        let inst = Instance::from_integers(&[vec![1; 5], vec![1; 5], vec![1; 5]]).unwrap();
        let out = exact_gmms_search(&inst, u64::MAX).unwrap();
        assert_eq!(out.status, SearchStatus::Found);
        let a = out.allocation.unwrap();
        let mut sizes: Vec<usize> = a.bundles().iter().map(|b| b.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 2, 2]);
        assert!(is_gmms(&inst, &a).unwrap().holds);
    }

    #[test]
    fn single_agent() {
        let inst = Instance::from_integers(&[vec![1, 2, 3]]).unwrap();
        let out = exact_gmms_search(&inst, 10).unwrap();
        assert_eq!(out.status, SearchStatus::Found);
        assert_eq!(out.visited, 1);
    }

    #[test]
    fn budget_is_reported() {
        let inst = Instance::from_integers(&[vec![1; 5], vec![1; 5], vec![1; 5]]).unwrap();
        let out = exact_gmms_search(&inst, 0).unwrap();
        assert_eq!(out.status, SearchStatus::Budget);
        assert!(out.allocation.is_none());
        assert_eq!(out.visited, 0);
    }
}
