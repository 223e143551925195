//! Leximin-optimal allocation for identical valuations.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::instance::{with_weights, Allocation, Instance, Weight};

/// Largest number of canonical partitions `lexmax_allocation` will walk.
pub const LEXMAX_MAX_PARTITIONS: u64 = 50_000_000;

/// True iff `u` and `v` are equal after sorting ascending, or `u` is larger
/// at the first position where the sorted vectors differ.
pub fn lex_dominates<T: Ord + Clone>(u: &[T], v: &[T]) -> Result<bool> {
    if u.len() != v.len() {
        return Err(Error::input(format!(
            "value vectors differ in length ({} vs {})",
            u.len(),
            v.len()
        )));
    }
    Ok(lex_cmp(u, v) != std::cmp::Ordering::Less)
}

fn lex_cmp<T: Ord + Clone>(u: &[T], v: &[T]) -> std::cmp::Ordering {
    let mut a = u.to_vec();
    let mut b = v.to_vec();
    a.sort();
    b.sort();
    a.cmp(&b)
}

/// Number of partitions of `m` labelled goods into at most `n` unlabelled
/// blocks (sum of Stirling numbers of the second kind).
fn partitions_up_to(m: usize, n: usize) -> BigUint {
    // s[j] = S(i, j) for the current i
    let mut s = vec![BigUint::from(0u32); n + 1];
    s[0] = BigUint::from(1u32);
    for _ in 0..m {
        for j in (1..=n).rev() {
            s[j] = &s[j] * BigUint::from(j) + &s[j - 1];
        }
        s[0] = BigUint::from(0u32);
    }
    s.into_iter().sum()
}

/// With identical valuations agents are interchangeable, so only canonical
/// set partitions into at most `n` blocks are enumerated (restricted-growth
/// strings); block `b` goes to agent `b` and remaining agents get nothing.
/// The first partition whose sorted value vector is strictly larger than
/// every earlier one is returned.
pub fn lexmax_allocation(instance: &Instance) -> Result<Allocation> {
    if !instance.has_identical_valuations() {
        return Err(Error::input("lexmax_allocation needs identical valuations"));
    }
    let n = instance.num_agents();
    let m = instance.num_goods();
    let count = partitions_up_to(m, n);
    if count > BigUint::from(LEXMAX_MAX_PARTITIONS) {
        return Err(Error::Limit(format!(
            "{count} partitions of {m} goods into at most {n} bundles exceed the limit of {LEXMAX_MAX_PARTITIONS}"
        )));
    }
    let owner = with_weights!(instance, |w| best_partition(&w[0], n, m));
    Ok(Allocation::from_assignment(n, &owner))
}

fn best_partition<T: Weight>(row: &[T], n: usize, m: usize) -> Vec<usize> {
    let mut s = Rgs {
        row,
        n,
        block: vec![0; m],
        sums: vec![T::zero(); n],
        best: None,
    };
    s.run(0, 0);
    s.best.expect("at least one partition").1
}

struct Rgs<'a, T> {
    row: &'a [T],
    n: usize,
    block: Vec<usize>,
    sums: Vec<T>,
    best: Option<(Vec<T>, Vec<usize>)>,
}

impl<T: Weight> Rgs<'_, T> {
    fn run(&mut self, g: usize, used: usize) {
        if g == self.block.len() {
            let mut sorted = self.sums.clone();
            sorted.sort();
            let better = match &self.best {
                None => true,
                Some((b, _)) => sorted > *b,
            };
            if better {
                self.best = Some((sorted, self.block.clone()));
            }
            return;
        }
        let limit = (used + 1).min(self.n);
        for b in 0..limit {
            self.block[g] = b;
            self.sums[b] += &self.row[g];
            self.run(g + 1, used.max(b + 1));
            self.sums[b] -= &self.row[g];
        }
    }
}
