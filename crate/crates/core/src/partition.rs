//! Max-min k-partition search over integer weights.
//!
//! Items are visited in descending weight order and assigned depth-first to
//! one of `k` parts. Parts with equal current load are interchangeable, so
//! only the first of each load class is tried (this subsumes the
//! restricted-growth rule: unopened parts all have load zero). A node is
//! pruned when `min_load + remaining <= best`, or when the averaging ceiling
//! `floor(total / k)` cannot beat `best`. Once every part reaches the ceiling
//! the current partition is optimal and the search stops.

use crate::instance::Weight;

/// Result of a search: the optimum min-part weight and, for each item, the
/// part it was assigned to.
#[derive(Debug, Clone)]
pub(crate) struct Split<T> {
    pub value: T,
    pub parts: Vec<usize>,
}

struct Search<'a, T> {
    items: &'a [T],
    suffix: Vec<T>,
    k: usize,
    ceiling: T,
    loads: Vec<T>,
    assign: Vec<usize>,
    order: Vec<Vec<usize>>,
    best: T,
    best_assign: Option<Vec<usize>>,
    stop_when_found: bool,
    done: bool,
}

impl<T: Weight> Search<'_, T> {
    fn run(&mut self, idx: usize) {
        let min_load = self.loads.iter().min().expect("k >= 1").clone();
        if idx == self.items.len() {
            if min_load > self.best {
                self.best = min_load;
                self.best_assign = Some(self.assign.clone());
                if self.stop_when_found || self.best >= self.ceiling {
                    self.done = true;
                }
            }
            return;
        }
        let reachable = min_load + self.suffix[idx].clone();
        let ub = if reachable < self.ceiling { reachable } else { self.ceiling.clone() };
        if ub <= self.best {
            return;
        }

        let mut order = std::mem::take(&mut self.order[idx]);
        order.clear();
        order.extend(0..self.k);
        order.sort_by(|&a, &b| self.loads[a].cmp(&self.loads[b]));

        let item = &self.items[idx];
        let mut prev: Option<usize> = None;
        for (pos, &b) in order.iter().enumerate() {
            if let Some(p) = prev {
                if self.loads[p] == self.loads[b] {
                    continue;
                }
            }
            // A part already at the ceiling gains nothing from more weight;
            // order is ascending, so every later part is there too.
            if pos > 0 && self.loads[b] >= self.ceiling {
                break;
            }
            prev = Some(b);
            self.loads[b] += item;
            self.assign[idx] = b;
            self.run(idx + 1);
            self.loads[b] -= item;
            if self.done {
                break;
            }
        }
        self.order[idx] = order;
    }
}

/// Longest-processing-time greedy: each item to the currently lightest part.
fn greedy<T: Weight>(items: &[T], k: usize) -> Split<T> {
    let mut loads = vec![T::zero(); k];
    let mut parts = Vec::with_capacity(items.len());
    for w in items {
        let (b, _) = loads
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.cmp(y.1))
            .expect("k >= 1");
        loads[b] += w;
        parts.push(b);
    }
    let value = loads.into_iter().min().expect("k >= 1");
    Split { value, parts }
}

fn prepare<T: Weight>(items: &[T], k: usize) -> (Vec<T>, T) {
    let mut suffix = vec![T::zero(); items.len() + 1];
    for i in (0..items.len()).rev() {
        suffix[i] = suffix[i + 1].clone() + items[i].clone();
    }
    let ceiling = suffix[0].clone() / T::from(k as u64);
    (suffix, ceiling)
}

/// Maximises the minimum part weight. `items` must be sorted descending and
/// strictly positive, with `items.len() >= k >= 1`.
pub(crate) fn max_min<T: Weight>(items: &[T], k: usize) -> Split<T> {
    debug_assert!(k >= 1 && items.len() >= k);
    let start = greedy(items, k);
    let (suffix, ceiling) = prepare(items, k);
    if start.value >= ceiling || k == 1 {
        return start;
    }
    let mut s = Search {
        items,
        suffix,
        k,
        ceiling,
        loads: vec![T::zero(); k],
        assign: vec![0; items.len()],
        order: vec![Vec::with_capacity(k); items.len()],
        best: start.value.clone(),
        best_assign: None,
        stop_when_found: false,
        done: false,
    };
    s.run(0);
    match s.best_assign {
        Some(parts) => Split { value: s.best, parts },
        None => start,
    }
}

/// Returns the optimum only if it is strictly greater than `floor`; `None`
/// certifies that no partition beats `floor`. With `first_only`, returns the
/// first partition found above `floor` instead of the optimum.
pub(crate) fn max_min_above<T: Weight>(
    items: &[T],
    k: usize,
    floor: &T,
    first_only: bool,
) -> Option<Split<T>> {
    debug_assert!(k >= 1 && items.len() >= k);
    let (suffix, ceiling) = prepare(items, k);
    if ceiling <= *floor {
        return None;
    }
    let start = greedy(items, k);
    if start.value > *floor && (first_only || start.value >= ceiling || k == 1) {
        return Some(start);
    }
    if k == 1 {
        return None;
    }
    let (best, best_assign) = if start.value > *floor {
        (start.value.clone(), Some(start.parts.clone()))
    } else {
        (floor.clone(), None)
    };
    let mut s = Search {
        items,
        suffix,
        k,
        ceiling,
        loads: vec![T::zero(); k],
        assign: vec![0; items.len()],
        order: vec![Vec::with_capacity(k); items.len()],
        best,
        best_assign,
        stop_when_found: first_only,
        done: false,
    };
    s.run(0);
    s.best_assign.map(|parts| Split { value: s.best, parts })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(items: &[u128], k: usize) -> u128 {
        let mut best = 0;
        let total = (k as u64).pow(items.len() as u32);
        for code in 0..total {
            let mut c = code;
            let mut loads = vec![0u128; k];
            for w in items {
                loads[(c % k as u64) as usize] += w;
                c /= k as u64;
            }
            best = best.max(*loads.iter().min().unwrap());
        }
        best
    }

    #[test]
    fn matches_brute_force_on_small_cases() {
        let cases: Vec<(Vec<u128>, usize)> = vec![
            (vec![5, 5, 5, 3, 3, 1, 1, 1], 4),
            (vec![9, 7, 6, 5, 5, 4, 1], 3),
            (vec![8, 8, 8, 8, 1, 1], 3),
            (vec![10, 1, 1, 1], 2),
            (vec![3, 3, 2, 2, 2], 2),
        ];
        for (items, k) in cases {
            let s = max_min(&items, k);
            assert_eq!(s.value, brute(&items, k), "{items:?} k={k}");
            let mut loads = vec![0u128; k];
            for (w, &p) in items.iter().zip(&s.parts) {
                loads[p] += w;
            }
            assert_eq!(*loads.iter().min().unwrap(), s.value);
        }
    }

    #[test]
    fn above_floor_variant() {
        let items = vec![5u128, 5, 5, 3, 3, 1, 1, 1];
        assert_eq!(max_min_above(&items, 4, &5, false).unwrap().value, 6);
        assert!(max_min_above(&items, 4, &6, false).is_none());
        assert!(max_min_above(&items, 4, &5, true).unwrap().value > 5);
    }
}
