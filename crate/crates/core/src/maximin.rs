//! k-maximin shares, MMS and the groupwise threshold.
//!
//! `μ_i^k(S)` is the best worst-part value agent `i` can secure by splitting
//! `S` into `k` parts. Goods the agent values at zero never change it, so the
//! search runs over positively valued goods only and the zero goods are
//! appended to the first witness part afterwards.

use serde::Serialize;

use crate::combinatorics::Combinations;
use crate::error::{Error, Result};
use crate::instance::{weight_of, with_weights, Allocation, Bundle, Instance, Weight};
use crate::partition::{max_min, max_min_above, Split};
use crate::value::Value;

/// Largest goods set [`maximin_share_naive`] will enumerate.
pub const NAIVE_MAX_GOODS: usize = 14;

/// `μ_i^k(S)` with a witness `k`-partition of `S`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaximinResult {
    pub value: Value,
    pub witness: Vec<Bundle>,
}

/// `GMMS_i` together with the group `J ∋ i` attaining it and an optimal
/// `|J|`-partition of the group's pooled goods.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GmmsThreshold {
    pub value: Value,
    #[serde(rename = "group")]
    pub witness_group: Vec<usize>,
    #[serde(rename = "partition")]
    pub witness_partition: Vec<Bundle>,
}

/// Integer-kernel μ: optimum and witness parts (as good lists).
#[derive(Clone, Debug)]
pub(crate) struct Mu<T> {
    pub value: T,
    pub parts: Vec<Vec<usize>>,
}

/// Positively valued goods of `goods`, sorted by descending weight (ties by
/// index), plus the zero-valued remainder.
fn split_goods<T: Weight>(row: &[T], goods: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let (mut pos, zero): (Vec<usize>, Vec<usize>) =
        goods.iter().partition(|&&g| row[g] > T::zero());
    pos.sort_by(|&a, &b| row[b].cmp(&row[a]).then(a.cmp(&b)));
    (pos, zero)
}

fn assemble<T: Weight>(
    row: &[T],
    pos: &[usize],
    zero: &[usize],
    k: usize,
    split: Option<Split<T>>,
) -> Mu<T> {
    let mut parts = vec![Vec::new(); k];
    let value = match split {
        Some(s) => {
            for (&g, &p) in pos.iter().zip(&s.parts) {
                parts[p].push(g);
            }
            s.value
        }
        None => {
            // fewer valued goods than parts: one good per part, the rest empty
            for (p, &g) in pos.iter().enumerate() {
                parts[p].push(g);
            }
            T::zero()
        }
    };
    parts[0].extend_from_slice(zero);
    for p in &mut parts {
        p.sort_unstable();
    }
    debug_assert!(parts
        .iter()
        .map(|p| weight_of(row, p))
        .min()
        .is_some_and(|m| m == value));
    Mu { value, parts }
}

/// Exact `μ` over integer weights.
pub(crate) fn mu<T: Weight>(row: &[T], goods: &[usize], k: usize) -> Mu<T> {
    let (pos, zero) = split_goods(row, goods);
    let split = (pos.len() >= k).then(|| {
        let items: Vec<T> = pos.iter().map(|&g| row[g].clone()).collect();
        max_min(&items, k)
    });
    assemble(row, &pos, &zero, k, split)
}

/// `Some(μ)` iff `μ > floor`. With `first_only` the returned witness merely
/// beats `floor` and its value is a lower bound, not the optimum.
pub(crate) fn mu_above<T: Weight>(
    row: &[T],
    goods: &[usize],
    k: usize,
    floor: &T,
    first_only: bool,
) -> Option<Mu<T>> {
    let (pos, zero) = split_goods(row, goods);
    if pos.len() < k {
        // μ = 0, which never exceeds a nonnegative floor
        return None;
    }
    let items: Vec<T> = pos.iter().map(|&g| row[g].clone()).collect();
    let split = max_min_above(&items, k, floor, first_only)?;
    Some(assemble(row, &pos, &zero, k, Some(split)))
}

fn to_result(instance: &Instance, value: &impl Weight, parts: Vec<Vec<usize>>) -> MaximinResult {
    MaximinResult {
        value: instance.to_value(value),
        witness: parts.into_iter().map(Bundle::from_sorted).collect(),
    }
}

/// `μ_agent^parts(goods)` by pruned search.
pub fn maximin_share(
    instance: &Instance,
    agent: usize,
    goods: &Bundle,
    parts: usize,
) -> Result<MaximinResult> {
    instance.check_agent(agent)?;
    instance.check_bundle(goods)?;
    if parts == 0 {
        return Err(Error::input("number of parts must be at least 1"));
    }
    Ok(with_weights!(instance, |w| {
        let r = mu(&w[agent], goods.goods(), parts);
        to_result(instance, &r.value, r.parts)
    }))
}

/// Reference implementation of [`maximin_share`]: enumerates every
/// assignment of `goods` to at most `parts` parts in restricted-growth form
/// (part `b + 1` opens only after part `b`), with no pruning and no special
/// treatment of zero-valued goods.
pub fn maximin_share_naive(
    instance: &Instance,
    agent: usize,
    goods: &Bundle,
    parts: usize,
) -> Result<MaximinResult> {
    instance.check_agent(agent)?;
    instance.check_bundle(goods)?;
    if parts == 0 {
        return Err(Error::input("number of parts must be at least 1"));
    }
    if goods.len() > NAIVE_MAX_GOODS {
        return Err(Error::Limit(format!(
            "naive enumeration accepts at most {NAIVE_MAX_GOODS} goods, got {}",
            goods.len()
        )));
    }
    Ok(with_weights!(instance, |w| {
        let (value, assign) = naive_enumerate(&w[agent], goods.goods(), parts);
        let mut lists = vec![Vec::new(); parts];
        for (&g, &p) in goods.goods().iter().zip(&assign) {
            lists[p].push(g);
        }
        to_result(instance, &value, lists)
    }))
}

fn naive_enumerate<T: Weight>(row: &[T], goods: &[usize], k: usize) -> (T, Vec<usize>) {
    struct State<'a, T> {
        row: &'a [T],
        goods: &'a [usize],
        k: usize,
        loads: Vec<T>,
        assign: Vec<usize>,
        best: Option<(T, Vec<usize>)>,
    }
    fn rec<T: Weight>(s: &mut State<'_, T>, idx: usize, used: usize) {
        if idx == s.goods.len() {
            let min = if used < s.k {
                T::zero()
            } else {
                s.loads.iter().min().cloned().unwrap_or_else(T::zero)
            };
            if s.best.as_ref().is_none_or(|(b, _)| min > *b) {
                s.best = Some((min, s.assign.clone()));
            }
            return;
        }
        let w = s.row[s.goods[idx]].clone();
        let open = if used < s.k { used + 1 } else { used };
        for b in 0..open {
            s.loads[b] += &w;
            s.assign[idx] = b;
            rec(s, idx + 1, used.max(b + 1));
            s.loads[b] -= &w;
        }
    }
    let mut s = State {
        row,
        goods,
        k,
        loads: vec![T::zero(); k],
        assign: vec![0; goods.len()],
        best: None,
    };
    rec(&mut s, 0, 0);
    s.best.expect("at least one assignment exists")
}

/// `MMS_i = μ_i^n([m])`.
pub fn mms(instance: &Instance, agent: usize) -> Result<MaximinResult> {
    maximin_share(
        instance,
        agent,
        &Bundle::all(instance.num_goods()),
        instance.num_agents(),
    )
}

/// Groupwise threshold over integer weights.
///
/// Groups are visited by increasing size, lexicographically within a size;
/// the first strict maximum wins. A member `j ≠ i` whose bundle is worth
/// nothing to `i` (in particular an empty bundle) only adds a part without
/// adding value, so `μ` cannot increase and such groups are skipped; the
/// smaller group without `j` is visited earlier and dominates.
pub(crate) fn threshold<T: Weight>(
    row: &[T],
    allocation: &Allocation,
    agent: usize,
) -> (T, Vec<usize>, Vec<Vec<usize>>) {
    let own_goods = allocation.bundle(agent).goods();
    let mut best = (
        weight_of(row, own_goods),
        vec![agent],
        vec![own_goods.to_vec()],
    );
    let others: Vec<usize> = (0..allocation.num_agents())
        .filter(|&j| j != agent && weight_of(row, allocation.bundle(j).goods()) > T::zero())
        .collect();

    for size in 1..=others.len() {
        for pick in Combinations::new(others.len(), size) {
            let mut group: Vec<usize> = pick.iter().map(|&x| others[x]).collect();
            group.push(agent);
            group.sort_unstable();
            let mut pooled: Vec<usize> = group
                .iter()
                .flat_map(|&j| allocation.bundle(j).iter())
                .collect();
            pooled.sort_unstable();
            if let Some(r) = mu_above(row, &pooled, group.len(), &best.0, false) {
                best = (r.value, group, r.parts);
            }
        }
    }
    best
}

/// `GMMS_i = max_{J ∋ i} μ_i^{|J|}(∪_{j∈J} A_j)` for a complete allocation.
pub fn gmms_threshold(
    instance: &Instance,
    allocation: &Allocation,
    agent: usize,
) -> Result<GmmsThreshold> {
    instance.check_agent(agent)?;
    instance.check_complete(allocation)?;
    Ok(with_weights!(instance, |w| {
        let (value, group, parts) = threshold(&w[agent], allocation, agent);
        GmmsThreshold {
            value: instance.to_value(&value),
            witness_group: group,
            witness_partition: parts.into_iter().map(Bundle::from_sorted).collect(),
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::bundle_value;

    fn kwise_agent0(k: u64) -> Instance {
        // 3k-4 goods: k-1 large (3k-7), k-2 medium (3), k-1 small (1)
        let mut row = vec![3 * k - 7; (k - 1) as usize];
        row.extend(vec![3; (k - 2) as usize]);
        row.extend(vec![1; (k - 1) as usize]);
        Instance::from_integers(&[row]).unwrap()
    }

    #[test]
    fn kwise_share_of_first_k_agents() {
        let inst = kwise_agent0(4);
        let r = maximin_share(&inst, 0, &Bundle::all(8), 4).unwrap();
        assert_eq!(r.value, Value::from_integer(6));
        let r = maximin_share(&kwise_agent0(5), 0, &Bundle::all(11), 5).unwrap();
        assert_eq!(r.value, Value::from_integer(9));
    }

    #[test]
    fn more_parts_than_valued_goods_gives_zero() {
        let inst = Instance::from_integers(&[vec![0, 4, 0]]).unwrap();
        let r = maximin_share(&inst, 0, &Bundle::all(3), 2).unwrap();
        assert_eq!(r.value, Value::zero());
        assert_eq!(r.witness.len(), 2);
        let n = maximin_share_naive(&inst, 0, &Bundle::all(3), 2).unwrap();
        assert_eq!(n.value, Value::zero());
    }

    #[test]
    fn zero_parts_is_an_error() {
        let inst = Instance::from_integers(&[vec![1]]).unwrap();
        assert!(maximin_share(&inst, 0, &Bundle::all(1), 0).is_err());
        assert!(maximin_share_naive(&inst, 0, &Bundle::all(1), 0).is_err());
    }

    #[test]
    fn naive_guard_and_trivial_cases() {
        let inst = Instance::from_integers(&[vec![1; 15]]).unwrap();
        assert!(matches!(
            maximin_share_naive(&inst, 0, &Bundle::all(15), 2),
            Err(Error::Limit(_))
        ));
        let one = maximin_share_naive(&inst, 0, &Bundle::all(5), 1).unwrap();
        assert_eq!(one.value, Value::from_integer(5));
        let empty = maximin_share_naive(&inst, 0, &Bundle::empty(), 3).unwrap();
        assert_eq!(empty.value, Value::zero());
        assert_eq!(empty.witness, vec![Bundle::empty(); 3]);
    }

    #[test]
    fn witness_reproduces_value() {
        let inst = Instance::from_integers(&[vec![7, 3, 3, 2, 2, 2, 0, 1]]).unwrap();
        for k in 1..=5 {
            let r = maximin_share(&inst, 0, &Bundle::all(8), k).unwrap();
            assert_eq!(r.witness.len(), k);
            let min = r
                .witness
                .iter()
                .map(|b| bundle_value(&inst, 0, b).unwrap())
                .min()
                .unwrap();
            assert_eq!(min, r.value);
            let covered: Bundle = r.witness.iter().flat_map(|b| b.iter()).collect();
            assert_eq!(covered, Bundle::all(8));
        }
    }

    #[test]
    fn single_agent_threshold_is_own_value() {
        let inst = Instance::from_integers(&[vec![2, 3]]).unwrap();
        let a = Allocation::from_lists(vec![vec![0, 1]]).unwrap();
        let t = gmms_threshold(&inst, &a, 0).unwrap();
        assert_eq!(t.value, Value::from_integer(5));
        assert_eq!(t.witness_group, vec![0]);
    }

    #[test]
    fn threshold_rejects_partial_allocations() {
        let inst = Instance::from_integers(&[vec![2, 3], vec![1, 1]]).unwrap();
        let a = Allocation::from_lists(vec![vec![0], vec![]]).unwrap();
        assert!(gmms_threshold(&inst, &a, 0).is_err());
    }
}
