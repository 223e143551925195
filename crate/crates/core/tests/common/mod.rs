//! Brute-force oracles written straight from the definitions, sharing no
//! code with the library beyond `Instance` accessors and
//! `maximin_share_naive`.

#![allow(dead_code)]

use gmms_core::{maximin_share_naive, Allocation, Assignments, Bundle, Combinations, Instance, Value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn v(inst: &Instance, agent: usize, goods: &[usize]) -> Value {
    goods.iter().map(|&g| inst.value(agent, g)).sum()
}

pub fn without(goods: &[usize], g: usize) -> Vec<usize> {
    goods.iter().copied().filter(|&x| x != g).collect()
}

pub fn ef(inst: &Instance, a: &Allocation) -> bool {
    let n = inst.num_agents();
    (0..n).all(|i| (0..n).all(|j| v(inst, i, a.bundle(i).goods()) >= v(inst, i, a.bundle(j).goods())))
}

pub fn ef1(inst: &Instance, a: &Allocation) -> bool {
    let n = inst.num_agents();
    (0..n).all(|i| {
        let own = v(inst, i, a.bundle(i).goods());
        (0..n).all(|j| {
            let b = a.bundle(j).goods();
            own >= v(inst, i, b) || b.iter().any(|&g| own >= v(inst, i, &without(b, g)))
        })
    })
}

pub fn efx(inst: &Instance, a: &Allocation) -> bool {
    let n = inst.num_agents();
    (0..n).all(|i| {
        let own = v(inst, i, a.bundle(i).goods());
        (0..n).all(|j| {
            let b = a.bundle(j).goods();
            b.iter()
                .filter(|&&g| !inst.value(i, g).is_zero())
                .all(|&g| own >= v(inst, i, &without(b, g)))
        })
    })
}

pub fn efl(inst: &Instance, a: &Allocation) -> bool {
    let n = inst.num_agents();
    (0..n).all(|i| {
        let own = v(inst, i, a.bundle(i).goods());
        (0..n).all(|j| {
            let b = a.bundle(j).goods();
            let positive = b.iter().filter(|&&g| !inst.value(i, g).is_zero()).count();
            positive <= 1
                || b.iter()
                    .any(|&g| own >= v(inst, i, &without(b, g)) && own >= *inst.value(i, g))
        })
    })
}

/// All subsets of `0..n` containing `agent`, as sorted vectors.
pub fn groups_with(n: usize, agent: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|mask| mask & (1 << agent) != 0)
        .map(|mask| (0..n).filter(|&j| mask & (1 << j) != 0).collect())
        .collect()
}

pub fn pooled(a: &Allocation, group: &[usize]) -> Bundle {
    group.iter().flat_map(|&j| a.bundle(j).iter()).collect()
}

/// max over every group containing `agent` (no skipping) of the naive μ.
pub fn threshold(inst: &Instance, a: &Allocation, agent: usize) -> Value {
    groups_with(inst.num_agents(), agent)
        .into_iter()
        .map(|grp| {
            maximin_share_naive(inst, agent, &pooled(a, &grp), grp.len())
                .unwrap()
                .value
        })
        .max()
        .unwrap()
}

/// Every group of size `k` (or every size when `k` is None).
pub fn group_fair(inst: &Instance, a: &Allocation, k: Option<usize>) -> bool {
    let n = inst.num_agents();
    (0..n).all(|i| {
        let own = v(inst, i, a.bundle(i).goods());
        groups_with(n, i)
            .into_iter()
            .filter(|g| k.is_none_or(|k| g.len() == k))
            .all(|grp| own >= maximin_share_naive(inst, i, &pooled(a, &grp), grp.len()).unwrap().value)
    })
}

pub fn gmms(inst: &Instance, a: &Allocation) -> bool {
    group_fair(inst, a, None)
}

pub fn mms(inst: &Instance, a: &Allocation) -> bool {
    let n = inst.num_agents();
    let all = Bundle::all(inst.num_goods());
    (0..n).all(|i| v(inst, i, a.bundle(i).goods()) >= maximin_share_naive(inst, i, &all, n).unwrap().value)
}

pub fn all_allocations(n: usize, m: usize) -> impl Iterator<Item = Allocation> {
    Assignments::new(n, m).map(move |owner| Allocation::from_assignment(n, &owner))
}

pub fn subsets(m: usize, k: usize) -> Combinations {
    Combinations::new(m, k)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small random integer instance with values in `0..=hi`.
pub fn random_instance(rng: &mut ChaCha8Rng, n: usize, m: usize, hi: u64) -> Instance {
    let rows: Vec<Vec<u64>> = (0..n).map(|_| (0..m).map(|_| rng.random_range(0..=hi)).collect()).collect();
    Instance::from_integers(&rows).unwrap()
}

pub fn random_allocation(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Allocation {
    let owner: Vec<usize> = (0..m).map(|_| rng.random_range(0..n)).collect();
    Allocation::from_assignment(n, &owner)
}
