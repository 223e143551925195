//! Instances, bundles and allocations.
//!
//! An [`Instance`] keeps the valuation matrix as exact [`Value`]s and, next to
//! it, the same matrix rescaled to a common denominator. Search code works on
//! the scaled integers (`u128` when every row sum fits comfortably, `BigUint`
//! otherwise), so sums and comparisons stay exact without rational
//! normalisation on every step.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Sub, SubAssign};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::value::Value;

/// Integer weight used by the search kernels.
pub(crate) trait Weight:
    Clone
    + Ord
    + Debug
    + Send
    + Sync
    + Zero
    + From<u64>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
{
    fn to_biguint(&self) -> BigUint;
}

impl Weight for u128 {
    fn to_biguint(&self) -> BigUint {
        BigUint::from(*self)
    }
}

impl Weight for BigUint {
    fn to_biguint(&self) -> BigUint {
        self.clone()
    }
}

/// Row sums must stay below this for the `u128` kernel, leaving 32 bits of
/// headroom for multiplying by group sizes.
const SMALL_ROW_SUM_LIMIT_BITS: u64 = 96;

#[derive(Clone, Debug)]
pub(crate) enum Weights {
    Small(Vec<Vec<u128>>),
    Big(Vec<Vec<BigUint>>),
}

/// Runs `$body` with `$w` bound to the instance's scaled weight matrix,
/// monomorphised for both kernels.
macro_rules! with_weights {
    ($inst:expr, |$w:ident| $body:expr) => {
        match $inst.weights() {
            $crate::instance::Weights::Small($w) => $body,
            $crate::instance::Weights::Big($w) => $body,
        }
    };
}
pub(crate) use with_weights;

/// `n` agents, `m` goods and an `n × m` matrix of nonnegative additive
/// valuations.
#[derive(Clone, Debug)]
pub struct Instance {
    num_goods: usize,
    valuations: Vec<Vec<Value>>,
    scale: BigUint,
    weights: Weights,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.num_goods == other.num_goods && self.valuations == other.valuations
    }
}

impl Eq for Instance {}

impl Instance {
    pub fn new(num_agents: usize, num_goods: usize, valuations: Vec<Vec<Value>>) -> Result<Self> {
        if num_agents == 0 {
            return Err(Error::input("an instance needs at least one agent"));
        }
        if valuations.len() != num_agents {
            return Err(Error::input(format!(
                "expected {num_agents} valuation rows, found {}",
                valuations.len()
            )));
        }
        for (i, row) in valuations.iter().enumerate() {
            if row.len() != num_goods {
                return Err(Error::input(format!(
                    "valuation row {i} has {} entries, expected {num_goods}",
                    row.len()
                )));
            }
        }

        let mut scale = BigUint::one();
        for v in valuations.iter().flatten() {
            scale = scale.lcm(&v.denom_biguint());
        }
        let big: Vec<Vec<BigUint>> = valuations
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| v.numer_biguint() * (&scale / v.denom_biguint()))
                    .collect()
            })
            .collect();
        let fits_small = big.iter().all(|row| {
            let sum: BigUint = row.iter().sum();
            sum.bits() < SMALL_ROW_SUM_LIMIT_BITS
        });
        let weights = if fits_small {
            Weights::Small(
                big.iter()
                    .map(|row| row.iter().map(|w| w.to_u128().expect("checked bits")).collect())
                    .collect(),
            )
        } else {
            Weights::Big(big)
        };

        Ok(Instance {
            num_goods,
            valuations,
            scale,
            weights,
        })
    }

    /// Convenience constructor from integer valuations.
    pub fn from_integers(rows: &[Vec<u64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        let vals = rows
            .iter()
            .map(|r| r.iter().map(|&x| Value::from_integer(x)).collect())
            .collect();
        Instance::new(n, m, vals)
    }

    pub fn num_agents(&self) -> usize {
        self.valuations.len()
    }

    pub fn num_goods(&self) -> usize {
        self.num_goods
    }

    pub fn valuations(&self) -> &[Vec<Value>] {
        &self.valuations
    }

    /// `v_agent(good)`. Panics on out-of-range indices.
    pub fn value(&self, agent: usize, good: usize) -> &Value {
        &self.valuations[agent][good]
    }

    /// True when every agent has the same valuation row.
    pub fn has_identical_valuations(&self) -> bool {
        self.valuations.windows(2).all(|w| w[0] == w[1])
    }

    pub(crate) fn weights(&self) -> &Weights {
        &self.weights
    }

    /// Converts a scaled integer weight back into an exact value.
    pub(crate) fn to_value<T: Weight>(&self, w: &T) -> Value {
        Value::from_biguint_ratio(w.to_biguint(), self.scale.clone())
    }

    pub(crate) fn check_agent(&self, agent: usize) -> Result<()> {
        if agent >= self.num_agents() {
            return Err(Error::input(format!(
                "agent {agent} out of range (instance has {} agents)",
                self.num_agents()
            )));
        }
        Ok(())
    }

    pub(crate) fn check_bundle(&self, bundle: &Bundle) -> Result<()> {
        if let Some(&g) = bundle.goods().last() {
            if g >= self.num_goods {
                return Err(Error::input(format!(
                    "good {g} out of range (instance has {} goods)",
                    self.num_goods
                )));
            }
        }
        Ok(())
    }

    /// Validates shape and range of `allocation` against this instance.
    pub fn check_allocation(&self, allocation: &Allocation) -> Result<()> {
        if allocation.num_agents() != self.num_agents() {
            return Err(Error::input(format!(
                "allocation has {} bundles but the instance has {} agents",
                allocation.num_agents(),
                self.num_agents()
            )));
        }
        for b in allocation.bundles() {
            self.check_bundle(b)?;
        }
        Ok(())
    }

    /// Like [`check_allocation`](Self::check_allocation), and additionally
    /// rejects partial allocations.
    pub fn check_complete(&self, allocation: &Allocation) -> Result<()> {
        self.check_allocation(allocation)?;
        if !allocation.is_complete(self.num_goods) {
            return Err(Error::input(
                "allocation is partial; this operation needs every good allocated",
            ));
        }
        Ok(())
    }
}

/// `v_agent(bundle)`: the exact additive value of a bundle.
pub fn bundle_value(instance: &Instance, agent: usize, bundle: &Bundle) -> Result<Value> {
    instance.check_agent(agent)?;
    instance.check_bundle(bundle)?;
    let row = &instance.valuations[agent];
    Ok(bundle.iter().map(|g| &row[g]).sum())
}

pub(crate) fn weight_of<T: Weight>(row: &[T], goods: &[usize]) -> T {
    let mut acc = T::zero();
    for &g in goods {
        acc += &row[g];
    }
    acc
}

/// A set of good indices, kept sorted and duplicate-free.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Bundle(Vec<usize>);

impl Bundle {
    pub fn empty() -> Self {
        Bundle(Vec::new())
    }

    /// Sorts the goods; duplicate indices are an error.
    pub fn new(mut goods: Vec<usize>) -> Result<Self> {
        goods.sort_unstable();
        if let Some(w) = goods.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::input(format!("good {} listed twice in a bundle", w[0])));
        }
        Ok(Bundle(goods))
    }

    pub(crate) fn from_sorted(goods: Vec<usize>) -> Self {
        debug_assert!(goods.windows(2).all(|w| w[0] < w[1]));
        Bundle(goods)
    }

    pub fn goods(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, good: usize) -> bool {
        self.0.binary_search(&good).is_ok()
    }

    pub fn union(&self, other: &Bundle) -> Bundle {
        let mut v: Vec<usize> = self.0.iter().chain(other.0.iter()).copied().collect();
        v.sort_unstable();
        v.dedup();
        Bundle(v)
    }

    /// All goods `0..m`.
    pub fn all(m: usize) -> Bundle {
        Bundle((0..m).collect())
    }
}

impl FromIterator<usize> for Bundle {
    /// Collects, sorts and deduplicates.
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut v: Vec<usize> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Bundle(v)
    }
}

/// An ordered tuple of pairwise-disjoint bundles, one per agent. Goods that
/// appear in no bundle are unallocated; the allocation is complete when every
/// good of the instance appears.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Allocation {
    bundles: Vec<Bundle>,
}

impl Allocation {
    pub fn new(bundles: Vec<Bundle>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for b in &bundles {
            for g in b.iter() {
                if !seen.insert(g) {
                    return Err(Error::input(format!("good {g} appears in two bundles")));
                }
            }
        }
        Ok(Allocation { bundles })
    }

    /// Builds from per-agent good lists, sorting each.
    pub fn from_lists(lists: Vec<Vec<usize>>) -> Result<Self> {
        let bundles = lists.into_iter().map(Bundle::new).collect::<Result<Vec<_>>>()?;
        Allocation::new(bundles)
    }

    /// All-empty allocation for `n` agents.
    pub fn empty(n: usize) -> Self {
        Allocation {
            bundles: vec![Bundle::empty(); n],
        }
    }

    /// Builds from an assignment vector: good `g` goes to agent `owner[g]`.
    pub fn from_assignment(num_agents: usize, owner: &[usize]) -> Self {
        let mut lists = vec![Vec::new(); num_agents];
        for (g, &a) in owner.iter().enumerate() {
            lists[a].push(g);
        }
        Allocation {
            bundles: lists.into_iter().map(Bundle::from_sorted).collect(),
        }
    }

    pub(crate) fn from_bundles_unchecked(bundles: Vec<Bundle>) -> Self {
        Allocation { bundles }
    }

    pub fn bundles(&self) -> &[Bundle] {
        &self.bundles
    }

    pub fn bundle(&self, agent: usize) -> &Bundle {
        &self.bundles[agent]
    }

    pub fn num_agents(&self) -> usize {
        self.bundles.len()
    }

    pub fn num_allocated(&self) -> usize {
        self.bundles.iter().map(Bundle::len).sum()
    }

    /// True when the bundles cover all goods `0..m` (bundles are disjoint, so
    /// counting suffices once ranges are valid).
    pub fn is_complete(&self, num_goods: usize) -> bool {
        self.num_allocated() == num_goods && self.bundles.iter().all(|b| b.iter().all(|g| g < num_goods))
    }

    pub fn into_bundles(self) -> Vec<Bundle> {
        self.bundles
    }
}
