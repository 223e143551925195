//! Fairness verifiers.
//!
//! Every checker takes a complete allocation and returns a [`FairnessReport`].
//! A failed report carries a [`Violation`] whose `lhs` is the envious agent's
//! value for her own bundle and whose `rhs` is the quantity that exceeds it:
//!
//! | notion | `rhs` |
//! |--------|-------|
//! | EF     | `v_i(A_j)` |
//! | EF1    | `min_g v_i(A_j \ g)`, `good` = the removed good |
//! | EFX    | `v_i(A_j \ g)` for the least positively valued `g` |
//! | EFL    | `min_g max(v_i(A_j \ g), v_i(g))` |
//! | MMS, PMMS, k-wise, GMMS | `μ_i^{|J|}` over the pooled goods, with the partition |
//!
//! [`confirm_violation`] re-derives the inequality from the witness alone.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::combinatorics::Combinations;
use crate::error::{Error, Result};
use crate::instance::{bundle_value, weight_of, with_weights, Allocation, Bundle, Instance, Weight};
use crate::maximin::{mu, mu_above, threshold};
use crate::value::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Notion {
    Ef,
    Ef1,
    Efx,
    Efl,
    Mms,
    Pmms,
    Kwise(usize),
    Gmms,
}

impl fmt::Display for Notion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Notion::Ef => f.write_str("ef"),
            Notion::Ef1 => f.write_str("ef1"),
            Notion::Efx => f.write_str("efx"),
            Notion::Efl => f.write_str("efl"),
            Notion::Mms => f.write_str("mms"),
            Notion::Pmms => f.write_str("pmms"),
            Notion::Kwise(k) => write!(f, "kwise({k})"),
            Notion::Gmms => f.write_str("gmms"),
        }
    }
}

impl FromStr for Notion {
    type Err = Error;

    /// Accepts the names printed by `Display`; `kwise(k)` carries its `k`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Ok(match lower.as_str() {
            "ef" => Notion::Ef,
            "ef1" => Notion::Ef1,
            "efx" => Notion::Efx,
            "efl" => Notion::Efl,
            "mms" => Notion::Mms,
            "pmms" => Notion::Pmms,
            "gmms" => Notion::Gmms,
            other => {
                let k = other
                    .strip_prefix("kwise(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|k| k.parse().ok())
                    .ok_or_else(|| Error::input(format!("unknown fairness notion {s:?}")))?;
                Notion::Kwise(k)
            }
        })
    }
}

impl Serialize for Notion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub agent: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub other: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub good: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<Bundle>>,
    pub lhs: Value,
    pub rhs: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FairnessReport {
    pub notion: Notion,
    pub holds: bool,
    pub witness: Option<Violation>,
}

impl FairnessReport {
    fn from_raw<T: Weight>(instance: &Instance, notion: Notion, raw: Option<Raw<T>>) -> Self {
        let witness = raw.map(|r| Violation {
            agent: r.agent,
            other: r.other,
            group: r.group,
            good: r.good,
            partition: r
                .partition
                .map(|p| p.into_iter().map(Bundle::from_sorted).collect()),
            lhs: instance.to_value(&r.lhs),
            rhs: instance.to_value(&r.rhs),
        });
        FairnessReport {
            notion,
            holds: witness.is_none(),
            witness,
        }
    }

    pub fn to_json(&self) -> Vec<u8> {
        crate::doc::finish(serde_json::to_value(self).expect("report serializes"))
    }
}

struct Raw<T> {
    agent: usize,
    other: Option<usize>,
    group: Option<Vec<usize>>,
    good: Option<usize>,
    partition: Option<Vec<Vec<usize>>>,
    lhs: T,
    rhs: T,
}

impl<T> Raw<T> {
    fn pair(agent: usize, other: usize, lhs: T, rhs: T) -> Self {
        Raw {
            agent,
            other: Some(other),
            group: None,
            good: None,
            partition: None,
            lhs,
            rhs,
        }
    }

    fn share(agent: usize, group: Vec<usize>, parts: Vec<Vec<usize>>, lhs: T, rhs: T) -> Self {
        Raw {
            agent,
            other: None,
            group: Some(group),
            good: None,
            partition: Some(parts),
            lhs,
            rhs,
        }
    }
}

/// `(v_i(A_j), per-good values)` for every `j`, against agent `i`'s row.
fn view<T: Weight>(row: &[T], allocation: &Allocation) -> Vec<T> {
    allocation
        .bundles()
        .iter()
        .map(|b| weight_of(row, b.goods()))
        .collect()
}

fn pairs<T: Weight>(
    w: &[Vec<T>],
    allocation: &Allocation,
    mut check: impl FnMut(usize, usize, &[T], &T, &T) -> Option<Raw<T>>,
) -> Option<Raw<T>> {
    for (i, row) in w.iter().enumerate() {
        let values = view(row, allocation);
        for j in 0..allocation.num_agents() {
            if i == j {
                continue;
            }
            if let Some(v) = check(i, j, row, &values[i], &values[j]) {
                return Some(v);
            }
        }
    }
    None
}

fn ef_raw<T: Weight>(w: &[Vec<T>], a: &Allocation) -> Option<Raw<T>> {
    pairs(w, a, |i, j, _, own, other| {
        (own < other).then(|| Raw::pair(i, j, own.clone(), other.clone()))
    })
}

fn ef1_raw<T: Weight>(w: &[Vec<T>], a: &Allocation) -> Option<Raw<T>> {
    pairs(w, a, |i, j, row, own, other| {
        // removing the most valuable good is the best single removal
        let (good, top) = a
            .bundle(j)
            .iter()
            .map(|g| (g, &row[g]))
            .fold(None, |acc: Option<(usize, &T)>, (g, v)| match acc {
                Some((_, best)) if best >= v => acc,
                _ => Some((g, v)),
            })?;
        let rest = other.clone() - top.clone();
        (*own < rest).then(|| Raw {
            good: Some(good),
            ..Raw::pair(i, j, own.clone(), rest)
        })
    })
}

fn efx_raw<T: Weight>(w: &[Vec<T>], a: &Allocation) -> Option<Raw<T>> {
    pairs(w, a, |i, j, row, own, other| {
        let (good, least) = a
            .bundle(j)
            .iter()
            .filter(|&g| row[g] > T::zero())
            .map(|g| (g, &row[g]))
            .fold(None, |acc: Option<(usize, &T)>, (g, v)| match acc {
                Some((_, best)) if best <= v => acc,
                _ => Some((g, v)),
            })?;
        let rest = other.clone() - least.clone();
        (*own < rest).then(|| Raw {
            good: Some(good),
            ..Raw::pair(i, j, own.clone(), rest)
        })
    })
}

fn efl_raw<T: Weight>(w: &[Vec<T>], a: &Allocation) -> Option<Raw<T>> {
    pairs(w, a, |i, j, row, own, other| {
        let bundle = a.bundle(j);
        if bundle.iter().filter(|&g| row[g] > T::zero()).count() <= 1 {
            return None;
        }
        let (good, cost) = bundle
            .iter()
            .map(|g| {
                let rest = other.clone() - row[g].clone();
                let cost = if rest >= row[g] { rest } else { row[g].clone() };
                (g, cost)
            })
            .fold(None, |acc: Option<(usize, T)>, (g, c)| match acc {
                Some((_, ref best)) if *best <= c => acc,
                _ => Some((g, c)),
            })?;
        (*own < cost).then(|| Raw {
            good: Some(good),
            ..Raw::pair(i, j, own.clone(), cost)
        })
    })
}

fn mms_raw<T: Weight>(w: &[Vec<T>], a: &Allocation, m: usize) -> Option<Raw<T>> {
    let all: Vec<usize> = (0..m).collect();
    let n = a.num_agents();
    for (i, row) in w.iter().enumerate() {
        let own = weight_of(row, a.bundle(i).goods());
        let share = mu(row, &all, n);
        if own < share.value {
            return Some(Raw::share(i, (0..n).collect(), share.parts, own, share.value));
        }
    }
    None
}

/// Shared k-wise loop: agent `i` against every size-`k` group containing it.
fn group_raw<T: Weight>(w: &[Vec<T>], a: &Allocation, k: usize) -> Option<Raw<T>> {
    let n = a.num_agents();
    for (i, row) in w.iter().enumerate() {
        let own = weight_of(row, a.bundle(i).goods());
        let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        for pick in Combinations::new(others.len(), k - 1) {
            let mut group: Vec<usize> = pick.iter().map(|&x| others[x]).collect();
            group.push(i);
            group.sort_unstable();
            let mut pooled: Vec<usize> = group.iter().flat_map(|&j| a.bundle(j).iter()).collect();
            pooled.sort_unstable();
            if let Some(r) = mu_above(row, &pooled, k, &own, false) {
                return Some(Raw::share(i, group, r.parts, own, r.value));
            }
        }
    }
    None
}

fn gmms_raw<T: Weight>(w: &[Vec<T>], a: &Allocation) -> Option<Raw<T>> {
    for (i, row) in w.iter().enumerate() {
        let own = weight_of(row, a.bundle(i).goods());
        let (value, group, parts) = threshold(row, a, i);
        if own < value {
            return Some(Raw::share(i, group, parts, own, value));
        }
    }
    None
}

/// Runs the checker for `notion`.
pub fn check(instance: &Instance, allocation: &Allocation, notion: Notion) -> Result<FairnessReport> {
    instance.check_complete(allocation)?;
    if let Notion::Kwise(k) = notion {
        if k == 0 || k > instance.num_agents() {
            return Err(Error::input(format!(
                "group size k = {k} must lie in 1..={}",
                instance.num_agents()
            )));
        }
    }
    Ok(with_weights!(instance, |w| {
        let raw = match notion {
            Notion::Ef => ef_raw(w, allocation),
            Notion::Ef1 => ef1_raw(w, allocation),
            Notion::Efx => efx_raw(w, allocation),
            Notion::Efl => efl_raw(w, allocation),
            Notion::Mms => mms_raw(w, allocation, instance.num_goods()),
            Notion::Pmms => group_raw(w, allocation, 2.min(instance.num_agents())),
            Notion::Kwise(k) => group_raw(w, allocation, k),
            Notion::Gmms => gmms_raw(w, allocation),
        };
        FairnessReport::from_raw(instance, notion, raw)
    }))
}

/// `v_i(A_i) ≥ v_i(A_j)` for all `i, j`.
pub fn is_envy_free(instance: &Instance, allocation: &Allocation) -> Result<FairnessReport> {
    check(instance, allocation, Notion::Ef)
}

/// Envy-free up to one good. Pairs with `A_j = ∅` never violate.
pub fn is_ef1(instance: &Instance, allocation: &Allocation) -> Result<FairnessReport> {
    check(instance, allocation, Notion::Ef1)
}

/// Envy-free up to any positively valued good.
pub fn is_efx(instance: &Instance, allocation: &Allocation) -> Result<FairnessReport> {
    check(instance, allocation, Notion::Efx)
}

/// Envy-free up to one less-preferred good.
pub fn is_efl(instance: &Instance, allocation: &Allocation) -> Result<FairnessReport> {
    check(instance, allocation, Notion::Efl)
}

pub fn is_mms(instance: &Instance, allocation: &Allocation) -> Result<FairnessReport> {
    check(instance, allocation, Notion::Mms)
}

/// Pairwise maximin share. A single agent holds vacuously.
pub fn is_pmms(instance: &Instance, allocation: &Allocation) -> Result<FairnessReport> {
    if instance.num_agents() == 1 {
        instance.check_complete(allocation)?;
        return Ok(FairnessReport {
            notion: Notion::Pmms,
            holds: true,
            witness: None,
        });
    }
    check(instance, allocation, Notion::Pmms)
}

pub fn is_kwise_fair(instance: &Instance, allocation: &Allocation, k: usize) -> Result<FairnessReport> {
    check(instance, allocation, Notion::Kwise(k))
}

pub fn is_gmms(instance: &Instance, allocation: &Allocation) -> Result<FairnessReport> {
    check(instance, allocation, Notion::Gmms)
}

/// Approximation factor; `Infinite` when no agent has a positive threshold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factor {
    Finite(Value),
    Infinite,
}

impl Factor {
    pub fn at_least(&self, alpha: &Value) -> bool {
        match self {
            Factor::Finite(v) => v >= alpha,
            Factor::Infinite => true,
        }
    }

    pub fn finite(&self) -> Option<&Value> {
        match self {
            Factor::Finite(v) => Some(v),
            Factor::Infinite => None,
        }
    }

    pub fn to_decimal(&self, sig: usize) -> String {
        match self {
            Factor::Finite(v) => v.to_decimal(sig),
            Factor::Infinite => "inf".into(),
        }
    }
}

impl PartialOrd for Factor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Factor {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Factor::Finite(a), Factor::Finite(b)) => a.cmp(b),
            (Factor::Finite(_), Factor::Infinite) => Ordering::Less,
            (Factor::Infinite, Factor::Finite(_)) => Ordering::Greater,
            (Factor::Infinite, Factor::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Finite(v) => v.fmt(f),
            Factor::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Factor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `min_i v_i(A_i) / GMMS_i` over agents with a positive threshold.
pub fn gmms_factor(instance: &Instance, allocation: &Allocation) -> Result<Factor> {
    instance.check_complete(allocation)?;
    Ok(with_weights!(instance, |w| {
        let mut best: Option<Value> = None;
        for (i, row) in w.iter().enumerate() {
            let (t, _, _) = threshold(row, allocation, i);
            if num_traits::Zero::is_zero(&t) {
                continue;
            }
            let own = weight_of(row, allocation.bundle(i).goods());
            let ratio = &instance.to_value(&own) / &instance.to_value(&t);
            if best.as_ref().is_none_or(|b| ratio < *b) {
                best = Some(ratio);
            }
        }
        best.map_or(Factor::Infinite, Factor::Finite)
    }))
}

/// Re-derives a reported violation from its witness using only
/// [`bundle_value`]: returns true iff the witness really shows
/// `lhs < rhs` with the recorded values.
pub fn confirm_violation(
    instance: &Instance,
    allocation: &Allocation,
    report: &FairnessReport,
) -> Result<bool> {
    let Some(v) = &report.witness else {
        return Ok(false);
    };
    let i = v.agent;
    let lhs = bundle_value(instance, i, allocation.bundle(i))?;
    if lhs != v.lhs || !(v.lhs < v.rhs) {
        return Ok(false);
    }
    let val = |g: usize| instance.value(i, g).clone();
    match report.notion {
        Notion::Ef | Notion::Ef1 | Notion::Efx | Notion::Efl => {
            let Some(j) = v.other else { return Ok(false) };
            let other = allocation.bundle(j);
            let total = bundle_value(instance, i, other)?;
            let ok = match report.notion {
                Notion::Ef => total == v.rhs,
                Notion::Ef1 => {
                    // no single removal brings v_i(A_j \ g) down to lhs
                    !other.is_empty() && other.iter().all(|g| &total - &val(g) > lhs)
                        && v.good.is_some_and(|g| other.contains(g) && &total - &val(g) == v.rhs)
                }
                Notion::Efx => v.good.is_some_and(|g| {
                    other.contains(g) && !val(g).is_zero() && &total - &val(g) == v.rhs
                }),
                _ => {
                    let positive = other.iter().filter(|&g| !val(g).is_zero()).count();
                    positive > 1
                        && other.iter().all(|g| {
                            let rest = &total - &val(g);
                            rest > lhs || val(g) > lhs
                        })
                }
            };
            Ok(ok)
        }
        Notion::Mms | Notion::Pmms | Notion::Kwise(_) | Notion::Gmms => {
            let (Some(group), Some(parts)) = (&v.group, &v.partition) else {
                return Ok(false);
            };
            if !group.contains(&i) || parts.len() != group.len() {
                return Ok(false);
            }
            let expected_size = match report.notion {
                Notion::Mms => instance.num_agents(),
                Notion::Pmms => 2,
                Notion::Kwise(k) => k,
                _ => group.len(),
            };
            if group.len() != expected_size {
                return Ok(false);
            }
            let pooled: Bundle = group.iter().flat_map(|&j| allocation.bundle(j).iter()).collect();
            let covered: Bundle = parts.iter().flat_map(|b| b.iter()).collect();
            let count: usize = parts.iter().map(Bundle::len).sum();
            if covered != pooled || count != pooled.len() {
                return Ok(false);
            }
            let min = parts
                .iter()
                .map(|b| bundle_value(instance, i, b))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .min()
                .expect("nonempty group");
            Ok(min == v.rhs)
        }
    }
}
