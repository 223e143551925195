//! Worked examples as parameterized instances, each with its reference
//! allocation where one exists.

use std::fmt;

use crate::algorithms::TieBreakPolicy;
use crate::error::{Error, Result};
use crate::instance::{Allocation, Instance};
use crate::value::Value;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fixture {
    /// `3k-4` goods among `n > 3k-4` agents; the reference allocation is
    /// t-wise fair for every t < k but not k-wise fair. Requires k ≥ 4.
    Sec21 { k: usize, n: usize },
    /// `n+3` goods; the reference allocation is MMS but leaves the last
    /// agent with 2ε while a GMMS allocation gives everyone at least V.
    /// Requires n ≥ 3 and 0 < ε < V/2.
    Sec3 { n: usize, v: Value, eps: Value },
    /// Three agents, five goods all worth 1; the reference allocation is
    /// MMS but not EF1.
    Sec4MmsNotEf1,
    /// `3n-2` goods; the reference allocation is EFL with GMMS factor
    /// n/(2n-1). Requires n ≥ 2.
    AppendixA { n: usize },
    /// Two agents who both want the only good.
    SingleGoodTwoAgents,
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fixture::Sec21 { k, n } => write!(f, "sec21(k={k},n={n})"),
            Fixture::Sec3 { n, v, eps } => write!(f, "sec3(n={n},V={v},eps={eps})"),
            Fixture::Sec4MmsNotEf1 => f.write_str("sec4_mms_not_ef1"),
            Fixture::AppendixA { n } => write!(f, "appendixA(n={n})"),
            Fixture::SingleGoodTwoAgents => f.write_str("single_good_two_agents"),
        }
    }
}

/// Builds the instance and reference allocation for a fixture.
pub fn paper_fixture(fixture: &Fixture) -> Result<(Instance, Option<Allocation>)> {
    match fixture {
        Fixture::Sec21 { k, n } => sec21(*k, *n),
        Fixture::Sec3 { n, v, eps } => sec3(*n, v, eps),
        Fixture::Sec4MmsNotEf1 => {
            let inst = Instance::from_integers(&[vec![1; 5], vec![1; 5], vec![1; 5]])?;
            let a = Allocation::from_lists(vec![vec![0, 1, 2], vec![3], vec![4]])?;
            Ok((inst, Some(a)))
        }
        Fixture::AppendixA { n } => appendix_a(*n),
        Fixture::SingleGoodTwoAgents => {
            let inst = Instance::from_integers(&[vec![1], vec![1]])?;
            let a = Allocation::from_lists(vec![vec![0], vec![]])?;
            Ok((inst, Some(a)))
        }
    }
}

fn sec21(k: usize, n: usize) -> Result<(Instance, Option<Allocation>)> {
    if k < 4 {
        return Err(Error::input(format!("sec21 needs k >= 4, got k={k}")));
    }
    let m = 3 * k - 4;
    if n <= m {
        return Err(Error::input(format!("sec21 needs n > 3k-4 = {m}, got n={n}")));
    }
    // goods: l_1..l_{k-1}, then d_2..d_{k-1}, then s_1..s_{k-1}
    let large = |i: usize| i - 1;
    let medium = |i: usize| (k - 1) + (i - 2);
    let small = |i: usize| (2 * k - 3) + (i - 1);

    let mut bundles: Vec<Vec<usize>> = vec![Vec::new(); n];
    bundles[0].push(large(1));
    for (j, b) in bundles.iter_mut().enumerate().take(k - 1).skip(1) {
        *b = vec![large(j + 1), medium(j + 1)];
    }
    bundles[k - 1] = (1..k).map(small).collect();

    let mut rows = Vec::with_capacity(n);
    let mut focal = vec![1u64; m];
    for i in 1..k {
        focal[large(i)] = 3 * k as u64 - 7;
    }
    for i in 2..k {
        focal[medium(i)] = 3;
    }
    rows.push(focal);
    // agents 1..k-1 only care about what they hold
    for bundle in bundles.iter().take(k).skip(1) {
        let mut row = vec![0u64; m];
        for &g in bundle {
            row[g] = 1;
        }
        rows.push(row);
    }
    // agents with empty bundles only care about l_1
    for _ in k..n {
        let mut row = vec![0u64; m];
        row[large(1)] = 1;
        rows.push(row);
    }
    Ok((Instance::from_integers(&rows)?, Some(Allocation::from_lists(bundles)?)))
}

fn sec3(n: usize, v: &Value, eps: &Value) -> Result<(Instance, Option<Allocation>)> {
    if n < 3 {
        return Err(Error::input(format!("sec3 needs n >= 3, got n={n}")));
    }
    let half = v / &Value::from_integer(2);
    if eps.is_zero() || *eps >= half {
        return Err(Error::input(format!("sec3 needs 0 < eps < V/2, got V={v}, eps={eps}")));
    }
    let m = n + 3;
    let low = &half - eps;
    let high = &half + eps;
    let mut others = vec![v.clone(); m];
    others[n - 3] = half.clone();
    others[n - 2] = half.clone();
    others[n - 1] = low.clone();
    others[n + 1] = low;
    others[n] = high.clone();
    others[n + 2] = high;

    let mut last = vec![v.clone(); m];
    last[n - 1] = Value::zero();
    last[n] = Value::zero();
    last[n + 1] = eps.clone();
    last[n + 2] = eps.clone();

    let mut rows = vec![others; n - 1];
    rows.push(last);

    let mut bundles: Vec<Vec<usize>> = (0..n - 3).map(|i| vec![i]).collect();
    bundles.push(vec![n - 3, n - 2]);
    bundles.push(vec![n - 1, n]);
    bundles.push(vec![n + 1, n + 2]);
    Ok((Instance::new(n, m, rows)?, Some(Allocation::from_lists(bundles)?)))
}

/// Good indices for the tight example: `l_1..l_n`, then `d_2..d_n`, then
/// `s_2..s_n`.
fn appendix_goods(n: usize) -> (impl Fn(usize) -> usize, impl Fn(usize) -> usize, impl Fn(usize) -> usize) {
    (move |i: usize| i - 1, move |i: usize| n + i - 2, move |i: usize| 2 * n - 1 + i - 2)
}

fn appendix_a(n: usize) -> Result<(Instance, Option<Allocation>)> {
    if n < 2 {
        return Err(Error::input(format!("appendixA needs n >= 2, got n={n}")));
    }
    let m = 3 * n - 2;
    let (l, d, s) = appendix_goods(n);
    let nn = n as u64;

    let mut first = vec![Value::one(); m];
    for i in 2..=n {
        first[d(i)] = Value::from_ratio(nn - 1, nn);
        first[s(i)] = Value::from_ratio(1, nn);
    }
    // 1/2 - 1/n = (n-2)/(2n)
    let mut rest = vec![Value::from_ratio(nn - 2, 2 * nn); m];
    rest[l(1)] = Value::from_integer(2);
    for i in 2..=n {
        rest[s(i)] = Value::one();
    }
    let mut rows = vec![first];
    rows.extend(std::iter::repeat_n(rest, n - 1));

    let mut bundles = vec![vec![l(1)]];
    for k in 2..=n {
        bundles.push(vec![l(k), d(k), s(k)]);
    }
    Ok((Instance::new(n, m, rows)?, Some(Allocation::from_lists(bundles)?)))
}

/// The tie-breaking script described for the tight example: agent 0 takes
/// `l_1`, then agents 1..n-1 take the small goods, then the medium goods,
/// then the remaining large goods.
pub fn appendix_a_policy(n: usize) -> Result<TieBreakPolicy> {
    if n < 2 {
        return Err(Error::input(format!("appendixA needs n >= 2, got n={n}")));
    }
    let (l, d, s) = appendix_goods(n);
    let mut sources = vec![0];
    let mut goods = vec![l(1)];
    for pick in [&s as &dyn Fn(usize) -> usize, &d, &l] {
        for i in 2..=n {
            sources.push(i - 1);
            goods.push(pick(i));
        }
    }
    Ok(TieBreakPolicy::from_scripts(Some(sources), Some(goods)))
}
