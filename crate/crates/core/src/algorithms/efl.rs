//! Envy-graph allocation that always hands an unenvied agent her favourite
//! remaining good, resolving envy cycles after every assignment. The result
//! is EFL, and therefore 1/2-GMMS.

use crate::error::{Error, Result};
use crate::instance::{with_weights, Allocation, Instance, Weight};

use super::envy::EnvyState;

/// How the allocation loop breaks ties.
///
/// By default the lowest-index source receives the lowest-index good among
/// its most valued remaining goods. A scripted choice replaces the default
/// at every step; each scripted entry is checked against the rule it
/// overrides (the agent must be a source, the good must be an argmax).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TieBreakPolicy {
    sources: Option<Vec<usize>>,
    goods: Option<Vec<usize>>,
}

impl TieBreakPolicy {
    pub fn lowest_index() -> Self {
        Self::default()
    }

    pub fn from_scripts(sources: Option<Vec<usize>>, goods: Option<Vec<usize>>) -> Self {
        TieBreakPolicy { sources, goods }
    }

    pub fn scripted_sources(&self) -> Option<&[usize]> {
        self.sources.as_deref()
    }

    pub fn scripted_goods(&self) -> Option<&[usize]> {
        self.goods.as_deref()
    }
}

/// One iteration of the loop: who received which good, and the envy cycles
/// rotated afterwards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EflStep {
    pub agent: usize,
    pub good: usize,
    pub rotations: Vec<Vec<usize>>,
}

/// Runs the allocation loop with the given policy.
pub fn efl_allocate(instance: &Instance, policy: &TieBreakPolicy) -> Result<Allocation> {
    efl_allocate_traced(instance, policy).map(|(a, _)| a)
}

/// [`efl_allocate`] plus the per-step trace.
pub fn efl_allocate_traced(
    instance: &Instance,
    policy: &TieBreakPolicy,
) -> Result<(Allocation, Vec<EflStep>)> {
    with_weights!(instance, |w| run(w, policy))
}

fn run<T: Weight>(w: &[Vec<T>], policy: &TieBreakPolicy) -> Result<(Allocation, Vec<EflStep>)> {
    let n = w.len();
    let m = w.first().map_or(0, Vec::len);
    let mut state = EnvyState::new(w, vec![Vec::new(); n]);
    let mut remaining: Vec<bool> = vec![true; m];
    let mut trace = Vec::with_capacity(m);

    for step in 0..m {
        let sources = state.sources();
        // the graph is kept acyclic, so some agent is unenvied
        assert!(!sources.is_empty(), "acyclic envy graph without a source");
        let agent = match policy.scripted_sources() {
            None => sources[0],
            Some(script) => {
                let &a = script.get(step).ok_or_else(|| Error::Policy {
                    step,
                    message: "source script exhausted".into(),
                })?;
                if !sources.contains(&a) {
                    return Err(Error::Policy {
                        step,
                        message: format!("agent {a} is not a source (sources: {sources:?})"),
                    });
                }
                a
            }
        };

        let row = &w[agent];
        let top = (0..m)
            .filter(|&g| remaining[g])
            .map(|g| &row[g])
            .max()
            .expect("a good remains")
            .clone();
        let good = match policy.scripted_goods() {
            None => (0..m)
                .find(|&g| remaining[g] && row[g] == top)
                .expect("argmax exists"),
            Some(script) => {
                let &g = script.get(step).ok_or_else(|| Error::Policy {
                    step,
                    message: "good script exhausted".into(),
                })?;
                if g >= m || !remaining[g] {
                    return Err(Error::Policy {
                        step,
                        message: format!("good {g} is not available"),
                    });
                }
                if row[g] != top {
                    return Err(Error::Policy {
                        step,
                        message: format!("good {g} is not among agent {agent}'s most valued remaining goods"),
                    });
                }
                g
            }
        };

        remaining[good] = false;
        state.give(agent, good);
        let rotations = state.resolve_cycles();
        debug_assert!(ef1_wrt_last_good(&state), "EF1 w.r.t. last good broken at step {step}");
        trace.push(EflStep {
            agent,
            good,
            rotations,
        });
    }

    Ok((state.to_allocation(), trace))
}

/// Every agent is envy-free towards each other bundle once that bundle's
/// most recently assigned good is removed.
fn ef1_wrt_last_good<T: Weight>(state: &EnvyState<'_, T>) -> bool {
    let n = state.n();
    (0..n).all(|r| {
        (0..n).all(|s| match state.bundles[s].last() {
            None => true,
            Some(&g) => {
                let without = state.values[r][s].clone() - state.row(r)[g].clone();
                state.values[r][r] >= without
            }
        })
    })
}
