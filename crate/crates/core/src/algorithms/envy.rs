//! Envy graphs and cycle elimination.

use crate::error::Result;
use crate::instance::{weight_of, with_weights, Allocation, Bundle, Instance, Weight};

/// Directed graph on agents with an edge `i → j` iff `v_i(A_i) < v_i(A_j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvyGraph {
    adj: Vec<Vec<bool>>,
}

impl EnvyGraph {
    pub fn num_agents(&self) -> usize {
        self.adj.len()
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.adj[from][to]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.adj.len();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.adj[i][j])
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().flatten().filter(|&&e| e).count()
    }

    /// Agents nobody envies, ascending.
    pub fn sources(&self) -> Vec<usize> {
        let n = self.adj.len();
        (0..n).filter(|&j| (0..n).all(|i| !self.adj[i][j])).collect()
    }

    /// First cycle met by a depth-first search that starts from each agent
    /// in index order and follows edges in index order. Returned as
    /// `[i_1, ..., i_k]` with edges `i_1 → i_2 → ... → i_k → i_1`.
    pub fn find_cycle(&self) -> Option<Vec<usize>> {
        find_cycle(self.adj.len(), |i, j| self.adj[i][j])
    }

    pub fn is_acyclic(&self) -> bool {
        self.find_cycle().is_none()
    }
}

fn find_cycle(n: usize, edge: impl Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done,
    }
    let mut mark = vec![Mark::New; n];
    for root in 0..n {
        if mark[root] != Mark::New {
            continue;
        }
        // explicit stack of (node, next neighbour to try)
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        mark[root] = Mark::Open;
        while let Some(&mut (u, ref mut next)) = stack.last_mut() {
            if *next == n {
                mark[u] = Mark::Done;
                stack.pop();
                continue;
            }
            let v = *next;
            *next += 1;
            if !edge(u, v) {
                continue;
            }
            match mark[v] {
                Mark::Open => {
                    let start = stack.iter().position(|&(x, _)| x == v).expect("open node on stack");
                    return Some(stack[start..].iter().map(|&(x, _)| x).collect());
                }
                Mark::New => {
                    mark[v] = Mark::Open;
                    stack.push((v, 0));
                }
                Mark::Done => {}
            }
        }
    }
    None
}

/// Bundles plus the value matrix `values[r][b] = v_r(bundle held by b)`.
/// Each bundle keeps goods in the order they were added, so the last entry
/// is the most recently assigned good.
pub(crate) struct EnvyState<'w, T> {
    weights: &'w [Vec<T>],
    pub bundles: Vec<Vec<usize>>,
    pub values: Vec<Vec<T>>,
}

impl<'w, T: Weight> EnvyState<'w, T> {
    pub fn new(weights: &'w [Vec<T>], bundles: Vec<Vec<usize>>) -> Self {
        let values = weights
            .iter()
            .map(|row| bundles.iter().map(|b| weight_of(row, b)).collect())
            .collect();
        EnvyState {
            weights,
            bundles,
            values,
        }
    }

    pub fn n(&self) -> usize {
        self.bundles.len()
    }

    pub fn row(&self, agent: usize) -> &'w [T] {
        &self.weights[agent]
    }

    pub fn envies(&self, i: usize, j: usize) -> bool {
        self.values[i][i] < self.values[i][j]
    }

    pub fn graph(&self) -> EnvyGraph {
        let n = self.n();
        EnvyGraph {
            adj: (0..n)
                .map(|i| (0..n).map(|j| self.envies(i, j)).collect())
                .collect(),
        }
    }

    pub fn sources(&self) -> Vec<usize> {
        let n = self.n();
        (0..n).filter(|&j| (0..n).all(|i| !self.envies(i, j))).collect()
    }

    pub fn edge_count(&self) -> usize {
        let n = self.n();
        (0..n)
            .map(|i| (0..n).filter(|&j| self.envies(i, j)).count())
            .sum()
    }

    pub fn give(&mut self, agent: usize, good: usize) {
        for (r, row) in self.weights.iter().enumerate() {
            self.values[r][agent] += &row[good];
        }
        self.bundles[agent].push(good);
    }

    /// Each agent on the cycle takes its successor's bundle.
    pub fn rotate(&mut self, cycle: &[usize]) {
        let k = cycle.len();
        let taken: Vec<Vec<usize>> = (0..k)
            .map(|a| std::mem::take(&mut self.bundles[cycle[(a + 1) % k]]))
            .collect();
        for (a, b) in taken.into_iter().enumerate() {
            self.bundles[cycle[a]] = b;
        }
        for row in &mut self.values {
            let cols: Vec<T> = (0..k).map(|a| row[cycle[(a + 1) % k]].clone()).collect();
            for (a, v) in cols.into_iter().enumerate() {
                row[cycle[a]] = v;
            }
        }
    }

    /// Rotates cycles until the envy graph is acyclic; returns the cycles
    /// used, in order.
    pub fn resolve_cycles(&mut self) -> Vec<Vec<usize>> {
        let mut rotations = Vec::new();
        let n = self.n();
        while let Some(cycle) = find_cycle(n, |i, j| self.envies(i, j)) {
            let before = self.edge_count();
            #[cfg(debug_assertions)]
            let own_before: Vec<T> = (0..n).map(|i| self.values[i][i].clone()).collect();
            self.rotate(&cycle);
            debug_assert!(self.edge_count() < before, "rotation must remove envy edges");
            #[cfg(debug_assertions)]
            for (i, v) in own_before.iter().enumerate() {
                debug_assert!(self.values[i][i] >= *v, "rotation lowered agent {i}'s value");
            }
            rotations.push(cycle);
            debug_assert!(rotations.len() <= n * n);
        }
        rotations
    }

    pub fn to_allocation(&self) -> Allocation {
        Allocation::from_bundles_unchecked(
            self.bundles
                .iter()
                .map(|b| b.iter().copied().collect::<Bundle>())
                .collect(),
        )
    }
}

/// Envy graph of a (possibly partial) allocation.
pub fn build_envy_graph(instance: &Instance, allocation: &Allocation) -> Result<EnvyGraph> {
    instance.check_allocation(allocation)?;
    Ok(with_weights!(instance, |w| {
        let bundles = allocation.bundles().iter().map(|b| b.goods().to_vec()).collect();
        EnvyState::new(w, bundles).graph()
    }))
}

/// Rotates bundles along envy cycles until the envy graph is acyclic. The
/// output is a permutation of the input bundles in which no agent is worse
/// off.
pub fn resolve_envy_cycles(instance: &Instance, allocation: &Allocation) -> Result<Allocation> {
    instance.check_allocation(allocation)?;
    Ok(with_weights!(instance, |w| {
        let bundles = allocation.bundles().iter().map(|b| b.goods().to_vec()).collect();
        let mut state = EnvyState::new(w, bundles);
        state.resolve_cycles();
        state.to_allocation()
    }))
}
