//! Graph construction: the simple undirected [`Graph`] used by every analysis
//! routine, and the seeded inhomogeneous random K-out generator built on it.

mod generate;
pub mod io;
mod params;

pub use generate::{generate, KOutGraph, Seed};
pub use params::GraphParams;

use crate::error::{config, Result};

/// Simple undirected graph on nodes `0..n`, stored as sorted neighbor lists in
/// compressed (CSR) form. No self-loops, no parallel edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Graph {
    /// Builds a graph from an arbitrary edge collection. Duplicate edges (in
    /// either orientation) are merged; self-loops and out-of-range endpoints
    /// are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut pairs = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(config(format!("edge ({a}, {b}) out of range for n={n}")));
            }
            if a == b {
                return Err(config(format!("self-loop at node {a}")));
            }
            pairs.push((a, b));
        }
        Ok(Self::from_pairs(n, &pairs))
    }

    /// Symmetric CSR build from endpoint pairs, merging duplicates. Callers
    /// guarantee in-range endpoints and no self-loops.
    pub(crate) fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for &(a, b) in pairs {
            offsets[a + 1] += 1;
            offsets[b + 1] += 1;
        }
        for v in 0..n {
            offsets[v + 1] += offsets[v];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0usize; offsets[n]];
        for &(a, b) in pairs {
            targets[fill[a]] = b;
            fill[a] += 1;
            targets[fill[b]] = a;
            fill[b] += 1;
        }
        // sort and deduplicate each slice, compacting in place
        let mut write = 0;
        let mut start = 0;
        for v in 0..n {
            let end = offsets[v + 1];
            targets[start..end].sort_unstable();
            let mut last = usize::MAX;
            for r in start..end {
                let x = targets[r];
                if x != last {
                    targets[write] = x;
                    write += 1;
                    last = x;
                }
            }
            start = end;
            offsets[v + 1] = write;
        }
        targets.truncate(write);
        Graph { offsets, targets }
    }

    /// Builds from per-node neighbor lists, sorting and deduplicating each.
    /// Callers guarantee symmetry and the absence of self-loops.
    pub(crate) fn from_lists(mut lists: Vec<Vec<usize>>) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        offsets.push(0);
        let total: usize = lists.iter().map(Vec::len).sum();
        let mut targets = Vec::with_capacity(total);
        for list in &mut lists {
            list.sort_unstable();
            list.dedup();
            targets.extend_from_slice(list);
            offsets.push(targets.len());
        }
        Graph { offsets, targets }
    }

    /// The complete graph on `n` nodes.
    pub fn complete(n: usize) -> Self {
        let lists = (0..n)
            .map(|v| (0..n).filter(|&u| u != v).collect())
            .collect();
        Self::from_lists(lists)
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// Sorted neighbors of `v`.
    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors(a).binary_search(&b).is_ok()
    }

    /// Canonical edge list: pairs `(i, j)` with `i < j`, ascending
    /// lexicographically.
    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for i in 0..self.node_count() {
            for &j in self.neighbors(i) {
                if i < j {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Induced subgraph on the nodes with `keep[v] == true`, relabelled in
    /// ascending order.
    pub fn induced(&self, keep: &[bool]) -> Graph {
        let mut relabel = vec![usize::MAX; self.node_count()];
        let mut next = 0;
        for (v, &k) in keep.iter().enumerate() {
            if k {
                relabel[v] = next;
                next += 1;
            }
        }
        let lists = (0..self.node_count())
            .filter(|&v| keep[v])
            .map(|v| {
                self.neighbors(v)
                    .iter()
                    .filter(|&&u| keep[u])
                    .map(|&u| relabel[u])
                    .collect()
            })
            .collect();
        Graph::from_lists(lists)
    }
}

impl AsRef<Graph> for Graph {
    fn as_ref(&self) -> &Graph {
        self
    }
}
