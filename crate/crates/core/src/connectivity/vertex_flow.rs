//! Unit-capacity vertex-disjoint path search on the split graph.
//!
//! Every vertex `v` becomes `in(v) -> out(v)` with capacity one; an undirected
//! edge `{u, v}` becomes the arcs `out(u) -> in(v)` and `out(v) -> in(u)`. An
//! extra super-sink collects `out(v) -> sink` arcs that are switched on per
//! query, which models "a new vertex adjacent to every vertex of a set".

use crate::graph::Graph;

#[derive(Debug, Clone, Copy)]
struct Arc {
    head: u32,
    rev: u32,
    cap: i32,
    flow: i32,
}

#[derive(Debug)]
pub(crate) struct SplitNetwork {
    n: usize,
    arcs: Vec<Arc>,
    first: Vec<usize>,
    touched: Vec<usize>,
    parent: Vec<usize>,
    stamp: Vec<u32>,
    epoch: u32,
    stack: Vec<(usize, usize)>,
}

#[inline]
fn node_in(v: usize) -> usize {
    2 * v
}

#[inline]
fn node_out(v: usize) -> usize {
    2 * v + 1
}

// Arc layout, contiguous per tail:
//   in(v):  [in(v) -> out(v), then the reverse of out(u) -> in(v) for each
//            neighbor u in sorted order]
//   out(v): [reverse of in(v) -> out(v), out(v) -> sink, then out(v) -> in(u)
//            for each neighbor u in sorted order]
//   sink:   [reverse of out(v) -> sink for v = 0..n]
impl SplitNetwork {
    pub(crate) fn new(graph: &Graph) -> Self {
        let n = graph.node_count();
        let nodes = 2 * n + 1;
        let sink = 2 * n;
        let mut first = Vec::with_capacity(nodes + 1);
        first.push(0);
        for v in 0..n {
            let d = graph.degree(v);
            first.push(first[2 * v] + 1 + d);
            first.push(first[2 * v + 1] + 2 + d);
        }
        first.push(first[sink] + n);
        let blank = Arc {
            head: 0,
            rev: 0,
            cap: 0,
            flow: 0,
        };
        let mut arcs = vec![blank; first[nodes]];
        let mut set = |at: usize, head: usize, rev: usize, cap: i32| {
            arcs[at] = Arc {
                head: head as u32,
                rev: rev as u32,
                cap,
                flow: 0,
            };
        };
        // position of the next reverse slot in in(v)
        let mut cursor: Vec<usize> = (0..n).map(|v| first[node_in(v)] + 1).collect();
        for v in 0..n {
            let (bi, bo) = (first[node_in(v)], first[node_out(v)]);
            set(bi, node_out(v), bo, 1);
            set(bo, node_in(v), bi, 0);
            set(bo + 1, sink, first[sink] + v, 0);
            set(first[sink] + v, node_out(v), bo + 1, 0);
            for (idx, &u) in graph.neighbors(v).iter().enumerate() {
                let fwd = bo + 2 + idx;
                let back = cursor[u];
                cursor[u] += 1;
                set(fwd, node_in(u), back, 1);
                set(back, node_out(v), fwd, 0);
            }
        }

        SplitNetwork {
            n,
            arcs,
            first,
            touched: Vec::new(),
            parent: vec![usize::MAX; nodes],
            stamp: vec![0; nodes],
            epoch: 0,
            stack: Vec::new(),
        }
    }

    fn internal_arc(&self, v: usize) -> usize {
        self.first[node_in(v)]
    }

    fn sink_arc(&self, v: usize) -> usize {
        self.first[node_out(v)] + 1
    }

    fn edge_arc(&self, t: usize, idx: usize) -> usize {
        self.first[node_out(t)] + 2 + idx
    }

    fn sink(&self) -> usize {
        2 * self.n
    }

    /// Adds `v` to the super-sink's neighborhood.
    pub(crate) fn enable_sink(&mut self, v: usize) {
        let a = self.sink_arc(v);
        self.arcs[a].cap = 1;
    }

    pub(crate) fn disable_all_sinks(&mut self) {
        for v in 0..self.n {
            let a = self.sink_arc(v);
            self.arcs[a].cap = 0;
        }
    }

    fn push_flow(&mut self, a: usize) {
        let r = self.arcs[a].rev as usize;
        self.arcs[a].flow += 1;
        self.arcs[r].flow -= 1;
        self.touched.push(a);
    }

    fn reset(&mut self) {
        for a in self.touched.drain(..) {
            let r = self.arcs[a].rev as usize;
            self.arcs[a].flow = 0;
            self.arcs[r].flow = 0;
        }
    }

    /// One augmentation from `source` to `target` along any residual path,
    /// found by depth-first search. Depth-first reaches a large sink set far
    /// sooner than breadth-first on expander-like graphs; the number of
    /// augmentations stays bounded by `k` either way.
    fn augment(&mut self, source: usize, target: usize) -> bool {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
        let epoch = self.epoch;
        self.stack.clear();
        self.stack.push((source, self.first[source]));
        self.stamp[source] = epoch;
        let mut found = false;
        'dfs: while let Some(top) = self.stack.last_mut() {
            let (x, ref mut next) = *top;
            while *next < self.first[x + 1] {
                let a = *next;
                *next += 1;
                let arc = self.arcs[a];
                let h = arc.head as usize;
                if arc.cap - arc.flow <= 0 || self.stamp[h] == epoch {
                    continue;
                }
                self.stamp[h] = epoch;
                self.parent[h] = a;
                if h == target {
                    found = true;
                    break 'dfs;
                }
                self.stack.push((h, self.first[h]));
                continue 'dfs;
            }
            self.stack.pop();
        }
        if !found {
            return false;
        }
        let mut x = target;
        while x != source {
            let a = self.parent[x];
            self.push_flow(a);
            x = self.arcs[self.arcs[a].rev as usize].head as usize;
        }
        true
    }

    /// Whether there are at least `k` internally vertex-disjoint paths from
    /// `a` to `b` (`a`, `b` nonadjacent). Stops as soon as `k` are found.
    pub(crate) fn pair_has_k_paths(&mut self, a: usize, b: usize, k: usize) -> bool {
        let (s, t) = (node_out(a), node_in(b));
        let mut found = 0;
        while found < k && self.augment(s, t) {
            found += 1;
        }
        self.reset();
        found >= k
    }

    /// Whether `t` has at least `k` vertex-disjoint paths into the enabled sink
    /// set. `direct` lists enabled neighbors of `t` (by neighbor position in
    /// the graph's adjacency) that are routed first as length-one paths.
    pub(crate) fn fan_has_k_paths(&mut self, t: usize, direct: &[usize], k: usize) -> bool {
        let mut found = 0;
        for &idx in direct.iter().take(k) {
            let e = self.edge_arc(t, idx);
            let u = self.arcs[e].head as usize / 2;
            self.push_flow(e);
            self.push_flow(self.internal_arc(u));
            self.push_flow(self.sink_arc(u));
            found += 1;
        }
        let (s, sink) = (node_out(t), self.sink());
        while found < k && self.augment(s, sink) {
            found += 1;
        }
        self.reset();
        found >= k
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn pair_paths_on_cycle() {
        let g = cycle(6);
        let mut net = SplitNetwork::new(&g);
        assert!(net.pair_has_k_paths(0, 3, 2));
        assert!(!net.pair_has_k_paths(0, 3, 3));
        // flows are reset between queries
        assert!(net.pair_has_k_paths(1, 4, 2));
    }

    #[test]
    fn pair_paths_through_cut_vertex() {
        // two triangles joined at node 2
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]).unwrap();
        let mut net = SplitNetwork::new(&g);
        assert!(net.pair_has_k_paths(0, 4, 1));
        assert!(!net.pair_has_k_paths(0, 4, 2));
    }

    #[test]
    fn fan_into_sink_set() {
        let g = cycle(6);
        let mut net = SplitNetwork::new(&g);
        net.enable_sink(0);
        net.enable_sink(1);
        // node 3 reaches {0, 1} by 3-2-1 and 3-4-5-0
        assert!(net.fan_has_k_paths(3, &[], 2));
        assert!(!net.fan_has_k_paths(3, &[], 3));
        // node 2 is adjacent to 1 (neighbor index 0 of node 2 is node 1)
        assert_eq!(g.neighbors(2)[0], 1);
        assert!(net.fan_has_k_paths(2, &[0], 2));
    }
}
