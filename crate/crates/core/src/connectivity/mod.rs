//! Structural analysis of a realized graph: connected components, minimum
//! degree, k-vertex-connectivity and exact vertex connectivity.

mod union_find;
mod vertex_flow;

use std::collections::BTreeMap;

pub use union_find::UnionFind;

use crate::error::{domain, Result};
use crate::graph::{Graph, Seed};
use vertex_flow::SplitNetwork;

/// Partition of the node set into connected components, largest first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    /// Component id of every node; ids are ranks in `members`.
    pub label: Vec<usize>,
    /// Sorted members of each component, by descending size then smallest member.
    pub members: Vec<Vec<usize>>,
}

impl Components {
    pub fn sizes(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    pub fn count(&self) -> usize {
        self.members.len()
    }

    pub fn largest(&self) -> usize {
        self.members.first().map_or(0, Vec::len)
    }
}

pub fn connected_components(graph: &Graph) -> Components {
    let n = graph.node_count();
    let mut uf = UnionFind::new(n);
    for (a, b) in graph.edge_list() {
        uf.union(a, b);
    }
    let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        by_root.entry(uf.find(v)).or_default().push(v);
    }
    let mut members: Vec<Vec<usize>> = by_root.into_values().collect();
    members.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    let mut label = vec![0; n];
    for (id, comp) in members.iter().enumerate() {
        for &v in comp {
            label[v] = id;
        }
    }
    Components { label, members }
}

/// Size of the largest component; cheaper than [`connected_components`].
pub fn largest_component(graph: &Graph) -> usize {
    let n = graph.node_count();
    let mut uf = UnionFind::new(n);
    for v in 0..n {
        for &u in graph.neighbors(v) {
            if v < u {
                uf.union(v, u);
            }
        }
    }
    (0..n).map(|v| uf.set_size(v)).max().unwrap_or(0)
}

pub fn is_connected(graph: &Graph) -> bool {
    largest_component(graph) == graph.node_count()
}

pub fn min_degree(graph: &Graph) -> usize {
    (0..graph.node_count())
        .map(|v| graph.degree(v))
        .min()
        .unwrap_or(0)
}

/// Reusable k-connectivity decision procedure for one graph.
///
/// Uses Even's reduction: order the vertices `v_1..v_n`, check every
/// nonadjacent pair among the first `k` for `k` disjoint paths, then for each
/// later `v_j` check for `k` disjoint paths from `v_j` into `{v_1..v_{j-1}}`
/// (a virtual vertex adjacent to that prefix). The order is a maximum-adjacency
/// order, so most `v_j` already have `k` earlier neighbors and pass without a
/// flow computation.
pub struct KConnectivity<'g> {
    graph: &'g Graph,
    min_degree: usize,
    connected: bool,
    order: Vec<usize>,
    pos: Vec<usize>,
    network: Option<SplitNetwork>,
}

impl<'g> KConnectivity<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        let connected = is_connected(graph);
        let order = if connected {
            max_adjacency_order(graph)
        } else {
            Vec::new()
        };
        let mut pos = vec![usize::MAX; graph.node_count()];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        KConnectivity {
            graph,
            min_degree: min_degree(graph),
            connected,
            order,
            pos,
            network: None,
        }
    }

    pub fn min_degree(&self) -> usize {
        self.min_degree
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    /// Whether the graph stays connected after deleting any `k - 1` vertices.
    /// Requires `1 <= k < n`.
    pub fn is_k_connected(&mut self, k: usize) -> Result<bool> {
        let n = self.graph.node_count();
        if k == 0 || k >= n {
            return Err(domain(format!(
                "k-connectivity needs 1 <= k < n, got k={k} with n={n}"
            )));
        }
        if self.min_degree < k || !self.connected {
            return Ok(false);
        }
        if k == 1 {
            return Ok(true);
        }
        let ok = even_check(self.graph, &self.order, &self.pos, &mut self.network, k);
        if let Some(net) = self.network.as_mut() {
            net.disable_all_sinks();
        }
        Ok(ok)
    }

    /// Exact vertex connectivity: 0 when disconnected, `n - 1` for complete
    /// graphs, otherwise the largest `k` passing [`Self::is_k_connected`].
    pub fn vertex_connectivity(&mut self) -> usize {
        let n = self.graph.node_count();
        if n < 2 || !self.connected {
            return 0;
        }
        if self.min_degree == n - 1 {
            return n - 1;
        }
        let mut k = 1;
        while k < self.min_degree && self.is_k_connected(k + 1).expect("k < n") {
            k += 1;
        }
        k
    }
}

/// The flow network is only built once some check cannot be settled by
/// adjacency alone.
fn even_check(
    graph: &Graph,
    order: &[usize],
    pos: &[usize],
    slot: &mut Option<SplitNetwork>,
    k: usize,
) -> bool {
    for i in 0..k {
        for j in (i + 1)..k {
            let (a, b) = (order[i], order[j]);
            if graph.has_edge(a, b) {
                continue;
            }
            let net = slot.get_or_insert_with(|| SplitNetwork::new(graph));
            if !net.pair_has_k_paths(a, b, k) {
                return false;
            }
        }
    }
    // sinks are enabled lazily: `order[..synced]` are on
    let mut synced = 0;
    let mut direct = Vec::new();
    for (idx, &t) in order.iter().enumerate().skip(k) {
        let earlier = graph.neighbors(t).iter().filter(|&&u| pos[u] < idx).count();
        if earlier >= k {
            continue;
        }
        let net = slot.get_or_insert_with(|| SplitNetwork::new(graph));
        for &v in &order[synced..idx] {
            net.enable_sink(v);
        }
        synced = idx;
        direct.clear();
        direct.extend(
            graph
                .neighbors(t)
                .iter()
                .enumerate()
                .filter(|(_, &u)| pos[u] < idx)
                .map(|(i, _)| i),
        );
        if !net.fan_has_k_paths(t, &direct, k) {
            return false;
        }
    }
    true
}

/// Maximum-adjacency order from node 0: repeatedly take the unvisited vertex
/// with the most already-ordered neighbors. A bucket queue keeps this linear;
/// ties go to the vertex whose count was raised last.
fn max_adjacency_order(graph: &Graph) -> Vec<usize> {
    let n = graph.node_count();
    let mut count = vec![0usize; n];
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new()];
    for start in 0..n {
        if done[start] {
            continue;
        }
        buckets[0].push(start);
        let mut top = 0;
        loop {
            let Some(v) = buckets[top].pop() else {
                if top == 0 {
                    break;
                }
                top -= 1;
                continue;
            };
            if done[v] || count[v] != top {
                continue;
            }
            done[v] = true;
            order.push(v);
            for &u in graph.neighbors(v) {
                if !done[u] {
                    count[u] += 1;
                    let c = count[u];
                    if c == buckets.len() {
                        buckets.push(Vec::new());
                    }
                    buckets[c].push(u);
                    top = top.max(c);
                }
            }
        }
    }
    order
}

pub fn is_k_connected(graph: &Graph, k: usize) -> Result<bool> {
    KConnectivity::new(graph).is_k_connected(k)
}

pub fn vertex_connectivity(graph: &Graph) -> usize {
    KConnectivity::new(graph).vertex_connectivity()
}

/// Summary of a graph's strength of connectivity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivityReport {
    pub n: usize,
    pub min_degree: usize,
    pub component_sizes: Vec<usize>,
    pub largest_component: usize,
    pub kappa_v: Option<usize>,
    /// Verdicts in ascending `k`.
    pub k_connected: BTreeMap<usize, bool>,
}

impl ConnectivityReport {
    pub fn num_components(&self) -> usize {
        self.component_sizes.len()
    }

    /// CSV header matching [`Self::csv_record`].
    pub fn csv_header(k_values: &[usize]) -> Vec<String> {
        let mut h: Vec<String> = [
            "n",
            "seed",
            "delta",
            "kappa_v",
            "largest_component",
            "num_components",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        let mut ks = k_values.to_vec();
        ks.sort_unstable();
        ks.dedup();
        h.extend(ks.iter().map(|k| format!("k{k}")));
        h
    }

    /// One CSV row: `n, seed, delta, kappa_v, largest_component,
    /// num_components` then a `true`/`false` column per requested `k`.
    pub fn csv_record(&self, seed: Option<Seed>) -> Vec<String> {
        let mut row = vec![
            self.n.to_string(),
            seed.map(|s| s.to_string()).unwrap_or_default(),
            self.min_degree.to_string(),
            self.kappa_v.map(|k| k.to_string()).unwrap_or_default(),
            self.largest_component.to_string(),
            self.num_components().to_string(),
        ];
        row.extend(self.k_connected.values().map(|b| b.to_string()));
        row
    }
}

/// Builds a [`ConnectivityReport`]. The `k` values are decided in ascending
/// order; once one fails, all larger ones are recorded false without work.
pub fn analyze(graph: &Graph, k_values: &[usize], compute_kappa: bool) -> Result<ConnectivityReport> {
    let n = graph.node_count();
    if let Some(&k) = k_values.iter().find(|&&k| k == 0 || k >= n) {
        return Err(domain(format!(
            "k-connectivity needs 1 <= k < n, got k={k} with n={n}"
        )));
    }
    let comps = connected_components(graph);
    let mut checker = KConnectivity::new(graph);
    let mut ks = k_values.to_vec();
    ks.sort_unstable();
    ks.dedup();
    let mut verdicts = BTreeMap::new();
    let mut failed = false;
    for k in ks {
        let ok = !failed && checker.is_k_connected(k)?;
        failed |= !ok;
        verdicts.insert(k, ok);
    }
    let kappa_v = compute_kappa.then(|| checker.vertex_connectivity());
    Ok(ConnectivityReport {
        n,
        min_degree: checker.min_degree(),
        largest_component: comps.largest(),
        component_sizes: comps.sizes(),
        kappa_v,
        k_connected: verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    fn cliques_sharing_vertex() -> Graph {
        // {0..4} and {4..8}
        let mut edges = Vec::new();
        for base in [0, 4] {
            for a in base..base + 5 {
                for b in (a + 1)..base + 5 {
                    edges.push((a, b));
                }
            }
        }
        Graph::from_edges(9, edges).unwrap()
    }

    #[test]
    fn components_example() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (3, 4)]).unwrap();
        let c = connected_components(&g);
        assert_eq!(c.members, vec![vec![0, 1, 2], vec![3, 4]]);
        assert_eq!(c.sizes(), vec![3, 2]);
        assert_eq!(c.label, vec![0, 0, 0, 1, 1]);
        assert_eq!(largest_component(&g), 3);
        assert_eq!(connected_components(&Graph::complete(4)).sizes(), vec![4]);
    }

    #[test]
    fn min_degree_examples() {
        assert_eq!(min_degree(&Graph::complete(4)), 3);
        let star = Graph::from_edges(5, (1..5).map(|i| (0, i))).unwrap();
        assert_eq!(min_degree(&star), 1);
    }

    #[test]
    fn path_connectivity() {
        let g = path(3);
        assert!(is_k_connected(&g, 1).unwrap());
        assert!(!is_k_connected(&g, 2).unwrap());
        assert!(is_k_connected(&g, 3).is_err());
        assert!(is_k_connected(&g, 0).is_err());
    }

    #[test]
    fn cut_vertex_defeats_min_degree() {
        let g = cliques_sharing_vertex();
        assert_eq!(min_degree(&g), 4);
        assert!(is_k_connected(&g, 1).unwrap());
        assert!(!is_k_connected(&g, 2).unwrap());
        assert_eq!(vertex_connectivity(&g), 1);
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(vertex_connectivity(&Graph::complete(4)), 3);
        assert_eq!(vertex_connectivity(&cycle(6)), 2);
        let disc = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(vertex_connectivity(&disc), 0);
        assert!(is_k_connected(&Graph::complete(4), 3).unwrap());
        assert!(is_k_connected(&Graph::complete(4), 4).is_err());
    }

    #[test]
    fn checker_is_reusable() {
        let g = cycle(8);
        let mut c = KConnectivity::new(&g);
        assert!(c.is_k_connected(2).unwrap());
        assert!(!c.is_k_connected(3).unwrap());
        assert!(c.is_k_connected(2).unwrap());
        assert_eq!(c.vertex_connectivity(), 2);
    }

    #[test]
    fn analyze_complete() {
        let r = analyze(&Graph::complete(4), &[3, 1, 2], true).unwrap();
        assert_eq!(r.min_degree, 3);
        assert_eq!(r.kappa_v, Some(3));
        assert_eq!(r.largest_component, 4);
        assert!(r.k_connected.values().all(|&b| b));
        assert_eq!(
            r.csv_record(None),
            vec!["4", "", "3", "3", "4", "1", "true", "true", "true"]
        );
        assert_eq!(
            ConnectivityReport::csv_header(&[3, 1, 2]).join(","),
            "n,seed,delta,kappa_v,largest_component,num_components,k1,k2,k3"
        );
    }

    #[test]
    fn analyze_edgeless_pair() {
        let g = Graph::from_edges(2, []).unwrap();
        let r = analyze(&g, &[1], true).unwrap();
        assert_eq!(r.component_sizes, vec![1, 1]);
        assert_eq!(r.kappa_v, Some(0));
        assert_eq!(r.k_connected[&1], false);
        assert_eq!(r.min_degree, 0);
    }

    #[test]
    fn max_adjacency_order_is_permutation() {
        let g = cycle(7);
        let mut o = max_adjacency_order(&g);
        assert_eq!(o[0], 0);
        o.sort_unstable();
        assert_eq!(o, (0..7).collect::<Vec<_>>());
    }
}
