//! Exhaustive ground truth for small instances.
//!
//! Everything here is deliberately naive: subsets are bitmasks, connectivity
//! is a fresh traversal, and probabilities come from walking the complete
//! outcome space. Size guards are hard errors.

use std::collections::VecDeque;
use std::io::Write;

use crate::error::{domain, Error, Result};
use crate::graph::Graph;
use crate::scalar::{powi, Field};
use crate::Exact;

pub const MAX_BRUTE_FORCE_N: usize = 14;
pub const MAX_CUT_ENUM_N: usize = 20;
pub const MAX_EXACT_N: usize = 6;
pub const MAX_EXACT_K: usize = 3;

fn guard(what: &'static str, value: usize, limit: usize) -> Result<()> {
    if value > limit {
        Err(Error::SizeGuard { what, value, limit })
    } else {
        Ok(())
    }
}

fn adjacency_masks(graph: &Graph) -> Vec<u32> {
    (0..graph.node_count())
        .map(|v| graph.neighbors(v).iter().fold(0u32, |m, &u| m | (1 << u)))
        .collect()
}

/// Whether the nodes in `alive` induce a connected subgraph (true when empty).
fn mask_connected(adj: &[u32], alive: u32) -> bool {
    if alive == 0 {
        return true;
    }
    let start = alive.trailing_zeros();
    let mut seen = 1u32 << start;
    let mut frontier = seen;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let next = adj[v] & alive & !seen;
        seen |= next;
        frontier |= next;
    }
    seen == alive
}

/// Iterator over all `k`-subsets of `0..n` as bitmasks (Gosper's hack).
fn subsets_of_size(n: usize, k: usize) -> impl Iterator<Item = u32> {
    let limit = 1u64 << n;
    let mut cur: u64 = if k == 0 { 0 } else { (1u64 << k) - 1 };
    let mut done = k > n;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = cur as u32;
        if cur == 0 {
            done = true;
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            cur = (((r ^ cur) >> 2) / c) | r;
            if cur >= limit {
                done = true;
            }
        }
        Some(out)
    })
}

/// Deletes every `(k-1)`-subset and checks that what remains is connected.
pub fn brute_force_k_connected(graph: &Graph, k: usize) -> Result<bool> {
    let n = graph.node_count();
    guard("n", n, MAX_BRUTE_FORCE_N)?;
    if k == 0 || k >= n {
        return Err(domain(format!("need 1 <= k < n, got k={k} with n={n}")));
    }
    let adj = adjacency_masks(graph);
    let all = ((1u64 << n) - 1) as u32;
    Ok(subsets_of_size(n, k - 1).all(|removed| mask_connected(&adj, all & !removed)))
}

/// Number of connected components by breadth-first search from scratch.
pub fn bfs_component_count(graph: &Graph) -> usize {
    let n = graph.node_count();
    let mut seen = vec![false; n];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &u in graph.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    count
}

/// One classified node subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutRecord {
    pub subset: Vec<usize>,
    pub size: usize,
    /// No edge joins the subset to its complement.
    pub is_cut: bool,
}

fn mask_is_cut(adj: &[u32], mask: u32) -> bool {
    let mut rest = mask;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if adj[v] & !mask != 0 {
            return false;
        }
    }
    true
}

fn check_cut_range(n: usize, lo: usize, hi: usize) -> Result<()> {
    guard("n", n, MAX_CUT_ENUM_N)?;
    if lo == 0 || lo > hi || hi >= n {
        return Err(domain(format!(
            "cut sizes need 1 <= lo <= hi <= n-1, got lo={lo} hi={hi} n={n}"
        )));
    }
    Ok(())
}

/// Classifies every subset with `lo <= |S| <= hi`, by size then by bitmask.
pub fn enumerate_cuts(graph: &Graph, lo: usize, hi: usize) -> Result<Vec<CutRecord>> {
    let n = graph.node_count();
    check_cut_range(n, lo, hi)?;
    let adj = adjacency_masks(graph);
    let mut out = Vec::new();
    for size in lo..=hi {
        for mask in subsets_of_size(n, size) {
            out.push(CutRecord {
                subset: (0..n).filter(|&v| mask & (1 << v) != 0).collect(),
                size,
                is_cut: mask_is_cut(&adj, mask),
            });
        }
    }
    Ok(out)
}

/// Whether some cut has size in `[lo, hi]`, without materializing records.
pub fn has_cut_in_range(graph: &Graph, lo: usize, hi: usize) -> Result<bool> {
    let n = graph.node_count();
    check_cut_range(n, lo, hi)?;
    let adj = adjacency_masks(graph);
    Ok((lo..=hi).any(|size| subsets_of_size(n, size).any(|m| mask_is_cut(&adj, m))))
}

/// Counts of "the set `{0..r-1}` is a cut" over the whole outcome space of the
/// two-type model with parameters `(n, K)`, for every type assignment.
#[derive(Debug, Clone)]
pub struct CutEventTable {
    n: usize,
    k: usize,
    /// `rows[types]` for type vectors in lexicographic order (bit `i` set means
    /// node `i` selects `K`): `(outcomes, cut_counts[r - 1])`.
    rows: Vec<(u64, Vec<u64>)>,
}

fn options(n: usize, node: usize, choices: usize) -> Vec<u32> {
    subsets_of_size(n - 1, choices)
        .map(|m| {
            let low = m & ((1u32 << node) - 1);
            let high = (m >> node) << (node + 1);
            low | high
        })
        .collect()
}

impl CutEventTable {
    /// Walks all `2^n` type vectors and, for each, every joint choice of
    /// selection sets. Guarded to `n <= 6`, `K <= 3`.
    pub fn enumerate(n: usize, k: usize) -> Result<Self> {
        guard("n", n, MAX_EXACT_N)?;
        guard("K", k, MAX_EXACT_K)?;
        if n < 2 || k == 0 || k >= n {
            return Err(domain(format!("need n >= 2 and 1 <= K < n, got n={n} K={k}")));
        }
        let rs = n - 1;
        let one_opts: Vec<Vec<u32>> = (0..n).map(|i| options(n, i, 1)).collect();
        let k_opts: Vec<Vec<u32>> = (0..n).map(|i| options(n, i, k)).collect();
        // ok[i][o]: bit (r-1) set when option o of node i stays on its side of {0..r-1}.
        let ok_bits = |i: usize, sel: u32| -> u32 {
            let mut bits = 0u32;
            for r in 1..=rs {
                let s = (1u32 << r) - 1;
                let inside = i < r;
                let fine = if inside { sel & !s == 0 } else { sel & s == 0 };
                if fine {
                    bits |= 1 << (r - 1);
                }
            }
            bits
        };
        let one_ok: Vec<Vec<u32>> = (0..n)
            .map(|i| one_opts[i].iter().map(|&m| ok_bits(i, m)).collect())
            .collect();
        let k_ok: Vec<Vec<u32>> = (0..n)
            .map(|i| k_opts[i].iter().map(|&m| ok_bits(i, m)).collect())
            .collect();

        let all_r = (1u32 << rs) - 1;
        let mut rows = Vec::with_capacity(1 << n);
        for types in 0u32..(1 << n) {
            let per_node: Vec<&Vec<u32>> = (0..n)
                .map(|i| {
                    if types & (1 << i) != 0 {
                        &k_ok[i]
                    } else {
                        &one_ok[i]
                    }
                })
                .collect();
            let mut counts = vec![0u64; rs];
            let mut outcomes = 0u64;
            // odometer over joint outcomes, prefix[i] = AND of ok bits of nodes < i
            let mut digit = vec![0usize; n];
            let mut prefix = vec![all_r; n + 1];
            for i in 0..n {
                prefix[i + 1] = prefix[i] & per_node[i][0];
            }
            loop {
                outcomes += 1;
                let bits = prefix[n];
                for (r, c) in counts.iter_mut().enumerate() {
                    if bits & (1 << r) != 0 {
                        *c += 1;
                    }
                }
                let mut pos = n;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    digit[pos] += 1;
                    if digit[pos] < per_node[pos].len() {
                        break;
                    }
                    digit[pos] = 0;
                    if pos == 0 {
                        pos = usize::MAX;
                        break;
                    }
                }
                if pos == usize::MAX {
                    break;
                }
                for i in pos..n {
                    prefix[i + 1] = prefix[i] & per_node[i][digit[i]];
                }
            }
            rows.push((outcomes, counts));
        }
        Ok(CutEventTable { n, k, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Probability that `{0..r-1}` is a cut when each node selects one node
    /// with probability `mu` and `K` nodes otherwise.
    pub fn probability<T: Field>(&self, mu: f64, r: usize) -> Result<T> {
        if !(0.0..=1.0).contains(&mu) {
            return Err(domain(format!("mu must lie in [0, 1], got {mu}")));
        }
        if r == 0 || r >= self.n {
            return Err(domain(format!("need 1 <= r <= n-1, got r={r} n={}", self.n)));
        }
        let mu_t = T::from_prob(mu);
        let nu_t = T::one() - mu_t.clone();
        let mut total = T::zero();
        for (types, (outcomes, counts)) in self.rows.iter().enumerate() {
            let heavy = (types as u32).count_ones() as u64;
            let light = self.n as u64 - heavy;
            let weight = powi(&mu_t, light) * powi(&nu_t, heavy);
            if weight.is_zero() || counts[r - 1] == 0 {
                continue;
            }
            total = total
                + weight * T::ratio(u128::from(counts[r - 1]), u128::from(*outcomes));
        }
        Ok(total)
    }
}

/// Exact probability that the fixed set `{0..r-1}` is a cut, by enumeration.
pub fn exact_cut_event_probability(n: usize, mu: f64, k: usize, r: usize) -> Result<Exact> {
    CutEventTable::enumerate(n, k)?.probability(mu, r)
}

/// One pinned regression value.
#[derive(Debug, Clone, PartialEq)]
pub struct FixtureRow {
    pub setting: String,
    pub value: f64,
    pub method: String,
}

/// Writes fixtures as CSV with header `setting,value,method`.
pub fn write_fixture_csv<W: Write>(w: W, rows: &[FixtureRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["setting", "value", "method"])?;
    for row in rows {
        wtr.write_record([row.setting.as_str(), &row.value.to_string(), row.method.as_str()])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Exact-probability fixtures for every `r` of one `(n, mu, K)` setting.
pub fn cut_event_fixtures(n: usize, mu: f64, k: usize) -> Result<Vec<FixtureRow>> {
    let table = CutEventTable::enumerate(n, k)?;
    (1..n)
        .map(|r| {
            let p: Exact = table.probability(mu, r)?;
            Ok(FixtureRow {
                setting: format!("n={n} mu={mu} K={k} r={r}"),
                value: p.to_f64(),
                method: "enumeration".to_string(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    #[test]
    fn gosper_counts() {
        assert_eq!(subsets_of_size(5, 2).count(), 10);
        assert_eq!(subsets_of_size(5, 0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(subsets_of_size(3, 3).collect::<Vec<_>>(), vec![7]);
        assert_eq!(subsets_of_size(3, 4).count(), 0);
    }

    #[test]
    fn brute_force_examples() {
        let tri = Graph::complete(3);
        assert!(brute_force_k_connected(&tri, 2).unwrap());
        assert!(!brute_force_k_connected(&path(3), 2).unwrap());
        assert!(brute_force_k_connected(&path(3), 1).unwrap());
        assert!(matches!(
            brute_force_k_connected(&Graph::complete(15), 2),
            Err(Error::SizeGuard { .. })
        ));
    }

    #[test]
    fn two_triangles_cuts() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let cuts: Vec<Vec<usize>> = enumerate_cuts(&g, 1, 5)
            .unwrap()
            .into_iter()
            .filter(|c| c.is_cut)
            .map(|c| c.subset)
            .collect();
        assert_eq!(cuts, vec![vec![0, 1, 2], vec![3, 4, 5]]);
        let all = enumerate_cuts(&g, 1, 2).unwrap();
        assert_eq!(all.len(), 6 + 15);
        assert!(all.iter().all(|c| !c.is_cut));
        assert!(has_cut_in_range(&g, 3, 3).unwrap());
        assert!(!has_cut_in_range(&g, 1, 2).unwrap());
    }

    #[test]
    fn complete_graph_has_no_cuts() {
        let recs = enumerate_cuts(&Graph::complete(4), 1, 3).unwrap();
        assert_eq!(recs.len(), 14);
        assert!(recs.iter().all(|c| !c.is_cut));
    }

    #[test]
    fn cut_range_errors() {
        let g = Graph::complete(4);
        assert!(enumerate_cuts(&g, 0, 2).is_err());
        assert!(enumerate_cuts(&g, 3, 2).is_err());
        assert!(enumerate_cuts(&g, 1, 4).is_err());
        assert!(matches!(
            enumerate_cuts(&Graph::complete(21), 1, 2),
            Err(Error::SizeGuard { .. })
        ));
    }

    #[test]
    fn exact_probability_pins() {
        // a lone node always selects outward
        assert!(exact_cut_event_probability(5, 1.0, 2, 1).unwrap().is_zero());
        assert_eq!(
            exact_cut_event_probability(4, 1.0, 2, 2).unwrap(),
            Exact::ratio(1, 81)
        );
        assert_eq!(
            exact_cut_event_probability(5, 0.5, 2, 2).unwrap(),
            Exact::ratio(1, 1728)
        );
    }

    #[test]
    fn exact_guards() {
        assert!(matches!(
            CutEventTable::enumerate(7, 2),
            Err(Error::SizeGuard { .. })
        ));
        assert!(matches!(
            CutEventTable::enumerate(6, 4),
            Err(Error::SizeGuard { .. })
        ));
        assert!(CutEventTable::enumerate(3, 3).is_err());
        let t = CutEventTable::enumerate(4, 2).unwrap();
        assert!(t.probability::<f64>(0.5, 4).is_err());
        assert!(t.probability::<f64>(1.5, 1).is_err());
    }

    #[test]
    fn outcome_space_size() {
        // type vector with every node choosing K=2 of 3 others: 3^4 outcomes
        let t = CutEventTable::enumerate(4, 2).unwrap();
        assert_eq!(t.rows[0b1111].0, 81);
        assert_eq!(t.rows[0].0, 81);
    }

    #[test]
    fn fixture_csv() {
        let rows = cut_event_fixtures(4, 1.0, 2).unwrap();
        let mut buf = Vec::new();
        write_fixture_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("setting,value,method\n"));
        assert!(text.contains("n=4 mu=1 K=2 r=2,0.012345679012345678,enumeration"));
    }
}
