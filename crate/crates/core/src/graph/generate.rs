use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Graph, GraphParams};

/// Identifies one random stream: ChaCha8 keyed by `master_seed` (expanded with
/// `seed_from_u64`) and positioned on stream `stream_index`.
///
/// The algorithm and the `rand`/`rand_chacha` versions are pinned in the
/// workspace manifest; a given `(master_seed, stream_index)` therefore yields
/// the same draws on every platform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl Seed {
    pub const fn new(master_seed: u64, stream_index: u64) -> Self {
        Seed {
            master_seed,
            stream_index,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.master_seed, self.stream_index)
    }
}

/// A realized inhomogeneous random K-out graph. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct KOutGraph {
    params: GraphParams,
    seed: Seed,
    node_types: Vec<usize>,
    /// Selection sets in CSR form.
    sel_offsets: Vec<usize>,
    sel_targets: Vec<usize>,
    graph: Graph,
}

impl KOutGraph {
    pub fn params(&self) -> &GraphParams {
        &self.params
    }

    pub fn seed(&self) -> Seed {
        self.seed
    }

    /// Type index (0-based) of every node.
    pub fn node_types(&self) -> &[usize] {
        &self.node_types
    }

    /// The sorted selection set of node `i`.
    pub fn selections(&self, i: usize) -> &[usize] {
        &self.sel_targets[self.sel_offsets[i]..self.sel_offsets[i + 1]]
    }

    /// The undirected graph obtained by forgetting arc orientation.
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        self.graph.edge_list()
    }

    pub fn total_selections(&self) -> usize {
        self.sel_targets.len()
    }
}

impl AsRef<Graph> for KOutGraph {
    fn as_ref(&self) -> &Graph {
        &self.graph
    }
}

/// Draws one graph. Node types are drawn first for nodes `0..n`, then each
/// node's selection set in node order, all from the single stream `seed`.
pub fn generate(params: &GraphParams, seed: Seed) -> KOutGraph {
    let n = params.n();
    let mut rng = seed.rng();

    let cumulative: Vec<f64> = params
        .type_probs()
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    let last_type = cumulative.len() - 1;
    let node_types: Vec<usize> = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            cumulative.iter().position(|&c| u < c).unwrap_or(last_type)
        })
        .collect();

    let mut sampler = SubsetSampler::new(n);
    let mut sel_offsets = Vec::with_capacity(n + 1);
    sel_offsets.push(0);
    let mut sel_targets = Vec::new();
    for (i, &t) in node_types.iter().enumerate() {
        let k = params.type_choices()[t];
        let from = sel_targets.len();
        sampler.sample(&mut rng, i, k, &mut sel_targets);
        sel_targets[from..].sort_unstable();
        sel_offsets.push(sel_targets.len());
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| sel_targets[sel_offsets[i]..sel_offsets[i + 1]].iter().map(move |&j| (i, j)))
        .collect();
    let graph = Graph::from_pairs(n, &pairs);

    KOutGraph {
        params: params.clone(),
        seed,
        node_types,
        sel_offsets,
        sel_targets,
        graph,
    }
}

/// Uniform `k`-subsets of `{0..n} \ {i}` without replacement.
///
/// Floyd's algorithm when `k <= n / 8`, partial Fisher-Yates otherwise. Both
/// draw over the `n - 1` admissible values `0..n-1` and shift values `>= i`
/// up by one.
struct SubsetSampler {
    n: usize,
    marks: Vec<bool>,
    pool: Vec<u32>,
}

impl SubsetSampler {
    fn new(n: usize) -> Self {
        SubsetSampler {
            n,
            marks: vec![false; n],
            pool: Vec::new(),
        }
    }

    /// Appends the subset to `out`, in draw order.
    fn sample<R: Rng>(&mut self, rng: &mut R, exclude: usize, k: usize, out: &mut Vec<usize>) {
        let m = self.n - 1;
        debug_assert!(k <= m);
        let from = out.len();
        if k * 8 <= self.n {
            self.floyd(rng, m, k, out);
        } else {
            self.fisher_yates(rng, m, k, out);
        }
        for x in &mut out[from..] {
            if *x >= exclude {
                *x += 1;
            }
        }
    }

    fn floyd<R: Rng>(&mut self, rng: &mut R, m: usize, k: usize, out: &mut Vec<usize>) {
        let from = out.len();
        for j in (m - k)..m {
            let t = rng.random_range(0..=j as u32) as usize;
            let pick = if self.marks[t] { j } else { t };
            self.marks[pick] = true;
            out.push(pick);
        }
        for &x in &out[from..] {
            self.marks[x] = false;
        }
    }

    fn fisher_yates<R: Rng>(&mut self, rng: &mut R, m: usize, k: usize, out: &mut Vec<usize>) {
        self.pool.clear();
        self.pool.extend(0..m as u32);
        for p in 0..k {
            let s = rng.random_range(p as u32..m as u32) as usize;
            self.pool.swap(p, s);
        }
        out.extend(self.pool[..k].iter().map(|&x| x as usize));
    }
}
