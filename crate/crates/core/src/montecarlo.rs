//! Declarative, reproducible Monte Carlo sweeps.
//!
//! An [`ExperimentSpec`] names a grid of `(mu, K)` cells and a trial count.
//! Trial `t` of cell `(mu, K)` draws its graph from
//! `Seed::new(master_seed, trial_stream(mu, K, t))`, so every trial can be
//! replayed on its own and adding cells never changes the draws of others.
//! Trials run in parallel; per-cell reducers are integer counts, sums and
//! min/max, so results do not depend on the worker count.
//!
//! # Spec files
//!
//! One `key = value` assignment per line; `#` starts a comment; vectors are
//! comma-separated, and integer vectors also accept inclusive ranges `a..b`.
//!
//! ```text
//! kind = kconn_sweep            # kconn_sweep | giant_component | max_k_curve
//! n = 1000
//! mu_values = 0.5
//! K_values = 8..22
//! k_values = 2                  # not used by giant_component
//! trials = 1000
//! master_seed = 20240101
//! confidence_threshold = 0.99   # optional, max_k_curve only
//! ```

use std::fmt;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::connectivity::{largest_component, KConnectivity};
use crate::error::{config, Error, Result};
use crate::graph::{generate, GraphParams, Seed};
use crate::theory::{
    er_giant_fraction, gamma_choices, giant_bound_sum, mean_selections, theorem2_leading_bound, threshold_k,
    ThresholdQuery,
};

pub const DEFAULT_CONFIDENCE: f64 = 0.99;
/// `z` used for the Wilson columns of the CSV output.
pub const WILSON_Z: f64 = 1.96;
/// Values of `M` reported in the giant-component CSV.
pub const GIANT_BOUND_M: [usize; 3] = [2, 5, 10];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    KconnSweep,
    GiantComponent,
    MaxKCurve,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::KconnSweep => "kconn_sweep",
            ExperimentKind::GiantComponent => "giant_component",
            ExperimentKind::MaxKCurve => "max_k_curve",
        }
    }

    /// Stem of the CSV file written by [`write_outputs`].
    pub fn csv_name(&self) -> &'static str {
        match self {
            ExperimentKind::KconnSweep => "kconn.csv",
            ExperimentKind::GiantComponent => "giant.csv",
            ExperimentKind::MaxKCurve => "max_k.csv",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kconn_sweep" => Ok(ExperimentKind::KconnSweep),
            "giant_component" => Ok(ExperimentKind::GiantComponent),
            "max_k_curve" => Ok(ExperimentKind::MaxKCurve),
            other => Err(config(format!(
                "unknown kind {other:?}, expected kconn_sweep, giant_component or max_k_curve"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub n: usize,
    pub mu_values: Vec<f64>,
    pub choice_values: Vec<usize>,
    /// Sorted ascending and deduplicated by [`ExperimentSpec::validate`].
    pub k_values: Vec<usize>,
    pub trials: u64,
    pub master_seed: u64,
    pub confidence_threshold: f64,
}

const KEYS: [&str; 8] = [
    "kind",
    "n",
    "mu_values",
    "K_values",
    "k_values",
    "trials",
    "master_seed",
    "confidence_threshold",
];

fn parse_num<T: std::str::FromStr>(key: &str, s: &str, line: usize) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Parse {
        line,
        msg: format!("{key}: cannot parse {:?}", s.trim()),
    })
}

fn parse_int_list(key: &str, s: &str, line: usize) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim) {
        if let Some((a, b)) = item.split_once("..") {
            let (a, b): (usize, usize) = (parse_num(key, a, line)?, parse_num(key, b, line)?);
            if a > b {
                return Err(Error::Parse {
                    line,
                    msg: format!("{key}: empty range {item}"),
                });
            }
            out.extend(a..=b);
        } else {
            out.push(parse_num(key, item, line)?);
        }
    }
    Ok(out)
}

impl ExperimentSpec {
    /// Parses and validates a spec file. Unknown, duplicate or missing keys
    /// are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut seen: [Option<(usize, String)>; 8] = Default::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| Error::Parse {
                line,
                msg: format!("expected key = value, got {body:?}"),
            })?;
            let key = key.trim();
            let slot = KEYS.iter().position(|&k| k == key).ok_or_else(|| Error::Parse {
                line,
                msg: format!("unknown key {key:?}"),
            })?;
            if seen[slot].is_some() {
                return Err(Error::Parse {
                    line,
                    msg: format!("duplicate key {key:?}"),
                });
            }
            seen[slot] = Some((line, value.trim().to_string()));
        }
        let get = |slot: usize| -> Result<(usize, &str)> {
            seen[slot]
                .as_ref()
                .map(|(l, v)| (*l, v.as_str()))
                .ok_or_else(|| config(format!("missing key {:?}", KEYS[slot])))
        };

        let (_, kind) = get(0)?;
        let kind: ExperimentKind = kind.parse()?;
        let (l, v) = get(1)?;
        let n = parse_num("n", v, l)?;
        let (l, v) = get(2)?;
        let mu_values = v
            .split(',')
            .map(|s| parse_num("mu_values", s, l))
            .collect::<Result<Vec<f64>>>()?;
        let (l, v) = get(3)?;
        let choice_values = parse_int_list("K_values", v, l)?;
        let k_values = match (kind, &seen[4]) {
            (_, Some((l, v))) => parse_int_list("k_values", v, *l)?,
            (ExperimentKind::GiantComponent, None) => Vec::new(),
            _ => return Err(config(format!("missing key \"k_values\" (required for {kind})"))),
        };
        let (l, v) = get(5)?;
        let trials = parse_num("trials", v, l)?;
        let (l, v) = get(6)?;
        let master_seed = parse_num("master_seed", v, l)?;
        let confidence_threshold = match &seen[7] {
            Some((l, v)) => parse_num("confidence_threshold", v, *l)?,
            None => DEFAULT_CONFIDENCE,
        };
        let mut spec = ExperimentSpec {
            kind,
            n,
            mu_values,
            choice_values,
            k_values,
            trials,
            master_seed,
            confidence_threshold,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Checks every invariant; normalizes `k_values` to ascending order.
    pub fn validate(&mut self) -> Result<()> {
        if self.trials == 0 {
            return Err(config("trials must be >= 1"));
        }
        if self.mu_values.is_empty() || self.choice_values.is_empty() {
            return Err(config("mu_values and K_values must be nonempty"));
        }
        for &mu in &self.mu_values {
            for &c in &self.choice_values {
                GraphParams::two_type(self.n, mu, c)?;
            }
        }
        self.k_values.sort_unstable();
        self.k_values.dedup();
        if self.kind != ExperimentKind::GiantComponent && self.k_values.is_empty() {
            return Err(config("k_values must be nonempty"));
        }
        if let Some(&k) = self.k_values.iter().find(|&&k| k == 0 || k >= self.n) {
            return Err(config(format!("k must satisfy 1 <= k <= n-1, got k={k} with n={}", self.n)));
        }
        if !(self.confidence_threshold > 0.0 && self.confidence_threshold <= 1.0) {
            return Err(config(format!(
                "confidence_threshold must lie in (0, 1], got {}",
                self.confidence_threshold
            )));
        }
        Ok(())
    }

    /// Canonical text form; parsing it yields an equal spec.
    pub fn canonical(&self) -> String {
        let join = |v: &mut dyn Iterator<Item = String>| v.collect::<Vec<_>>().join(",");
        let mut s = String::new();
        s += &format!("kind = {}\n", self.kind);
        s += &format!("n = {}\n", self.n);
        s += &format!("mu_values = {}\n", join(&mut self.mu_values.iter().map(|m| format!("{m:?}"))));
        s += &format!("K_values = {}\n", join(&mut self.choice_values.iter().map(|c| c.to_string())));
        if !self.k_values.is_empty() {
            s += &format!("k_values = {}\n", join(&mut self.k_values.iter().map(|k| k.to_string())));
        }
        s += &format!("trials = {}\n", self.trials);
        s += &format!("master_seed = {}\n", self.master_seed);
        s += &format!("confidence_threshold = {:?}\n", self.confidence_threshold);
        s
    }

    /// Hex SHA-256 of [`ExperimentSpec::canonical`].
    pub fn digest(&self) -> String {
        Sha256::digest(self.canonical().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    fn cells(&self) -> impl Iterator<Item = (f64, usize)> + '_ {
        self.mu_values
            .iter()
            .flat_map(move |&mu| self.choice_values.iter().map(move |&c| (mu, c)))
    }
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// The splitmix64 output finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stream index of trial `trial` in cell `(mu, K)`:
/// `h = 0; for x in [mu.to_bits(), K, trial] { h = splitmix64(h ^ (x + GOLDEN)) }`
/// with wrapping addition and `GOLDEN = 0x9e3779b97f4a7c15`.
pub fn trial_stream(mu: f64, choices: usize, trial: u64) -> u64 {
    [mu.to_bits(), choices as u64, trial]
        .into_iter()
        .fold(0, |h, x| splitmix64(h ^ x.wrapping_add(GOLDEN)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct KconnRow {
    pub mu: f64,
    pub choices: usize,
    pub k: usize,
    pub trials: u64,
    pub successes: u64,
    pub prob: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GiantRow {
    pub mu: f64,
    pub choices: usize,
    pub trials: u64,
    pub mean_largest: f64,
    pub min_largest: usize,
    /// `n - min_largest`.
    pub max_outside: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxKRow {
    pub mu: f64,
    pub choices: usize,
    pub trials: u64,
    /// Largest requested `k` reached by at least `confidence * trials`
    /// trials; 0 when none is.
    pub max_k: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Rows {
    Kconn(Vec<KconnRow>),
    Giant(Vec<GiantRow>),
    MaxK(Vec<MaxKRow>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub spec_digest: String,
    pub rows: Rows,
}

/// Per-cell reducer. Every field combines associatively and commutatively.
#[derive(Debug, Clone)]
struct Tally {
    /// `reached[i]`: trials that are `k_values[i]`-connected.
    reached: Vec<u64>,
    sum_largest: u64,
    min_largest: usize,
}

impl Tally {
    fn empty(ks: usize) -> Self {
        Tally {
            reached: vec![0; ks],
            sum_largest: 0,
            min_largest: usize::MAX,
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.reached.iter_mut().zip(other.reached) {
            *a += b;
        }
        self.sum_largest += other.sum_largest;
        self.min_largest = self.min_largest.min(other.min_largest);
        self
    }
}

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "panic".to_string())
}

fn run_trial(spec: &ExperimentSpec, params: &GraphParams, seed: Seed) -> Result<Tally> {
    let g = generate(params, seed);
    let mut t = Tally::empty(spec.k_values.len());
    match spec.kind {
        ExperimentKind::GiantComponent => {
            let l = largest_component(g.graph());
            t.sum_largest = l as u64;
            t.min_largest = l;
        }
        ExperimentKind::KconnSweep | ExperimentKind::MaxKCurve => {
            let mut checker = KConnectivity::new(g.graph());
            for (i, &k) in spec.k_values.iter().enumerate() {
                if !checker.is_k_connected(k)? {
                    break;
                }
                t.reached[i] = 1;
            }
        }
    }
    Ok(t)
}

fn run_cell(spec: &ExperimentSpec, mu: f64, choices: usize) -> Result<Tally> {
    let params = GraphParams::two_type(spec.n, mu, choices)?;
    let ks = spec.k_values.len();
    (0..spec.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = Seed::new(spec.master_seed, trial_stream(mu, choices, trial));
            let fail = |msg: String| Error::Trial {
                cell: format!("mu={mu} K={choices}"),
                trial,
                master: seed.master_seed,
                stream: seed.stream_index,
                msg,
            };
            match catch_unwind(AssertUnwindSafe(|| run_trial(spec, &params, seed))) {
                Ok(Ok(t)) => Ok(t),
                Ok(Err(e)) => Err(fail(e.to_string())),
                Err(p) => Err(fail(panic_message(p))),
            }
        })
        .try_reduce(|| Tally::empty(ks), |a, b| Ok(a.merge(b)))
}

/// Runs every cell of `spec` on `workers` threads (0: one per available core).
/// Configuration errors are reported before any trial runs.
pub fn run(spec: &ExperimentSpec, workers: usize) -> Result<ExperimentResult> {
    let mut spec = spec.clone();
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Io(format!("thread pool: {e}")))?;
    let tallies = pool.install(|| {
        spec.cells()
            .map(|(mu, c)| run_cell(&spec, mu, c).map(|t| (mu, c, t)))
            .collect::<Result<Vec<_>>>()
    })?;

    let trials = spec.trials;
    let rows = match spec.kind {
        ExperimentKind::KconnSweep => Rows::Kconn(
            tallies
                .iter()
                .flat_map(|(mu, c, t)| {
                    spec.k_values.iter().zip(&t.reached).map(move |(&k, &s)| {
                        let prob = s as f64 / trials as f64;
                        KconnRow {
                            mu: *mu,
                            choices: *c,
                            k,
                            trials,
                            successes: s,
                            prob,
                            stderr: (prob * (1.0 - prob) / trials as f64).sqrt(),
                        }
                    })
                })
                .collect(),
        ),
        ExperimentKind::GiantComponent => Rows::Giant(
            tallies
                .iter()
                .map(|(mu, c, t)| GiantRow {
                    mu: *mu,
                    choices: *c,
                    trials,
                    mean_largest: t.sum_largest as f64 / trials as f64,
                    min_largest: t.min_largest,
                    max_outside: spec.n - t.min_largest,
                })
                .collect(),
        ),
        ExperimentKind::MaxKCurve => Rows::MaxK(
            tallies
                .iter()
                .map(|(mu, c, t)| {
                    let need = spec.confidence_threshold * trials as f64;
                    let max_k = spec
                        .k_values
                        .iter()
                        .zip(&t.reached)
                        .filter(|&(_, &s)| s as f64 >= need)
                        .map(|(&k, _)| k)
                        .max()
                        .unwrap_or(0);
                    MaxKRow {
                        mu: *mu,
                        choices: *c,
                        trials,
                        max_k,
                    }
                })
                .collect(),
        ),
    };
    Ok(ExperimentResult {
        spec_digest: spec.digest(),
        spec,
        rows,
    })
}

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials >= 1 && successes <= trials, "need 0 <= successes <= trials, trials >= 1");
    let t = trials as f64;
    let p = successes as f64 / t;
    let z2 = z * z;
    let denom = 1.0 + z2 / t;
    let centre = (p + z2 / (2.0 * t)) / denom;
    let half = z * (p * (1.0 - p) / t + z2 / (4.0 * t * t)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KconnAnnotation {
    pub wilson: (f64, f64),
    /// `None` for `k < 2`, where the threshold scaling is not stated.
    pub threshold_k: Option<u64>,
    /// Selection-count form, `K - (log n + (k-2) log log n) / (1 - mu)`.
    pub gamma_n: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GiantAnnotation {
    /// `(M, giant_bound_sum(n, mu, K, M))` for `M` in [`GIANT_BOUND_M`].
    pub bounds: Vec<(usize, f64)>,
    /// `(M, envelope)` for the same `M`, when `<K> > 1`.
    pub leading: Vec<(usize, f64)>,
    /// Expected largest component of an Erdos-Renyi graph with the same mean
    /// degree `2<K>`, when that exceeds 1.
    pub er_expected_largest: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Annotations {
    Kconn(Vec<KconnAnnotation>),
    Giant(Vec<GiantAnnotation>),
    MaxK,
}

/// Attaches the closed-form predictions to each row of `result`.
pub fn compare_to_theory(result: &ExperimentResult) -> Result<Annotations> {
    let n = result.spec.n;
    Ok(match &result.rows {
        Rows::Kconn(rows) => Annotations::Kconn(
            rows.iter()
                .map(|r| {
                    let q = (r.k >= 2 && n >= 3)
                        .then(|| ThresholdQuery::new(n, r.mu, r.k))
                        .transpose()?
                        .map(|q| q.with_choices(r.choices));
                    Ok(KconnAnnotation {
                        wilson: wilson_interval(r.successes, r.trials, WILSON_Z),
                        threshold_k: q.as_ref().map(threshold_k),
                        gamma_n: q.as_ref().map(gamma_choices).transpose()?,
                    })
                })
                .collect::<Result<_>>()?,
        ),
        Rows::Giant(rows) => Annotations::Giant(
            rows.iter()
                .map(|r| {
                    let mean_k = mean_selections(r.mu, r.choices);
                    let bounds = GIANT_BOUND_M
                        .iter()
                        .map(|&m| Ok((m, giant_bound_sum(n, r.mu, r.choices, m)?)))
                        .collect::<Result<_>>()?;
                    let leading = GIANT_BOUND_M
                        .iter()
                        .filter_map(|&m| theorem2_leading_bound(mean_k, m).ok().map(|v| (m, v)))
                        .collect();
                    Ok(GiantAnnotation {
                        bounds,
                        leading,
                        er_expected_largest: er_giant_fraction(2.0 * mean_k).ok().map(|b| b * n as f64),
                    })
                })
                .collect::<Result<_>>()?,
        ),
        Rows::MaxK(_) => Annotations::MaxK,
    })
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub const KCONN_HEADER: [&str; 11] = [
    "mu", "K", "k", "trials", "successes", "prob", "stderr", "wilson_lo", "wilson_hi", "threshold_K", "gamma_n",
];
pub const GIANT_HEADER: [&str; 9] = [
    "mu",
    "K",
    "trials",
    "mean_largest",
    "min_largest",
    "max_outside",
    "bound_M2",
    "bound_M5",
    "bound_M10",
];
pub const MAX_K_HEADER: [&str; 5] = ["mu", "K", "trials", "confidence", "max_k"];

/// Writes the result as CSV with its header row, annotated via
/// [`compare_to_theory`].
pub fn write_csv<W: Write>(result: &ExperimentResult, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    match (&result.rows, compare_to_theory(result)?) {
        (Rows::Kconn(rows), Annotations::Kconn(ann)) => {
            out.write_record(KCONN_HEADER)?;
            for (r, a) in rows.iter().zip(ann) {
                out.write_record([
                    r.mu.to_string(),
                    r.choices.to_string(),
                    r.k.to_string(),
                    r.trials.to_string(),
                    r.successes.to_string(),
                    r.prob.to_string(),
                    r.stderr.to_string(),
                    a.wilson.0.to_string(),
                    a.wilson.1.to_string(),
                    opt(a.threshold_k),
                    opt(a.gamma_n),
                ])?;
            }
        }
        (Rows::Giant(rows), Annotations::Giant(ann)) => {
            out.write_record(GIANT_HEADER)?;
            for (r, a) in rows.iter().zip(ann) {
                let mut rec = vec![
                    r.mu.to_string(),
                    r.choices.to_string(),
                    r.trials.to_string(),
                    r.mean_largest.to_string(),
                    r.min_largest.to_string(),
                    r.max_outside.to_string(),
                ];
                rec.extend(a.bounds.iter().map(|(_, b)| b.to_string()));
                out.write_record(rec)?;
            }
        }
        (Rows::MaxK(rows), _) => {
            out.write_record(MAX_K_HEADER)?;
            for r in rows {
                out.write_record([
                    r.mu.to_string(),
                    r.choices.to_string(),
                    r.trials.to_string(),
                    result.spec.confidence_threshold.to_string(),
                    r.max_k.to_string(),
                ])?;
            }
        }
        _ => unreachable!("annotations follow the row kind"),
    }
    out.flush()?;
    Ok(())
}

/// Writes `<kind csv>` and `<kind csv>.spec` (canonical spec plus digest)
/// into `dir`, returning the CSV path.
pub fn write_outputs(result: &ExperimentResult, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(result.spec.kind.csv_name());
    let file = std::fs::File::create(&path)?;
    write_csv(result, std::io::BufWriter::new(file))?;
    let mut meta = result.spec.canonical();
    meta += &format!("# sha256 {}\n", result.spec_digest);
    std::fs::write(path.with_extension("csv.spec"), meta)?;
    Ok(path)
}
