//! Closed-form quantities of the inhomogeneous random K-out model.
//!
//! Floating point evaluators are generic over [`Real`]; the product-form cut
//! probabilities additionally have `*_exact` variants over any [`Field`], which
//! with [`crate::Exact`] gives rounding-free values for small `n`.
//!
//! All logarithms are natural. The critical scaling for k-connectivity (and
//! for minimum degree at least `k`) is
//!
//! ```text
//! <K> = mu + (1 - mu) K = log n + (k - 2) log log n + gamma
//! ```
//!
//! equivalently `K = (log n + (k - 2) log log n) / (1 - mu) + gamma'`.

use crate::error::{domain, Result};
use crate::scalar::{choose_ratio, choose_u128, powi, Field, Real};

fn check_prob<F: Real>(mu: F) -> Result<()> {
    if mu.is_finite() && mu >= F::zero() && mu <= F::one() {
        Ok(())
    } else {
        Err(domain(format!("mu must lie in [0, 1], got {mu:?}")))
    }
}

/// Mean number of selections of the two-type model, `mu + (1 - mu) K`.
pub fn mean_selections<F: Real>(mu: F, choices: usize) -> F {
    mu + (F::one() - mu) * F::of_usize(choices)
}

/// Probability that a fixed pair of nodes is adjacent:
/// `2<K>/(n-1) - (<K>/(n-1))^2`. Requires `0 < mean_k <= n - 1`.
pub fn edge_probability<F: Real>(n: usize, mean_k: F) -> Result<F> {
    if n < 2 || !(mean_k > F::zero() && mean_k <= F::of_usize(n - 1)) {
        return Err(domain(format!(
            "edge probability needs n >= 2 and 0 < <K> <= n-1, got n={n} <K>={mean_k:?}"
        )));
    }
    let x = mean_k / F::of_usize(n - 1);
    Ok(F::lit(2.0) * x - x * x)
}

/// Expected degree of a node, `(n - 1)` times the edge probability.
pub fn mean_degree<F: Real>(n: usize, mean_k: F) -> Result<F> {
    Ok(F::of_usize(n - 1) * edge_probability(n, mean_k)?)
}

/// A point `(n, mu, k)` of the k-connectivity phase diagram, optionally with
/// the type-2 selection count `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdQuery<F> {
    pub n: usize,
    pub mu: F,
    pub k: usize,
    pub choices: Option<usize>,
}

impl<F: Real> ThresholdQuery<F> {
    pub fn new(n: usize, mu: F, k: usize) -> Result<Self> {
        if n < 3 {
            return Err(domain(format!("thresholds need n >= 3 so that log log n is defined, got n={n}")));
        }
        if !(mu.is_finite() && mu >= F::zero() && mu < F::one()) {
            return Err(domain(format!("mu must lie in [0, 1), got {mu:?}")));
        }
        if k < 2 {
            return Err(domain(format!("the threshold scaling is stated for k >= 2, got k={k}")));
        }
        Ok(ThresholdQuery {
            n,
            mu,
            k,
            choices: None,
        })
    }

    pub fn with_choices(mut self, choices: usize) -> Self {
        self.choices = Some(choices);
        self
    }

    /// `log n + (k - 2) log log n`.
    pub fn critical_mean(&self) -> F {
        let ln_n = F::of_usize(self.n).ln();
        ln_n + F::of_usize(self.k - 2) * ln_n.ln()
    }

    /// The real-valued critical `K`, `(log n + (k - 2) log log n) / (1 - mu)`.
    pub fn critical_choices(&self) -> F {
        self.critical_mean() / (F::one() - self.mu)
    }

    fn require_choices(&self) -> Result<usize> {
        self.choices
            .ok_or_else(|| domain("this quantity needs the selection count K"))
    }
}

/// `ceil((log n + (k - 2) log log n) / (1 - mu))`.
pub fn threshold_k<F: Real>(q: &ThresholdQuery<F>) -> u64 {
    q.critical_choices()
        .ceil()
        .to_u64()
        .expect("finite threshold")
}

/// Threshold for minimum degree at least `k`; it shares the critical scaling
/// of k-connectivity.
pub fn min_degree_threshold<F: Real>(q: &ThresholdQuery<F>) -> u64 {
    threshold_k(q)
}

/// Deviation of `<K>` from the critical scaling:
/// `mu + (1 - mu) K - log n - (k - 2) log log n`.
/// Positive values sit on the side where k-connectivity emerges.
pub fn gamma_mean<F: Real>(q: &ThresholdQuery<F>) -> Result<F> {
    let choices = q.require_choices()?;
    Ok(mean_selections(q.mu, choices) - q.critical_mean())
}

/// Deviation of `K` itself from the real-valued threshold,
/// `K - (log n + (k - 2) log log n) / (1 - mu)`.
pub fn gamma_choices<F: Real>(q: &ThresholdQuery<F>) -> Result<F> {
    let choices = q.require_choices()?;
    Ok(F::of_usize(choices) - q.critical_choices())
}

fn check_cut_args(n: usize, choices: usize, r: usize) -> Result<()> {
    if n < 2 || choices == 0 || choices >= n {
        return Err(domain(format!("need n >= 2 and 1 <= K < n, got n={n} K={choices}")));
    }
    if r == 0 || r >= n {
        return Err(domain(format!("need 1 <= r <= n-1, got r={r} with n={n}")));
    }
    Ok(())
}

/// `ln(C(a, k) / C(b, k))` for `a <= b`; `-inf` when `a < k`.
fn ln_choose_ratio<F: Real>(a: usize, b: usize, k: usize) -> F {
    if a < k {
        return F::neg_infinity();
    }
    (0..k).fold(F::zero(), |acc, i| {
        acc + (F::of_usize(a - i) / F::of_usize(b - i)).ln()
    })
}

/// `ln P[{0..r-1} is a cut]`, possibly `-inf`.
fn ln_cut_event<F: Real>(n: usize, mu: F, choices: usize, r: usize) -> F {
    let nu = F::one() - mu;
    let denom = F::of_usize(n - 1);
    let outside = mu * F::of_usize(n - r - 1) / denom
        + nu * ln_choose_ratio::<F>(n - r - 1, n - 1, choices).exp();
    let inside = mu * F::of_usize(r - 1) / denom
        + nu * ln_choose_ratio::<F>(r - 1, n - 1, choices).exp();
    let mut acc = F::zero();
    for (factor, power) in [(outside, n - r), (inside, r)] {
        if factor <= F::zero() {
            return F::neg_infinity();
        }
        acc = acc + F::of_usize(power) * factor.ln();
    }
    acc
}

/// Probability that the fixed node set `{0..r-1}` is a cut, i.e. every node
/// inside selects only inside and every node outside selects only outside:
///
/// ```text
/// (mu (n-r-1)/(n-1) + (1-mu) C(n-r-1,K)/C(n-1,K))^(n-r)
///   * (mu (r-1)/(n-1) + (1-mu) C(r-1,K)/C(n-1,K))^r
/// ```
///
/// Evaluated in the log domain; zero binomials give an exact zero.
pub fn cut_event_probability<F: Real>(n: usize, mu: F, choices: usize, r: usize) -> Result<F> {
    check_cut_args(n, choices, r)?;
    check_prob(mu)?;
    Ok(ln_cut_event(n, mu, choices, r).exp())
}

/// [`cut_event_probability`] evaluated directly as a product in `T`.
/// Exact for [`crate::Exact`]; the binomials must fit in `u128`.
pub fn cut_event_probability_exact<T: Field>(n: usize, mu: f64, choices: usize, r: usize) -> Result<T> {
    check_cut_args(n, choices, r)?;
    check_prob(mu)?;
    let mu_t = T::from_prob(mu);
    let nu_t = T::one() - mu_t.clone();
    let (n64, r64, k64) = (n as u64, r as u64, choices as u64);
    let outside = mu_t.clone() * T::ratio(u128::from(n64 - r64 - 1), u128::from(n64 - 1))
        + nu_t.clone() * choose_ratio::<T>(n64 - r64 - 1, n64 - 1, k64);
    let inside = mu_t * T::ratio(u128::from(r64 - 1), u128::from(n64 - 1))
        + nu_t * choose_ratio::<T>(r64 - 1, n64 - 1, k64);
    Ok(powi(&outside, n64 - r64) * powi(&inside, r64))
}

fn check_bound_args(n: usize, choices: usize, m: usize) -> Result<()> {
    if m == 0 {
        return Err(domain("M must be >= 1"));
    }
    if choices < 2 || choices >= n {
        return Err(domain(format!("need 2 <= K < n, got K={choices} with n={n}")));
    }
    Ok(())
}

/// Log-domain terms `ln(C(n, r) P[E_{n,r}])` for `r = M..=floor(n/2)`.
fn ln_bound_terms<F: Real>(n: usize, mu: F, choices: usize, m: usize) -> Vec<F> {
    let half = n / 2;
    let mut ln_binom = F::zero();
    let mut terms = Vec::new();
    for r in 1..=half {
        ln_binom = ln_binom + (F::of_usize(n - r + 1) / F::of_usize(r)).ln();
        if r >= m {
            terms.push(ln_binom + ln_cut_event(n, mu, choices, r));
        }
    }
    terms
}

fn log_sum_exp<F: Real>(terms: &[F]) -> F {
    let max = terms
        .iter()
        .copied()
        .fold(F::neg_infinity(), F::max);
    if max == F::neg_infinity() {
        return max;
    }
    max + terms.iter().map(|&t| (t - max).exp()).fold(F::zero(), |a, b| a + b).ln()
}

/// Union bound on the probability that some cut has size in `[M, n - M]`:
/// `sum_{r=M}^{floor(n/2)} C(n, r) P[E_{n,r}]`, clamped to `[0, 1]`.
/// A finite-`n` guarantee; zero when `M > floor(n/2)`.
pub fn giant_bound_sum<F: Real>(n: usize, mu: F, choices: usize, m: usize) -> Result<F> {
    check_bound_args(n, choices, m)?;
    check_prob(mu)?;
    let terms = ln_bound_terms(n, mu, choices, m);
    Ok(log_sum_exp(&terms).exp().min(F::one()))
}

/// Unclamped [`giant_bound_sum`] evaluated term by term in `T`.
pub fn giant_bound_sum_exact<T: Field>(n: usize, mu: f64, choices: usize, m: usize) -> Result<T> {
    check_bound_args(n, choices, m)?;
    check_prob(mu)?;
    let mut total = T::zero();
    for r in m..=n / 2 {
        let binom = T::ratio(choose_u128(n as u64, r as u64), 1);
        total = total + binom * cut_event_probability_exact::<T>(n, mu, choices, r)?;
    }
    Ok(total)
}

/// Asymptotic envelope `exp(-M(<K> - 1)) / (1 - exp(-(<K> - 1)))` with the
/// vanishing corrections dropped. Describes the large-`n` shape of the
/// probability that at least `M` nodes lie outside the largest component; it
/// is not a finite-`n` bound (see [`giant_bound_sum`] for that).
pub fn theorem2_leading_bound<F: Real>(mean_k: F, m: usize) -> Result<F> {
    if !(mean_k > F::one()) || !mean_k.is_finite() {
        return Err(domain(format!(
            "the envelope needs <K> > 1, got {mean_k:?}"
        )));
    }
    let rate = mean_k - F::one();
    Ok((-F::of_usize(m) * rate).exp() / (F::one() - (-rate).exp()))
}

/// Giant-component bound evaluation for one `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport<F> {
    pub m: usize,
    /// [`giant_bound_sum`], clamped to `[0, 1]`.
    pub sum_value: F,
    /// `ln(C(n, r) P[E_{n,r}])` for `r = M..=floor(n/2)`.
    pub per_r_terms: Option<Vec<F>>,
    /// [`theorem2_leading_bound`], when `<K> > 1`.
    pub leading_term: Option<F>,
}

pub fn giant_bound_report<F: Real>(
    n: usize,
    mu: F,
    choices: usize,
    m: usize,
    keep_terms: bool,
) -> Result<BoundReport<F>> {
    check_bound_args(n, choices, m)?;
    check_prob(mu)?;
    let terms = ln_bound_terms(n, mu, choices, m);
    let sum_value = log_sum_exp(&terms).exp().min(F::one());
    Ok(BoundReport {
        m,
        sum_value,
        per_r_terms: keep_terms.then_some(terms),
        leading_term: theorem2_leading_bound(mean_selections(mu, choices), m).ok(),
    })
}

/// Giant-component fraction of an Erdos-Renyi graph with mean degree `c > 1`:
/// the root `beta` in `(0, 1]` of `beta + exp(-beta c) = 1`.
pub fn er_giant_fraction<F: Real>(c: F) -> Result<F> {
    if !(c > F::one()) || !c.is_finite() {
        return Err(domain(format!(
            "c must exceed 1 (below it the largest component is logarithmic), got {c:?}"
        )));
    }
    let residual = |b: F| b + (-b * c).exp() - F::one();
    let tol = F::lit(1e-12).max(F::epsilon() * F::lit(8.0));
    // f is convex with f(1) > 0, so Newton from 1 decreases monotonically to
    // the nontrivial root.
    let mut beta = F::one();
    for _ in 0..200 {
        let f = residual(beta);
        if f.abs() < tol {
            break;
        }
        let df = F::one() - c * (-beta * c).exp();
        let next = beta - f / df;
        if !(next > F::zero()) || next >= beta {
            break;
        }
        beta = next;
    }
    // polish by bisection on a bracket around the Newton iterate
    let (mut lo, mut hi) = (beta * F::lit(0.5), F::one());
    if residual(beta).abs() >= tol && residual(lo) < F::zero() {
        for _ in 0..200 {
            let mid = (lo + hi) * F::lit(0.5);
            if residual(mid) < F::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
            beta = mid;
            if residual(mid).abs() < tol || hi - lo <= F::epsilon() {
                break;
            }
        }
    }
    Ok(beta)
}

/// Everything the model's closed forms say about one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoryReport<F> {
    pub n: Option<usize>,
    pub mu: Option<F>,
    pub choices: Option<usize>,
    pub k: Option<usize>,
    pub mean_selections: Option<F>,
    pub edge_probability: Option<F>,
    pub mean_degree: Option<F>,
    /// Large-`n` mean degree, `2<K>`.
    pub asymptotic_mean_degree: Option<F>,
    pub threshold_k: Option<u64>,
    pub min_degree_threshold: Option<u64>,
    pub gamma_mean: Option<F>,
    pub gamma_choices: Option<F>,
    pub bounds: Vec<BoundReport<F>>,
    pub er_c: Option<F>,
    pub er_giant_fraction: Option<F>,
}

/// Inputs for [`TheoryReport::evaluate`]; every field is optional and only the
/// quantities whose inputs are present get computed.
#[derive(Debug, Clone, Default)]
pub struct TheoryInputs<F> {
    pub n: Option<usize>,
    pub mu: Option<F>,
    pub choices: Option<usize>,
    pub k: Option<usize>,
    pub m_values: Vec<usize>,
    pub er_c: Option<F>,
}

impl<F: Real> TheoryReport<F> {
    pub fn evaluate(inp: &TheoryInputs<F>) -> Result<Self> {
        if let Some(mu) = inp.mu {
            check_prob(mu)?;
        }
        let mean = match (inp.mu, inp.choices) {
            (Some(mu), Some(c)) => Some(mean_selections(mu, c)),
            _ => None,
        };
        let (edge, degree) = match (inp.n, mean) {
            (Some(n), Some(m)) => (Some(edge_probability(n, m)?), Some(mean_degree(n, m)?)),
            _ => (None, None),
        };
        let query = match (inp.n, inp.mu, inp.k) {
            (Some(n), Some(mu), Some(k)) => Some(ThresholdQuery::new(n, mu, k)?),
            _ => None,
        };
        let query = match (query, inp.choices) {
            (Some(q), Some(c)) => Some(q.with_choices(c)),
            (q, _) => q,
        };
        let mut bounds = Vec::new();
        if !inp.m_values.is_empty() {
            let (n, mu, c) = match (inp.n, inp.mu, inp.choices) {
                (Some(n), Some(mu), Some(c)) => (n, mu, c),
                _ => return Err(domain("giant-component bounds need n, mu and K")),
            };
            for &m in &inp.m_values {
                bounds.push(giant_bound_report(n, mu, c, m, false)?);
            }
        }
        let er = inp.er_c.map(er_giant_fraction).transpose()?;
        Ok(TheoryReport {
            n: inp.n,
            mu: inp.mu,
            choices: inp.choices,
            k: inp.k,
            mean_selections: mean,
            edge_probability: edge,
            mean_degree: degree,
            asymptotic_mean_degree: mean.map(|m| F::lit(2.0) * m),
            threshold_k: query.as_ref().map(threshold_k),
            min_degree_threshold: query.as_ref().map(min_degree_threshold),
            gamma_mean: query.as_ref().and_then(|q| gamma_mean(q).ok()),
            gamma_choices: query.as_ref().and_then(|q| gamma_choices(q).ok()),
            bounds,
            er_c: inp.er_c,
            er_giant_fraction: er,
        })
    }

    /// `(key, value)` pairs in display order, skipping absent quantities.
    pub fn entries(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                out.push((k.to_string(), v));
            }
        };
        let f = |v: Option<F>| v.map(|x| format!("{x:?}"));
        put("n", self.n.map(|v| v.to_string()));
        put("mu", f(self.mu));
        put("K", self.choices.map(|v| v.to_string()));
        put("k", self.k.map(|v| v.to_string()));
        put("mean_K", f(self.mean_selections));
        put("edge_probability", f(self.edge_probability));
        put("mean_degree", f(self.mean_degree));
        put("asymptotic_mean_degree", f(self.asymptotic_mean_degree));
        put("threshold_K", self.threshold_k.map(|v| v.to_string()));
        put("min_degree_threshold", self.min_degree_threshold.map(|v| v.to_string()));
        put("gamma_n", f(self.gamma_mean));
        put("gamma_n_K", f(self.gamma_choices));
        for b in &self.bounds {
            put(&format!("giant_bound_M{}", b.m), f(Some(b.sum_value)));
            put(&format!("leading_bound_M{}", b.m), f(b.leading_term));
        }
        put("er_c", f(self.er_c));
        put("er_giant_fraction", f(self.er_giant_fraction));
        out
    }
}
