use crate::error::{config, Result};

/// Tolerance on `sum(type_probs) == 1`.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// Parameters of an inhomogeneous random K-out graph with `r` node types.
///
/// A node is of type `t` with probability `type_probs[t]` and then selects
/// `type_choices[t]` distinct other nodes uniformly at random.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphParams {
    n: usize,
    type_probs: Vec<f64>,
    type_choices: Vec<usize>,
}

impl GraphParams {
    pub fn new(n: usize, type_probs: Vec<f64>, type_choices: Vec<usize>) -> Result<Self> {
        if n < 2 {
            return Err(config(format!("n must be >= 2, got {n}")));
        }
        if n > u32::MAX as usize {
            return Err(config(format!("n must fit in 32 bits, got {n}")));
        }
        if type_probs.is_empty() || type_probs.len() != type_choices.len() {
            return Err(config(format!(
                "type_probs ({}) and type_choices ({}) must be nonempty and of equal length",
                type_probs.len(),
                type_choices.len()
            )));
        }
        if let Some(p) = type_probs.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(config(format!("type probabilities must be > 0, got {p}")));
        }
        let sum: f64 = type_probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(config(format!("type probabilities must sum to 1, got {sum}")));
        }
        if type_choices[0] == 0 {
            return Err(config("selection counts must be >= 1"));
        }
        if let Some(w) = type_choices.windows(2).find(|w| w[0] >= w[1]) {
            return Err(config(format!(
                "selection counts must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
        let last = *type_choices.last().expect("nonempty");
        if last < 2 {
            return Err(config(format!("largest selection count K must be >= 2, got {last}")));
        }
        if last >= n {
            return Err(config(format!("K must be < n, got K={last} with n={n}")));
        }
        Ok(GraphParams {
            n,
            type_probs,
            type_choices,
        })
    }

    /// The two-type model: type-1 (probability `mu`) selects one node, type-2
    /// selects `k`. `mu == 0` collapses to the homogeneous K-out graph.
    pub fn two_type(n: usize, mu: f64, k: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&mu) {
            return Err(config(format!("mu must lie in [0, 1), got {mu}")));
        }
        if mu == 0.0 {
            Self::new(n, vec![1.0], vec![k])
        } else {
            Self::new(n, vec![mu, 1.0 - mu], vec![1, k])
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn type_probs(&self) -> &[f64] {
        &self.type_probs
    }

    pub fn type_choices(&self) -> &[usize] {
        &self.type_choices
    }

    pub fn type_count(&self) -> usize {
        self.type_probs.len()
    }

    /// Mean number of selections per node, `sum_t mu_t * K_t`.
    pub fn mean_selections(&self) -> f64 {
        self.type_probs
            .iter()
            .zip(&self.type_choices)
            .map(|(p, &k)| p * k as f64)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_selections_values() {
        let p = GraphParams::two_type(100, 0.9, 2).unwrap();
        assert!((p.mean_selections() - 1.1).abs() < 1e-15);
        let p = GraphParams::two_type(100, 0.0, 5).unwrap();
        assert_eq!(p.mean_selections(), 5.0);
        let p = GraphParams::new(10, vec![0.5, 0.3, 0.2], vec![1, 2, 4]).unwrap();
        assert!((p.mean_selections() - 1.9).abs() < 1e-15);
    }

    #[test]
    fn two_type_maps_to_k1_equals_one() {
        let p = GraphParams::two_type(10, 0.25, 3).unwrap();
        assert_eq!(p.type_probs(), &[0.25, 0.75]);
        assert_eq!(p.type_choices(), &[1, 3]);
    }

    #[test]
    fn rejects_invalid() {
        let e = GraphParams::two_type(2, 0.0, 2).unwrap_err();
        assert!(e.to_string().contains("K must be < n"), "{e}");
        assert!(GraphParams::two_type(10, 0.5, 1).is_err());
        assert!(GraphParams::two_type(10, 1.0, 3).is_err());
        assert!(GraphParams::new(10, vec![0.5, 0.4], vec![1, 2]).is_err());
        assert!(GraphParams::new(10, vec![0.5, 0.5], vec![2, 2]).is_err());
        assert!(GraphParams::new(10, vec![1.0, 0.0], vec![1, 2]).is_err());
        assert!(GraphParams::new(10, vec![1.0], vec![1]).is_err());
        assert!(GraphParams::new(1, vec![1.0], vec![2]).is_err());
    }
}
