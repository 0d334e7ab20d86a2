use std::collections::HashMap;
use std::io::Cursor;

use kout::graph::io::{read_edge_list, read_type_sidecar, write_kout_edge_list, write_type_sidecar};
use kout::theory::{edge_probability, mean_degree};
use kout::{generate, GraphParams, Seed};
use proptest::prelude::*;

fn within_3_sigma(observed: f64, p: f64, trials: u64) -> bool {
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    (observed - p).abs() <= 3.0 * sigma
}

#[test]
fn mean_selection_examples() {
    let p = GraphParams::two_type(100, 0.9, 2).unwrap();
    assert!((p.mean_selections() - 1.1).abs() < 1e-12);
    let p = GraphParams::new(100, vec![0.5, 0.3, 0.2], vec![1, 2, 4]).unwrap();
    assert!((p.mean_selections() - 1.9).abs() < 1e-12);
}

#[test]
fn small_instance_degree_and_edge_bounds() {
    let p = GraphParams::two_type(6, 0.5, 3).unwrap();
    let g = generate(&p, Seed::new(7, 0));
    let max_sel = (0..6).map(|i| g.selections(i).len()).max().unwrap();
    for i in 0..6 {
        let d = g.graph().degree(i);
        assert!((1..=5).contains(&d));
    }
    let m = g.graph().edge_count();
    assert!(max_sel <= m && m <= g.total_selections());
}

#[test]
fn subset_sampling_is_uniform() {
    // every node picks 2 of its 3 peers; each of the 3 possible sets has mass 1/3
    let p = GraphParams::new(4, vec![1.0], vec![2]).unwrap();
    let trials = 6000u64;
    let mut counts: HashMap<(usize, Vec<usize>), u64> = HashMap::new();
    for s in 0..trials {
        let g = generate(&p, Seed::new(11, s));
        for i in 0..4 {
            *counts.entry((i, g.selections(i).to_vec())).or_default() += 1;
        }
    }
    assert_eq!(counts.len(), 12);
    for (key, &c) in &counts {
        let freq = c as f64 / trials as f64;
        assert!(within_3_sigma(freq, 1.0 / 3.0, trials), "{key:?}: {freq}");
    }
}

#[test]
fn type_frequencies_follow_probabilities() {
    let p = GraphParams::new(200, vec![0.5, 0.3, 0.2], vec![1, 2, 4]).unwrap();
    let mut counts = [0u64; 3];
    let graphs = 200;
    for s in 0..graphs {
        for &t in generate(&p, Seed::new(3, s)).node_types() {
            counts[t] += 1;
        }
    }
    let total = graphs * 200;
    for (t, &want) in [0.5, 0.3, 0.2].iter().enumerate() {
        assert!(within_3_sigma(counts[t] as f64 / total as f64, want, total));
    }
}

#[test]
fn pair_edge_frequency_matches_edge_probability() {
    let p = GraphParams::two_type(1000, 0.5, 2).unwrap();
    let want = edge_probability(1000, 1.5).unwrap();
    let trials = 100_000u64;
    let hits = (0..trials)
        .filter(|&s| generate(&p, Seed::new(21, s)).graph().has_edge(0, 1))
        .count();
    let freq = hits as f64 / trials as f64;
    assert!(within_3_sigma(freq, want, trials), "freq {freq} vs {want}");
}

#[test]
fn mean_degree_matches_closed_form() {
    let n = 5000;
    let p = GraphParams::two_type(n, 0.9, 2).unwrap();
    let want: f64 = mean_degree(n, 1.1).unwrap();
    assert!((want - (2.2 - 1.21 / 4999.0)).abs() < 1e-12);
    let samples: Vec<f64> = (0..300)
        .map(|s| 2.0 * generate(&p, Seed::new(5, s)).graph().edge_count() as f64 / n as f64)
        .collect();
    let t = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / t;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (t - 1.0);
    let se = (var / t).sqrt();
    assert!((mean - want).abs() <= 3.0 * se, "mean {mean} vs {want} (se {se})");
}

#[test]
fn parameter_errors() {
    let err = GraphParams::two_type(2, 0.5, 2).unwrap_err().to_string();
    assert!(err.contains("K must be < n"), "{err}");
    assert!(GraphParams::new(10, vec![0.5, 0.4], vec![1, 3]).is_err());
    assert!(GraphParams::new(10, vec![0.5, 0.5], vec![3, 3]).is_err());
    assert!(GraphParams::new(10, vec![0.5, 0.5], vec![0, 3]).is_err());
    assert!(GraphParams::two_type(10, 1.0, 3).is_err());
}

fn params_strategy() -> impl Strategy<Value = GraphParams> {
    (4usize..40, 0.0f64..0.95, 2usize..6).prop_filter_map("K < n", |(n, mu, k)| {
        GraphParams::two_type(n, mu, k).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generation_is_deterministic(p in params_strategy(), master in any::<u64>(), stream in any::<u64>()) {
        let a = generate(&p, Seed::new(master, stream));
        let b = generate(&p, Seed::new(master, stream));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn selection_and_edge_invariants(p in params_strategy(), master in any::<u64>()) {
        let g = generate(&p, Seed::new(master, 0));
        let n = p.n();
        let mut max_sel = 0;
        for i in 0..n {
            let sel = g.selections(i);
            let want = p.type_choices()[g.node_types()[i]];
            prop_assert_eq!(sel.len(), want);
            prop_assert!(!sel.contains(&i));
            prop_assert!(sel.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(g.graph().degree(i) >= sel.len().max(1));
            for &j in sel {
                prop_assert!(g.graph().has_edge(i, j));
            }
            max_sel = max_sel.max(sel.len());
        }
        let m = g.graph().edge_count();
        prop_assert!(max_sel <= m && m <= g.total_selections());
        // an edge exists only if one endpoint picked the other
        for (a, b) in g.edge_list() {
            prop_assert!(g.selections(a).contains(&b) || g.selections(b).contains(&a));
        }
    }

    #[test]
    fn edge_list_round_trip(p in params_strategy(), master in any::<u64>(), stream in 0u64..1000) {
        let seed = Seed::new(master, stream);
        let g = generate(&p, seed);
        let mut text = Vec::new();
        write_kout_edge_list(&mut text, &g).unwrap();
        let (header, back) = read_edge_list(Cursor::new(&text)).unwrap();
        prop_assert_eq!(header.n, p.n());
        prop_assert_eq!(header.seed, Some(seed));
        prop_assert_eq!(&back, g.graph());
        let mut side = Vec::new();
        write_type_sidecar(&mut side, &g).unwrap();
        let types = read_type_sidecar(Cursor::new(&side), p.n()).unwrap();
        prop_assert_eq!(types.as_slice(), g.node_types());
    }
}
