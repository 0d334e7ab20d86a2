use std::path::PathBuf;

use kout::connectivity::largest_component;
use kout::montecarlo::{
    compare_to_theory, run, trial_stream, write_csv, write_outputs, Annotations, ExperimentKind, ExperimentSpec, Rows,
};
use kout::theory::{gamma_choices, giant_bound_sum, threshold_k, ThresholdQuery};
use kout::{generate, Error, GraphParams, Seed};

fn spec(kind: ExperimentKind, n: usize, mus: &[f64], ks: &[usize], k_values: &[usize], trials: u64) -> ExperimentSpec {
    let mut s = ExperimentSpec {
        kind,
        n,
        mu_values: mus.to_vec(),
        choice_values: ks.to_vec(),
        k_values: k_values.to_vec(),
        trials,
        master_seed: 2024,
        confidence_threshold: 0.99,
    };
    s.validate().unwrap();
    s
}

fn kconn_rows(s: &ExperimentSpec) -> Vec<kout::montecarlo::KconnRow> {
    match run(s, 0).unwrap().rows {
        Rows::Kconn(r) => r,
        _ => unreachable!(),
    }
}

fn bundled(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs").join(name)
}

#[test]
fn rows_identical_across_worker_counts() {
    let s = spec(ExperimentKind::KconnSweep, 200, &[0.3, 0.6], &[4, 8, 12], &[1, 2, 3], 120);
    let a = run(&s, 1).unwrap();
    let b = run(&s, 3).unwrap();
    let c = run(&s, 8).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
    let g = spec(ExperimentKind::GiantComponent, 200, &[0.9], &[2, 3], &[], 200);
    assert_eq!(run(&g, 1).unwrap(), run(&g, 5).unwrap());
}

#[test]
fn adding_cells_does_not_perturb_others() {
    let small = spec(ExperimentKind::KconnSweep, 150, &[0.5], &[6], &[2], 200);
    let big = spec(ExperimentKind::KconnSweep, 150, &[0.2, 0.5], &[5, 6, 7], &[2], 200);
    let a = kconn_rows(&small);
    let b = kconn_rows(&big);
    let same = b.iter().find(|r| r.mu == 0.5 && r.choices == 6).unwrap();
    assert_eq!(&a[0], same);
}

#[test]
fn row_invariants() {
    let s = spec(ExperimentKind::KconnSweep, 100, &[0.5], &[3, 6, 9], &[1, 2, 3], 150);
    for r in kconn_rows(&s) {
        assert!(r.successes <= r.trials);
        assert_eq!(r.prob, r.successes as f64 / r.trials as f64);
        assert_eq!(r.stderr, (r.prob * (1.0 - r.prob) / r.trials as f64).sqrt());
    }
}

#[test]
fn configuration_errors_come_first() {
    let err = ExperimentSpec::parse("kind = kconn_sweep\nn = 100\nmu_values = 0.5\nK_values = 3\ntrials = 10\nmaster_seed = 1\n")
        .unwrap_err();
    assert!(matches!(err, Error::Config(ref m) if m.contains("k_values")), "{err}");
    let mut bad = spec(ExperimentKind::GiantComponent, 100, &[0.5], &[3], &[], 10);
    bad.choice_values.push(100);
    assert!(matches!(run(&bad, 1), Err(Error::Config(_))));
}

#[test]
fn zero_one_sides_of_the_threshold() {
    let n = 1000;
    for mu in [0.2f64, 0.5] {
        let q = ThresholdQuery::new(n, mu, 2).unwrap();
        let kc = q.critical_choices();
        // smallest K with gamma >= 5 and largest K with gamma <= -5
        let above = (kc + 5.0).ceil() as usize;
        let below = (kc - 5.0).floor() as usize;
        assert!(gamma_choices(&q.with_choices(above)).unwrap() >= 5.0);
        assert!(gamma_choices(&q.with_choices(below)).unwrap() <= -5.0);
        let rows = kconn_rows(&spec(ExperimentKind::KconnSweep, n, &[mu], &[below, above], &[2], 1000));
        assert!(rows[0].prob <= 0.1, "mu={mu} K={below}: {}", rows[0].prob);
        assert!(rows[1].prob >= 0.9, "mu={mu} K={above}: {}", rows[1].prob);
    }
}

#[test]
fn empirical_curves_increase_in_k_and_decrease_in_mu() {
    let n = 300;
    let grid: Vec<usize> = (2..=20).collect();
    let rows = kconn_rows(&spec(ExperimentKind::KconnSweep, n, &[0.2, 0.5, 0.8], &grid, &[2], 300));
    let at = |mu: f64, k: usize| rows.iter().find(|r| r.mu == mu && r.choices == k).unwrap();
    for mu in [0.2, 0.5, 0.8] {
        for k in 6..=16 {
            let (lo, hi) = (at(mu, k - 4), at(mu, k + 4));
            assert!(hi.prob >= lo.prob - 2.0 * (lo.stderr + hi.stderr), "mu={mu} K={k}");
        }
    }
    for k in &grid {
        for (a, b) in [(0.2, 0.5), (0.5, 0.8)] {
            let (low_mu, high_mu) = (at(a, *k), at(b, *k));
            assert!(high_mu.prob <= low_mu.prob + 2.0 * (low_mu.stderr + high_mu.stderr), "K={k}");
        }
    }
}

#[test]
fn threshold_annotations() {
    let n = 200;
    let q = ThresholdQuery::new(n, 0.5, 2).unwrap();
    let t = threshold_k(&q) as usize;
    let res = run(&spec(ExperimentKind::KconnSweep, n, &[0.5], &[t], &[1, 2], 50), 0).unwrap();
    let Annotations::Kconn(ann) = compare_to_theory(&res).unwrap() else { panic!() };
    assert_eq!(ann[0].threshold_k, None);
    assert_eq!(ann[1].threshold_k, Some(t as u64));
    let g = ann[1].gamma_n.unwrap();
    assert!((0.0..1.0).contains(&g));
}

#[test]
fn giant_component_bounds_dominate_simulation() {
    let (n, mu, k) = (50, 0.9, 2);
    let p = GraphParams::two_type(n, mu, k).unwrap();
    let trials = 20_000u64;
    let outside: Vec<usize> = (0..trials)
        .map(|t| n - largest_component(generate(&p, Seed::new(5, trial_stream(mu, k, t))).graph()))
        .collect();
    for m in [2usize, 5, 10] {
        let freq = outside.iter().filter(|&&o| o >= m).count() as f64 / trials as f64;
        let bound: f64 = giant_bound_sum(n, mu, k, m).unwrap();
        let se = (freq * (1.0 - freq) / trials as f64).sqrt();
        assert!(freq <= bound + 3.0 * se, "M={m}: {freq} > {bound}");
    }
}

#[test]
fn giant_component_versus_erdos_renyi() {
    let res = run(&spec(ExperimentKind::GiantComponent, 5000, &[0.9], &[2], &[], 200), 0).unwrap();
    let Rows::Giant(rows) = &res.rows else { panic!() };
    assert!(rows[0].min_largest >= 4955, "min largest {}", rows[0].min_largest);
    let Annotations::Giant(ann) = compare_to_theory(&res).unwrap() else { panic!() };
    let er = ann[0].er_expected_largest.unwrap();
    assert!((er - 4218.0).abs() < 2.0);
    assert!(rows[0].mean_largest > er + 700.0);
}

#[test]
fn largest_component_grows_with_k() {
    let grid: Vec<usize> = (2..=10).collect();
    let res = run(&spec(ExperimentKind::GiantComponent, 300, &[0.9], &grid, &[], 1000), 0).unwrap();
    let Rows::Giant(rows) = &res.rows else { panic!() };
    for w in rows.windows(2) {
        assert!(w[1].mean_largest >= w[0].mean_largest - 1.0);
    }
}

#[test]
fn complete_graph_max_k() {
    let res = run(&spec(ExperimentKind::MaxKCurve, 8, &[0.0], &[7], &[1, 2, 3, 4, 5, 6, 7], 3), 1).unwrap();
    let Rows::MaxK(rows) = &res.rows else { panic!() };
    assert_eq!(rows[0].max_k, 7);
    let res = run(&spec(ExperimentKind::KconnSweep, 4, &[0.0], &[3], &[1], 1), 1).unwrap();
    let Rows::Kconn(rows) = &res.rows else { panic!() };
    assert_eq!(rows[0].prob, 1.0);
}

#[test]
fn bundled_specs_run_end_to_end() {
    let dir = tempfile_dir();
    for name in [
        "fig3_mu02.spec",
        "fig3_mu05.spec",
        "fig3_mu08.spec",
        "fig3_maxk.spec",
        "fig4.spec",
        "fig4_n5000.spec",
        "fig5.spec",
    ] {
        let mut s = ExperimentSpec::from_file(&bundled(name)).unwrap();
        // the full trial counts run in the acceptance suite and via the CLI
        s.trials = 2;
        let res = run(&s, 0).unwrap();
        let out = dir.join(name);
        let path = write_outputs(&res, &out).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut csv = Vec::new();
        write_csv(&res, &mut csv).unwrap();
        assert_eq!(text.as_bytes(), csv.as_slice());
        let header = text.lines().next().unwrap();
        match s.kind {
            ExperimentKind::KconnSweep => assert_eq!(
                header,
                "mu,K,k,trials,successes,prob,stderr,wilson_lo,wilson_hi,threshold_K,gamma_n"
            ),
            ExperimentKind::GiantComponent => assert_eq!(
                header,
                "mu,K,trials,mean_largest,min_largest,max_outside,bound_M2,bound_M5,bound_M10"
            ),
            ExperimentKind::MaxKCurve => assert_eq!(header, "mu,K,trials,confidence,max_k"),
        }
    }
    std::fs::remove_dir_all(dir).unwrap();
}

fn tempfile_dir() -> PathBuf {
    let d = std::env::temp_dir().join(format!("kout-mc-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
