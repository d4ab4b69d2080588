use domlab_core::{generate_gnp, Graph, RngStream};

const GOLDEN_N4: &str = include_str!("data/gnp_n4_p05_seed42_stream0.txt");

#[test]
fn golden_sample_is_stable() {
    let g = generate_gnp(4, 0.5, &mut RngStream::new(42, 0)).unwrap();
    assert_eq!(g.to_text(), GOLDEN_N4);
    let parsed: Graph = GOLDEN_N4.parse().unwrap();
    assert_eq!(parsed, g);
}

#[test]
fn same_stream_same_graph_other_stream_differs() {
    let a = generate_gnp(30, 0.3, &mut RngStream::new(9, 1)).unwrap();
    let b = generate_gnp(30, 0.3, &mut RngStream::new(9, 1)).unwrap();
    let c = generate_gnp(30, 0.3, &mut RngStream::new(9, 2)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn edge_count_matches_binomial_law() {
    let (n, p, samples) = (30usize, 0.3, 10_000u64);
    let pairs = (n * (n - 1) / 2) as f64;
    let counts: Vec<f64> = (0..samples)
        .map(|s| generate_gnp(n, p, &mut RngStream::new(17, s)).unwrap().edge_count() as f64)
        .collect();
    let t = samples as f64;
    let mean = counts.iter().sum::<f64>() / t;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (t - 1.0);
    let want_mean = pairs * p;
    let want_var = pairs * p * (1.0 - p);
    // mean within 4 standard errors; variance within 5%
    assert!((mean - want_mean).abs() < 4.0 * (want_var / t).sqrt(), "{mean} vs {want_mean}");
    assert!((var / want_var - 1.0).abs() < 0.05, "{var} vs {want_var}");
}

#[test]
fn extreme_probabilities() {
    let mut rng = RngStream::new(0, 0);
    assert_eq!(generate_gnp(12, 0.0, &mut rng).unwrap().edge_count(), 0);
    assert_eq!(generate_gnp(12, 1.0, &mut rng).unwrap().edge_count(), 66);
    assert!(generate_gnp(12, 1.5, &mut rng).is_err());
    assert!(generate_gnp(300, 0.5, &mut rng).is_err());
}
