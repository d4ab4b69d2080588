use domlab_core::moments::{expected_n2, expected_x2, w_terms};
use domlab_core::{
    expected_n, expected_x, f_term, phi, GraphSpace, LogReal, ModelParams, MomentReport,
};

const TOL: f64 = 1e-10;

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

#[test]
fn n7_spot_checks_including_dense_p() {
    let space = GraphSpace::enumerate(7).unwrap();
    assert_eq!(space.graph_count(), 1 << 21);
    for (k, p) in [(2, 0.7), (3, 0.4), (3, 0.7), (4, 0.2)] {
        let o = space.report(k, p).unwrap();
        let m = ModelParams::new(7, k as u64, p);
        assert!(rel(expected_x(&m).to_f64(), o.e_x) < TOL);
        assert!(rel(expected_x2(&m).to_f64(), o.e_x2) < TOL);
        assert!(rel(expected_n(&m).to_f64(), o.e_n) < TOL);
        assert!(rel(expected_n2(&m).to_f64(), o.e_n2) < TOL, "k={k} p={p}");
        assert!((o.weight_sum - 1.0).abs() < 1e-12);
    }
}

#[test]
fn oracle_probability_identities() {
    for n in 2..=6 {
        let space = GraphSpace::enumerate(n).unwrap();
        for k in 1..=n {
            for p in [0.15, 0.5, 0.85] {
                let o = space.report(k, p).unwrap();
                // Markov and Paley–Zygmund hold exactly for the true law
                assert!(o.p_x_pos <= o.e_x + 1e-12);
                if o.e_x2 > 0.0 {
                    assert!(o.p_x_pos >= o.e_x * o.e_x / o.e_x2 - 1e-12);
                }
                // E[X] >= Pr(X=1) + 2 Pr(X>=2)
                assert!(o.e_x >= o.p_unique + 2.0 * (o.p_x_pos - o.p_unique) - 1e-12);
                assert!(o.p_near_pos <= o.e_n + 1e-12);
                assert!(o.e_x2 >= o.e_x * o.e_x - 1e-12);
                assert!(o.e_n2 >= o.e_n * o.e_n - 1e-12);
            }
        }
    }
}

#[test]
fn variances_are_nonnegative_at_scale() {
    for (n, k) in [(20u64, 3u64), (40, 4), (100, 5), (1000, 7)] {
        for p in [0.1, 0.3, 0.6] {
            let m = ModelParams::new(n, k, p);
            let ex = expected_x(&m);
            assert!(expected_x2(&m) >= ex * ex * LogReal::from_f64(1.0 - 1e-12));
            let en = expected_n(&m);
            assert!(expected_n2(&m) >= en * en * LogReal::from_f64(1.0 - 1e-12));
        }
    }
}

#[test]
fn first_moment_increases_with_p() {
    let mut last = LogReal::ZERO;
    for i in 1..100 {
        let e = expected_x(&ModelParams::new(60, 4, i as f64 / 100.0));
        assert!(e > last);
        last = e;
    }
}

#[test]
fn second_moment_decomposes_over_overlap() {
    let m = ModelParams::new(12, 3, 0.45);
    let by_overlap = LogReal::sum((0..=3).map(|i| f_term(&m, i).unwrap()));
    assert!(by_overlap.rel_err(&expected_x2(&m)) < 1e-13);
    let terms = LogReal::sum((0..=3).map(|i| phi(&m, i).unwrap() * w_terms(&m, i).unwrap().w));
    assert!(terms.rel_err(&expected_n2(&m)) < 1e-13);
    // full overlap contributes exactly E[X]
    assert!(f_term(&m, 3).unwrap().rel_err(&expected_x(&m)) < 1e-13);
}

#[test]
fn report_formats_are_consistent() {
    let r = MomentReport::compute(&ModelParams::new(20, 3, 0.3)).unwrap();
    let kv = r.to_kv_text();
    assert!(kv.starts_with("key,decimal,sign,log\n"));
    let e_x_line = kv.lines().find(|l| l.starts_with("e_x,")).unwrap();
    let decimal: f64 = e_x_line.split(',').nth(1).unwrap().parse().unwrap();
    assert!(rel(decimal, r.e_x.to_f64()) < 1e-11);
    let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(json["params"]["n"], 20);
    assert!(json["e_x"]["log"].is_f64());
}
