use domlab_core::solver::Combinations;
use domlab_core::{
    count_k_sets, count_k_sets_naive, find_dominating_sets, find_near_witness, generate_gnp,
    is_dominating, toggle_edges, undominated, Graph, RngStream, VertexSet,
};
use proptest::prelude::*;

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n, 0.0..=1.0f64, any::<u64>())
        .prop_map(|(n, p, seed)| generate_gnp(n, p, &mut RngStream::new(seed, 0)).unwrap())
}

fn graph_and_set(max_n: usize) -> impl Strategy<Value = (Graph, VertexSet)> {
    graph(max_n).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), proptest::collection::vec(any::<bool>(), n))
            .prop_map(|(g, bits)| {
                let s = bits.iter().enumerate().filter(|x| *x.1).map(|x| x.0).collect();
                (g, s)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 300,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn sampled_graphs_are_well_formed(g in graph(200)) {
        prop_assert!(g.is_well_formed());
        let text = g.to_text();
        prop_assert_eq!(text.parse::<Graph>().unwrap(), g);
    }

    #[test]
    fn toggling_twice_restores((g, s) in graph_and_set(30)) {
        let n = g.n();
        let pairs: Vec<(usize, usize)> = s.iter().flat_map(|u| (u + 1..n).map(move |v| (u, v))).take(5).collect();
        let (present, absent): (Vec<_>, Vec<_>) = pairs.iter().partition(|&&(u, v)| g.has_edge(u, v));
        let h = toggle_edges(&g, &present, &absent).unwrap();
        prop_assert_eq!(toggle_edges(&h, &absent, &present).unwrap(), g);
    }

    #[test]
    fn undominated_is_antitone((g, s) in graph_and_set(60), extra in any::<u64>()) {
        let t = s | (VertexSet::from_bits(extra) & g.vertices());
        prop_assert!(undominated(&g, t).is_subset(&undominated(&g, s)));
        prop_assert!(undominated(&g, s).is_disjoint(&s));
        prop_assert_eq!(undominated(&g, g.vertices()), VertexSet::empty());
    }

    #[test]
    fn pruned_counts_match_naive(g in graph(12), k in 1usize..=12) {
        let k = k.min(g.n());
        let fast = count_k_sets(&g, k).unwrap();
        let slow = count_k_sets_naive(&g, k).unwrap();
        prop_assert_eq!((fast.dominating, fast.near), (slow.dominating, slow.near));
        prop_assert!(fast.total_examined <= slow.total_examined);
    }

    #[test]
    fn found_sets_are_the_lexicographic_prefix(g in graph(11), k in 1usize..=4, limit in 1usize..6) {
        let k = k.min(g.n());
        let all: Vec<VertexSet> = Combinations::new(g.n(), k).filter(|s| is_dominating(&g, *s)).collect();
        let found = find_dominating_sets(&g, k, limit).unwrap();
        prop_assert_eq!(&found[..], &all[..all.len().min(limit)]);
        match find_near_witness(&g, k).unwrap() {
            Some((s, v)) => prop_assert_eq!(undominated(&g, s), VertexSet::singleton(v)),
            None => prop_assert_eq!(count_k_sets(&g, k).unwrap().near, 0),
        }
    }
}
