mod common;

use gammacd::graph::{self, ball, check_assumption_a, generate, Family, GraphError, WeightMode};
use proptest::prelude::*;

use common::random_graph;

fn families_up_to_1000() -> Vec<Family> {
    let mut out = Vec::new();
    for n in [2, 3, 10, 100, 1000] {
        out.push(Family::Path(n));
        out.push(Family::Complete(n.min(60)));
        out.push(Family::Star(n - 1));
    }
    for n in [3, 4, 17, 1000] {
        out.push(Family::Cycle(n));
    }
    for (dim, side) in [(1, 5), (2, 3), (2, 31), (3, 10)] {
        out.push(Family::Torus { dim, side });
    }
    for d in 1..=9 {
        out.push(Family::Hypercube(d));
    }
    for (degree, depth) in [(2, 5), (3, 4), (4, 3), (3, 8)] {
        out.push(Family::RegularTree { degree, depth });
    }
    out
}

#[test]
fn generated_graphs_are_valid() {
    for family in families_up_to_1000() {
        for mode in [WeightMode::Physical, WeightMode::Normalized] {
            let g = generate(family, mode).unwrap();
            assert!(g.num_vertices() <= 1000, "{family}");
            for x in 0..g.num_vertices() {
                assert!(g.measure(x) > 0.0);
                for &(y, mu) in g.neighbors(x) {
                    assert!(mu > 0.0);
                    let back = g.neighbors(y).iter().find(|(z, _)| *z == x).map(|&(_, m)| m);
                    assert_eq!(back, Some(mu), "{family}: asymmetric weight on {x}-{y}");
                }
                if mode == WeightMode::Normalized {
                    assert_eq!(g.weighted_degree(x), 1.0, "{family}");
                }
            }
            // m ≡ 1 satisfies both modes (e.g. a single edge); physical wins.
            let expected = if g.measures().iter().all(|&m| m == 1.0) { WeightMode::Physical } else { mode };
            assert_eq!(g.detect_mode(), expected, "{family}");
        }
    }
}

#[test]
fn generator_fixtures() {
    let k2 = generate(Family::Complete(2), WeightMode::Physical).unwrap();
    assert_eq!((k2.num_vertices(), k2.num_edges()), (2, 1));
    assert_eq!(k2.measures(), &[1.0, 1.0]);
    assert_eq!(k2.weighted_degree(0), 1.0);
    let a = check_assumption_a(&k2);
    assert_eq!((a.a1_bound, a.a2_inf_m), (1.0, 1.0));

    let c4 = generate(Family::Cycle(4), WeightMode::Normalized).unwrap();
    assert_eq!(c4.measures(), &[2.0; 4]);

    let q3 = generate(Family::Hypercube(3), WeightMode::Physical).unwrap();
    assert_eq!((q3.num_vertices(), q3.num_edges()), (8, 12));
    assert!((0..8).all(|x| q3.degree(x) == 3));

    let s5 = generate(Family::Star(5), WeightMode::Physical).unwrap();
    assert_eq!(s5.weighted_degree(0), 5.0);
    let s9 = generate(Family::Star(9), WeightMode::Physical).unwrap();
    assert_eq!(check_assumption_a(&s9).a1_bound, 9.0);
    let tree = generate(Family::RegularTree { degree: 3, depth: 2 }, WeightMode::Physical).unwrap();
    assert_eq!(tree.num_vertices(), 1 + 3 + 6);
}

#[test]
fn generator_specs() {
    for (text, family) in [
        ("path:7", Family::Path(7)),
        ("cycle:5", Family::Cycle(5)),
        ("torus:2:16", Family::Torus { dim: 2, side: 16 }),
        ("hypercube:4", Family::Hypercube(4)),
        ("cube:4", Family::Hypercube(4)),
        ("complete:3", Family::Complete(3)),
        ("star:9", Family::Star(9)),
        ("tree:3:4", Family::RegularTree { degree: 3, depth: 4 }),
    ] {
        assert_eq!(text.parse::<Family>().unwrap(), family);
        assert_eq!(family.to_string().parse::<Family>().unwrap(), family);
    }
    for bad in ["", "cycle", "cycle:2", "torus:2", "torus:2:2", "widget:3", "path:x", "hypercube:30"] {
        assert!(bad.parse::<Family>().is_err(), "{bad}");
    }
}

#[test]
fn rejects_custom_generation() {
    assert!(matches!(generate(Family::Cycle(5), WeightMode::Custom), Err(GraphError::InvalidMode(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn balls_are_nested_and_deterministic(seed in any::<u64>(), n in 2usize..30, extra in 0usize..30) {
        let g = random_graph(seed, n, extra, true);
        for x in 0..n {
            let b1 = ball(&g, x, 1);
            let b2 = ball(&g, x, 2);
            prop_assert_eq!(b1.members[0], x);
            prop_assert!(b1.members.iter().all(|v| b2.members.contains(v)));
            prop_assert_eq!(&b2, &ball(&g, x, 2));
            prop_assert_eq!(b1.sphere(1).len(), g.degree(x));
        }
    }

    #[test]
    fn json_round_trip(seed in any::<u64>(), n in 2usize..30, extra in 0usize..30) {
        let g = random_graph(seed, n, extra, true);
        prop_assert_eq!(graph::parse_json(&graph::to_json(&g)).unwrap(), g);
    }

    #[test]
    fn tsv_round_trip_in_normalized_mode(seed in any::<u64>(), n in 2usize..30, extra in 0usize..30) {
        let g = random_graph(seed, n, extra, false);
        let back = graph::parse_tsv(&graph::to_tsv(&g), WeightMode::Normalized).unwrap();
        prop_assert_eq!(back.num_edges(), g.num_edges());
        for x in 0..n {
            let y = back.index_of(g.label(x)).unwrap();
            // Relabeling changes the summation order of Σμ.
            prop_assert!((back.measure(y) - g.measure(x)).abs() <= 1e-14 * g.measure(x));
        }
    }
}
