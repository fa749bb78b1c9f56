mod common;

use geocomplex::census::{census_report, connected_components, crosspolytope_component_count, induced_subgraph_count, PatternGraph};
use geocomplex::complex::{cech_complex, rips_complex, Simplex, SimplicialComplex};
use geocomplex::experiments::{run_trial, RadiusRule, SweepConfig};
use geocomplex::geometry::{build_geometric_graph, sample_points, Density, DensityKind, GeometricGraph, PointCloud};
use geocomplex::homology::{betti_numbers, boundary_matrix, euler_characteristic, PrimeField};
use geocomplex::morse::{build_gradient_field, critical_cells, distance_order_with, validate_gradient_field, OriginRule};
use geocomplex::complex::ComplexKind;
use proptest::prelude::*;

fn cloud_strategy(max_n: usize) -> impl Strategy<Value = PointCloud> {
    (2usize..=3, 1usize..=max_n).prop_flat_map(|(d, n)| {
        proptest::collection::vec(proptest::collection::vec(0.0f64..1.0, d), n)
            .prop_map(move |pts| PointCloud::from_points(d, &pts).unwrap())
    })
}

fn random_complex() -> impl Strategy<Value = SimplicialComplex> {
    (3usize..9).prop_flat_map(|n| {
        proptest::collection::vec(proptest::collection::btree_set(0..n as u32, 1..=4), 1..12).prop_map(move |gens| {
            SimplicialComplex::from_generators(n, 3, gens.into_iter().map(|s| Simplex::new(s.into_iter().collect()).unwrap())).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rips_matches_subset_enumeration(cloud in cloud_strategy(10), r in 0.1f64..0.9) {
        let cx = rips_complex(&build_geometric_graph(&cloud, r).unwrap(), 3).unwrap();
        prop_assert_eq!(common::faces_of(&cx), common::brute_rips(&cloud, r, 3));
    }

    #[test]
    fn cech_is_a_subcomplex_of_rips_with_the_same_graph(cloud in cloud_strategy(12), r in 0.1f64..0.9) {
        let graph = build_geometric_graph(&cloud, r).unwrap();
        let rips = rips_complex(&graph, 3).unwrap();
        let cech = cech_complex(&cloud, r, 3).unwrap();
        prop_assert_eq!(cech.n_faces(1), rips.n_faces(1));
        for d in 0..=3 {
            for f in cech.faces(d) {
                prop_assert!(rips.contains(f));
            }
        }
    }

    #[test]
    fn sparse_betti_matches_dense_elimination(cx in random_complex(), p in prop::sample::select(vec![2u32, 3, 5])) {
        let profile = betti_numbers(&cx, 2, PrimeField::new(p).unwrap()).unwrap();
        prop_assert_eq!(profile.betti, common::dense_betti(&common::faces_of(&cx), 2, u64::from(p)));
    }

    #[test]
    fn euler_identity_when_all_faces_counted(cx in random_complex()) {
        let profile = betti_numbers(&cx, 3, PrimeField::default()).unwrap();
        prop_assert_eq!(profile.euler_characteristic(), euler_characteristic(&cx));
    }

    #[test]
    fn boundary_of_boundary_vanishes(cx in random_complex(), p in prop::sample::select(vec![2u32, 3, 7])) {
        let field = PrimeField::new(p).unwrap();
        for k in 2..=3 {
            let outer = boundary_matrix(&cx, k - 1, field).unwrap();
            let inner = boundary_matrix(&cx, k, field).unwrap();
            prop_assert!(outer.compose_is_zero(&inner));
        }
    }

    #[test]
    fn morse_field_is_acyclic_and_bounds_betti(seed in any::<u64>(), n in 5usize..120, r in 0.05f64..0.35) {
        let cloud = sample_points(Density::cube(2).unwrap(), n, seed).unwrap();
        let graph = build_geometric_graph(&cloud, r).unwrap();
        let cx = rips_complex(&graph, 3).unwrap();
        let order = distance_order_with(&cloud, &OriginRule::DomainCenter).unwrap();
        let field = build_gradient_field(&cx, &graph, &order).unwrap();
        prop_assert!(validate_gradient_field(&cx, &field).is_valid());
        let crit = critical_cells(&cx, &field);
        let betti = betti_numbers(&cx, 2, PrimeField::default()).unwrap();
        for k in 0..=2 {
            prop_assert!(betti.betti(k) <= crit.count(k));
        }
        // weak Morse inequalities become an equality on the Euler characteristic
        // when the top stored dimension has no cofaces above the cap
        if cx.is_complete() {
            let alt: i64 = crit.counts.iter().enumerate().map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) }).sum();
            prop_assert_eq!(alt, euler_characteristic(&cx));
        }
    }

    #[test]
    fn crosspolytope_counts_match_brute_force(seed in any::<u64>(), r in 0.03f64..0.12) {
        let cloud = sample_points(Density::cube(2).unwrap(), 150, seed).unwrap();
        let graph = build_geometric_graph(&cloud, r).unwrap();
        for k in 1..=2 {
            prop_assert_eq!(crosspolytope_component_count(&graph, k), common::brute_crosspolytope_count(&graph, k));
        }
    }

    #[test]
    fn sandwich_holds_per_instance(seed in any::<u64>(), alpha in 0.55f64..0.9) {
        let mut config = SweepConfig::new(DensityKind::UniformCube, 2, ComplexKind::Rips, 2, vec![150], RadiusRule::PowerLaw { c: 1.0, alpha });
        config.seed = seed;
        let rec = run_trial(&config, 150, 0).unwrap();
        prop_assert!(rec.violations.is_empty(), "{:?}", rec.violations);
        config.complex = ComplexKind::Cech;
        let rec = run_trial(&config, 150, 0).unwrap();
        prop_assert!(rec.violations.is_empty(), "{:?}", rec.violations);
    }

    #[test]
    fn reference_enclosing_ball_agrees(cloud in cloud_strategy(8)) {
        let pts: Vec<&[f64]> = cloud.points().collect();
        let diff = (common::reference_meb_radius(&pts) - common::library_meb_radius(&pts)).abs();
        prop_assert!(diff < 1e-6, "diff {}", diff);
    }
}

fn brute_face_component_counts(cx: &SimplicialComplex, graph: &GeometricGraph, k: usize, min_size: usize) -> usize {
    let comps = common::bfs_components(graph);
    let size_of = |v: u32| comps.iter().find(|c| c.contains(&v)).unwrap().len();
    cx.faces(k).filter(|f| size_of(f[0]) >= min_size).count()
}

#[test]
fn tail_face_counts_match_bfs() {
    for seed in 0..10 {
        let cloud = sample_points(Density::ball(2).unwrap(), 300, seed).unwrap();
        let graph = build_geometric_graph(&cloud, 0.09).unwrap();
        let cx = rips_complex(&graph, 2).unwrap();
        let report = census_report(&graph, &cx, &connected_components(&graph), None, 2);
        for k in 0..=2 {
            for i in [1, 3, 5, 7] {
                assert_eq!(report.f_ge(k, i), brute_face_component_counts(&cx, &graph, k, i));
            }
        }
    }
}

#[test]
fn induced_counts_match_brute_force() {
    let patterns = [
        PatternGraph::path(3).unwrap(),
        PatternGraph::complete(3).unwrap(),
        PatternGraph::path(4).unwrap(),
        PatternGraph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap(),
    ];
    for seed in 0..5 {
        let cloud = sample_points(Density::cube(2).unwrap(), 40, seed).unwrap();
        let graph = build_geometric_graph(&cloud, 0.2).unwrap();
        for pattern in &patterns {
            let size = pattern.n_vertices();
            let template = |i: usize, j: usize| pattern.edges().contains(&(i, j));
            let expected = common::subsets_by_dim(40, size)[size - 1]
                .iter()
                .filter(|s| common::isomorphic_to(&graph, s, template))
                .count();
            assert_eq!(induced_subgraph_count(&graph, pattern).unwrap(), expected);
        }
    }
}
