use std::sync::Arc;

use proptest::prelude::*;
use regtsp::analysis::{
    bound_chain, check_packing, check_star_property, dyadic_class, dyadic_partition,
    extract_ball_family, isolation_stats, verify_lower_bound,
};
use regtsp::solvers::{
    brute_force_tour, exact_tour_dp, greedy_tour, nearest_neighbor_tour, tour_length,
    two_opt_improve, GreedyTieRule, NnTieRule, SolverTag,
};
use regtsp::spaces::{sample, similarity_dimension, Metric, PointSet, RegularityWitness, SpaceSpec};

fn space(idx: usize) -> Arc<SpaceSpec> {
    Arc::new(match idx {
        0 => SpaceSpec::unit_cube(2).unwrap(),
        1 => SpaceSpec::flat_torus(2).unwrap(),
        2 => SpaceSpec::sierpinski_gasket(),
        3 => SpaceSpec::sierpinski_carpet(),
        4 => SpaceSpec::unit_cube(3).unwrap(),
        _ => SpaceSpec::unit_cube(2)
            .unwrap()
            .with_metric(Metric::Chebyshev)
            .unwrap(),
    })
}

fn witness_for(spec: &SpaceSpec) -> RegularityWitness {
    // Any valid witness works for the structural checks; the count bound is
    // only reported.
    RegularityWitness::analytic_for(spec)
        .unwrap_or_else(|| RegularityWitness::new(similarity_dimension(spec), 0.5, 4.0).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn samples_stay_in_bounds_and_round_trip(s in 0usize..6, n in 1usize..60, seed in any::<u64>()) {
        let spec = space(s);
        let ps = sample(&spec, n, seed).unwrap();
        let (lo, hi) = spec.bounding_box();
        let slack = 1e-9 + spec.truncation_bound();
        for p in ps.iter() {
            for k in 0..p.len() {
                prop_assert!(p[k] >= lo[k] - slack && p[k] <= hi[k] + slack);
            }
        }
        let mut buf = Vec::new();
        ps.write_csv(&mut buf).unwrap();
        let back = PointSet::read_csv(spec.clone(), buf.as_slice()).unwrap();
        prop_assert_eq!(back.coords(), ps.coords());
        let again = sample(&spec, n, seed).unwrap();
        prop_assert_eq!(again.coords(), ps.coords());
    }

    #[test]
    fn distances_form_a_metric(s in 0usize..6, seed in any::<u64>()) {
        let spec = space(s);
        let ps = sample(&spec, 3, seed).unwrap();
        let (a, b, c) = (ps.point(0), ps.point(1), ps.point(2));
        let ab = spec.distance(a, b).unwrap();
        prop_assert_eq!(ab, spec.distance(b, a).unwrap());
        prop_assert_eq!(spec.distance(a, a).unwrap(), 0.0);
        prop_assert!(ab <= spec.distance(a, c).unwrap() + spec.distance(c, b).unwrap() + 1e-12);
        prop_assert!(ab <= spec.diameter() + 1e-9);
    }

    #[test]
    fn nn_tour_is_radii_plus_closing_edge(s in 0usize..6, n in 2usize..80, seed in any::<u64>(), start in 0usize..80) {
        let ps = sample(&space(s), n, seed).unwrap();
        let start = start % n;
        let (tour, trace) = nearest_neighbor_tour(&ps, start, NnTieRule::LowestIndex).unwrap();
        tour.validate(&ps).unwrap();
        prop_assert_eq!(tour.order()[0], start);
        prop_assert_eq!(trace.len(), n - 1);
        let radii: f64 = trace.steps.iter().map(|s| s.radius).sum();
        let expect = radii + tour.closing_edge(&ps);
        prop_assert!((tour.length() - expect).abs() <= 1e-9 * expect.max(1.0));
    }

    #[test]
    fn greedy_builds_one_cycle_in_edge_order(s in 0usize..6, n in 3usize..80, seed in any::<u64>()) {
        let ps = sample(&space(s), n, seed).unwrap();
        let (tour, trace) = greedy_tour(&ps, GreedyTieRule::LengthThenLex).unwrap();
        tour.validate(&ps).unwrap();
        prop_assert_eq!(trace.len(), n);
        prop_assert!(trace.steps.windows(2).all(|w| w[0].radius <= w[1].radius));
        let total: f64 = trace.steps.iter().map(|s| s.radius).sum();
        prop_assert!((total - tour.length()).abs() <= 1e-9 * total.max(1.0));
    }

    #[test]
    fn exact_solvers_agree_and_dominate(s in 0usize..6, n in 3usize..9, seed in any::<u64>()) {
        let ps = sample(&space(s), n, seed).unwrap();
        let dp = exact_tour_dp(&ps).unwrap();
        let bf = brute_force_tour(&ps).unwrap();
        prop_assert!((dp.length() - bf.length()).abs() <= 1e-9 * dp.length().max(1e-300));
        let floor = dp.length() * (1.0 - 1e-9);
        let (nn, _) = nearest_neighbor_tour(&ps, 0, NnTieRule::LowestIndex).unwrap();
        let (g, _) = greedy_tour(&ps, GreedyTieRule::LengthThenLex).unwrap();
        let polished = two_opt_improve(&ps, &nn, 100).unwrap();
        prop_assert!(nn.length() >= floor && g.length() >= floor && polished.length() >= floor);
        prop_assert!(polished.length() <= nn.length());
        prop_assert_eq!(polished.solver(), SolverTag::TwoOpt);
        prop_assert!((tour_length(&ps, dp.order()) - dp.length()).abs() < 1e-12);
    }

    #[test]
    fn nn_families_satisfy_the_guaranteed_checks(s in 0usize..6, n in 2usize..120, seed in any::<u64>()) {
        let spec = space(s);
        let ps = sample(&spec, n, seed).unwrap();
        let w = witness_for(&spec);
        let (tour, trace) = nearest_neighbor_tour(&ps, 0, NnTieRule::LowestIndex).unwrap();
        let fam = extract_ball_family(&trace).unwrap();
        prop_assert!(check_star_property(&fam, &ps).is_clean());
        let dec = dyadic_partition(&fam, spec.diameter(), &w).unwrap();
        prop_assert_eq!(dec.ball_count(), fam.len());
        for (&k, balls) in &dec.classes {
            for b in balls {
                prop_assert_eq!(dyadic_class(b.radius / spec.diameter()), k);
            }
        }
        prop_assert!(check_packing(&dec, &ps, &w).class_radius_overlaps.is_empty());
        prop_assert!(bound_chain(&fam, &tour, &dec, &ps).unwrap().is_clean());
    }

    #[test]
    fn isolated_points_bound_optimal_tours(s in 0usize..4, n in 3usize..11, seed in any::<u64>()) {
        let spec = space(s);
        let ps = sample(&spec, n, seed).unwrap();
        let stats = isolation_stats(&ps, &witness_for(&spec)).unwrap();
        prop_assert_eq!(stats.z, stats.z_indicators.iter().filter(|&&b| b).count());
        let opt = exact_tour_dp(&ps).unwrap();
        prop_assert!(verify_lower_bound(&ps, &stats, &opt).unwrap().holds);
    }
}

/// Consecutive nearest-neighbor steps whose radius grows inside one dyadic
/// class overlap once shrunk to half radius, even though the family
/// satisfies (★). The checker must report this rather than hide it.
#[test]
fn half_radius_shrinking_overlaps_on_growing_steps() {
    let spec = Arc::new(SpaceSpec::unit_cube(2).unwrap());
    let d = spec.diameter();
    let ps = PointSet::new(
        spec.clone(),
        &[vec![0.0, 0.0], vec![0.30, 0.0], vec![0.65, 0.0]],
        None,
    )
    .unwrap();
    let (_, trace) = nearest_neighbor_tour(&ps, 0, NnTieRule::LowestIndex).unwrap();
    let fam = extract_ball_family(&trace).unwrap();
    assert_eq!(dyadic_class(0.30 / d), dyadic_class(0.35 / d));
    assert!(check_star_property(&fam, &ps).is_clean());
    let w = RegularityWitness::unit_square_analytic();
    let rep = check_packing(&dyadic_partition(&fam, d, &w).unwrap(), &ps, &w);
    assert_eq!(rep.half_radius_overlaps.len(), 1);
    assert!(rep.class_radius_overlaps.is_empty());
}
