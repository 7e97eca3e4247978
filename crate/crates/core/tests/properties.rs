//! Cross-module invariants on seeded random inputs.

use num_bigint::BigUint;
use proptest::prelude::*;

use peelkit_core::construction::{self, BuildConfig, FlattenParams};
use peelkit_core::defense;
use peelkit_core::format::{Meta, PointSetFile};
use peelkit_core::peeling::{self, PeelConfig};
use peelkit_core::random::{random_general_position, random_point, rng_for};
use peelkit_core::{Point, PointSet};

fn cfg() -> PeelConfig {
    PeelConfig::default()
}

fn random_set(seed: u64, dim: usize, n: usize) -> PointSet {
    PointSet::new(dim, random_general_position(&mut rng_for(seed, 0), dim, n, &[])).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn counts_are_deterministic(seed in any::<u64>(), dim in 1usize..4, extra in 0usize..5) {
        let ps = random_set(seed, dim, dim + 1 + extra);
        let a = peeling::peel_count(&ps, &cfg()).unwrap();
        let b = peeling::peel_count(&ps, &cfg()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn squash_and_placement_keep_counts(seed in any::<u64>(), dim in 2usize..4, n in 2usize..7, k in 1u32..6) {
        let ps = random_set(seed, dim, n);
        let before = peeling::peel_count(&ps, &cfg()).unwrap().count;
        let flat = construction::flatten(&ps, &FlattenParams::dyadic(k)).unwrap();
        prop_assert_eq!(&peeling::peel_count(&flat, &cfg()).unwrap().count, &before);
        let mut target = random_point(&mut rng_for(seed, 1), dim);
        if target.is_origin() {
            target = Point::from_ints(&vec![1; dim]);
        }
        let placed = construction::place_block(&flat, &target).unwrap();
        prop_assert!(placed.points().contains(&target));
        prop_assert_eq!(peeling::peel_count(&placed, &cfg()).unwrap().count, before);
    }

    #[test]
    fn defense_is_monotone(seed in any::<u64>(), dim in 1usize..4, extra in 0usize..5) {
        let origin = Point::origin(dim);
        let pts = random_general_position(&mut rng_for(seed, 2), dim, dim + 1 + extra, &[origin.clone()]);
        let ps = PointSet::new(dim, pts).unwrap();
        let flags: Vec<bool> =
            (1..=4).map(|m| peeling::defends_by_peeling(&ps, &origin, m, &cfg()).unwrap()).collect();
        prop_assert!(flags.windows(2).all(|w| w[0] || !w[1]));
    }

    #[test]
    fn census_is_bounded_by_count(seed in any::<u64>(), n in 3usize..9, groups in 1usize..4) {
        let ps = random_set(seed, 2, n).with_blocks((0..n).map(|i| i % groups).collect()).unwrap();
        let census = peeling::simplified_census(&ps, &cfg()).unwrap();
        let count = peeling::peel_count(&ps, &cfg()).unwrap().count;
        prop_assert!(census.distinct_sequences <= count);
        prop_assert!(census.max_active_blocks <= groups);
    }
}

#[test]
fn planar_construction_census() {
    let c = construction::build_sn(2, 1, 9, &BuildConfig::default()).unwrap();
    let census = peeling::simplified_census(&c.points, &cfg()).unwrap();
    assert!(census.max_active_blocks <= 3);
    assert!(census.distinct_sequences <= BigUint::from(3u32).pow(9));
    assert!(census.distinct_sequences <= c.certificate.unwrap().count);
}

#[test]
fn construction_file_round_trip() {
    let c = construction::build_sn(3, 1, 8, &BuildConfig::default()).unwrap();
    let meta = Meta { kind: Some("construction".into()), d: Some(3), m: Some(1), n: Some(8), ..Meta::default() };
    let file = PointSetFile::from_set(&c.points, meta).with_tree(c.tree.clone());
    let back = PointSetFile::from_json(&file.to_json()).unwrap();
    assert_eq!(back, file);
    assert_eq!(back.to_set().unwrap(), c.points);
    assert_eq!(back.tree.unwrap(), c.tree);
}

#[test]
fn base_set_has_gale_prefix_direction() {
    // The first D - m + 1 base points are positive multiples of Gale points.
    let cfg = cfg();
    for (d, m) in [(2, 2), (3, 2)] {
        let gale = defense::gale_set(d, m).unwrap();
        let base = defense::base_set(d, m, &cfg).unwrap();
        let keep = gale.len() - m + 1;
        for i in 0..keep {
            let g = &gale.points()[i].0;
            let b = &base.points.points()[i].0;
            let ratio = &b[0] / &g[0];
            assert!(ratio > num_rational::BigRational::from_integer(0.into()));
            assert!(g.iter().zip(b).all(|(x, y)| &(x * &ratio) == y));
        }
    }
}
