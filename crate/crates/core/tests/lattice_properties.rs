mod common;

use common::oracles;

use condent::partition::{
    atoms_from_generators, count_partitions, enumerate_partitions, join, meet, point_partition, refines,
    refines_exact, separates_points,
};
use condent::{Event, FiniteSpace, GeneratorFamily, Partition};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

fn normalize(w: Vec<f64>) -> Vec<f64> {
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

fn config(seed: u64) -> Config {
    Config {
        cases: 1000,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: None,
        ..Config::default()
    }
}

fn labels(n: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..n, n)
}

fn two(max_n: usize) -> impl Strategy<Value = (Partition, Partition)> {
    (1..=max_n).prop_flat_map(|n| (labels(n), labels(n)))
        .prop_map(|(a, b)| (Partition::from_labels(&a), Partition::from_labels(&b)))
}

fn three(max_n: usize) -> impl Strategy<Value = (Partition, Partition, Partition)> {
    (1..=max_n)
        .prop_flat_map(|n| (labels(n), labels(n), labels(n)))
        .prop_map(|(a, b, c)| {
            (
                Partition::from_labels(&a),
                Partition::from_labels(&b),
                Partition::from_labels(&c),
            )
        })
}

/// Weights with roughly a quarter of the outcomes null; outcome 0 is never null.
fn weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![1 => Just(0.0), 3 => 0.01f64..1.0], n).prop_map(|mut w| {
        if w[0] == 0.0 {
            w[0] = 0.5;
        }
        normalize(w)
    })
}

proptest! {
    #![proptest_config(config(0x1a77_1ce0))]

    #[test]
    fn join_and_meet_are_commutative((xi, eta) in two(8)) {
        prop_assert_eq!(join(&xi, &eta).unwrap(), join(&eta, &xi).unwrap());
        prop_assert_eq!(meet(&xi, &eta).unwrap(), meet(&eta, &xi).unwrap());
    }

    #[test]
    fn join_and_meet_are_associative((a, b, c) in three(8)) {
        let left = join(&join(&a, &b).unwrap(), &c).unwrap();
        let right = join(&a, &join(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        let left = meet(&meet(&a, &b).unwrap(), &c).unwrap();
        let right = meet(&a, &meet(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn join_and_meet_are_idempotent((xi, _eta) in two(8)) {
        prop_assert_eq!(&join(&xi, &xi).unwrap(), &xi);
        prop_assert_eq!(&meet(&xi, &xi).unwrap(), &xi);
    }

    #[test]
    fn absorption((xi, eta) in two(8)) {
        prop_assert_eq!(&meet(&xi, &join(&xi, &eta).unwrap()).unwrap(), &xi);
        prop_assert_eq!(&join(&xi, &meet(&xi, &eta).unwrap()).unwrap(), &xi);
    }

    #[test]
    fn order_consistency((xi, eta) in two(8)) {
        let j = join(&xi, &eta).unwrap();
        let m = meet(&xi, &eta).unwrap();
        prop_assert!(refines_exact(&xi, &j));
        prop_assert!(refines_exact(&eta, &j));
        prop_assert!(refines_exact(&m, &xi));
        prop_assert!(refines_exact(&m, &eta));
        let space = FiniteSpace::uniform(xi.size()).unwrap();
        prop_assert!(refines(&space, &xi, &j).unwrap());
        prop_assert!(refines(&space, &m, &xi).unwrap());
    }

    #[test]
    fn join_and_meet_match_brute_force((xi, eta) in two(8)) {
        prop_assert_eq!(join(&xi, &eta).unwrap(), oracles::join(&xi, &eta));
        prop_assert_eq!(meet(&xi, &eta).unwrap(), oracles::meet(&xi, &eta));
    }

    #[test]
    fn mod_zero_refinement_ignores_only_null_outcomes(
        (w, xi, eta) in (1usize..=8).prop_flat_map(|n| (weights(n), labels(n), labels(n)))
    ) {
        let space = FiniteSpace::new(&w, None).unwrap();
        let xi = Partition::from_labels(&xi);
        let eta = Partition::from_labels(&eta);
        let support: Vec<usize> = (0..w.len()).filter(|&i| w[i] > 0.0).collect();
        let expected = support.iter().all(|&x| {
            support
                .iter()
                .all(|&y| !oracles::same_block(&eta, x, y) || oracles::same_block(&xi, x, y))
        });
        prop_assert_eq!(refines(&space, &xi, &eta).unwrap(), expected);
        if refines_exact(&xi, &eta) {
            prop_assert!(expected);
        }
    }

    #[test]
    fn atoms_are_join_of_single_generator_atoms(
        (n, sets) in (1usize..=8).prop_flat_map(|n| {
            (Just(n), prop::collection::vec(prop::collection::vec(any::<bool>(), n), 0..6))
        })
    ) {
        let space = FiniteSpace::uniform(n).unwrap();
        let events: Vec<Event> = sets
            .iter()
            .map(|mask| Event::new((0..n).filter(|&i| mask[i])))
            .collect();
        let gamma = GeneratorFamily::new(events.clone());
        let atoms = atoms_from_generators(&space, &gamma).unwrap();
        let mut expected = Partition::trivial(n);
        for e in &events {
            let single = atoms_from_generators(&space, &GeneratorFamily::new(vec![e.clone()])).unwrap();
            expected = join(&expected, &single).unwrap();
        }
        prop_assert_eq!(&atoms, &expected);

        let separates = separates_points(&space, &gamma, &space.full_event()).unwrap();
        prop_assert_eq!(separates, atoms == point_partition(&space));
    }
}

#[test]
fn enumeration_counts_match_bell_numbers() {
    let bell = oracles::bell_numbers(10);
    for n in 1..=10 {
        let all = enumerate_partitions(n).unwrap();
        let (count, stirling) = count_partitions(n).unwrap();
        assert_eq!(all.len() as u64, count, "N = {n}");
        assert_eq!(count, bell[n - 1], "N = {n}");
        for (k, &s) in stirling.iter().enumerate() {
            let with_k = all.iter().filter(|p| p.num_blocks() == k).count() as u64;
            assert_eq!(with_k, s, "S({n}, {k})");
        }
        let mut distinct = all.clone();
        distinct.sort_by(|a, b| a.blocks().cmp(b.blocks()));
        distinct.dedup();
        assert_eq!(distinct.len(), all.len());
    }
}

#[test]
fn small_counts() {
    assert_eq!(count_partitions(1).unwrap().0, 1);
    assert_eq!(count_partitions(3).unwrap().0, 5);
    assert_eq!(count_partitions(4).unwrap().1[2], 7);
    assert_eq!(count_partitions(8).unwrap().0, 4140);
}

#[test]
fn corpus_filtrations_refine() {
    for case in common::corpus(8) {
        for pair in case.filtration.levels().windows(2) {
            assert!(refines_exact(&pair[0], &pair[1]), "{}", case.name);
        }
    }
}
