mod common;

use common::oracles;
use condent::approximation::{approximation_table, best_approximation, uniform_level, worst_case_error};
use condent::{Event, Filtration, FiniteSpace, Partition};

#[test]
fn majority_rule_is_optimal_on_the_corpus() {
    for case in common::corpus(12) {
        for level in case.filtration.levels() {
            for event in oracles::a_sets(&case.a) {
                let best = best_approximation(&case.space, &event, level).unwrap();
                let want = oracles::best_error(&case.space, &event, level);
                assert!((best.error - want).abs() < 1e-15, "{}: {} vs {want}", case.name, best.error);
                assert!(level.is_measurable(&best.best_set));
            }
        }
    }
}

#[test]
fn worst_case_matches_brute_force_and_decreases() {
    for case in common::corpus(10) {
        let table = approximation_table(&case.space, &case.filtration, &case.a).unwrap();
        for (row, level) in table.iter().zip(case.filtration.levels()) {
            let brute = oracles::a_sets(&case.a)
                .iter()
                .map(|e| oracles::best_error(&case.space, e, level))
                .fold(0.0f64, f64::max);
            assert!((row.worst.error - brute).abs() < 1e-15, "{}", case.name);
        }
        for pair in table.windows(2) {
            assert!(pair[1].worst.error <= pair[0].worst.error + 1e-15, "{}", case.name);
        }
        assert!(table.last().unwrap().worst.error < 1e-15, "{}", case.name);
    }
}

#[test]
fn uniform_level_is_finite_on_every_case() {
    for case in common::corpus(12) {
        for eps in [0.5, 0.1, 0.01] {
            let n = uniform_level(&case.space, &case.filtration, &case.a, eps).unwrap();
            assert!(n.is_some(), "{} eps={eps}", case.name);
        }
    }
}

#[test]
fn uniform_four_example() {
    let space = FiniteSpace::uniform(4).unwrap();
    let halves = Partition::from_blocks(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
    let filtration = Filtration::new(vec![Partition::trivial(4), halves.clone(), Partition::points(4)], None).unwrap();
    let a = Partition::points(4);
    let errors: Vec<f64> = approximation_table(&space, &filtration, &a)
        .unwrap()
        .iter()
        .map(|r| r.worst.error)
        .collect();
    assert_eq!(errors, vec![0.5, 0.5, 0.0]);
    assert_eq!(uniform_level(&space, &filtration, &a, 0.3).unwrap(), Some(3));
    assert_eq!(uniform_level(&space, &filtration, &a, 1.0).unwrap(), Some(1));

    let best = best_approximation(&space, &Event::new([0, 1, 2]), &halves).unwrap();
    assert_eq!(best.best_set, Event::new([0, 1]));
    assert_eq!(best.error, 0.25);
    let worst = worst_case_error(&space, &a, &halves).unwrap();
    assert_eq!(worst.error, 0.5);
}
