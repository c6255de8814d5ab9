use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;

use qiso::counting::{
    intersection_count, line_sum_inequality, qbinom, qpow, tail_second_side_condition, tail_sum_first,
    tail_sum_second, theorem_bound,
};
use qiso::gf::FieldSpec;
use qiso::matching::{build_gk, perfect_matching, regularity_check};
use qiso::metric::{delta, graph_distance};
use qiso::search::{construct_f1, construct_f2, verify_family};
use qiso::subspace::{all_subspaces, enumerate_subspaces, total_subspace_count, Subspace, Vector};

#[test]
fn enumeration_counts_match_qbinom() {
    for q in [2u32, 3, 4] {
        let spec = FieldSpec::new(q).unwrap();
        for n in 0..=5 {
            if total_subspace_count(n, q as u8) > BigUint::from(200_000u32) {
                continue;
            }
            for k in 0..=n {
                let count = enumerate_subspaces(n, k, &spec, 1_000_000).unwrap().count();
                assert_eq!(BigUint::from(count), qbinom(n, k, q as u64), "q={q} n={n} k={k}");
            }
        }
    }
}

#[test]
fn dimension_formula_on_all_pairs() {
    for n in 1..=4 {
        let spec = FieldSpec::new(2).unwrap();
        let all = all_subspaces(n, &spec, 10_000).unwrap();
        for a in &all {
            for b in &all {
                let s = a.sum_dim(&spec, b).unwrap();
                let i = a.intersection_dim(&spec, b).unwrap();
                assert_eq!(s + i, a.dim() + b.dim());
            }
        }
    }
}

#[test]
fn intersection_count_matches_enumeration() {
    for (q, nmax) in [(2u32, 4usize), (3, 3)] {
        let spec = FieldSpec::new(q).unwrap();
        for n in 0..=nmax {
            for k in 0..=n {
                // A fixed k-space and one other of the same dimension.
                let fixed = Subspace::span(&spec, n, &(0..k).map(|i| Vector::unit(n, i)).collect::<Vec<_>>()).unwrap();
                let other = enumerate_subspaces(n, k, &spec, 10_000).unwrap().last().unwrap();
                for l in 0..=n {
                    let mut total = BigUint::ZERO;
                    for j in 0..=k.min(l) {
                        let want = intersection_count(n, k, l, j, q as u64);
                        for a in [&fixed, &other] {
                            let found = enumerate_subspaces(n, l, &spec, 10_000)
                                .unwrap()
                                .filter(|b| a.intersection_dim(&spec, b).unwrap() == j)
                                .count();
                            assert_eq!(BigUint::from(found), want, "q={q} n={n} k={k} l={l} j={j}");
                        }
                        total += want;
                    }
                    assert_eq!(total, qbinom(n, l, q as u64));
                }
            }
        }
    }
}

#[test]
fn graph_distance_equals_delta() {
    for (q, nmax) in [(2u32, 4usize), (3, 3)] {
        let spec = FieldSpec::new(q).unwrap();
        for n in 1..=nmax {
            let all = all_subspaces(n, &spec, 10_000).unwrap();
            let g = qiso::metric::QHammingGraph::build(&spec, n, 10_000).unwrap();
            for a in &all {
                for b in &all {
                    assert_eq!(g.distance(a, b).unwrap(), delta(&spec, a, b).unwrap());
                }
            }
        }
        let a = &all_subspaces(2, &spec, 100).unwrap()[1];
        assert_eq!(graph_distance(&spec, a, a, 100).unwrap(), 0);
    }
}

#[test]
fn complement_graphs_are_regular_and_matchable() {
    for (q, nmax) in [(2u32, 4usize), (3, 3)] {
        let spec = FieldSpec::new(q).unwrap();
        for n in 0..=nmax {
            for k in 0..=n / 2 {
                let g = build_gk(&spec, n, k, 10_000).unwrap();
                assert!(regularity_check(&g, &qpow(q as u64, k * (n - k))));
                let m = perfect_matching(&g).unwrap();
                assert_eq!(m.len(), g.left.len());
                for (i, j) in m {
                    assert_eq!(delta(&spec, &g.left[i], &g.right[j]).unwrap(), n);
                }
            }
        }
    }
}

#[test]
fn tail_sums_stay_below_geometric_tail() {
    for q in [2u64, 3, 4] {
        for t in 2..=4 {
            let bound = BigRational::new(One::one(), (BigUint::from(q).pow(t as u32) - 1u8).into());
            for d in [2 * t, 2 * t + 1] {
                for n in 2 * d + 1..=2 * d + 12 {
                    assert!(tail_sum_first(n, t, t + 1, q) < bound, "first q={q} t={t} n={n}");
                    assert!(tail_second_side_condition(n, d));
                    assert!(tail_sum_second(n, d, q).unwrap() < bound, "second q={q} d={d} n={n}");
                }
            }
        }
    }
}

#[test]
fn line_sum_inequality_holds() {
    for q in 2..=9 {
        for n in 1..=30 {
            assert!(line_sum_inequality(n, q), "q={q} n={n}");
        }
    }
}

#[test]
fn constructions_attain_the_bound() {
    for q in [2u32, 3] {
        let spec = FieldSpec::new(q).unwrap();
        for d in 0..=5usize {
            let t = d / 2;
            let mut ns = vec![d + 1];
            ns.extend(2 * d + 1..=2 * d + 4);
            for n in ns {
                if total_subspace_count(n, q as u8) > BigUint::from(200_000u32) {
                    continue;
                }
                let fam = if d % 2 == 0 {
                    construct_f1(&spec, n, t, 1_000_000).unwrap()
                } else {
                    construct_f2(&spec, n, t, &Vector::unit(n, 0), 1_000_000).unwrap()
                };
                let tb = theorem_bound(n, d, q as u64);
                assert!(tb.regime.is_covered());
                let report = verify_family(&spec, &fam, d);
                assert!(report.pass && report.tight, "q={q} n={n} d={d}: {:?}", report.violations);
                assert_eq!(report.diameter, d);
            }
        }
    }
}
