mod support;

use proptest::prelude::*;
use scriptthread_core::metrics::{ari, exact_match_f1, one_minus_vi, one_to_one, shen_f1};
use support::*;

const TOL: f64 = 1e-9;

fn labels(max_n: usize) -> impl Strategy<Value = Vec<usize>> {
    (2..=max_n).prop_flat_map(|n| prop::collection::vec(0..n, n))
}

fn pair(max_n: usize) -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    (2..=max_n).prop_flat_map(|n| (prop::collection::vec(0..n, n), prop::collection::vec(0..n, n)))
}

fn all_five(p: &[usize], g: &[usize]) -> [f64; 5] {
    let (pp, gp) = (partition(p), partition(g));
    [
        ari(&pp, &gp).unwrap(),
        one_minus_vi(&pp, &gp).unwrap(),
        shen_f1(&pp, &gp).unwrap(),
        one_to_one(&pp, &gp).unwrap(),
        exact_match_f1(&pp, &gp).unwrap(),
    ]
}

proptest! {
    #[test]
    fn metrics_agree_with_oracles((p, g) in pair(8)) {
        let got = all_five(&p, &g);
        let want = [
            ari_pairs(&p, &g),
            one_minus_vi_entropy(&p, &g),
            shen_sets(&p, &g),
            one_to_one_exhaustive(&p, &g),
            exact_match_sets(&p, &g),
        ];
        for (a, b) in got.iter().zip(want) {
            prop_assert!((a - b).abs() < TOL, "{a} vs {b}");
        }
    }

    #[test]
    fn relabeling_does_not_change_scores((p, g) in pair(8), shift in 1usize..50) {
        let relabeled: Vec<usize> = p.iter().map(|l| (l + shift) * 7).collect();
        let a = all_five(&p, &g);
        let b = all_five(&relabeled, &g);
        for (x, y) in a.iter().zip(b) {
            prop_assert!((x - y).abs() < TOL);
        }
    }

    #[test]
    fn ari_and_vi_are_symmetric((p, g) in pair(8)) {
        let a = all_five(&p, &g);
        let b = all_five(&g, &p);
        prop_assert!((a[0] - b[0]).abs() < TOL);
        prop_assert!((a[1] - b[1]).abs() < TOL);
        prop_assert!((a[4] - b[4]).abs() < TOL);
    }

    #[test]
    fn vi_satisfies_the_triangle_inequality(n in 2usize..=8, seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let (x, y, z) = (random_labels(&mut rng, n), random_labels(&mut rng, n), random_labels(&mut rng, n));
        // Distances in units of ln n.
        let d = |a: &[usize], b: &[usize]| 1.0 - one_minus_vi_entropy(a, b) / 100.0;
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z) + 1e-12);
    }

    #[test]
    fn scores_are_perfect_exactly_when_partitions_match((p, g) in pair(8)) {
        let same = same_partition(&p, &g);
        for v in all_five(&p, &g) {
            prop_assert_eq!((v - 100.0).abs() < TOL, same, "value {}", v);
        }
    }

    #[test]
    fn identical_partitions_score_100(g in labels(8)) {
        for v in all_five(&g, &g) {
            prop_assert!((v - 100.0).abs() < TOL);
        }
    }

    #[test]
    fn one_to_one_is_at_least_the_exactly_matched_share((p, g) in pair(8)) {
        let pp = partition(&p);
        let gp = partition(&g);
        let gold_threads = gp.threads();
        let pred_threads = pp.threads();
        let mut covered = 0usize;
        for (_, members) in &gold_threads {
            let mut sorted = members.clone();
            sorted.sort();
            if pred_threads.iter().any(|(_, m)| { let mut s = m.clone(); s.sort(); s == sorted }) {
                covered += members.len();
            }
        }
        let bound = 100.0 * covered as f64 / g.len() as f64;
        prop_assert!(one_to_one(&pp, &gp).unwrap() + TOL >= bound);
    }

    #[test]
    fn scores_stay_in_range((p, g) in pair(8)) {
        let v = all_five(&p, &g);
        prop_assert!(v[0] >= -100.0 - TOL && v[0] <= 100.0 + TOL);
        for x in &v[1..] {
            prop_assert!(*x >= -TOL && *x <= 100.0 + TOL);
        }
    }
}
