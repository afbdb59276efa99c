mod support;

use proptest::prelude::*;
use support::oracle::{naive_distances, SplitMix};
use topood_core::{build_filtration, pairwise_distances, simplex_diameter, PointCloud, Role};

fn cloud(points: &[Vec<f64>]) -> PointCloud {
    PointCloud::from_rows(points, Role::Unlabeled, "t").unwrap()
}

#[test]
fn distances_match_double_loop_in_512d() {
    let mut rng = SplitMix(3);
    let pts = rng.cloud(10, 512);
    let want = naive_distances(&pts);
    let dm = pairwise_distances(&cloud(&pts));
    for i in 0..10 {
        for j in 0..10 {
            assert!((dm.get(i, j) - want[i][j]).abs() <= 1e-12);
        }
    }
}

#[test]
fn large_clouds_fill_rows_in_parallel_identically() {
    let mut rng = SplitMix(8);
    let pts = rng.cloud(600, 4);
    let dm = pairwise_distances(&cloud(&pts));
    let want = naive_distances(&pts);
    for i in (0..600).step_by(37) {
        for j in 0..600 {
            assert_eq!(dm.get(i, j), want[i][j]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn metric_axioms(seed in any::<u64>(), n in 1usize..9, d in 1usize..6) {
        let pts = SplitMix(seed).cloud(n, d);
        let dm = pairwise_distances(&cloud(&pts));
        for i in 0..n {
            prop_assert_eq!(dm.get(i, i), 0.0);
            for j in 0..n {
                prop_assert_eq!(dm.get(i, j), dm.get(j, i));
                prop_assert!(dm.get(i, j) >= 0.0);
                for k in 0..n {
                    prop_assert!(dm.get(i, k) <= dm.get(i, j) + dm.get(j, k) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn permutation_equivariant_distances(seed in any::<u64>(), n in 2usize..10) {
        let mut rng = SplitMix(seed);
        let pts = rng.cloud(n, 3);
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.below(i + 1));
        }
        let shuffled: Vec<Vec<f64>> = perm.iter().map(|&i| pts[i].clone()).collect();
        let a = pairwise_distances(&cloud(&pts));
        let b = pairwise_distances(&cloud(&shuffled));
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(b.get(i, j), a.get(perm[i], perm[j]));
            }
        }
    }

    #[test]
    fn simplex_counts_match_brute_force(seed in any::<u64>(), n in 1usize..13, frac in 0.0f64..1.2) {
        let pts = SplitMix(seed).cloud(n, 3);
        let dist = naive_distances(&pts);
        let max = dist.iter().flatten().copied().fold(0.0, f64::max);
        let t = max * frac;
        let f = build_filtration(pairwise_distances(&cloud(&pts)), t).unwrap();

        let mut edges = 0;
        let mut tris = 0;
        for i in 0..n {
            for j in i + 1..n {
                edges += usize::from(dist[i][j] <= t);
                for k in j + 1..n {
                    tris += usize::from(dist[i][j].max(dist[i][k]).max(dist[j][k]) <= t);
                }
            }
        }
        prop_assert_eq!(f.simplices(0).len(), n);
        prop_assert_eq!(f.edges().len(), edges);
        prop_assert_eq!(f.triangles().len(), tris);
        prop_assert!(edges <= n * n.saturating_sub(1) / 2);
        prop_assert!(f.edges().iter().all(|e| e.diameter <= t));
    }

    #[test]
    fn order_is_monotone_and_reproducible(seed in any::<u64>(), n in 3usize..12) {
        let pts = SplitMix(seed).cloud(n, 2);
        let dm = pairwise_distances(&cloud(&pts));
        let a = build_filtration(dm.clone(), f64::INFINITY).unwrap();
        let b = build_filtration(dm.clone(), f64::INFINITY).unwrap();
        prop_assert_eq!(a.edges(), b.edges());
        prop_assert_eq!(a.triangles(), b.triangles());
        for w in a.edges().windows(2) {
            prop_assert!(w[0].key() < w[1].key());
        }
        for (key, [i, j, k]) in a.triangles() {
            for face in [[i, j], [i, k], [j, k]] {
                prop_assert!(simplex_diameter(&face, &dm).unwrap() <= key.diameter);
            }
            prop_assert_eq!(simplex_diameter(&[i, j, k], &dm).unwrap(), key.diameter);
        }
    }
}
