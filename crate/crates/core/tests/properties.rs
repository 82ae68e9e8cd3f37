use boson_bench::correlators::{pair_index, pairs};
use boson_bench::oracle::{
    boson_distribution, determinant, distinguishable_distribution, fermion_distribution,
    oracle_correlator, permanent,
};
use boson_bench::stats::{moments_of, LOW_CONFIDENCE_TRIALS};
use boson_bench::{
    c_dataset, c_datasets_all, certify, cloud_summary, haar_submatrix_with, pair_terms,
    BenchmarkStatistics, CMatrix, Complex64, RngSeed, Species, Submatrix64,
};
use proptest::prelude::*;
use std::collections::BTreeMap;

fn sub(n: usize, m: usize, seed: u64) -> Submatrix64 {
    haar_submatrix_with(n, m, &mut RngSeed::new(seed, "properties").rng(0)).unwrap()
}

fn shape(max_n: usize, max_m: usize) -> impl Strategy<Value = (usize, usize, u64)> {
    (1..=max_n, 2..=max_m, any::<u64>()).prop_filter("n < m", |(n, m, _)| n < m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn species_identities((n, m, seed) in shape(8, 64)) {
        let s = sub(n, m, seed);
        for (i, j) in pairs(m) {
            let t = pair_terms(&s, i, j).unwrap();
            let (b, f, d) = (t.correlator(Species::Boson), t.correlator(Species::Fermion), t.correlator(Species::Distinguishable));
            prop_assert!((b + f - 2.0 * d).abs() <= 1e-12);
            prop_assert!(d <= 0.0);
            prop_assert!(t.exchange_imag.abs() <= 1e-12);
        }
    }

    #[test]
    fn single_particle_collapse((m, seed) in (2usize..=64, any::<u64>())) {
        let s = sub(1, m, seed);
        let [b, f, d, sim] = c_datasets_all(&s).unwrap();
        for k in 0..d.values.len() {
            for other in [&b, &f, &sim] {
                prop_assert!((other.values[k] - d.values[k]).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn permuting_outputs_permutes_dataset((n, m, seed) in shape(5, 16), shuffle in any::<u64>()) {
        let s = sub(n, m, seed);
        let mut perm: Vec<usize> = (0..m).collect();
        let mut state = shuffle;
        for k in (1..m).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(k, (state >> 33) as usize % (k + 1));
        }
        let p = s.permute_outputs(&perm).unwrap();
        for species in Species::ALL {
            let base = c_dataset(&s, species).unwrap();
            let moved = c_dataset(&p, species).unwrap();
            for (i, j) in pairs(m) {
                let (a, b) = (perm[i - 1] + 1, perm[j - 1] + 1);
                let original = base.values[pair_index(m, a.min(b), a.max(b))];
                prop_assert!((moved.values[pair_index(m, i, j)] - original).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn moments_ignore_order(mut values in prop::collection::vec(-1.0f64..1.0, 1..200), rot in any::<usize>()) {
        let before = moments_of(&values).unwrap();
        let k = rot % values.len();
        values.rotate_left(k);
        values.reverse();
        let after = moments_of(&values).unwrap();
        for (x, y) in [(before.m1, after.m1), (before.m2, after.m2), (before.m3, after.m3)] {
            prop_assert!((x - y).abs() <= 1e-15 * x.abs().max(1e-300) + 1e-300);
        }
    }

    #[test]
    fn rescaling_keeps_cv_and_skewness(values in prop::collection::vec(-1.0f64..-0.01, 3..100), a in 0.01f64..100.0) {
        let n = 4;
        let m = 50;
        let base = moments_of(&values).unwrap();
        prop_assume!(base.variance() > 1e-6);
        let scaled: Vec<f64> = values.iter().map(|v| a * v).collect();
        let s0 = base.statistics(n, m).unwrap();
        let s1 = moments_of(&scaled).unwrap().statistics(n, m).unwrap();
        prop_assert!((s0.cv - s1.cv).abs() <= 1e-9 * s0.cv.abs());
        prop_assert!((s0.s - s1.s).abs() <= 1e-7 * (1.0 + s0.s.abs()));
        prop_assert!((a * s0.nm - s1.nm).abs() <= 1e-12 * s1.nm.abs());
    }

    #[test]
    fn acceptance_grows_with_k(points in prop::collection::vec((-1.0f64..0.0, -3.0f64..0.0), 3..40),
                               preds in prop::collection::vec((-1.0f64..0.0, -3.0f64..0.0), 4)) {
        let cloud = cloud_summary(&points).unwrap();
        let table: BTreeMap<Species, BenchmarkStatistics<f64>> = Species::ALL
            .into_iter()
            .zip(&preds)
            .map(|(s, &(cv, sk))| (s, BenchmarkStatistics { nm: -1.0, cv, s: sk }))
            .collect();
        let mut previous: Vec<Species> = Vec::new();
        for k in [0.5, 1.0, 2.0, 4.0, 8.0, 100.0] {
            let v = certify(&cloud, &table, k).unwrap();
            prop_assert!(previous.iter().all(|s| v.accepted.contains(s)));
            prop_assert_eq!(v.low_confidence, points.len() < LOW_CONFIDENCE_TRIALS);
            previous = v.accepted.clone();
        }
    }

    #[test]
    fn cloud_mean_is_the_average(points in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 2..300)) {
        let c = cloud_summary(&points).unwrap();
        let mut rev = points.clone();
        rev.reverse();
        let r = cloud_summary(&rev).unwrap();
        let sx: f64 = points.iter().map(|p| p.0).sum::<f64>() / points.len() as f64;
        prop_assert!((c.mean[0] - sx).abs() <= 1e-12 * (1.0 + sx.abs()));
        prop_assert!((c.mean[0] - r.mean[0]).abs() <= 1e-15 * c.mean[0].abs());
        prop_assert!((c.mean[1] - r.mean[1]).abs() <= 1e-15 * c.mean[1].abs());
    }

    #[test]
    fn ryser_matches_naive_expansion(n in 1usize..=6, seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = RngSeed::new(seed, "naive-permanent").rng(0);
        let entries: Vec<Complex64> = (0..n * n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let a = CMatrix::from_vec(n, n, entries).unwrap();
        let (naive_perm, naive_det) = naive(&a);
        let perm = permanent(&a).unwrap();
        let det = determinant(&a).unwrap();
        prop_assert!((perm - naive_perm).norm() <= 1e-12 * naive_perm.norm().max(1.0));
        prop_assert!((det - naive_det).norm() <= 1e-12 * naive_det.norm().max(1.0));
    }

    #[test]
    fn oracle_sum_rule_and_pauli((n, m, seed) in shape(3, 6)) {
        let s = sub(n, m, seed);
        for dist in [boson_distribution(&s).unwrap(), fermion_distribution(&s).unwrap(), distinguishable_distribution(&s).unwrap()] {
            prop_assert!((dist.total_mass() - 1.0).abs() <= 1e-10);
            let mut total = 0.0;
            for i in 1..=m {
                total += oracle_correlator(&dist, i, i).unwrap();
            }
            for (i, j) in pairs(m) {
                total += 2.0 * oracle_correlator(&dist, i, j).unwrap();
            }
            prop_assert!(total.abs() <= 1e-10);
        }
        let f = fermion_distribution(&s).unwrap();
        for (y, p) in &f.entries {
            if y.occupations().iter().any(|&k| k >= 2) {
                prop_assert!(p.abs() <= 1e-14);
            }
        }
    }
}

// Sum over all n! assignments, tracking the sign for the determinant.
fn naive(a: &CMatrix<f64>) -> (Complex64, Complex64) {
    fn walk(
        a: &CMatrix<f64>,
        row: usize,
        used: &mut Vec<bool>,
        cols: &mut Vec<usize>,
        acc: &mut (Complex64, Complex64),
    ) {
        let n = a.rows();
        if row == n {
            let mut prod = Complex64::new(1.0, 0.0);
            for (r, &c) in cols.iter().enumerate() {
                prod *= a[(r, c)];
            }
            let inversions = (0..n)
                .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
                .filter(|&(x, y)| cols[x] > cols[y])
                .count();
            acc.0 += prod;
            acc.1 += if inversions % 2 == 0 { prod } else { -prod };
            return;
        }
        for c in 0..n {
            if !used[c] {
                used[c] = true;
                cols.push(c);
                walk(a, row + 1, used, cols, acc);
                cols.pop();
                used[c] = false;
            }
        }
    }
    let mut acc = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    walk(a, 0, &mut vec![false; a.rows()], &mut Vec::new(), &mut acc);
    acc
}
