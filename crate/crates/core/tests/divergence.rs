//! Divergence metrics, effect sizes and the H-test against oracles.

mod common;

use common::{oracle, published};
use epiaudit::divergence::{
    cosine_similarity, d_from_reported_ci, jensen_shannon_divergence, kruskal_wallis, mid_ranks, paired_cohens_d,
    shannon_entropy, MetricError, SimplexVector,
};
use epiaudit::profiles::{global_profile, EpistemicProfile, GlobalProfile};
use epiaudit::special;
use epiaudit::{EpistemicCategory, Platform};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sv(v: &[f64]) -> SimplexVector {
    SimplexVector::new(v.to_vec()).unwrap()
}

#[test]
fn entropy_jsd_cosine_match_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let p = oracle::random_simplex(&mut rng);
        let q = oracle::random_simplex(&mut rng);
        assert!((shannon_entropy(&sv(&p)) - oracle::entropy_bits(&p)).abs() < 1e-9);
        assert!((jensen_shannon_divergence(&sv(&p), &sv(&q)).unwrap() - oracle::jsd_bits(&p, &q)).abs() < 1e-9);
        assert!((cosine_similarity(&p, &q).unwrap() - oracle::cosine(&p, &q)).abs() < 1e-9);
    }
}

#[test]
fn jsd_worked_value() {
    let j = jensen_shannon_divergence(&sv(&[1.0, 0.0]), &sv(&[0.5, 0.5])).unwrap();
    assert!((j - 0.3112781244591328).abs() < 1e-12);
    let disjoint = jensen_shannon_divergence(&sv(&[1.0, 0.0]), &sv(&[0.0, 1.0])).unwrap();
    assert!((disjoint - 1.0).abs() < 1e-12);
}

#[test]
fn kruskal_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let k = rng.gen_range(2..7);
        let groups: Vec<Vec<f64>> = (0..k)
            .map(|g| {
                let n = rng.gen_range(2..15);
                // coarse grid so ties are common
                (0..n).map(|_| (rng.gen_range(0..20) as f64 + g as f64) / 4.0).collect()
            })
            .collect();
        let lib = kruskal_wallis(&groups).unwrap();
        assert!((lib.h - oracle::kruskal_h(&groups)).abs() < 1e-9, "{} vs {}", lib.h, oracle::kruskal_h(&groups));
        assert_eq!(lib.df, k - 1);
    }
}

#[test]
fn kruskal_worked_value() {
    let r = kruskal_wallis(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
    assert!((r.h - 27.0 / 7.0).abs() < 1e-12);
    // one degree of freedom: the tail is erfc(sqrt(H/2)), checked numerically
    assert!((r.p_value - oracle::chi2_tail_numeric(27.0 / 7.0, 1)).abs() < 1e-6);
    // two degrees of freedom: the tail is exp(-H/2)
    let r = kruskal_wallis(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
    assert!((r.h - 32.0 / 7.0).abs() < 1e-12);
    assert!((r.p_value - (-16.0f64 / 7.0).exp()).abs() < 1e-12);
    assert_eq!(kruskal_wallis(&[vec![1.0, 1.0], vec![1.0]]).unwrap_err(), MetricError::AllTied);
    assert_eq!(kruskal_wallis(&[vec![1.0, 2.0], vec![]]).unwrap_err(), MetricError::TooFewGroups);
}

#[test]
fn tail_probabilities_match_integration() {
    for df in 1..=8u32 {
        for x in [0.5, 1.7, 4.0, 9.3, 15.0] {
            let lib = special::chi2_sf(x, f64::from(df));
            let num = oracle::chi2_tail_numeric(x, df);
            assert!((lib - num).abs() < 1e-6, "chi2 df={df} x={x}: {lib} vs {num}");
        }
    }
    for df in [1u32, 2, 3, 5, 10, 30] {
        for t in [-3.0, -0.7, 0.4, 1.96, 4.5] {
            let lib = special::t_cdf(t, f64::from(df));
            let num = oracle::t_cdf_numeric(t, df);
            assert!((lib - num).abs() < 1e-6, "t df={df} t={t}: {lib} vs {num}");
        }
    }
}

#[test]
fn t_quantile_inverts_cdf() {
    for df in [1.0, 3.0, 8.0, 16.0, 100.0] {
        for p in [0.6, 0.9, 0.975, 0.999] {
            let q = special::t_quantile(p, df);
            assert!((special::t_cdf(q, df) - p).abs() < 1e-10);
        }
    }
    assert!((special::t_quantile(0.975, 16.0) - 2.119905299221).abs() < 1e-9);
}

#[test]
fn effect_sizes_rebuild_from_intervals() {
    for row in &published::ENTROPY_EFFECTS {
        let d = d_from_reported_ci(row.mean, row.ci, row.n).unwrap();
        assert!((d - row.d).abs() <= 0.05, "{:?}: {d:.3} vs {}", row.topic, row.d);
    }
}

#[test]
fn paired_d_round_trips_through_its_interval() {
    let diffs = [0.3, 0.1, 0.5, 0.2, 0.45, -0.05, 0.6, 0.25];
    let e = paired_cohens_d(&diffs).unwrap();
    let rebuilt = d_from_reported_ci(e.mean_diff, e.ci95, e.n).unwrap();
    assert!((rebuilt - e.d).abs() < 1e-9);
    assert_eq!(paired_cohens_d(&[0.2, 0.2, 0.2]).unwrap_err(), MetricError::ZeroVariance);
}

#[test]
fn mid_ranks_average_ties() {
    assert_eq!(mid_ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
}

#[test]
fn global_percentages_match_table() {
    let wiki: [u64; 8] = std::array::from_fn(|i| {
        published::GLOBAL_TABLE.iter().find(|r| r.0 == EpistemicCategory::ALL[i]).unwrap().1
    });
    let grok: [u64; 8] = std::array::from_fn(|i| {
        published::GLOBAL_TABLE.iter().find(|r| r.0 == EpistemicCategory::ALL[i]).unwrap().3
    });
    let w = GlobalProfile::from_counts(Platform::Wikipedia, wiki).unwrap();
    let g = GlobalProfile::from_counts(Platform::Grokipedia, grok).unwrap();
    assert_eq!((w.total, g.total), (35525, 23092));
    for (cat, _, wp, _, gp) in published::GLOBAL_TABLE {
        assert_eq!(format!("{:.2}", w.percent_of(cat)), format!("{wp:.2}"), "{cat:?}");
        assert_eq!(format!("{:.2}", g.percent_of(cat)), format!("{gp:.2}"), "{cat:?}");
    }
}

#[test]
fn global_profile_sums_counts_not_proportions() {
    use EpistemicCategory::*;
    let a = EpistemicProfile::from_labels("a", Platform::Wikipedia, &[News; 9]).unwrap();
    let b = EpistemicProfile::from_labels("b", Platform::Wikipedia, &[Academic]).unwrap();
    let g = global_profile(Platform::Wikipedia, [&a, &b]).unwrap();
    assert!((g.percent_of(News) - 90.0).abs() < 1e-12);
    assert!(global_profile(Platform::Grokipedia, [&a, &b]).is_err());
}

#[test]
fn zero_counts_are_rejected() {
    assert!(SimplexVector::from_counts(&[0.0; 8]).is_err());
    assert!(SimplexVector::new(vec![0.5, 0.6]).is_err());
    assert_eq!(cosine_similarity(&[0.0, 0.0], &[1.0, 0.0]).unwrap_err(), MetricError::ZeroVector);
}

fn simplex() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..10.0, 8).prop_filter_map("nonzero", |v| {
        let s: f64 = v.iter().sum();
        (s > 1e-6).then(|| v.iter().map(|x| x / s).collect())
    })
}

proptest! {
    #[test]
    fn jsd_bounded_and_symmetric(p in simplex(), q in simplex()) {
        let pq = jensen_shannon_divergence(&sv(&p), &sv(&q)).unwrap();
        let qp = jensen_shannon_divergence(&sv(&q), &sv(&p)).unwrap();
        prop_assert!((0.0..=1.0).contains(&pq));
        prop_assert!((pq - qp).abs() < 1e-12);
        prop_assert!(jensen_shannon_divergence(&sv(&p), &sv(&p)).unwrap() < 1e-12);
    }

    #[test]
    fn entropy_within_log_k(p in simplex()) {
        let h = shannon_entropy(&sv(&p));
        prop_assert!(h >= 0.0);
        prop_assert!(h <= 3.0 + 1e-12);
    }

    #[test]
    fn cosine_of_nonnegative_vectors_in_unit_interval(p in simplex(), q in simplex()) {
        let c = cosine_similarity(&p, &q).unwrap();
        prop_assert!((0.0..=1.0).contains(&c));
        prop_assert!((cosine_similarity(&p, &p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kruskal_p_in_unit_interval(a in prop::collection::vec(0.0f64..5.0, 2..12), b in prop::collection::vec(0.0f64..5.0, 2..12)) {
        if let Ok(r) = kruskal_wallis(&[a, b]) {
            prop_assert!(r.h >= 0.0);
            prop_assert!((0.0..=1.0).contains(&r.p_value));
        }
    }
}
