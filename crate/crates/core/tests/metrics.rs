mod common;

use common::{naive_pearson, naive_reversals};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sim2real::metrics::{
    discordant_pairs, pearson, srcc_report, MethodScore, Metric, MetricsError, PairedResults, TableOneDataset,
};

/// The published table, row by row: reality, CODA chall-sim, CODA test-sim,
/// Gibson chall-sim, Gibson test-sim.
const PUBLISHED: [(&str, f64, &str, [f64; 5]); 9] = [
    ("Depth", 0.5, "off", [0.59, 0.64, 0.58, 0.68, 0.59]),
    ("Depth", 1.0, "off", [0.74, 0.81, 0.70, 0.78, 0.53]),
    ("Pred. Depth", 0.5, "off", [0.53, 0.37, 0.37, 0.54, 0.40]),
    ("Pred. Depth", 1.0, "off", [0.66, 0.75, 0.58, 0.64, 0.43]),
    ("RGB", 0.5, "off", [0.33, 0.50, 0.33, 0.56, 0.43]),
    ("RGB", 1.0, "off", [0.44, 0.69, 0.42, 0.58, 0.36]),
    ("Depth", 0.0, "on", [0.64, 0.70, 0.63, 0.66, 0.35]),
    ("Pred. Depth", 0.0, "on", [0.58, 0.80, 0.44, 0.56, 0.32]),
    ("RGB", 0.0, "on", [0.61, 0.80, 0.64, 0.62, 0.36]),
];

fn column(k: usize) -> Vec<f64> {
    PUBLISHED.iter().map(|r| r.3[k]).collect()
}

#[test]
fn embedded_table_matches_the_published_values() {
    let data = TableOneDataset::load().unwrap();
    assert_eq!(data.rows.len(), 9);
    for (row, (sensor, noise, sliding, v)) in data.rows.iter().zip(PUBLISHED) {
        assert_eq!(row.sensor, sensor);
        assert_eq!(row.train_noise, noise);
        assert_eq!(row.train_sliding, sliding);
        assert_eq!(
            [
                row.reality_spl,
                row.coda_chall_sim_spl,
                row.coda_test_sim_spl,
                row.gibson_chall_sim_spl,
                row.gibson_test_sim_spl
            ],
            v
        );
    }
}

#[test]
fn published_correlations() {
    let (real, chall, test) = (column(0), column(1), column(2));
    let c = pearson(&real, &chall).unwrap();
    let t = pearson(&real, &test).unwrap();
    assert!((c - 0.60).abs() <= 0.02, "{c}");
    assert!((t - 0.875).abs() <= 0.02, "{t}");
    assert!((c - naive_pearson(&real, &chall)).abs() < 1e-12);

    let a = TableOneDataset::load().unwrap().analyze().unwrap();
    assert_eq!(a.chall_srcc, c);
    assert_eq!(a.test_srcc, t);
}

#[test]
fn published_reversal_counts() {
    let (real, chall, test) = (column(0), column(1), column(2));
    let d = discordant_pairs(&real, &chall).unwrap();
    assert_eq!((d.count, d.total), (9, 36));
    let d = discordant_pairs(&real, &test).unwrap();
    assert_eq!((d.count, d.total), (5, 36));
    assert!((d.fraction() - 5.0 / 36.0).abs() < 1e-15);

    // the chall-sim count splits into strict discordances plus one sim-only tie
    let mut strict = 0;
    let mut one_tie = 0;
    for i in 0..9 {
        for j in (i + 1)..9 {
            let (dr, dc) = (real[i] - real[j], chall[i] - chall[j]);
            if dr * dc < 0.0 {
                strict += 1;
            } else if (dr == 0.0) != (dc == 0.0) {
                one_tie += 1;
            }
        }
    }
    assert_eq!((strict, one_tie), (8, 1));
}

#[test]
fn trivial_examples() {
    let xs = [0.1, 0.5, 0.3, 0.9, 0.7];
    let neg: Vec<f64> = xs.iter().map(|x| 2.0 - x).collect();
    assert!((pearson(&xs, &xs).unwrap() - 1.0).abs() < 1e-12);
    assert!((pearson(&xs, &neg).unwrap() + 1.0).abs() < 1e-12);
    assert_eq!(discordant_pairs(&xs, &xs).unwrap().count, 0);
    assert_eq!(discordant_pairs(&xs, &neg).unwrap().count, 10);
}

#[test]
fn degenerate_inputs_are_rejected() {
    assert!(matches!(
        pearson(&[0.1, 0.2], &[0.3, 0.4]),
        Err(MetricsError::TooFew { .. })
    ));
    assert!(matches!(
        pearson(&[0.5; 4], &[0.1, 0.2, 0.3, 0.4]),
        Err(MetricsError::Constant(_))
    ));
    assert!(matches!(
        pearson(&[0.1, 0.2, 0.3], &[0.1, 0.2]),
        Err(MetricsError::LengthMismatch(3, 2))
    ));
    assert!(matches!(
        pearson(&[0.1, f64::NAN, 0.3], &[0.1, 0.2, 0.3]),
        Err(MetricsError::NonFinite)
    ));
    assert!(discordant_pairs(&[0.1], &[0.2]).is_err());
}

#[test]
fn pearson_matches_the_two_pass_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..1000 {
        let n = rng.random_range(3..40);
        let xs: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let ys: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let r = pearson(&xs, &ys).unwrap();
        assert!((r - naive_pearson(&xs, &ys)).abs() < 1e-12);
        assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&r));
        assert_eq!(r, pearson(&ys, &xs).unwrap());
    }
}

proptest! {
    #[test]
    fn pearson_is_affine_invariant(
        xs in prop::collection::vec(0.0f64..1.0, 3..30),
        seed in any::<u64>(),
        scale in 0.01f64..100.0,
        shift in -10.0f64..10.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ys: Vec<f64> = xs.iter().map(|_| rng.random_range(0.0..1.0)).collect();
        prop_assume!(pearson(&xs, &ys).is_ok());
        let moved: Vec<f64> = xs.iter().map(|x| scale * x + shift).collect();
        let a = pearson(&xs, &ys).unwrap();
        let b = pearson(&moved, &ys).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn reversals_match_the_pairwise_oracle(
        pairs in prop::collection::vec((0u8..6, 0u8..6), 2..20),
    ) {
        // coarse values so ties are common
        let xs: Vec<f64> = pairs.iter().map(|p| f64::from(p.0) / 5.0).collect();
        let ys: Vec<f64> = pairs.iter().map(|p| f64::from(p.1) / 5.0).collect();
        let d = discordant_pairs(&xs, &ys).unwrap();
        prop_assert_eq!(d.count, naive_reversals(&xs, &ys));
        prop_assert_eq!(d.total, xs.len() * (xs.len() - 1) / 2);
        prop_assert_eq!(d.count, discordant_pairs(&ys, &xs).unwrap().count);
    }
}

fn scores(values: &[(f64, f64)]) -> Vec<MethodScore> {
    values
        .iter()
        .enumerate()
        .map(|(k, &(sim, real))| MethodScore {
            method: format!("m{k}"),
            sim,
            real,
            sim_se: 0.01,
            real_se: 0.02,
        })
        .collect()
}

#[test]
fn aligned_roster_reports_perfect_correlation() {
    let paired = PairedResults::new(Metric::Spl, scores(&[(0.1, 0.2), (0.4, 0.5), (0.7, 0.8), (0.9, 1.0)])).unwrap();
    let report = srcc_report(&paired).unwrap();
    assert!((report.srcc - 1.0).abs() < 1e-12);
    assert_eq!(report.discordant_pairs, 0);
    assert_eq!(report.total_pairs, 6);
    assert_eq!(report.standard_errors.len(), 4);
    assert_eq!(report.standard_errors[2].real_se, 0.02);
}

#[test]
fn paired_results_validate_their_entries() {
    let mut dup = scores(&[(0.1, 0.2), (0.4, 0.5), (0.7, 0.8)]);
    dup[2].method = "m0".into();
    assert!(matches!(
        PairedResults::new(Metric::Spl, dup),
        Err(MetricsError::DuplicateMethod(_))
    ));
    assert!(matches!(
        PairedResults::new(Metric::Spl, scores(&[(0.1, 1.2), (0.4, 0.5), (0.7, 0.8)])),
        Err(MetricsError::OutOfRange { .. })
    ));
    let constant = PairedResults::new(Metric::Spl, scores(&[(0.5, 0.2), (0.5, 0.5), (0.5, 0.8)])).unwrap();
    assert!(srcc_report(&constant).is_err());
}
