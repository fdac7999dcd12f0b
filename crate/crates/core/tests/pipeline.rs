mod common;

use std::f64::consts::PI;

use common::{random_instance, random_solution, small};
use krivine::embedding::{preprocess, VectorSolution};
use krivine::problems::{brute_force_opt, ProblemInstance};
use krivine::rng::GaussianStream;
use krivine::rounding::{rounding_expectation, PartitionPair, RoundingConfig};
use krivine::series::{KrivineScheme, Mode, SchemeConfig};
use krivine::validator::{mc_estimate_fk, verify_scheme_identity};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn sharp1() -> KrivineScheme {
    KrivineScheme::build(1, &SchemeConfig::new(Mode::Sharp)).unwrap()
}

#[test]
fn sign_rounding_without_preprocessing_is_the_arcsine_law() {
    let scheme = sharp1();
    let instance = ProblemInstance::from_rows(&[vec![1.0]]).unwrap();
    for step in 0..9 {
        let theta = PI * (step as f64 + 0.5) / 9.0;
        let x = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
        let y = DMatrix::from_row_slice(1, 2, &[theta.cos(), theta.sin()]);
        let raw = VectorSolution::new(x, y).unwrap();
        let cfg = RoundingConfig {
            trials: 100_000,
            seed: 300 + step,
        };
        let report =
            rounding_expectation(&instance, &raw, &raw, &scheme, &PartitionPair::sign(), &cfg)
                .unwrap();
        let expected = 2.0 / PI * theta.cos().asin();
        let (mean, err) = (report.per_pair_mean[0][0], report.per_pair_stderr[0][0]);
        assert!(
            (mean - expected).abs() <= 4.0 * err,
            "theta={theta}: {mean} vs {expected}"
        );
    }
}

#[test]
fn monte_carlo_f1_is_the_arcsine() {
    for (i, t) in [-0.8, -0.3, 0.2, 0.6, 0.95].into_iter().enumerate() {
        let est = mc_estimate_fk(1, t, 100_000, 400 + i as u64).unwrap();
        let expected = 2.0 / PI * t.asin();
        assert!((est.value - expected).abs() <= 4.0 * est.stderr, "t={t}");
    }
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let mut stream = GaussianStream::new(500, 0);
    let instance = random_instance(3, 4, &mut stream);
    let original = random_solution(3, 4, 7, &mut stream);
    let scheme = sharp1();
    let pre = preprocess(&original, &scheme).unwrap();
    let cfg = RoundingConfig {
        trials: 30_000,
        seed: 9,
    };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                rounding_expectation(
                    &instance,
                    &original,
                    &pre,
                    &scheme,
                    &PartitionPair::sign(),
                    &cfg,
                )
                .unwrap()
            })
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(8));
    let fk = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| mc_estimate_fk(5, 0.4, 50_000, 3).unwrap())
    };
    assert_eq!(fk(1), fk(6));
}

#[test]
fn grid_partitions_are_report_only() {
    let mut stream = GaussianStream::new(600, 0);
    let instance = random_instance(2, 2, &mut stream);
    let original = random_solution(2, 2, 4, &mut stream);
    let scheme = KrivineScheme::build(2, &SchemeConfig::new(Mode::Sharp)).unwrap();
    let grid = PartitionPair::from_json_str(
        r#"{"k": 2, "cell_size": 1.0, "origin": [0.0, -100.0],
            "cells": [], "outside_label": -1}"#,
    )
    .unwrap();
    let cfg = RoundingConfig {
        trials: 5000,
        seed: 1,
    };
    let check = verify_scheme_identity(&instance, &original, &scheme, &grid, &cfg).unwrap();
    assert_eq!(check.pass, None);
    // every point gets -1 on both sides, so every product is +1
    assert!(check
        .report
        .per_pair_mean
        .iter()
        .flatten()
        .all(|&m| m == 1.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn brute_force_is_covariant_under_sign_flips(seed in 0u64..10_000, flip_row in any::<bool>()) {
        let mut stream = GaussianStream::new(seed, 0);
        let (m, n) = (small(6, &mut stream), small(6, &mut stream));
        let instance = random_instance(m, n, &mut stream);
        let best = brute_force_opt(&instance).unwrap();
        let mut a = instance.matrix().clone();
        let (mut eps, mut delta) = (best.eps.clone(), best.delta.clone());
        if flip_row {
            a.row_mut(0).neg_mut();
            eps[0] = -eps[0];
        } else {
            a.column_mut(n - 1).neg_mut();
            delta[n - 1] = -delta[n - 1];
        }
        let flipped = ProblemInstance::new(a).unwrap();
        let flipped_best = brute_force_opt(&flipped).unwrap();
        prop_assert!((flipped_best.value - best.value).abs() <= 1e-12);
        prop_assert!((flipped.objective(&eps, &delta).unwrap() - best.value).abs() <= 1e-12);
    }
}
