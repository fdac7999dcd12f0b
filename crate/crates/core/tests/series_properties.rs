use krivine::series::{
    CoefficientTable, InverseTable, KrivineScheme, Mode, SchemeConfig, TruncationConfig,
};
use proptest::prelude::*;

fn table(k: u32) -> CoefficientTable {
    CoefficientTable::compute(k, &TruncationConfig::default()).unwrap()
}

/// Coefficients of f(g(w)) up to w^{2 deg + 1}, odd powers only.
fn compose(a: &[f64], b: &[f64]) -> Vec<f64> {
    let top = 2 * (b.len() - 1) + 1;
    let mut g = vec![0.0; top + 1];
    for (n, bn) in b.iter().enumerate() {
        g[2 * n + 1] = *bn;
    }
    let mul = |p: &[f64], q: &[f64]| {
        let mut out = vec![0.0; top + 1];
        for (i, pi) in p.iter().enumerate().filter(|(_, v)| **v != 0.0) {
            for (j, qj) in q.iter().enumerate().take(top + 1 - i) {
                out[i + j] += pi * qj;
            }
        }
        out
    };
    let g2 = mul(&g, &g);
    let mut power = g.clone();
    let mut total = vec![0.0; top + 1];
    for am in a.iter().take(b.len()) {
        for (t, p) in total.iter_mut().zip(&power) {
            *t += am * p;
        }
        power = mul(&power, &g2);
    }
    total
}

#[test]
fn ratio_identity_and_monotonicity() {
    for k in [1, 2, 3, 7, 16, 100, 1000] {
        let t = table(k);
        let a = t.coefficients();
        for n in 0..a.len() - 1 {
            let lhs = a[n + 1] * ((2 * n + 2) as f64) * f64::from(k + 2 * n as u32 + 2);
            let rhs = a[n] * ((2 * n + 1) as f64).powi(2);
            assert!((lhs - rhs).abs() <= 1e-13 * rhs, "k={k} n={n}");
            assert!(a[n + 1] < a[n] && a[n + 1] > 0.0);
        }
    }
}

#[test]
fn normalization_brackets_one() {
    for k in [1, 2, 5, 12, 40, 300] {
        let t = table(k);
        let sum = t.partial_sum_from(0);
        assert!(sum <= 1.0 + 1e-12, "k={k}");
        assert!(sum + t.tail_bound() >= 1.0 - 1e-15, "k={k}");
    }
}

#[test]
fn composition_is_the_identity() {
    for k in [1, 2, 4, 8, 16] {
        let t = table(k);
        let inv = InverseTable::invert(&t, 64).unwrap();
        let composed = compose(t.coefficients(), inv.coefficients());
        for (e, c) in composed.iter().enumerate() {
            let expected = if e == 1 { 1.0 } else { 0.0 };
            assert!((c - expected).abs() <= 1e-10, "k={k} order {e}: {c}");
        }
    }
}

#[test]
fn inverse_matches_high_precision_reference() {
    // 80-digit series reversion
    let cases: [(u32, usize, f64); 6] = [
        (2, 10, -3.362_646_558_590_852e-4),
        (2, 20, -6.854_203_533_509_94e-5),
        (2, 26, -3.756_945_173_405_241e-5),
        (5, 20, -6.414_663_075_506_049e-6),
        (5, 40, -6.769_071_297_945_701e-7),
        (5, 58, -1.969_618_831_342_701e-7),
    ];
    for (k, n, expected) in cases {
        let inv = InverseTable::invert(&table(k), 512).unwrap();
        let got = inv.coefficients()[n];
        assert!(
            (got - expected).abs() <= 1e-7 * expected.abs(),
            "k={k} n={n}: {got}"
        );
    }
}

#[test]
fn scheme_invariants() {
    for (k, mode) in [
        (1, Mode::Sharp),
        (3, Mode::Sharp),
        (20, Mode::Sharp),
        (20, Mode::Paper),
    ] {
        let s = KrivineScheme::build(k, &SchemeConfig::new(mode)).unwrap();
        assert!(s.residual().abs() <= 1e-10);
        assert!(s.c() > 0.0 && s.c() < 1.0);
        assert!(s.c() < s.inverse().radius_estimate());
        assert_eq!(s.overhead(), 1.0 / s.c());
    }
}

#[test]
fn sharp_overhead_is_non_increasing() {
    let overheads: Vec<f64> = (1..=64)
        .map(|k| {
            KrivineScheme::build(k, &SchemeConfig::new(Mode::Sharp))
                .unwrap()
                .overhead()
        })
        .collect();
    for (k, w) in overheads.windows(2).enumerate() {
        assert!(w[1] <= w[0], "k={} to {}", k + 1, k + 2);
    }
}

proptest! {
    #[test]
    fn eval_is_exactly_odd(k in 1u32..200, t in -1.0f64..=1.0) {
        let table = CoefficientTable::with_terms(k, 64).unwrap();
        prop_assert_eq!(table.eval(-t).unwrap(), -table.eval(t).unwrap());
    }

    #[test]
    fn eval_is_within_the_unit_interval(k in 1u32..200, t in 0.0f64..=1.0) {
        let table = CoefficientTable::with_terms(k, 64).unwrap();
        let v = table.eval(t).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&v));
        prop_assert!(v >= table.coefficients()[0] * t * (1.0 - 1e-15));
    }

    #[test]
    fn h_is_increasing(k in 2u32..64, c1 in 0.0f64..0.9, gap in 1e-6f64..0.09) {
        let table = CoefficientTable::with_terms(k, 128).unwrap();
        let inv = InverseTable::invert(&table, 128).unwrap();
        prop_assert!(inv.h(c1 + gap) > inv.h(c1));
    }
}
