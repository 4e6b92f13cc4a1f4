use dlab_core::quadrature::QuadratureSpec;
use dlab_core::special::{
    bump_derivative_pairing, h_function, power_growth_check, sqrt_kernel_norm, BumpSpec,
};
use dlab_core::DiskPoint;

/// Composite Simpson rule on `[a, b]` with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n)
        .map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    (f(a) + f(b) + inner) * h / 3.0
}

#[test]
fn h_function_against_simpson() {
    let q = QuadratureSpec::default();
    for zeta in [0.3, 0.5, 0.9] {
        let h = h_function(zeta, &q).unwrap();
        // x = 1 - e^{-u}, dx / ((1 - x) log^2(1 / (1 - x))) = du / u^2
        let body = simpson(
            |u| -(1.0 - zeta * (1.0 - (-u).exp())).ln() / (u * u),
            2f64.ln(),
            200.0,
            400_000,
        );
        let tail = -(1.0 - zeta).ln() / 200.0;
        assert!(
            (h.value - body - tail).abs() < 1e-9,
            "zeta {zeta}: {} vs {}",
            h.value,
            body + tail
        );
    }
    assert_eq!(h_function(0.0, &q).unwrap().value, 0.0);
    assert!(h_function(1.0, &q).is_err());
}

#[test]
fn h_function_deviation_stays_bounded() {
    let q = QuadratureSpec::default();
    let devs: Vec<f64> = [0.9, 0.99, 1.0 - 1e-4, 1.0 - 1e-8, 1.0 - 1e-12]
        .iter()
        .map(|&z| h_function(z, &q).unwrap().deviation)
        .collect();
    // the deviation tends to 1 - log log 2
    let limit = 1.0 - 2f64.ln().ln();
    assert!(devs.iter().all(|d| d.abs() < 2.0), "{devs:?}");
    assert!((devs[4] - limit).abs() < 0.05, "{devs:?}");
}

#[test]
fn pairing_ratio_sweep() {
    for j in 0..=16 {
        let delta = 10f64.powf(-8.0 + j as f64 * 7.7 / 16.0).min(0.5);
        let p = bump_derivative_pairing(&BumpSpec::at_delta(delta, 1.0).unwrap());
        assert!(
            p.ratio >= 0.7 && p.ratio <= 1.0,
            "delta {delta}: {}",
            p.ratio
        );
        // at theta = 1 the ratio is |zeta| = sqrt(1 - delta)
        assert!(
            (p.ratio - (1.0 - delta).sqrt()).abs() < 1e-12,
            "delta {delta}: {} vs {}",
            p.ratio,
            (1.0 - delta).sqrt()
        );
        if let Some(s) = p.series_value {
            assert!((s - p.value).abs() < 1e-8 * p.value);
        }
    }
}

#[test]
fn sqrt_kernel_examples() {
    let o = sqrt_kernel_norm(&DiskPoint::origin(), None).unwrap();
    assert_eq!(o.value_sq, 1.0);
    assert!((o.reference - 2f64.ln()).abs() < 1e-15);
    for delta in [0.5, 1e-2, 1e-4, 1e-6] {
        let s = sqrt_kernel_norm(&DiskPoint::from_polar(0.3, delta).unwrap(), None).unwrap();
        let r = s.value_sq / s.reference;
        assert!(r > 0.4 && r < 2.0, "delta {delta}: {r}");
    }
}

#[test]
fn power_growth_against_exact_arithmetic() {
    assert!(power_growth_check(0, 3).is_err());
    for n in 1..=16u64 {
        let rows = power_growth_check(n, 16).unwrap();
        assert_eq!(rows.len(), 17);
        for r in rows {
            let k = r.k as u128;
            let n = n as u128;
            let lhs = n * (k + 1);
            let rhs = (k + 1) * (k + 1) * n * if k == 0 { 1 } else { n * k };
            assert_eq!((r.lhs, r.rhs), (lhs, rhs));
            assert!(r.holds && lhs <= rhs);
        }
    }
}
