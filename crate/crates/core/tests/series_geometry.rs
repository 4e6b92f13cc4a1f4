use dlab_core::geometry::{hyperbolic, pseudo_hyperbolic};
use dlab_core::series::multiplier_norm_truncated;
use dlab_core::{AnalyticPoly, DiskPoint};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn norms_of_small_functions() {
    let one_plus_z = AnalyticPoly::from_real(&[1.0, 1.0]);
    assert!((one_plus_z.dirichlet_norm() - 3f64.sqrt()).abs() < 1e-15);
    for n in [0usize, 1, 7, 100] {
        let m = AnalyticPoly::monomial(n, c(1.0, 0.0));
        assert!((m.dirichlet_norm() - ((n + 1) as f64).sqrt()).abs() < 1e-13);
        assert_eq!(m.hardy_norm(), 1.0);
        assert!((m.tilde_norm() - (n as f64).sqrt()).abs() < 1e-13);
    }
    assert_eq!(AnalyticPoly::from_real(&[3.0, 4.0]).hardy_norm(), 5.0);
    assert_eq!(AnalyticPoly::constant(c(2.0, 1.0)).tilde_norm(), 0.0);
    let one_minus_z = AnalyticPoly::from_real(&[1.0, -1.0]);
    assert_eq!(one_plus_z.dirichlet_pair(&one_minus_z), c(-1.0, 0.0));
    let z2 = AnalyticPoly::monomial(2, c(1.0, 0.0));
    assert_eq!(z2.dirichlet_pair(&z2), c(3.0, 0.0));
}

#[test]
fn arithmetic_and_evaluation() {
    let z = AnalyticPoly::monomial(1, c(1.0, 0.0));
    assert_eq!(z.multiply(&z), AnalyticPoly::monomial(2, c(1.0, 0.0)));
    let one_plus_z = AnalyticPoly::from_real(&[1.0, 1.0]);
    assert_eq!(one_plus_z.evaluate(c(0.5, 0.0)).unwrap(), c(1.5, 0.0));
    assert!(one_plus_z.evaluate(c(1.0, 0.0)).is_err());
    let padded = AnalyticPoly::from_real(&[1.0, 2.0, 0.0, 0.0]);
    assert_eq!(padded.degree(), 1);
}

#[test]
fn json_round_trip() {
    let f = AnalyticPoly::new(vec![c(1.0, -2.0), c(0.25, 0.5)]);
    let text = f.to_json_string();
    assert_eq!(AnalyticPoly::from_json_str(&text).unwrap(), f);
    assert!(AnalyticPoly::from_json_str("[[1.0]]").is_err());
}

#[test]
fn multiplier_norms() {
    for n in [0usize, 4, 16] {
        assert!((multiplier_norm_truncated(&AnalyticPoly::one(), n).unwrap() - 1.0).abs() < 1e-12);
    }
    let three = AnalyticPoly::constant(c(0.0, -3.0));
    assert!((multiplier_norm_truncated(&three, 5).unwrap() - 3.0).abs() < 1e-12);
    // multiplication by z maps z^n / sqrt(n+1) to z^{n+1} / sqrt(n+1): a weighted shift
    let z = AnalyticPoly::monomial(1, c(1.0, 0.0));
    let oracle = (0..=8)
        .map(|n| ((n + 2) as f64 / (n + 1) as f64).sqrt())
        .fold(0.0, f64::max);
    assert!((multiplier_norm_truncated(&z, 8).unwrap() - oracle).abs() < 1e-10);
    assert!(multiplier_norm_truncated(&AnalyticPoly::from_real(&[0.0, 0.0, 1.0]), 1).is_err());
}

#[test]
fn metric_examples() {
    let p = DiskPoint::real(0.5).unwrap();
    let q = DiskPoint::real(0.9).unwrap();
    assert!((pseudo_hyperbolic(&p, &q) - 0.4 / 0.55).abs() < 1e-15);
    assert_eq!(pseudo_hyperbolic(&p, &p), 0.0);
    assert_eq!(hyperbolic(&q, &q), 0.0);
    let o = DiskPoint::origin();
    assert!((pseudo_hyperbolic(&o, &q) - 0.9).abs() < 1e-15);
    assert!((hyperbolic(&o, &p) - 3f64.ln()).abs() < 1e-14);
}

#[test]
fn distance_from_origin_tracks_log_scale() {
    // beta(0, zeta) - L(zeta) tends to log 4 - 1
    let o = DiskPoint::origin();
    for k in 1..=60 {
        let delta = 10f64.powf(-(k as f64) * 5.0);
        let p = DiskPoint::from_polar(1.0, delta).unwrap();
        assert!((p.big_l() - (1.0 - delta.ln())).abs() <= 1e-15 * p.big_l());
        let diff = hyperbolic(&o, &p) - p.big_l();
        assert!(diff.abs() < 1.0, "{diff}");
        if delta < 1e-12 {
            assert!((diff - (4f64.ln() - 1.0)).abs() < 1e-9);
        }
    }
}

#[test]
fn tiny_deltas_keep_their_scale() {
    let p = DiskPoint::from_polar(0.3, 1e-300).unwrap();
    assert_eq!(p.delta(), 1e-300);
    assert!(p.radius() < 1.0 || p.gap() > 0.0);
    assert!((p.big_l() - (1.0 + 300.0 * 10f64.ln())).abs() < 1e-12);
}
