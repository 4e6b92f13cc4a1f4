use dlab_core::carleson::{
    balayage, cm_embedding_check, cm_norm_radial, dirichlet_projection, embedding_norm, majorant,
    projection_value, segment_sufficient_constant, x_norm_monomial, x_sufficient_tests,
    ComplexAtomicMeasure, DerivativeMonomialMeasure, MomentSource, RadialAtom, RadialMeasure,
};
use dlab_core::weak_product::Factorization;
use dlab_core::{AnalyticPoly, DiskPoint};
use num_complex::Complex64;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn radial_norm_examples() {
    let unit = RadialMeasure::new(vec![RadialAtom::new(0.0, 1.0).unwrap()]);
    let n = cm_norm_radial(&unit);
    assert_eq!((n.norm, n.argmax_k), (1.0, 0));
    let mu = RadialMeasure::from_pairs(&[(0.3, 0.5), (0.8, 2.0)]).unwrap();
    let scaled = mu.scaled(9.0).unwrap();
    assert!((cm_norm_radial(&scaled).norm - 3.0 * cm_norm_radial(&mu).norm).abs() < 1e-14);
    // brute force over the moments
    let oracle = (0..500)
        .map(|k| (0.5 * 0.09f64.powi(k) + 2.0 * 0.64f64.powi(k)) / (k as f64 + 1.0))
        .fold(0.0, f64::max);
    assert!((cm_norm_radial(&mu).norm_sq - oracle).abs() < 1e-15);
}

#[test]
fn derivative_measure_of_a_monomial() {
    for n in [1usize, 4, 9, 1000] {
        let m = DerivativeMonomialMeasure { n, c: c(1.0, 0.0) };
        for k in [0usize, 1, 10] {
            assert!((m.moment(k) - (n * n) as f64 / (k + n) as f64).abs() < 1e-12);
        }
        let x = x_norm_monomial(n, c(1.0, 0.0));
        assert_eq!(x.norm_sq, n as f64);
        assert_eq!(x.argmax_k, 0);
    }
    assert_eq!(x_norm_monomial(4, c(1.0, 0.0)).norm, 2.0);
    assert_eq!(x_norm_monomial(3, c(0.0, 0.0)).norm, 0.0);
}

#[test]
fn embedding_never_beats_the_norm() {
    let mu = RadialMeasure::log_tail(0.5, 40, 30.0).unwrap();
    let check = cm_embedding_check(&mu, 1000, 7);
    assert!(check.worst_ratio <= check.norm + 1e-12);
    assert!((check.extremal_ratio - check.norm).abs() < 1e-12);
    let empty = RadialMeasure::new(Vec::new());
    assert_eq!(
        embedding_norm(&AnalyticPoly::from_real(&[1.0, 2.0]), &empty),
        0.0
    );
}

#[test]
fn segment_constants() {
    let single = RadialMeasure::from_pairs(&[(0.75, 0.3)]).unwrap();
    assert!((segment_sufficient_constant(&single).unwrap() - 0.3 * 4f64.ln()).abs() < 1e-15);
    assert_eq!(
        segment_sufficient_constant(&RadialMeasure::new(Vec::new())).unwrap(),
        0.0
    );
    // tail mass of the log-tail measure equals 1 / u at every atom
    let tail = RadialMeasure::log_tail(0.5, 64, 60.0).unwrap();
    assert!((segment_sufficient_constant(&tail).unwrap() - 1.0).abs() < 1e-12);
    assert!((tail.total_mass() - 1.0 / 2f64.ln()).abs() < 1e-12);
    assert!(
        segment_sufficient_constant(&RadialMeasure::from_pairs(&[(0.2, 1.0)]).unwrap()).is_err()
    );
}

#[test]
fn sufficient_coefficient_tests() {
    assert_eq!(x_sufficient_tests(&AnalyticPoly::zero()).cond_2a, 0.0);
    let b = AnalyticPoly::new(
        (0..=30)
            .map(|n| c(1.0 / ((n as f64 + 1.0) * (1.0 + (n as f64).ln_1p())), 0.0))
            .collect(),
    );
    assert!((x_sufficient_tests(&b).cond_2a - 1.0).abs() < 1e-14);
    let z7 = AnalyticPoly::monomial(7, c(1.0, 0.0));
    assert!((x_sufficient_tests(&z7).cond_2b - 7.0 * 8f64.ln()).abs() < 1e-13);
}

#[test]
fn projection_of_atoms() {
    let origin = ComplexAtomicMeasure::new(vec![(DiskPoint::origin(), c(1.0, 0.0))]);
    assert!(dirichlet_projection(&origin, 10).unwrap().is_zero());
    let a = DiskPoint::from_complex(c(0.3, 0.4)).unwrap();
    let single = ComplexAtomicMeasure::new(vec![(a, c(1.0, 0.0))]);
    let p = dirichlet_projection(&single, 20).unwrap();
    for n in 1..=20 {
        let expected = a.z().conj().powu(n as u32) / n as f64;
        assert!((p.coeff(n) - expected).norm() < 1e-15);
    }
    // closed form against the truncated series
    let w = DiskPoint::from_complex(c(-0.2, 0.1)).unwrap();
    assert!((projection_value(&single, &w) - p.eval_raw(w.z())).norm() < 1e-12);
}

#[test]
fn balayage_examples() {
    let origin = ComplexAtomicMeasure::new(vec![(DiskPoint::origin(), c(1.0, 0.0))]);
    for w in [c(0.0, 0.0), c(0.5, -0.3), c(-0.9, 0.1)] {
        let w = DiskPoint::from_complex(w).unwrap();
        assert!((balayage(&origin, &w).unwrap() - PI).abs() < 1e-15);
    }
    let p = DiskPoint::from_complex(c(0.6, 0.6)).unwrap();
    let w = DiskPoint::from_complex(c(0.2, -0.7)).unwrap();
    let mu = ComplexAtomicMeasure::new(vec![(p, c(0.7, 0.0))]);
    let scaled = ComplexAtomicMeasure::new(vec![(p, c(2.1, 0.0))]);
    assert!((balayage(&scaled, &w).unwrap() - 3.0 * balayage(&mu, &w).unwrap()).abs() < 1e-14);
    let lhs = balayage(&mu, &w).unwrap() + projection_value(&mu, &w).im;
    assert!((lhs - PI * 0.7).abs() < 1e-14);
    let complex = ComplexAtomicMeasure::new(vec![(p, c(0.0, 1.0))]);
    assert!(balayage(&complex, &w).is_err());
}

#[test]
fn majorant_examples() {
    let h = AnalyticPoly::new(vec![c(1.0, -1.0), c(0.0, 2.0)]);
    let single = majorant(&Factorization::new(
        h.clone(),
        vec![(AnalyticPoly::one(), h.clone())],
    ))
    .unwrap();
    assert_eq!(single.b, h.modulus_coeffs());
    let f = AnalyticPoly::from_real(&[1.0, 1.0]);
    let g = AnalyticPoly::from_real(&[1.0, -1.0]);
    let m = majorant(&Factorization::new(f.multiply(&g), vec![(f.clone(), g)])).unwrap();
    assert_eq!(m.b, f.multiply(&f));
    assert!((m.bound - 3.0).abs() < 1e-15);
}
