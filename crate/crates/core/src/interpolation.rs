//! Interpolation on finite sequences of points: separation, the associated
//! measure `sum L(z_j)^{-1} delta_{z_j}`, kernel Gram matrices and minimal-norm
//! interpolants in `D`, and the product construction for `D ⊙ D`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::carleson::{ComplexAtomicMeasure, RadialAtom, RadialMeasure};
use crate::error::{Error, Result};
use crate::geometry::{self, DiskPoint};
use crate::numeric::{log_ratio, ComplexSum};

/// Gram matrices with a larger condition estimate are refused.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct PointSequence {
    points: Vec<DiskPoint>,
}

impl PointSequence {
    pub fn new(points: Vec<DiskPoint>) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            for q in &points[..i] {
                if geometry::pseudo_hyperbolic(p, q) == 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "duplicate point (arg {}, delta {:e})",
                        p.arg(),
                        p.delta()
                    )));
                }
            }
        }
        Ok(PointSequence { points })
    }

    pub fn points(&self) -> &[DiskPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `1 / L(z_j)`
    pub fn weights(&self) -> Vec<f64> {
        self.points.iter().map(|p| 1.0 / p.big_l()).collect()
    }

    /// Points on the positive axis with the given `delta_j`.
    pub fn radial(deltas: &[f64]) -> Result<Self> {
        deltas
            .iter()
            .map(|&d| DiskPoint::from_polar(0.0, d))
            .collect::<Result<Vec<_>>>()
            .and_then(Self::new)
    }
}

/// `max_{i != j} beta(0, z_i) / beta(z_i, z_j)`.
pub fn separation_constant(z: &PointSequence) -> Result<f64> {
    if z.len() < 2 {
        return Err(Error::InvalidInput(
            "separation needs at least two points".into(),
        ));
    }
    let origin = DiskPoint::origin();
    let mut best: f64 = 0.0;
    for (i, p) in z.points.iter().enumerate() {
        let from_origin = geometry::hyperbolic(&origin, p);
        for (j, q) in z.points.iter().enumerate() {
            if i != j {
                best = best.max(from_origin / geometry::hyperbolic(p, q));
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceMeasure {
    pub atoms: ComplexAtomicMeasure,
    /// present when all points lie on one ray from the origin
    pub radial: Option<RadialMeasure>,
}

/// The measure `sum_j L(z_j)^{-1} delta_{z_j}`.
pub fn mu_z(z: &PointSequence) -> Result<SequenceMeasure> {
    let weights = z.weights();
    let atoms = ComplexAtomicMeasure::new(
        z.points
            .iter()
            .zip(&weights)
            .map(|(p, w)| (*p, Complex64::new(*w, 0.0)))
            .collect(),
    );
    let on_one_ray = z
        .points
        .iter()
        .filter(|p| p.radius() > 0.0)
        .map(|p| p.arg())
        .collect::<Vec<_>>()
        .windows(2)
        .all(|w| ((w[1] - w[0]) / (2.0 * std::f64::consts::PI)).fract().abs() < 1e-15);
    let radial = if on_one_ray {
        let radial_atoms = z
            .points
            .iter()
            .zip(&weights)
            .map(|(p, w)| RadialAtom::from_gap(p.gap(), *w))
            .collect::<Result<Vec<_>>>()?;
        Some(RadialMeasure::new(radial_atoms))
    } else {
        None
    };
    Ok(SequenceMeasure { atoms, radial })
}

/// `k_q(p) = sum_n (conj(q) p)^n / (n + 1)` in closed form.
pub fn kernel_value(q: &DiskPoint, p: &DiskPoint) -> Complex64 {
    let w = q.z().conj() * p.z();
    log_ratio(w, geometry::one_minus_conj_product(q, p))
}

/// `K_ij = k_{z_j}(z_i) = <k_{z_j}, k_{z_i}>_D`, optionally normalized to a
/// unit diagonal.
pub fn gram(z: &PointSequence, normalize: bool) -> DMatrix<Complex64> {
    let n = z.len();
    let mut k = DMatrix::from_fn(n, n, |i, j| kernel_value(&z.points[j], &z.points[i]));
    if normalize {
        let diag: Vec<f64> = (0..n).map(|i| k[(i, i)].re.sqrt()).collect();
        for i in 0..n {
            for j in 0..n {
                k[(i, j)] /= diag[i] * diag[j];
            }
        }
    }
    k
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterpDiagnostics {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `1 / sqrt(lambda_min)`
    pub onto_constant: f64,
}

fn eigen_range(k: &DMatrix<Complex64>) -> (f64, f64) {
    let eig = k.clone().symmetric_eigen();
    let lo = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let hi = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Extreme eigenvalues of the normalized Gram matrix.
pub fn interp_diagnostics(z: &PointSequence) -> Result<InterpDiagnostics> {
    if z.is_empty() {
        return Err(Error::InvalidInput("empty point sequence".into()));
    }
    let (lambda_min, lambda_max) = eigen_range(&gram(z, true));
    if !(lambda_min > 0.0) {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: lambda_min,
        });
    }
    Ok(InterpDiagnostics {
        lambda_min,
        lambda_max,
        onto_constant: 1.0 / lambda_min.sqrt(),
    })
}

/// `F = sum_j c_j k_{z_j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelExpansion {
    pub points: Vec<DiskPoint>,
    pub coeffs: Vec<Complex64>,
    pub norm: f64,
}

impl KernelExpansion {
    pub fn evaluate(&self, p: &DiskPoint) -> Complex64 {
        let mut acc = ComplexSum::new();
        for (q, c) in self.points.iter().zip(&self.coeffs) {
            acc.add(c * kernel_value(q, p));
        }
        acc.value()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Interpolant {
    pub function: KernelExpansion,
    /// `|F(z_i) - v_i|`
    pub residuals: Vec<f64>,
    pub condition: f64,
}

impl Interpolant {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

/// Minimal-norm `F` in `D` with `F(z_i) = v_i`.
pub fn d_interpolate(z: &PointSequence, values: &[Complex64]) -> Result<Interpolant> {
    if values.len() != z.len() {
        return Err(Error::InvalidInput(format!(
            "{} values for {} points",
            values.len(),
            z.len()
        )));
    }
    if z.is_empty() {
        return Err(Error::InvalidInput("empty point sequence".into()));
    }
    let k = gram(z, false);
    let (lo, hi) = eigen_range(&k);
    if !(lo > 0.0) {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: lo });
    }
    let condition = hi / lo;
    if condition > MAX_CONDITION {
        return Err(Error::IllConditioned { condition });
    }
    let v = DVector::from_column_slice(values);
    let chol = k
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite { min_eigenvalue: lo })?;
    let c = chol.solve(&v);
    let norm_sq = v.dotc(&c).re.max(0.0);
    let function = KernelExpansion {
        points: z.points.clone(),
        coeffs: c.iter().cloned().collect(),
        norm: norm_sq.sqrt(),
    };
    let residuals = z
        .points
        .iter()
        .zip(values)
        .map(|(p, v)| (function.evaluate(p) - v).norm())
        .collect();
    Ok(Interpolant {
        function,
        residuals,
        condition,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductInterpolant {
    pub b: Interpolant,
    pub g: Interpolant,
    /// `|b(z_i) g(z_i) - alpha_i|`
    pub residuals: Vec<f64>,
    /// `||b||_D ||g||_D`
    pub product_bound: f64,
}

impl ProductInterpolant {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

/// `f = b g` with `b(z_i) = |alpha_i|^{1/2}` and
/// `g(z_i) = |alpha_i|^{1/2} alpha_i / |alpha_i|` (0 where `alpha_i = 0`).
pub fn dd_interpolate(z: &PointSequence, alpha: &[Complex64]) -> Result<ProductInterpolant> {
    let beta: Vec<Complex64> = alpha
        .iter()
        .map(|a| Complex64::new(a.norm().sqrt(), 0.0))
        .collect();
    let gamma: Vec<Complex64> = alpha
        .iter()
        .map(|a| {
            let m = a.norm();
            if m == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                a / m.sqrt()
            }
        })
        .collect();
    let b = d_interpolate(z, &beta)?;
    let g = d_interpolate(z, &gamma)?;
    let residuals = z
        .points
        .iter()
        .zip(alpha)
        .map(|(p, a)| (b.function.evaluate(p) * g.function.evaluate(p) - a).norm())
        .collect();
    let product_bound = b.function.norm * g.function.norm;
    Ok(ProductInterpolant {
        b,
        g,
        residuals,
        product_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carleson::segment_sufficient_constant;
    use crate::kernels::{kernel_poly, KernelKind, KernelSpec};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn doubly_exponential(n: usize) -> PointSequence {
        let deltas: Vec<f64> = (1..=n).map(|j| (-(2f64.powi(j as i32))).exp()).collect();
        PointSequence::radial(&deltas).unwrap()
    }

    #[test]
    fn separation_examples() {
        let z = PointSequence::new(vec![
            DiskPoint::real(0.5).unwrap(),
            DiskPoint::real(0.9).unwrap(),
        ])
        .unwrap();
        let expected = 19f64.ln() / (0.95f64 / 0.15).ln();
        assert!((separation_constant(&z).unwrap() - expected).abs() < 1e-12);
        let dup = PointSequence::new(vec![
            DiskPoint::real(0.5).unwrap(),
            DiskPoint::real(0.5).unwrap(),
        ]);
        assert!(dup.is_err());
        let one = PointSequence::new(vec![DiskPoint::origin()]).unwrap();
        assert!(separation_constant(&one).is_err());
        let geometric: Vec<f64> = (1..=10).map(|j| 2f64.powi(-j)).collect();
        let g5 = separation_constant(&PointSequence::radial(&geometric[..5]).unwrap()).unwrap();
        let g10 = separation_constant(&PointSequence::radial(&geometric).unwrap()).unwrap();
        assert!(g10 > 1.5 * g5);
    }

    #[test]
    fn sequence_measure() {
        let single = mu_z(&PointSequence::new(vec![DiskPoint::origin()]).unwrap()).unwrap();
        assert_eq!(single.atoms.atoms[0].1, c(1.0, 0.0));
        let mu = mu_z(&doubly_exponential(5)).unwrap();
        assert!(mu.atoms.atoms.iter().all(|(_, w)| w.re > 0.0));
        let cstar = segment_sufficient_constant(mu.radial.as_ref().unwrap()).unwrap();
        assert!(cstar <= 2.5, "{cstar}");
        let spread = PointSequence::new(vec![
            DiskPoint::from_polar(0.0, 0.5).unwrap(),
            DiskPoint::from_polar(1.0, 0.5).unwrap(),
        ])
        .unwrap();
        assert!(mu_z(&spread).unwrap().radial.is_none());
    }

    #[test]
    fn gram_matches_series_pairings() {
        let pts = vec![
            DiskPoint::from_complex(c(0.3, 0.4)).unwrap(),
            DiskPoint::from_complex(c(-0.9, 0.1)).unwrap(),
            DiskPoint::from_complex(c(0.0, -0.99)).unwrap(),
        ];
        let z = PointSequence::new(pts.clone()).unwrap();
        let k = gram(&z, false);
        for i in 0..3 {
            for j in 0..3 {
                let ki = kernel_poly(
                    &KernelSpec::for_tolerance(pts[i], KernelKind::Dirichlet, 1e-14).unwrap(),
                );
                let kj = kernel_poly(
                    &KernelSpec::for_tolerance(pts[j], KernelKind::Dirichlet, 1e-14).unwrap(),
                );
                assert!((k[(i, j)] - kj.dirichlet_pair(&ki)).norm() < 1e-9);
            }
        }
        let origin = PointSequence::new(vec![DiskPoint::origin()]).unwrap();
        let d = interp_diagnostics(&origin).unwrap();
        assert!((d.lambda_min - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eigenvalue_floor_decreases_when_appending() {
        let mut previous = f64::INFINITY;
        for n in 1..=6 {
            let d = interp_diagnostics(&doubly_exponential(n)).unwrap();
            assert!(d.lambda_min <= previous + 1e-12);
            assert!(d.lambda_min > 0.0);
            previous = d.lambda_min;
        }
    }

    #[test]
    fn interpolation_examples() {
        let origin = PointSequence::new(vec![DiskPoint::origin()]).unwrap();
        let f = d_interpolate(&origin, &[c(1.0, 0.0)]).unwrap();
        assert!((f.function.norm - 1.0).abs() < 1e-15);
        let z = doubly_exponential(5);
        let zero = d_interpolate(&z, &[c(0.0, 0.0); 5]).unwrap();
        assert!(zero.function.is_zero());
        let values = [
            c(1.0, -1.0),
            c(0.5, 2.0),
            c(-3.0, 0.0),
            c(0.0, 0.1),
            c(2.0, 2.0),
        ];
        let f = d_interpolate(&z, &values).unwrap();
        assert!(f.max_residual() < 1e-10);
        assert!(d_interpolate(&z, &values[..3]).is_err());

        let single = PointSequence::new(vec![DiskPoint::real(0.3).unwrap()]).unwrap();
        let p = dd_interpolate(&single, &[c(4.0, 0.0)]).unwrap();
        let at = single.points()[0];
        assert!((p.b.function.evaluate(&at) - c(2.0, 0.0)).norm() < 1e-14);
        assert!(p.max_residual() < 1e-13);
        let signs = dd_interpolate(
            &z,
            &[
                c(-1.0, 0.0),
                c(2.0, 0.0),
                c(0.0, 0.0),
                c(-0.5, 0.0),
                c(0.0, 3.0),
            ],
        )
        .unwrap();
        assert!(signs.max_residual() < 1e-9);
        let none = dd_interpolate(&z, &[c(0.0, 0.0); 5]).unwrap();
        assert_eq!(none.product_bound, 0.0);
    }
}
