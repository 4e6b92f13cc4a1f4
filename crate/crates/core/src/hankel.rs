//! Hankel forms `H_b(f, g) = <fg, b>_D` on the restricted Dirichlet space and
//! their matrices in the orthonormal basis `z^n / sqrt(n + 1)`, `n >= 1`.
//!
//! The general family has entries `(i+1)^a (j+1)^b (i+j+1)^c conj(b_{i+j})`;
//! `(-1/2, -1/2, 1)` is the Dirichlet form and `(0, 0, 0)` the Hardy one.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DiskPoint;
use crate::kernels::{KernelKind, KernelSpec};
use crate::linalg::jacobi_singular_values;
use crate::numeric::{harmonic, NeumaierSum};
use crate::quadrature::{annulus_integral, disk_integral, Integral, QuadratureSpec};
use crate::series::AnalyticPoly;

/// Off-diagonal threshold of the Jacobi iteration.
pub const SVD_TOLERANCE: f64 = 1e-12;

/// Largest block handed to the dense SVD in [`h_zeta_experiment`].
pub const DENSE_BLOCK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HankelScales {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl HankelScales {
    pub const DIRICHLET: HankelScales = HankelScales {
        alpha: -0.5,
        beta: -0.5,
        gamma: 1.0,
    };
    pub const HARDY: HankelScales = HankelScales {
        alpha: 0.0,
        beta: 0.0,
        gamma: 0.0,
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct HankelMatrix {
    pub symbol: AnalyticPoly,
    pub truncation: usize,
    pub scales: HankelScales,
    /// entry `(i - 1, j - 1)` holds `e_{ij}`
    pub entries: DMatrix<Complex64>,
}

fn entry_weight(i: usize, j: usize, s: &HankelScales) -> f64 {
    if *s == HankelScales::DIRICHLET {
        // exact form, avoids powf rounding
        (i + j + 1) as f64 / ((i as f64 + 1.0) * (j as f64 + 1.0)).sqrt()
    } else {
        (i as f64 + 1.0).powf(s.alpha)
            * (j as f64 + 1.0).powf(s.beta)
            * ((i + j) as f64 + 1.0).powf(s.gamma)
    }
}

/// Assemble the `M x M` matrix, indices `1..=M`.
pub fn build_matrix(
    b: &AnalyticPoly,
    truncation: usize,
    scales: HankelScales,
) -> Result<HankelMatrix> {
    if truncation < 1 {
        return Err(Error::InvalidInput("Hankel truncation must be >= 1".into()));
    }
    if scales == HankelScales::DIRICHLET && b.coeff(0) != Complex64::new(0.0, 0.0) {
        return Err(Error::Precondition(
            "the Dirichlet Hankel form needs b(0) = 0".into(),
        ));
    }
    let entries = DMatrix::from_fn(truncation, truncation, |r, c| {
        let (i, j) = (r + 1, c + 1);
        let bn = b.coeff(i + j);
        if bn == Complex64::new(0.0, 0.0) {
            bn
        } else {
            bn.conj() * entry_weight(i, j, &scales)
        }
    });
    Ok(HankelMatrix {
        symbol: b.clone(),
        truncation,
        scales,
        entries,
    })
}

/// `<fg, b>_D` for `f(0) = g(0) = 0`.
pub fn hankel_apply(b: &AnalyticPoly, f: &AnalyticPoly, g: &AnalyticPoly) -> Result<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    if f.coeff(0) != zero || g.coeff(0) != zero {
        return Err(Error::Precondition(
            "Hankel forms act on functions vanishing at 0".into(),
        ));
    }
    Ok(f.multiply(g).dirichlet_pair(b))
}

/// Entrywise `l^2` norm.
pub fn hs_norm(mat: &HankelMatrix) -> f64 {
    mat.entries
        .iter()
        .map(|e| e.norm_sqr())
        .collect::<NeumaierSum>()
        .value()
        .sqrt()
}

/// `s_k = sum_{i,j >= 1, i+j = k} (k+1)^2 / ((i+1)(j+1)) = 2 (k+1)^2 (H_k - 1) / (k+2)`.
pub fn hs_weight(k: usize) -> f64 {
    if k < 2 {
        return 0.0;
    }
    let kf = k as f64;
    2.0 * (kf + 1.0).powi(2) * (harmonic(k) - 1.0) / (kf + 2.0)
}

/// `sum_k s_k |b_k|^2`, the squared Hilbert–Schmidt norm of the full form.
pub fn hs_norm_sq_from_weights(b: &AnalyticPoly) -> f64 {
    b.coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| hs_weight(k) * c.norm_sqr())
        .collect::<NeumaierSum>()
        .value()
}

fn default_spec_for(b: &AnalyticPoly) -> QuadratureSpec {
    let angular = (4 * (b.degree() + 1)).next_power_of_two().max(256);
    QuadratureSpec {
        angular_nodes: angular,
        tolerance: 1e-8,
        ..QuadratureSpec::default()
    }
}

/// `int |b'|^2 log(1 / (1 - |z|^2)) dA`.
pub fn hs_integral(b: &AnalyticPoly) -> Result<Integral> {
    hs_integral_with(b, &default_spec_for(b))
}

pub fn hs_integral_with(b: &AnalyticPoly, spec: &QuadratureSpec) -> Result<Integral> {
    let db = b.differentiate();
    disk_integral(
        |z| {
            let x = z.norm_sqr();
            db.eval_raw(z).norm_sqr() * -(-x).ln_1p()
        },
        spec,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Schatten {
    pub singular_values: Vec<f64>,
    pub p: f64,
    pub s_p_norm: f64,
}

/// Singular values and the Schatten `p`-norm of a matrix.
pub fn schatten(mat: &HankelMatrix, p: f64) -> Result<Schatten> {
    if !(p >= 1.0) {
        return Err(Error::InvalidInput(format!(
            "Schatten exponent {p} must be >= 1"
        )));
    }
    let singular_values = jacobi_singular_values(&mat.entries, SVD_TOLERANCE)?;
    let s_p_norm = if p.is_infinite() {
        singular_values.first().copied().unwrap_or(0.0)
    } else {
        singular_values
            .iter()
            .map(|s| s.powf(p))
            .collect::<NeumaierSum>()
            .value()
            .powf(1.0 / p)
    };
    Ok(Schatten {
        singular_values,
        p,
        s_p_norm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HZeta {
    pub sigma1: f64,
    pub sigma2: f64,
    /// `sigma_3 / sigma_1` of the leading dense block
    pub sigma3_ratio: f64,
    /// `sigma_1 + sigma_2`
    pub trace_proxy: f64,
    /// `L^{1/2} / delta`
    pub reference: f64,
    pub dense_block: usize,
    pub tail_bound: f64,
}

/// Singular values of the form with symbol `dbar k_zeta`, `H(f, g) = (fg)'(zeta)`.
///
/// Its matrix is `u v^T + v u^T` with `u_i = i zeta^{i-1} / sqrt(i+1)` and
/// `v_i = zeta^i / sqrt(i+1)`, so `sigma_1, sigma_2` are those of the 2x2
/// matrix `R J R^T` (`R^* R` the Gram matrix of `u, v`, `J` the swap). The
/// Gram sums run to the truncation `M`. A dense SVD of the leading block
/// measures `sigma_3`.
pub fn h_zeta_experiment(center: &DiskPoint, truncation: usize) -> Result<HZeta> {
    if truncation < 1 {
        return Err(Error::InvalidInput("truncation must be >= 1".into()));
    }
    let tolerance = 1e-10;
    // the matrix reaches symbol index 2M
    let spec = KernelSpec::new(*center, KernelKind::DbarDerivative, 2 * truncation)?;
    let tail_bound = spec.tail_bound();
    if tail_bound > tolerance {
        return Err(Error::Truncation {
            given: truncation,
            needed: crate::kernels::required_truncation(center, tolerance) / 2 + 1,
            tolerance,
        });
    }
    let zeta = center.z();
    let x = center.radius() * center.radius();
    let mut uu = NeumaierSum::new();
    let mut vv = NeumaierSum::new();
    let mut uv = NeumaierSum::new();
    let mut pow = 1.0; // x^{i-1}
    for i in 1..=truncation {
        let fi = i as f64;
        let w = 1.0 / (fi + 1.0);
        uu.add(fi * fi * w * pow);
        uv.add(fi * w * pow);
        pow *= x;
        vv.add(w * pow);
    }
    // u^* v = zeta * sum i x^{i-1} / (i+1)
    let g11 = uu.value();
    let g22 = vv.value();
    let g12 = zeta * uv.value();
    let (sigma1, sigma2) = if g11 == 0.0 || g22 == 0.0 {
        (0.0, 0.0)
    } else {
        // Cholesky G = R^* R, R upper triangular
        let r11 = g11.sqrt();
        let r12 = g12 / r11;
        let r22 = (g22 - r12.norm_sqr()).max(0.0).sqrt();
        let r = nalgebra::Matrix2::new(
            Complex64::new(r11, 0.0),
            r12,
            Complex64::new(0.0, 0.0),
            Complex64::new(r22, 0.0),
        );
        let j = nalgebra::Matrix2::new(
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        );
        let s = r * j * r.transpose();
        let sv = s.svd(false, false).singular_values;
        (sv[0].max(sv[1]), sv[0].min(sv[1]))
    };
    let block = truncation.min(DENSE_BLOCK);
    let sigma3_ratio = if sigma1 == 0.0 {
        0.0
    } else {
        let b = crate::kernels::kernel_poly(&KernelSpec::new(
            *center,
            KernelKind::DbarDerivative,
            2 * block,
        )?);
        let mat = build_matrix(&b, block, HankelScales::DIRICHLET)?;
        let sv = jacobi_singular_values(&mat.entries, SVD_TOLERANCE)?;
        if sv.len() < 3 || sv[0] == 0.0 {
            0.0
        } else {
            sv[2] / sv[0]
        }
    };
    Ok(HZeta {
        sigma1,
        sigma2,
        sigma3_ratio,
        trace_proxy: sigma1 + sigma2,
        reference: center.big_l().sqrt() / center.delta(),
        dense_block: block,
        tail_bound,
    })
}

/// `int |b''| dA`.
pub fn besov1_norm(b: &AnalyticPoly) -> Result<Integral> {
    let d2 = b.differentiate().differentiate();
    let spec = QuadratureSpec {
        tolerance: 1e-6,
        ..default_spec_for(b)
    };
    disk_integral(|z| d2.eval_raw(z).norm(), &spec)
}

/// `int |b''| sqrt(log(1 / (1 - |z|^2))) dA`.
pub fn besov1_log_norm(b: &AnalyticPoly) -> Result<Integral> {
    let d2 = b.differentiate().differentiate();
    let spec = QuadratureSpec {
        tolerance: 1e-6,
        ..default_spec_for(b)
    };
    disk_integral(
        |z| d2.eval_raw(z).norm() * (-(-z.norm_sqr()).ln_1p()).sqrt(),
        &spec,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LacunaryGap {
    /// entrywise `l^1` sum of the Dirichlet matrix, an upper bound for `S_1`
    pub entry_l1: f64,
    pub s1_bound: f64,
    /// `S_1` of the leading block, a lower bound for the full form
    pub s1_truncated: f64,
    /// `(r_m, int_{|z| < r_m} |b''| rho dA)`
    pub weighted_partial_sums: Vec<(f64, f64)>,
}

/// The symbol `sum_{k=1}^K 3^{-k} k^{-2} z^{3^k}`.
pub fn lacunary_symbol(k_max: usize) -> AnalyticPoly {
    let top = 3usize.pow(k_max as u32);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); top + 1];
    for k in 1..=k_max {
        let kf = k as f64;
        coeffs[3usize.pow(k as u32)] = Complex64::new(3f64.powi(-(k as i32)) / (kf * kf), 0.0);
    }
    AnalyticPoly::new(coeffs)
}

/// Lacunary symbol with absolutely summable matrix entries, and the partial
/// integrals of `|b''|` against a radial weight that is constant on each
/// annulus `r_{m-1} < |z| <= r_m`.
pub fn lacunary_gap_demo(k_max: usize, rho_grid: &[(f64, f64)]) -> Result<LacunaryGap> {
    if k_max < 2 {
        return Err(Error::InvalidInput("lacunary demo needs K >= 2".into()));
    }
    if k_max > 12 {
        return Err(Error::InvalidInput("lacunary demo supports K <= 12".into()));
    }
    for w in rho_grid.windows(2) {
        if !(w[1].0 > w[0].0 && w[1].1 >= w[0].1) {
            return Err(Error::InvalidInput(
                "radii must increase and weights must not decrease".into(),
            ));
        }
    }
    if rho_grid
        .iter()
        .any(|&(r, w)| !(r > 0.0 && r <= 1.0) || !(w >= 0.0))
    {
        return Err(Error::InvalidInput("radii in (0, 1], weights >= 0".into()));
    }
    let b = lacunary_symbol(k_max);
    let mut l1 = NeumaierSum::new();
    for k in 1..=k_max {
        let n = 3usize.pow(k as u32);
        let bn = b.coeff(n).norm();
        let mut row = NeumaierSum::new();
        for i in 1..n {
            row.add(entry_weight(i, n - i, &HankelScales::DIRICHLET));
        }
        l1.add(bn * row.value());
    }
    let block = (3usize.pow(k_max as u32) / 2).clamp(1, 200);
    let mat = build_matrix(&b, block, HankelScales::DIRICHLET)?;
    let s1_truncated = schatten(&mat, 1.0)?.s_p_norm;

    let d2 = b.differentiate().differentiate();
    let spec = QuadratureSpec {
        angular_nodes: (8 * (b.degree() + 1)).next_power_of_two(),
        // |b''| has cusps at the zeros of b''; a demonstration needs no more
        tolerance: 1e-4,
        ..QuadratureSpec::default()
    };
    let mut partial = Vec::with_capacity(rho_grid.len());
    let mut acc = 0.0;
    let mut inner = 0.0;
    for &(r, rho) in rho_grid {
        let piece = annulus_integral(|z| d2.eval_raw(z).norm(), inner, r, &spec)?;
        acc += rho * piece.value;
        partial.push((r, acc));
        inner = r;
    }
    Ok(LacunaryGap {
        entry_l1: l1.value(),
        s1_bound: l1.value(),
        s1_truncated,
        weighted_partial_sums: partial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn z(n: usize) -> AnalyticPoly {
        AnalyticPoly::monomial(n, c(1.0, 0.0))
    }

    #[test]
    fn matrix_examples() {
        let m = build_matrix(&z(2), 4, HankelScales::DIRICHLET).unwrap();
        assert_eq!(m.entries[(0, 0)], c(1.5, 0.0));
        assert_eq!(m.entries.iter().filter(|e| e.norm() > 0.0).count(), 1);
        let m3 = build_matrix(&z(3), 4, HankelScales::DIRICHLET).unwrap();
        let expected = 4.0 / 6f64.sqrt();
        assert!((m3.entries[(0, 1)].re - expected).abs() < 1e-15);
        assert_eq!(m3.entries[(0, 1)], m3.entries[(1, 0)]);
        let zero = build_matrix(&AnalyticPoly::zero(), 3, HankelScales::DIRICHLET).unwrap();
        assert_eq!(hs_norm(&zero), 0.0);
        assert!(build_matrix(&AnalyticPoly::one(), 3, HankelScales::DIRICHLET).is_err());
        assert!(build_matrix(&AnalyticPoly::one(), 3, HankelScales::HARDY).is_ok());
        // the general formula agrees with the exact Dirichlet branch
        let general = HankelScales {
            alpha: -0.5 + 1e-17,
            ..HankelScales::DIRICHLET
        };
        assert!(
            (entry_weight(3, 5, &general) - entry_weight(3, 5, &HankelScales::DIRICHLET)).abs()
                < 1e-14
        );
    }

    #[test]
    fn form_matches_matrix_on_basis() {
        let b = AnalyticPoly::new(vec![
            c(0.0, 0.0),
            c(0.5, 0.1),
            c(1.0, -1.0),
            c(0.0, 2.0),
            c(-0.3, 0.0),
        ]);
        let m = build_matrix(&b, 4, HankelScales::DIRICHLET).unwrap();
        for i in 1..=4 {
            for j in 1..=4 {
                let ei = AnalyticPoly::monomial(i, c(1.0 / (i as f64 + 1.0).sqrt(), 0.0));
                let ej = AnalyticPoly::monomial(j, c(1.0 / (j as f64 + 1.0).sqrt(), 0.0));
                let form = hankel_apply(&b, &ei, &ej).unwrap();
                assert!((form - m.entries[(i - 1, j - 1)]).norm() < 1e-15);
            }
        }
        assert_eq!(hankel_apply(&z(2), &z(1), &z(1)).unwrap(), c(3.0, 0.0));
        assert!(hankel_apply(&z(2), &AnalyticPoly::one(), &z(1)).is_err());
    }

    #[test]
    fn weights() {
        assert!((hs_weight(2) - 2.25).abs() < 1e-15);
        assert!((hs_weight(3) - 16.0 / 3.0).abs() < 1e-14);
        for k in 2..60 {
            let brute: f64 = (1..k)
                .map(|i| ((k + 1) * (k + 1)) as f64 / ((i + 1) * (k - i + 1)) as f64)
                .sum();
            assert!((hs_weight(k) - brute).abs() < 1e-12 * brute);
        }
    }

    #[test]
    fn hs_integral_of_monomials() {
        let v1 = hs_integral(&z(1)).unwrap();
        assert!((v1.value - 1.0).abs() < 1e-8);
        let v2 = hs_integral(&z(2)).unwrap();
        assert!((v2.value - 3.0).abs() < 1e-8);
    }

    #[test]
    fn schatten_examples() {
        let m = build_matrix(&z(2), 3, HankelScales::DIRICHLET).unwrap();
        let s1 = schatten(&m, 1.0).unwrap();
        assert_eq!(s1.singular_values[0], 1.5);
        assert_eq!(s1.s_p_norm, 1.5);
        assert_eq!(schatten(&m, 2.0).unwrap().s_p_norm, 1.5);
        let zero = build_matrix(&AnalyticPoly::zero(), 3, HankelScales::DIRICHLET).unwrap();
        assert!(schatten(&zero, 1.0)
            .unwrap()
            .singular_values
            .iter()
            .all(|&s| s == 0.0));
        assert!(schatten(&m, 0.5).is_err());
    }

    #[test]
    fn h_zeta_examples() {
        let origin = h_zeta_experiment(&DiskPoint::origin(), 8).unwrap();
        assert_eq!(origin.trace_proxy, 0.0);
        let p = DiskPoint::real(0.9).unwrap();
        let h = h_zeta_experiment(&p, 400).unwrap();
        assert!(h.sigma3_ratio < 1e-6);
        // the dense block reproduces the rank-two values when it covers the symbol
        let small = DiskPoint::real(0.5).unwrap();
        let hs = h_zeta_experiment(&small, 60).unwrap();
        let b = crate::kernels::kernel_poly(
            &KernelSpec::new(small, KernelKind::DbarDerivative, 120).unwrap(),
        );
        let sv = schatten(&build_matrix(&b, 60, HankelScales::DIRICHLET).unwrap(), 1.0).unwrap();
        assert!((sv.singular_values[0] - hs.sigma1).abs() < 1e-12 * hs.sigma1);
        assert!((sv.singular_values[1] - hs.sigma2).abs() < 1e-12 * hs.sigma1);
        assert!(h_zeta_experiment(&p, 10).is_err());
    }

    #[test]
    fn besov_examples() {
        assert!((besov1_norm(&z(2)).unwrap().value - 2.0).abs() < 1e-10);
        assert!((besov1_norm(&z(3)).unwrap().value - 4.0).abs() < 1e-10);
        assert_eq!(besov1_norm(&AnalyticPoly::zero()).unwrap().value, 0.0);
        let log = besov1_log_norm(&z(2)).unwrap().value;
        // 2 int_0^1 sqrt(log(1/(1-t))) dt = 2 Gamma(3/2) = sqrt(pi)
        assert!((log - std::f64::consts::PI.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn lacunary_demo_small() {
        let grid = [(0.5, 1.0), (0.9, 1.0), (0.99, 1.0), (1.0, 1.0)];
        let demo = lacunary_gap_demo(2, &grid).unwrap();
        assert!(demo.entry_l1.is_finite() && demo.entry_l1 > 0.0);
        assert!(demo.s1_truncated <= demo.entry_l1 + 1e-12);
        assert!(demo
            .weighted_partial_sums
            .windows(2)
            .all(|w| w[1].1 >= w[0].1));
        assert!(lacunary_gap_demo(1, &grid).is_err());
    }
}
