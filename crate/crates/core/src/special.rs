//! Quantitative estimates near the boundary: the bump functions
//! `G_theta = (delta / (1 - conj(zeta) z))^theta` and their factorization
//! through `Lambda = 3i - log(1 - conj(zeta) z)`, the function
//! `H(zeta) = int log(1 / (1 - zeta x)) dx / ((1 - x) log^2(1 - x))`, the
//! square root of a kernel, and the power-growth inequality for monomials.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::DiskPoint;
use crate::quadrature::{disk_integral, log_gap_integral, QuadratureSpec};

/// A bump centered at a point of the positive axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpSpec {
    pub center: DiskPoint,
    pub theta: f64,
}

impl BumpSpec {
    pub fn new(center: DiskPoint, theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "theta {theta} must be positive"
            )));
        }
        if center.z().im != 0.0 || center.z().re < 0.0 {
            return Err(Error::InvalidInput("bump centers lie on [0, 1)".into()));
        }
        Ok(BumpSpec { center, theta })
    }

    /// Center with `1 - |zeta|^2 = delta` on the positive axis.
    pub fn at_delta(delta: f64, theta: f64) -> Result<Self> {
        Self::new(DiskPoint::from_polar(0.0, delta)?, theta)
    }

    fn zeta(&self) -> f64 {
        self.center.radius()
    }

    /// `1 - conj(zeta) z`
    fn one_minus(&self, z: Complex64) -> Complex64 {
        // zeta = 1 - gap, so 1 - zeta z = (1 - z) + gap z keeps accuracy near 1
        Complex64::new(1.0, 0.0) - z + z * self.center.gap()
    }

    pub fn lambda(&self, z: Complex64) -> Complex64 {
        Complex64::new(0.0, 3.0) - self.one_minus(z).ln()
    }

    /// `G_theta(z)`
    pub fn g_theta(&self, z: Complex64) -> Complex64 {
        (self.theta * (self.center.delta().ln() - self.one_minus(z).ln())).exp()
    }

    /// `G_1 = G_theta Lambda^{-3/4}`
    pub fn g1(&self, z: Complex64) -> Complex64 {
        self.g_theta(z) * (-0.75 * self.lambda(z).ln()).exp()
    }

    /// `G_2 = Lambda^{3/4}`
    pub fn g2(&self, z: Complex64) -> Complex64 {
        (0.75 * self.lambda(z).ln()).exp()
    }

    /// `G_1' = delta^theta zeta (1 - zeta z)^{-theta-1} (theta Lambda^{-3/4} - 3/4 Lambda^{-7/4})`
    pub fn g1_derivative(&self, z: Complex64) -> Complex64 {
        let w = self.one_minus(z);
        let log_lambda = self.lambda(z).ln();
        let front = (self.theta * self.center.delta().ln() - (self.theta + 1.0) * w.ln()).exp();
        front
            * self.zeta()
            * (self.theta * (-0.75 * log_lambda).exp() - 0.75 * (-1.75 * log_lambda).exp())
    }

    /// `G_2' = 3/4 zeta Lambda^{-1/4} / (1 - zeta z)`
    pub fn g2_derivative(&self, z: Complex64) -> Complex64 {
        let w = self.one_minus(z);
        0.75 * self.zeta() * (-0.25 * self.lambda(z).ln()).exp() / w
    }

    /// `G_theta'(z) = theta zeta delta^theta (1 - zeta z)^{-theta-1}`
    pub fn g_theta_derivative(&self, z: Complex64) -> Complex64 {
        let w = self.one_minus(z);
        self.theta
            * self.zeta()
            * (self.theta * self.center.delta().ln() - (self.theta + 1.0) * w.ln()).exp()
    }

    /// Focused grid at the boundary point nearest the center.
    pub fn quadrature(&self) -> QuadratureSpec {
        QuadratureSpec {
            tolerance: 1e-7,
            ..QuadratureSpec::focused(0.0, self.center.gap())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BumpNorms {
    /// `|G_1(0)|^2 + int |G_1'|^2 dA`
    pub g1_sq: f64,
    pub g2_sq: f64,
    /// `sqrt(g1_sq g2_sq)`
    pub product_bound: f64,
    /// `L^{-1/2}`
    pub reference: f64,
    pub error_estimate: f64,
}

/// Area-form norms of the two factors of a bump.
pub fn bump_factor_norms(spec: &BumpSpec, q: &QuadratureSpec) -> Result<BumpNorms> {
    if spec.center.delta() > 0.5 {
        return Err(Error::Precondition(
            "bump factor norms are computed for delta <= 1/2".into(),
        ));
    }
    let origin = Complex64::new(0.0, 0.0);
    let i1 = disk_integral(|z| spec.g1_derivative(z).norm_sqr(), q)?;
    let i2 = disk_integral(|z| spec.g2_derivative(z).norm_sqr(), q)?;
    let g1_sq = spec.g1(origin).norm_sqr() + i1.value;
    let g2_sq = spec.g2(origin).norm_sqr() + i2.value;
    Ok(BumpNorms {
        g1_sq,
        g2_sq,
        product_bound: (g1_sq * g2_sq).sqrt(),
        reference: 1.0 / spec.center.big_l().sqrt(),
        error_estimate: i1.error_estimate.max(i2.error_estimate),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativePairing {
    /// `|G_theta'(zeta)|`
    pub value: f64,
    /// `1 / delta`
    pub reference: f64,
    pub ratio: f64,
    /// `|<G_theta, dbar k_zeta>_D|` summed as a series, for moderate centers
    pub series_value: Option<f64>,
}

/// `|<G_theta, dbar k_zeta>_D| = |G_theta'(zeta)| = theta |zeta| / delta`.
pub fn bump_derivative_pairing(spec: &BumpSpec) -> DerivativePairing {
    let delta = spec.center.delta();
    // at z = zeta, 1 - zeta z is delta itself; recomputing it from the rounded
    // zeta loses relative accuracy of order eps / delta
    let value = spec.theta
        * spec.zeta()
        * (spec.theta * delta.ln() - (spec.theta + 1.0) * delta.ln()).exp();
    let series_value = (delta >= 1e-2).then(|| {
        // G_theta = delta^theta sum (theta)_n / n! (zeta z)^n; pairing gives sum n g_n zeta^{n-1}
        let x = spec.zeta() * spec.zeta();
        let mut coeff = delta.powf(spec.theta); // g_n / zeta^n
        let mut pow = 1.0; // x^{n-1}
        let mut acc = crate::numeric::NeumaierSum::new();
        for n in 1..200_000 {
            let nf = n as f64;
            coeff *= (spec.theta + nf - 1.0) / nf;
            let term = nf * coeff * pow * spec.zeta();
            acc.add(term);
            pow *= x;
            if term < 1e-18 * acc.value() && nf > spec.theta + 10.0 {
                break;
            }
        }
        acc.value()
    });
    DerivativePairing {
        value,
        reference: 1.0 / delta,
        ratio: value * delta,
        series_value,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HFunction {
    pub value: f64,
    /// `log |log(1 - zeta)|`
    pub reference: f64,
    pub deviation: f64,
    pub error_estimate: f64,
}

/// `H(zeta)` for real `zeta` in `[0, 1)`, via `u = -log(1 - x)`.
///
/// In `u` the measure is `du / u^2` on `[log 2, inf)`. The integral is cut at
/// `u_max = -log(1 - zeta) + 40`; beyond it the log factor equals
/// `-log(1 - zeta)` up to `e^{-40}`, so the tail is added in closed form.
pub fn h_function(zeta: f64, q: &QuadratureSpec) -> Result<HFunction> {
    if !(0.0..1.0).contains(&zeta) {
        return Err(Error::InvalidInput(format!("zeta {zeta} outside [0, 1)")));
    }
    let one_minus = 1.0 - zeta;
    let ell = -one_minus.ln();
    let reference = if zeta == 0.0 {
        f64::NEG_INFINITY
    } else {
        ell.ln()
    };
    if zeta == 0.0 {
        return Ok(HFunction {
            value: 0.0,
            reference,
            deviation: f64::INFINITY,
            error_estimate: 0.0,
        });
    }
    let u_max = ell + 40.0;
    let integral = log_gap_integral(
        |u| -(one_minus + zeta * (-u).exp()).ln() / (u * u),
        2f64.ln(),
        u_max,
        q,
    )?;
    let value = integral.value + ell / u_max;
    Ok(HFunction {
        value,
        reference,
        deviation: value - reference,
        error_estimate: integral.error_estimate + ell * (-40f64).exp() / u_max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqrtKernelNorm {
    /// `|k(0)^{1/2}|^2 + int |k'|^2 / (4 |k|) dA`
    pub value_sq: f64,
    /// `log(1 + L)`
    pub reference: f64,
    pub error_estimate: f64,
}

/// `k_zeta(z)` and `k_zeta'(z)`.
fn kernel_and_derivative(
    zeta_conj: Complex64,
    z: Complex64,
    one_minus: Complex64,
) -> (Complex64, Complex64) {
    let w = zeta_conj * z;
    if w.norm() < 0.1 {
        let mut k = Complex64::new(0.0, 0.0);
        let mut dk = Complex64::new(0.0, 0.0);
        let mut pow = Complex64::new(1.0, 0.0); // w^n
        for n in 0..40 {
            let nf = n as f64;
            k += pow / (nf + 1.0);
            dk += pow * ((nf + 1.0) / (nf + 2.0));
            pow *= w;
        }
        (k, dk * zeta_conj)
    } else {
        let log = one_minus.ln();
        let k = -log / w;
        // d/dw (-log(1-w)/w) = 1/(w(1-w)) + log(1-w)/w^2
        let dk = (Complex64::new(1.0, 0.0) / (w * one_minus) + log / (w * w)) * zeta_conj;
        (k, dk)
    }
}

/// Area-form norm of the principal square root of `k_zeta`.
pub fn sqrt_kernel_norm(center: &DiskPoint, q: Option<&QuadratureSpec>) -> Result<SqrtKernelNorm> {
    let reference = center.big_l().ln_1p();
    if center.radius() == 0.0 {
        return Ok(SqrtKernelNorm {
            value_sq: 1.0,
            reference,
            error_estimate: 0.0,
        });
    }
    let default = if center.delta() > 0.5 {
        QuadratureSpec {
            tolerance: 1e-7,
            ..QuadratureSpec::default()
        }
    } else {
        QuadratureSpec {
            tolerance: 1e-7,
            ..QuadratureSpec::focused(center.arg(), center.gap())
        }
    };
    let spec = q.copied().unwrap_or(default);
    let zc = center.z().conj();
    let unit = Complex64::from_polar(1.0, center.arg());
    let gap = center.gap();
    let integral = disk_integral(
        |z| {
            // 1 - conj(zeta) z = 1 - (1 - gap) conj(u) z, with u the unit direction
            let v = unit.conj() * z;
            let one_minus = Complex64::new(1.0, 0.0) - v + v * gap;
            let (k, dk) = kernel_and_derivative(zc, z, one_minus);
            dk.norm_sqr() / (4.0 * k.norm())
        },
        &spec,
    )?;
    Ok(SqrtKernelNorm {
        value_sq: 1.0 + integral.value,
        reference,
        error_estimate: integral.error_estimate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PowerGrowthRow {
    pub k: u64,
    /// `||z^{n(k+1)}||^2` in the restricted norm
    pub lhs: u128,
    /// `(k+1)^2 ||z^n||_X^2 ||z^{nk}||^2`, with `||1||^2 = 1` at `k = 0`
    pub rhs: u128,
    pub holds: bool,
}

/// The inequality `||f^{k+1}||^2 <= (k+1)^2 ||f||_X^2 ||f^k||^2` for `f = z^n`,
/// in exact integer arithmetic.
pub fn power_growth_check(n: u64, k_max: u64) -> Result<Vec<PowerGrowthRow>> {
    if n < 1 {
        return Err(Error::InvalidInput("power growth needs n >= 1".into()));
    }
    let n = n as u128;
    Ok((0..=k_max)
        .map(|k| {
            let kk = k as u128;
            let lhs = n * (kk + 1);
            let power_norm = if k == 0 { 1 } else { n * kk };
            let rhs = (kk + 1) * (kk + 1) * n * power_norm;
            PowerGrowthRow {
                k,
                lhs,
                rhs,
                holds: lhs <= rhs,
            }
        })
        .collect())
}
