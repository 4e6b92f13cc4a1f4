//! Truncated analytic functions on the unit disk.
//!
//! An [`AnalyticPoly`] stores Taylor coefficients `a_0..a_N` of a polynomial
//! `f(z) = sum a_n z^n`. All inner products are the exact coefficient sums:
//!
//! * Dirichlet: `<f, g>_D = sum (n + 1) a_n conj(b_n)`
//! * Hardy: `<f, g>_H2 = sum a_n conj(b_n)`
//! * restricted (functions vanishing at 0): `<f, g>~ = sum_{n>=1} n a_n conj(b_n)`
//!
//! Area measure is `dA = dx dy / pi`, so `int |f'|^2 dA` equals the restricted
//! form and `|f(0)|^2 + int |f'|^2 dA` sits between half and all of `||f||_D^2`.
//!
//! Products are never truncated implicitly; use [`AnalyticPoly::truncate`].

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric::{ComplexSum, NeumaierSum};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `|a|^2` through `|a|`, so replacing `a` by `|a|` leaves every norm bit-identical.
fn modulus_sq(a: &Complex64) -> f64 {
    let m = a.norm();
    m * m
}

/// A polynomial `sum_{n<=N} a_n z^n` with complex coefficients.
///
/// Trailing zero coefficients are removed on construction, so `degree()` is
/// the index of the highest nonzero coefficient (0 for the zero polynomial).
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticPoly {
    coeffs: Vec<Complex64>,
}

impl AnalyticPoly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut p = AnalyticPoly { coeffs };
        p.canonicalize();
        p
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        AnalyticPoly { coeffs: vec![ZERO] }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    /// `c z^n`.
    pub fn monomial(n: usize, c: Complex64) -> Self {
        let mut coeffs = vec![ZERO; n + 1];
        coeffs[n] = c;
        Self::new(coeffs)
    }

    fn canonicalize(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last() == Some(&ZERO) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(ZERO);
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^n`, zero beyond the degree.
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or(ZERO)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Index of the first nonzero coefficient, `None` for the zero polynomial.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| *c != ZERO)
    }

    /// `||f||_D^2 = sum (n+1) |a_n|^2`.
    pub fn dirichlet_norm_sq(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, a)| (n as f64 + 1.0) * modulus_sq(a))
            .collect::<NeumaierSum>()
            .value()
    }

    pub fn dirichlet_norm(&self) -> f64 {
        self.dirichlet_norm_sq().sqrt()
    }

    /// `<f, g>_D = sum (n+1) a_n conj(b_n)`.
    pub fn dirichlet_pair(&self, other: &AnalyticPoly) -> Complex64 {
        let mut acc = ComplexSum::new();
        for (n, (a, b)) in self.coeffs.iter().zip(&other.coeffs).enumerate() {
            acc.add(a * b.conj() * (n as f64 + 1.0));
        }
        acc.value()
    }

    pub fn hardy_norm(&self) -> f64 {
        self.coeffs
            .iter()
            .map(modulus_sq)
            .collect::<NeumaierSum>()
            .value()
            .sqrt()
    }

    /// `sum_{n>=1} n |a_n|^2`; the constant term does not contribute.
    pub fn tilde_norm_sq(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, a)| n as f64 * modulus_sq(a))
            .collect::<NeumaierSum>()
            .value()
    }

    pub fn tilde_norm(&self) -> f64 {
        self.tilde_norm_sq().sqrt()
    }

    /// `sum_{n>=1} n a_n conj(b_n)`.
    pub fn tilde_pair(&self, other: &AnalyticPoly) -> Complex64 {
        let mut acc = ComplexSum::new();
        for (n, (a, b)) in self.coeffs.iter().zip(&other.coeffs).enumerate().skip(1) {
            acc.add(a * b.conj() * n as f64);
        }
        acc.value()
    }

    /// `|f(0)|^2 + int |f'|^2 dA = |a_0|^2 + sum n |a_n|^2`.
    pub fn area_form_sq(&self) -> f64 {
        modulus_sq(&self.coeffs[0]) + self.tilde_norm_sq()
    }

    /// Full product, degree `deg f + deg g`.
    pub fn multiply(&self, other: &AnalyticPoly) -> AnalyticPoly {
        if self.is_zero() || other.is_zero() {
            return AnalyticPoly::zero();
        }
        let mut out = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        AnalyticPoly::new(out)
    }

    pub fn scale(&self, c: Complex64) -> AnalyticPoly {
        AnalyticPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn scale_real(&self, t: f64) -> AnalyticPoly {
        self.scale(Complex64::new(t, 0.0))
    }

    /// Multiply by `z^k`.
    pub fn shift(&self, k: usize) -> AnalyticPoly {
        if self.is_zero() {
            return AnalyticPoly::zero();
        }
        let mut coeffs = vec![ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        AnalyticPoly::new(coeffs)
    }

    pub fn differentiate(&self) -> AnalyticPoly {
        if self.coeffs.len() == 1 {
            return AnalyticPoly::zero();
        }
        AnalyticPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, a)| a * n as f64)
                .collect(),
        )
    }

    /// Keep coefficients of index `<= n`.
    pub fn truncate(&self, n: usize) -> AnalyticPoly {
        AnalyticPoly::new(self.coeffs.iter().take(n + 1).copied().collect())
    }

    /// `a_n -> |a_n|`.
    pub fn modulus_coeffs(&self) -> AnalyticPoly {
        AnalyticPoly::new(
            self.coeffs
                .iter()
                .map(|a| Complex64::new(a.norm(), 0.0))
                .collect(),
        )
    }

    /// Horner evaluation without the disk check.
    pub fn eval_raw(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, a| acc * z + a)
    }

    /// Value at a point of the open unit disk.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        let modulus = z.norm();
        if !(modulus < 1.0) {
            return Err(Error::OutsideDisk { modulus });
        }
        Ok(self.eval_raw(z))
    }

    /// Power-series square root truncated to degree `n`; requires `a_0 != 0`.
    ///
    /// Uses the principal branch at the constant term.
    pub fn sqrt_series(&self, n: usize) -> Result<AnalyticPoly> {
        let a0 = self.coeffs[0];
        if a0 == ZERO {
            return Err(Error::Precondition(
                "square root series needs a nonzero constant term".into(),
            ));
        }
        let mut s = vec![ZERO; n + 1];
        s[0] = a0.sqrt();
        let two_s0 = s[0] * 2.0;
        for k in 1..=n {
            let mut acc = self.coeff(k);
            for j in 1..k {
                acc -= s[j] * s[k - j];
            }
            s[k] = acc / two_s0;
        }
        Ok(AnalyticPoly::new(s))
    }

    /// Read the JSON coefficient format: an array of `[re, im]` pairs.
    pub fn from_json_str(text: &str) -> Result<AnalyticPoly> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("finite coefficients serialize")
    }
}

impl Serialize for AnalyticPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.coeffs.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AnalyticPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(deserializer)?;
        for (n, [re, im]) in pairs.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(D::Error::custom(format!("coefficient {n} is not finite")));
            }
        }
        if pairs.is_empty() {
            return Ok(AnalyticPoly::zero());
        }
        Ok(AnalyticPoly::new(
            pairs
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        ))
    }
}

impl Add for &AnalyticPoly {
    type Output = AnalyticPoly;
    fn add(self, rhs: &AnalyticPoly) -> AnalyticPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        AnalyticPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &AnalyticPoly {
    type Output = AnalyticPoly;
    fn sub(self, rhs: &AnalyticPoly) -> AnalyticPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        AnalyticPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &AnalyticPoly {
    type Output = AnalyticPoly;
    fn mul(self, rhs: &AnalyticPoly) -> AnalyticPoly {
        self.multiply(rhs)
    }
}

impl Neg for &AnalyticPoly {
    type Output = AnalyticPoly;
    fn neg(self) -> AnalyticPoly {
        self.scale_real(-1.0)
    }
}

/// Norm of multiplication by `d` from polynomials of degree `<= n` into
/// polynomials of degree `<= n + deg d`, both carrying the Dirichlet norm.
///
/// Computed as the top singular value of the weighted convolution matrix by
/// power iteration on its Gram operator; the Rayleigh quotient is a lower
/// bound at every step and converges to the norm.
pub fn multiplier_norm_truncated(d: &AnalyticPoly, n: usize) -> Result<f64> {
    if n < d.degree() {
        return Err(Error::Precondition(format!(
            "truncation {n} is below the multiplier degree {}",
            d.degree()
        )));
    }
    if d.is_zero() {
        return Ok(0.0);
    }
    let support: Vec<(usize, Complex64)> = d
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != ZERO)
        .map(|(k, c)| (k, *c))
        .collect();
    let cols = n + 1;
    let rows = n + d.degree() + 1;
    let col_w: Vec<f64> = (0..cols).map(|j| 1.0 / (j as f64 + 1.0).sqrt()).collect();
    let row_w: Vec<f64> = (0..rows).map(|i| (i as f64 + 1.0).sqrt()).collect();

    let apply = |x: &[Complex64], y: &mut [Complex64]| {
        y.iter_mut().for_each(|v| *v = ZERO);
        for (j, xj) in x.iter().enumerate() {
            let s = xj * col_w[j];
            for &(k, c) in &support {
                y[j + k] += c * s;
            }
        }
        for (i, v) in y.iter_mut().enumerate() {
            *v *= row_w[i];
        }
    };
    let apply_adj = |y: &[Complex64], x: &mut [Complex64]| {
        for (j, xj) in x.iter_mut().enumerate() {
            let mut acc = ZERO;
            for &(k, c) in &support {
                acc += c.conj() * y[j + k] * row_w[j + k];
            }
            *xj = acc * col_w[j];
        }
    };

    let mut x = vec![Complex64::new(1.0, 0.0); cols];
    let mut y = vec![ZERO; rows];
    let mut estimate = 0.0_f64;
    for _ in 0..200_000 {
        let nx = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= nx);
        apply(&x, &mut y);
        let sigma_sq = y.iter().map(|v| v.norm_sqr()).sum::<f64>();
        apply_adj(&y, &mut x);
        let converged = (sigma_sq - estimate).abs() <= 1e-15 * sigma_sq;
        estimate = estimate.max(sigma_sq);
        if converged {
            break;
        }
    }
    Ok(estimate.sqrt())
}
