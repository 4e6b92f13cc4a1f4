//! Deterministic quadrature on the disk (normalized area `dA = dx dy / pi`)
//! and on intervals, on grids graded geometrically toward the boundary.
//!
//! Two disk grids are available:
//!
//! * the origin grid: polar coordinates around 0, Gauss–Legendre in `r` on
//!   layers whose gaps `1 - r` shrink geometrically down to `1 - inner_cutoff`,
//!   trapezoid rule in the angle;
//! * the focused grid: polar coordinates around a boundary point `b`, with
//!   `z = b (1 + s e^{i phi})`, dyadic layers in `s` starting at a given gap,
//!   Gauss–Legendre in both `s` and `phi`. Integrands concentrated near `b`
//!   (kernels and bumps of a center close to `b`) are resolved at every scale.
//!
//! Every integral is computed at two resolutions; the difference is the
//! reported error estimate.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Boundary point `e^{i arg}` around which the focused grid is built; `gap`
/// is the smallest feature scale to resolve (usually `1 - |zeta|`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFocus {
    pub arg: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub radial_layers: usize,
    pub nodes_per_layer: usize,
    pub angular_nodes: usize,
    /// radius beyond which no further grading is applied
    pub inner_cutoff: f64,
    /// accepted `error_estimate / max(1, |value|)`
    pub tolerance: f64,
    #[serde(default)]
    pub focus: Option<BoundaryFocus>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            radial_layers: 40,
            nodes_per_layer: 16,
            angular_nodes: 256,
            inner_cutoff: 1.0 - 1e-12,
            tolerance: 1e-9,
            focus: None,
        }
    }
}

impl QuadratureSpec {
    /// Focused grid at `e^{i arg}` resolving features down to `gap`.
    pub fn focused(arg: f64, gap: f64) -> Self {
        QuadratureSpec {
            nodes_per_layer: 20,
            angular_nodes: 48,
            focus: Some(BoundaryFocus { arg, gap }),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.radial_layers < 1 || self.nodes_per_layer < 1 || self.angular_nodes < 1 {
            return Err(Error::InvalidInput("quadrature counts must be >= 1".into()));
        }
        if !(self.inner_cutoff >= 0.0 && self.inner_cutoff < 1.0) {
            return Err(Error::InvalidInput(format!(
                "inner_cutoff {} outside [0, 1)",
                self.inner_cutoff
            )));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidInput("tolerance must be positive".into()));
        }
        if let Some(f) = self.focus {
            if !f.arg.is_finite() || !(f.gap > 0.0 && f.gap <= 1.0) {
                return Err(Error::InvalidInput(format!(
                    "focus gap {} outside (0, 1]",
                    f.gap
                )));
            }
        }
        Ok(())
    }

    /// Same grid with twice the nodes per layer and twice the angular nodes.
    pub fn refined(&self) -> Self {
        QuadratureSpec {
            nodes_per_layer: 2 * self.nodes_per_layer,
            angular_nodes: 2 * self.angular_nodes,
            ..*self
        }
    }

    /// The lower resolution used for the error estimate.
    pub fn coarse(&self) -> Self {
        QuadratureSpec {
            nodes_per_layer: (self.nodes_per_layer / 2).max(1),
            angular_nodes: (self.angular_nodes / 2).max(1),
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
}

fn finish(fine: f64, coarse: f64, tolerance: f64, what: &str) -> Result<Integral> {
    if !fine.is_finite() || !coarse.is_finite() {
        return Err(Error::NonFinite {
            field: format!("{what} integrand"),
        });
    }
    let error_estimate = (fine - coarse).abs();
    if error_estimate > tolerance * fine.abs().max(1.0) {
        return Err(Error::NoConvergence {
            what: format!("{what} quadrature"),
            detail: format!("value {fine:e}, refinement difference {error_estimate:e}"),
        });
    }
    Ok(Integral {
        value: fine,
        error_estimate,
    })
}

/// Layer boundaries `0 = t_0 < ... < t_K < 1` with `1 - t_m = (1 - c)^{m/K}`,
/// followed by 1.
fn graded_breaks(layers: usize, cutoff: f64) -> Vec<f64> {
    let log_gap = (1.0 - cutoff).ln();
    let mut breaks: Vec<f64> = (0..=layers)
        .map(|m| {
            if m == 0 {
                0.0
            } else {
                -((log_gap * m as f64 / layers as f64).exp_m1())
            }
        })
        .collect();
    breaks.push(1.0);
    breaks.dedup();
    breaks
}

fn sum_ordered(parts: Vec<f64>) -> f64 {
    parts.into_iter().collect::<NeumaierSum>().value()
}

/// `int_D f dA` at a single resolution.
pub fn disk_sum<F>(f: &F, spec: &QuadratureSpec) -> f64
where
    F: Fn(Complex64) -> f64 + Sync,
{
    match spec.focus {
        None => origin_grid_sum(f, spec),
        Some(focus) => focused_grid_sum(f, spec, focus),
    }
}

fn origin_grid_sum<F>(f: &F, spec: &QuadratureSpec) -> f64
where
    F: Fn(Complex64) -> f64 + Sync,
{
    let (x, w) = gauss_legendre(spec.nodes_per_layer);
    let breaks = graded_breaks(spec.radial_layers, spec.inner_cutoff);
    let m = spec.angular_nodes;
    let rotations: Vec<Complex64> = (0..m)
        .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64))
        .collect();
    let parts: Vec<f64> = breaks
        .par_windows(2)
        .map(|ab| {
            let (a, b) = (ab[0], ab[1]);
            let half = 0.5 * (b - a);
            let mut acc = NeumaierSum::new();
            for (xi, wi) in x.iter().zip(&w) {
                let r = a + half * (1.0 + xi);
                let ring: NeumaierSum = rotations.iter().map(|e| f(e * r)).collect();
                // dA = r dr dtheta / pi, trapezoid weight 2 pi / m
                acc.add(wi * half * r * 2.0 / m as f64 * ring.value());
            }
            acc.value()
        })
        .collect();
    sum_ordered(parts)
}

fn focused_grid_sum<F>(f: &F, spec: &QuadratureSpec, focus: BoundaryFocus) -> f64
where
    F: Fn(Complex64) -> f64 + Sync,
{
    let (xs, ws) = gauss_legendre(spec.nodes_per_layer);
    let (xa, wa) = gauss_legendre(spec.angular_nodes);
    let b = Complex64::from_polar(1.0, focus.arg);
    let mut breaks = vec![0.0, 0.25 * focus.gap, 0.5 * focus.gap];
    let mut s = focus.gap;
    while s < 1.0 {
        breaks.push(s);
        s *= 2.0;
    }
    // the angular half-width acos(s/2) has a square-root edge at s = 2
    for j in 0..40 {
        breaks.push(2.0 - 2f64.powi(-j));
    }
    breaks.push(2.0);
    let parts: Vec<f64> = breaks
        .par_windows(2)
        .map(|ab| {
            let (lo, hi) = (ab[0], ab[1]);
            let half = 0.5 * (hi - lo);
            let mut acc = NeumaierSum::new();
            for (xi, wi) in xs.iter().zip(&ws) {
                let s = lo + half * (1.0 + xi);
                // |1 + s e^{i phi}| < 1 exactly when |phi - pi| < acos(s/2)
                let a = (0.5 * s).acos();
                let mut ring = NeumaierSum::new();
                for (yj, vj) in xa.iter().zip(&wa) {
                    let phi = PI + a * yj;
                    let z = b * (1.0 + Complex64::from_polar(s, phi));
                    ring.add(vj * f(z));
                }
                acc.add(wi * half * a * s / PI * ring.value());
            }
            acc.value()
        })
        .collect();
    sum_ordered(parts)
}

/// `int_D f dA` with a two-resolution error estimate.
pub fn disk_integral<F>(f: F, spec: &QuadratureSpec) -> Result<Integral>
where
    F: Fn(Complex64) -> f64 + Sync,
{
    spec.validate()?;
    let fine = disk_sum(&f, spec);
    let coarse = disk_sum(&f, &spec.coarse());
    finish(fine, coarse, spec.tolerance, "disk")
}

fn annulus_sum<F>(f: &F, r0: f64, r1: f64, spec: &QuadratureSpec) -> f64
where
    F: Fn(Complex64) -> f64 + Sync,
{
    let (x, w) = gauss_legendre(spec.nodes_per_layer);
    let breaks = graded_breaks(spec.radial_layers, spec.inner_cutoff);
    let m = spec.angular_nodes;
    let rotations: Vec<Complex64> = (0..m)
        .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64))
        .collect();
    let len = r1 - r0;
    let parts: Vec<f64> = breaks
        .par_windows(2)
        .map(|tt| {
            let half = 0.5 * (tt[1] - tt[0]) * len;
            let mut acc = NeumaierSum::new();
            for (xi, wi) in x.iter().zip(&w) {
                let r = r0 + len * tt[0] + half * (1.0 + xi);
                let ring: NeumaierSum = rotations.iter().map(|e| f(e * r)).collect();
                acc.add(wi * half * r * 2.0 / m as f64 * ring.value());
            }
            acc.value()
        })
        .collect();
    sum_ordered(parts)
}

/// `int_{r0 < |z| < r1} f dA` on the origin grid, graded toward `r1`.
pub fn annulus_integral<F>(f: F, r0: f64, r1: f64, spec: &QuadratureSpec) -> Result<Integral>
where
    F: Fn(Complex64) -> f64 + Sync,
{
    spec.validate()?;
    if !(r0 >= 0.0 && r0 < r1 && r1 <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "annulus [{r0}, {r1}] is empty or leaves the disk"
        )));
    }
    let fine = annulus_sum(&f, r0, r1, spec);
    let coarse = annulus_sum(&f, r0, r1, &spec.coarse());
    finish(fine, coarse, spec.tolerance, "annulus")
}

fn interval_sum<F>(f: &F, a: f64, b: f64, spec: &QuadratureSpec) -> f64
where
    F: Fn(f64) -> f64 + Sync,
{
    let (x, w) = gauss_legendre(spec.nodes_per_layer);
    let breaks = graded_breaks(spec.radial_layers, spec.inner_cutoff);
    let len = b - a;
    let parts: Vec<f64> = breaks
        .par_windows(2)
        .map(|tt| {
            let half = 0.5 * (tt[1] - tt[0]);
            x.iter()
                .zip(&w)
                .map(|(xi, wi)| wi * half * len * f(a + len * (tt[0] + half * (1.0 + xi))))
                .collect::<NeumaierSum>()
                .value()
        })
        .collect();
    sum_ordered(parts)
}

/// `int_a^b f(x) dx`, graded toward `b`.
pub fn radial_integral<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Integral>
where
    F: Fn(f64) -> f64 + Sync,
{
    spec.validate()?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidInput(format!("interval [{a}, {b}] is empty")));
    }
    let fine = interval_sum(&f, a, b, spec);
    let coarse = interval_sum(&f, a, b, &spec.coarse());
    finish(fine, coarse, spec.tolerance, "radial")
}

fn unit_panel_sum<G>(g: &G, u_lo: f64, u_hi: f64, nodes: usize) -> f64
where
    G: Fn(f64) -> f64 + Sync,
{
    let (x, w) = gauss_legendre(nodes);
    let panels = ((u_hi - u_lo).ceil() as usize).max(1);
    let width = (u_hi - u_lo) / panels as f64;
    let parts: Vec<f64> = (0..panels)
        .into_par_iter()
        .map(|k| {
            let lo = u_lo + width * k as f64;
            let half = 0.5 * width;
            x.iter()
                .zip(&w)
                .map(|(xi, wi)| wi * half * g(lo + half * (1.0 + xi)))
                .collect::<NeumaierSum>()
                .value()
        })
        .collect();
    sum_ordered(parts)
}

/// `int_{u_lo}^{u_hi} g(u) du` on unit-width Gauss–Legendre panels.
///
/// Meant for integrals over `[x_0, 1)` rewritten with `u = -log(1 - x)`; the
/// integrand `g` already carries the Jacobian, and the caller adds the
/// contribution beyond `u_hi`.
pub fn log_gap_integral<G>(g: G, u_lo: f64, u_hi: f64, spec: &QuadratureSpec) -> Result<Integral>
where
    G: Fn(f64) -> f64 + Sync,
{
    spec.validate()?;
    if !(u_lo.is_finite() && u_hi.is_finite() && u_lo < u_hi) {
        return Err(Error::InvalidInput(format!(
            "interval [{u_lo}, {u_hi}] is empty"
        )));
    }
    let fine = unit_panel_sum(&g, u_lo, u_hi, spec.nodes_per_layer);
    let coarse = unit_panel_sum(&g, u_lo, u_hi, spec.coarse().nodes_per_layer);
    finish(fine, coarse, spec.tolerance, "log-gap")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::harmonic;

    #[test]
    fn gauss_legendre_is_exact_on_polynomials() {
        let (x, w) = gauss_legendre(5);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-15);
        let m8: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((m8 - 2.0 / 9.0).abs() < 1e-15);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
        let (x1, w1) = gauss_legendre(1);
        assert_eq!((x1[0], w1[0]), (0.0, 2.0));
    }

    #[test]
    fn disk_moments() {
        let spec = QuadratureSpec::default();
        let one = disk_integral(|_| 1.0, &spec).unwrap();
        assert!((one.value - 1.0).abs() < 1e-14);
        for k in [0, 1, 5, 32, 64] {
            let v = disk_integral(|z| z.norm_sqr().powi(k), &spec).unwrap();
            assert!((v.value - 1.0 / (k as f64 + 1.0)).abs() < 1e-10, "k = {k}");
        }
    }

    #[test]
    fn focused_grid_moments() {
        for gap in [0.3, 1e-3, 1e-9] {
            let spec = QuadratureSpec::focused(0.7, gap);
            let one = disk_integral(|_| 1.0, &spec).unwrap();
            assert!((one.value - 1.0).abs() < 1e-12, "gap {gap}: {}", one.value);
            let m3 = disk_integral(|z| z.norm_sqr().powi(3), &spec).unwrap();
            assert!((m3.value - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn annulus_area() {
        let spec = QuadratureSpec::default();
        let a = annulus_integral(|_| 1.0, 0.5, 0.8, &spec).unwrap();
        assert!((a.value - (0.64 - 0.25)).abs() < 1e-14);
        let m = annulus_integral(|z| z.norm_sqr(), 0.0, 1.0, &spec).unwrap();
        assert!((m.value - 0.5).abs() < 1e-13);
    }

    #[test]
    fn interval_examples() {
        let spec = QuadratureSpec::default();
        let one = radial_integral(|_| 1.0, 0.0, 1.0, &spec).unwrap();
        assert!((one.value - 1.0).abs() < 1e-15);
        for n in [1, 2, 10, 64] {
            let v =
                radial_integral(|t| t.powi(n as i32 - 1) * -(-t).ln_1p(), 0.0, 1.0, &spec).unwrap();
            assert!((v.value - harmonic(n) / n as f64).abs() < 1e-8, "n = {n}");
        }
        // int_{1/2}^1 dx / ((1 - x) log^2(1 - x)) = 1/log 2, with u = -log(1 - x)
        let u_max = 60.0;
        let v = log_gap_integral(|u| 1.0 / (u * u), 2f64.ln(), u_max, &spec).unwrap();
        assert!((v.value + 1.0 / u_max - 1.0 / 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn bad_specs_are_rejected() {
        let bad = QuadratureSpec {
            angular_nodes: 0,
            ..QuadratureSpec::default()
        };
        assert!(disk_integral(|_| 1.0, &bad).is_err());
        let bad = QuadratureSpec {
            inner_cutoff: 1.0,
            ..QuadratureSpec::default()
        };
        assert!(bad.validate().is_err());
        assert!(radial_integral(|_| 1.0, 1.0, 0.0, &QuadratureSpec::default()).is_err());
        assert!(annulus_integral(|_| 1.0, 0.5, 1.5, &QuadratureSpec::default()).is_err());
        let spec = QuadratureSpec::default();
        assert!(matches!(
            disk_integral(|_| f64::NAN, &spec),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn unresolved_integrand_reports_non_convergence() {
        let spec = QuadratureSpec {
            radial_layers: 1,
            nodes_per_layer: 2,
            angular_nodes: 2,
            ..QuadratureSpec::default()
        };
        let r = disk_integral(|z| (40.0 * z.re).sin().abs(), &spec);
        assert!(matches!(r, Err(Error::NoConvergence { .. })));
    }
}
