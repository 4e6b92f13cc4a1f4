//! Reproducing kernels of the Dirichlet space and of its restricted subspace.
//!
//! Taylor coefficients at a center `zeta`:
//!
//! * Dirichlet kernel `k_zeta`: `conj(zeta)^n / (n + 1)`, `n >= 0`
//! * restricted kernel `-log(1 - conj(zeta) z)`: `conj(zeta)^n / n`, `n >= 1`
//! * derivative kernel `dbar_zeta k_zeta`: `n conj(zeta)^(n-1) / (n + 1)`, `n >= 1`
//!
//! so that `<f, k_zeta>_D = f(zeta)` and `<f, dbar k_zeta>_D = f'(zeta)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, DiskPoint};
use crate::numeric::NeumaierSum;
use crate::series::AnalyticPoly;

/// Largest series length the kernel routines will materialize or sum.
pub const MAX_SERIES_TERMS: usize = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelKind {
    Dirichlet,
    Tilde,
    DbarDerivative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub center: DiskPoint,
    pub kind: KernelKind,
    pub truncation: usize,
}

impl KernelSpec {
    pub fn new(center: DiskPoint, kind: KernelKind, truncation: usize) -> Result<Self> {
        if truncation < 1 {
            return Err(Error::InvalidInput("kernel truncation must be >= 1".into()));
        }
        Ok(KernelSpec {
            center,
            kind,
            truncation,
        })
    }

    /// Shortest truncation whose coefficient tail is below `tolerance`.
    pub fn for_tolerance(center: DiskPoint, kind: KernelKind, tolerance: f64) -> Result<Self> {
        let needed = required_truncation(&center, tolerance);
        if needed > MAX_SERIES_TERMS {
            return Err(Error::Truncation {
                given: MAX_SERIES_TERMS,
                needed,
                tolerance,
            });
        }
        Self::new(center, kind, needed)
    }

    /// Like [`KernelSpec::new`] but rejects a truncation whose tail bound
    /// exceeds `tolerance`.
    pub fn checked(
        center: DiskPoint,
        kind: KernelKind,
        truncation: usize,
        tolerance: f64,
    ) -> Result<Self> {
        let spec = Self::new(center, kind, truncation)?;
        if spec.tail_bound() > tolerance {
            return Err(Error::Truncation {
                given: truncation,
                needed: required_truncation(&center, tolerance),
                tolerance,
            });
        }
        Ok(spec)
    }

    /// Bound on the sum of the absolute values of the dropped coefficients.
    pub fn tail_bound(&self) -> f64 {
        let r = self.center.radius();
        let n = self.truncation as f64;
        let gap = self.center.gap();
        match self.kind {
            KernelKind::Dirichlet | KernelKind::Tilde => r.powf(n + 1.0) / gap,
            KernelKind::DbarDerivative => r.powf(n) / gap,
        }
    }
}

/// `N >= log(tolerance (1 - |zeta|)) / log |zeta|`, at least 1.
pub fn required_truncation(center: &DiskPoint, tolerance: f64) -> usize {
    let r = center.radius();
    if r == 0.0 {
        return 1;
    }
    // log r = log(1 - gap), accurate for tiny gaps
    let log_r = (-center.gap()).ln_1p();
    let n = ((tolerance * center.gap()).ln() / log_r).ceil();
    if n.is_finite() && n >= 1.0 {
        n.min(usize::MAX as f64 / 2.0) as usize
    } else {
        1
    }
}

/// Truncated coefficient expansion of the requested kernel.
pub fn kernel_poly(spec: &KernelSpec) -> AnalyticPoly {
    let w = spec.center.z().conj();
    let n_max = spec.truncation;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n_max + 1];
    match spec.kind {
        KernelKind::Dirichlet => {
            let mut pow = Complex64::new(1.0, 0.0);
            for (n, c) in coeffs.iter_mut().enumerate() {
                *c = pow / (n as f64 + 1.0);
                pow *= w;
            }
        }
        KernelKind::Tilde => {
            let mut pow = w;
            for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
                *c = pow / n as f64;
                pow *= w;
            }
        }
        KernelKind::DbarDerivative => {
            let mut pow = Complex64::new(1.0, 0.0);
            for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
                *c = pow * (n as f64 / (n as f64 + 1.0));
                pow *= w;
            }
        }
    }
    AnalyticPoly::new(coeffs)
}

/// `||k_zeta||_D^2 = -log(1 - |zeta|^2) / |zeta|^2`.
pub fn dirichlet_kernel_norm_sq(center: &DiskPoint) -> f64 {
    let x = 1.0 - center.delta();
    if x < 1e-4 {
        (0..8).map(|n| x.powi(n) / (n as f64 + 1.0)).sum()
    } else {
        -center.delta().ln() / x
    }
}

/// `||dbar k_zeta||_D^2 = x/(1-x)^2 + (-log(1-x) - x)/x^2` with `x = |zeta|^2`.
pub fn dbar_kernel_norm_sq(center: &DiskPoint) -> f64 {
    let delta = center.delta();
    let x = 1.0 - delta;
    let tail = if x < 1e-3 {
        // sum_{n>=2} x^(n-2) / n
        (0..12).map(|n| x.powi(n) / (n as f64 + 2.0)).sum()
    } else {
        (-delta.ln() - x) / (x * x)
    };
    x / (delta * delta) + tail
}

/// Norm of the restricted kernel: `(-log(1 - |zeta|^2))^{1/2}`.
pub fn tilde_kernel_norm(center: &DiskPoint) -> f64 {
    (-center.delta().ln()).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelNorms {
    /// series value of `||k_zeta||_D`, or the closed form past the term cap
    pub norm_d: f64,
    pub norm_d_closed: f64,
    pub big_l: f64,
    /// `||k_zeta||_D^2 / L`
    pub norm_d_sq_over_l: f64,
    pub norm_dbar: f64,
    pub norm_dbar_closed: f64,
    /// `||dbar k_zeta||_D * delta`
    pub dbar_times_delta: f64,
    pub exact_tilde_norm: f64,
    /// number of series terms summed, `None` when only closed forms were used
    pub series_terms: Option<usize>,
}

/// Norms of `k_zeta` and `dbar k_zeta`, by series summation when affordable.
pub fn kernel_norms(center: &DiskPoint) -> KernelNorms {
    let norm_d_closed = dirichlet_kernel_norm_sq(center).sqrt();
    let norm_dbar_closed = dbar_kernel_norm_sq(center).sqrt();
    let needed = required_truncation(center, 1e-17);
    let (norm_d, norm_dbar, series_terms) = if needed <= MAX_SERIES_TERMS {
        let x = center.radius() * center.radius();
        let mut d = NeumaierSum::new();
        let mut dbar = NeumaierSum::new();
        let mut pow = 1.0; // x^n
        d.add(1.0);
        for n in 1..=needed {
            let nf = n as f64;
            // (n+1) |r^n/(n+1)|^2 and (n+1) |n r^(n-1)/(n+1)|^2
            dbar.add(nf * nf / (nf + 1.0) * pow);
            pow *= x;
            d.add(pow / (nf + 1.0));
        }
        (d.value().sqrt(), dbar.value().sqrt(), Some(needed))
    } else {
        (norm_d_closed, norm_dbar_closed, None)
    };
    KernelNorms {
        norm_d,
        norm_d_closed,
        big_l: center.big_l(),
        norm_d_sq_over_l: norm_d * norm_d / center.big_l(),
        norm_dbar,
        norm_dbar_closed,
        dbar_times_delta: norm_dbar * center.delta(),
        exact_tilde_norm: tilde_kernel_norm(center),
        series_terms,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelDifference {
    /// `sum_{n=1}^{N} |conj(p)^n - conj(q)^n|^2 / n`
    pub series_sq: f64,
    /// `-log(1 - rho^2)`
    pub closed_sq: f64,
    /// `beta - 2 log(1 + rho)`
    pub beta_form_sq: f64,
    pub terms: usize,
    pub tail_bound: f64,
}

impl KernelDifference {
    pub fn series_value(&self) -> f64 {
        self.series_sq.sqrt()
    }

    pub fn closed_form(&self) -> f64 {
        self.closed_sq.sqrt()
    }
}

/// Restricted norm of `k~_p - k~_q`, by series and by closed form.
///
/// The series is summed until its tail bound drops below `tolerance`.
pub fn kernel_diff_norm(p: &DiskPoint, q: &DiskPoint, tolerance: f64) -> Result<KernelDifference> {
    let rho = geometry::pseudo_hyperbolic(p, q);
    let closed_sq = geometry::log_kernel_gap(p, q);
    let beta_form_sq = geometry::hyperbolic(p, q) - 2.0 * rho.ln_1p();

    let (far, r) = if p.radius() >= q.radius() {
        (p, p.radius())
    } else {
        (q, q.radius())
    };
    // tail: sum_{n>N} 4 r^{2n} / n <= 4 r^{2(N+1)} / ((N+1)(1 - r^2))
    let tail = |n: usize| -> f64 {
        if r == 0.0 {
            return 0.0;
        }
        let nf = n as f64 + 1.0;
        4.0 * (2.0 * nf * (-far.gap()).ln_1p()).exp() / (nf * far.delta())
    };
    let mut terms = required_truncation(far, tolerance).max(1) / 2 + 1;
    while tail(terms) > tolerance {
        terms = terms + terms / 4 + 1;
        if terms > 4 * MAX_SERIES_TERMS {
            return Err(Error::Truncation {
                given: 4 * MAX_SERIES_TERMS,
                needed: terms,
                tolerance,
            });
        }
    }
    let wp = p.z().conj();
    let wq = q.z().conj();
    let mut pp = wp;
    let mut pq = wq;
    let mut acc = NeumaierSum::new();
    for n in 1..=terms {
        acc.add((pp - pq).norm_sqr() / n as f64);
        pp *= wp;
        pq *= wq;
    }
    Ok(KernelDifference {
        series_sq: acc.value(),
        closed_sq,
        beta_form_sq,
        terms,
        tail_bound: tail(terms),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reproduction {
    pub pairing: Complex64,
    pub point_value: Complex64,
}

impl Reproduction {
    pub fn error(&self) -> f64 {
        (self.pairing - self.point_value).norm()
    }
}

/// `<f, k_zeta>_D` against `f(zeta)`, with the kernel truncated at `deg f`.
pub fn reproduce(f: &AnalyticPoly, center: &DiskPoint) -> Result<Reproduction> {
    let spec = KernelSpec::new(*center, KernelKind::Dirichlet, f.degree().max(1))?;
    let k = kernel_poly(&spec);
    Ok(Reproduction {
        pairing: f.dirichlet_pair(&k),
        point_value: f.evaluate(center.z())?,
    })
}

/// `<f, dbar k_zeta>_D` against `f'(zeta)`.
pub fn reproduce_derivative(f: &AnalyticPoly, center: &DiskPoint) -> Result<Reproduction> {
    let spec = KernelSpec::new(*center, KernelKind::DbarDerivative, f.degree().max(1))?;
    let k = kernel_poly(&spec);
    Ok(Reproduction {
        pairing: f.dirichlet_pair(&k),
        point_value: f.differentiate().evaluate(center.z())?,
    })
}
