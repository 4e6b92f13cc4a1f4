//! Carleson measures for the Dirichlet space.
//!
//! For a radial measure the embedding `int |f|^2 dmu <= C^2 ||f||_D^2` is
//! diagonal in the monomials: `int |f|^2 dmu = sum |a_k|^2 m_k` with moments
//! `m_k = int |z|^{2k} dmu`, so `C^2 = sup_k m_k / (k + 1)` exactly. The
//! module also covers the segment sufficient condition, exact `X` norms of
//! monomials, the coefficient conditions for `X`, the Dirichlet projection of
//! an atomic measure and its balayage.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{self, DiskPoint, PointRecord};
use crate::numeric::{ComplexSum, NeumaierSum};
use crate::series::AnalyticPoly;
use crate::weak_product::Factorization;

/// A point mass spread uniformly over the circle `|z| = radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialAtom {
    radius: f64,
    /// `1 - radius`, kept separately so atoms very close to the circle keep
    /// accurate moments
    gap: f64,
    weight: f64,
}

impl RadialAtom {
    pub fn new(radius: f64, weight: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&radius) {
            return Err(Error::InvalidInput(format!(
                "atom radius {radius} outside [0, 1)"
            )));
        }
        Self::from_gap(1.0 - radius, weight)
    }

    pub fn from_gap(gap: f64, weight: f64) -> Result<Self> {
        if !(gap > 0.0 && gap <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "atom gap {gap} outside (0, 1]"
            )));
        }
        if !(weight >= 0.0 && weight.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "atom weight {weight} must be >= 0"
            )));
        }
        Ok(RadialAtom {
            radius: 1.0 - gap,
            gap,
            weight,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// `radius^{2k}`
    fn power(&self, k: usize) -> f64 {
        if k == 0 {
            1.0
        } else if self.gap == 1.0 {
            0.0
        } else {
            (2.0 * k as f64 * (-self.gap).ln_1p()).exp()
        }
    }
}

/// Anything with computable radial moments `m_k = int |z|^{2k} dmu`.
pub trait MomentSource {
    fn moment(&self, k: usize) -> f64;
    /// Upper bound on `|z|` over the support.
    fn max_radius(&self) -> f64;
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RadialMeasure {
    atoms: Vec<RadialAtom>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RadialRecord {
    r: f64,
    w: f64,
}

impl RadialMeasure {
    pub fn new(atoms: Vec<RadialAtom>) -> Self {
        RadialMeasure { atoms }
    }

    /// Build from `(radius, weight)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        pairs
            .iter()
            .map(|&(r, w)| RadialAtom::new(r, w))
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    /// Discretization of `dx / ((1 - x) log^2(1 - x))` on `[x0, 1)`.
    ///
    /// In `u = -log(1 - x)` the measure is `du / u^2`. The atoms sit at the
    /// left ends of `cells` geometric cells between `u0` and `u_last`, each
    /// carrying the exact mass of its cell; the last atom also carries the
    /// whole tail `1 / u_last`. Hence `mu([x_i, 1)) = 1 / u_i` at every atom.
    pub fn log_tail(x0: f64, cells: usize, u_last: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&x0) || cells < 1 {
            return Err(Error::InvalidInput(
                "log-tail needs x0 in [0, 1), cells >= 1".into(),
            ));
        }
        let u0 = -(-x0).ln_1p();
        if !(u0 > 0.0 && u_last > u0) {
            return Err(Error::InvalidInput("log-tail needs 0 < u0 < u_last".into()));
        }
        let ratio = (u_last / u0).powf(1.0 / cells as f64);
        let us: Vec<f64> = (0..=cells).map(|i| u0 * ratio.powi(i as i32)).collect();
        let mut atoms = Vec::with_capacity(cells + 1);
        for i in 0..cells {
            atoms.push(RadialAtom::from_gap(
                (-us[i]).exp(),
                1.0 / us[i] - 1.0 / us[i + 1],
            )?);
        }
        atoms.push(RadialAtom::from_gap((-u_last).exp(), 1.0 / u_last)?);
        Ok(Self::new(atoms))
    }

    pub fn atoms(&self) -> &[RadialAtom] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.weight)
            .collect::<NeumaierSum>()
            .value()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        self.atoms
            .iter()
            .map(|a| RadialAtom::from_gap(a.gap, a.weight * c))
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let recs: Vec<RadialRecord> = serde_json::from_str(text)?;
        let pairs: Vec<(f64, f64)> = recs.iter().map(|r| (r.r, r.w)).collect();
        Self::from_pairs(&pairs)
    }

    pub fn to_json_string(&self) -> String {
        let recs: Vec<RadialRecord> = self
            .atoms
            .iter()
            .map(|a| RadialRecord {
                r: a.radius,
                w: a.weight,
            })
            .collect();
        serde_json::to_string(&recs).expect("records serialize")
    }
}

impl MomentSource for RadialMeasure {
    fn moment(&self, k: usize) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.weight * a.power(k))
            .collect::<NeumaierSum>()
            .value()
    }

    fn max_radius(&self) -> f64 {
        self.atoms
            .iter()
            .filter(|a| a.weight > 0.0)
            .map(|a| a.radius)
            .fold(0.0, f64::max)
    }
}

/// `|f'|^2 dA` for `f = c z^n`, with exact moments `|c|^2 n^2 / (k + n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeMonomialMeasure {
    pub n: usize,
    pub c: Complex64,
}

impl MomentSource for DerivativeMonomialMeasure {
    fn moment(&self, k: usize) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        let n = self.n as f64;
        self.c.norm_sqr() * (n * n / (k as f64 + n))
    }

    fn max_radius(&self) -> f64 {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CarlesonNorm {
    pub norm_sq: f64,
    pub norm: f64,
    pub argmax_k: usize,
}

/// `sup_k m_k / (k + 1)` with the maximizing index.
///
/// The scan stops once `min(r_max^{2(K+1)} m_0, m_K) / (K + 2)`, which bounds
/// every later ratio, no longer exceeds the running maximum.
pub fn cm_norm_radial<M: MomentSource + ?Sized>(mu: &M) -> CarlesonNorm {
    let m0 = mu.moment(0);
    let r_max = mu.max_radius();
    let mut best = m0;
    let mut argmax = 0;
    let mut k = 0usize;
    loop {
        let mk = mu.moment(k);
        let ratio = mk / (k as f64 + 1.0);
        if ratio > best {
            best = ratio;
            argmax = k;
        }
        let decay = if r_max < 1.0 {
            (2.0 * (k as f64 + 1.0) * r_max.ln()).exp() * m0
        } else {
            f64::INFINITY
        };
        if decay.min(mk) / (k as f64 + 2.0) <= best {
            break;
        }
        k += 1;
    }
    CarlesonNorm {
        norm_sq: best,
        norm: best.sqrt(),
        argmax_k: argmax,
    }
}

/// `(int |f|^2 dmu)^{1/2}` for a radial measure, through the moments.
pub fn embedding_norm(f: &AnalyticPoly, mu: &RadialMeasure) -> f64 {
    f.coeffs()
        .iter()
        .enumerate()
        .map(|(k, a)| a.norm_sqr() * mu.moment(k))
        .collect::<NeumaierSum>()
        .value()
        .sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmbeddingCheck {
    /// largest `||f||_{L^2(mu)} / ||f||_D` seen
    pub worst_ratio: f64,
    pub norm: f64,
    /// the ratio at the monomial `z^{argmax_k}`
    pub extremal_ratio: f64,
}

/// Compare the embedding ratio of random polynomials with the computed norm.
pub fn cm_embedding_check(mu: &RadialMeasure, trials: usize, seed: u64) -> EmbeddingCheck {
    let cm = cm_norm_radial(mu);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let degree = rng.random_range(0..40usize);
        let coeffs: Vec<Complex64> = (0..=degree)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let f = AnalyticPoly::new(coeffs);
        if f.is_zero() {
            continue;
        }
        worst = worst.max(embedding_norm(&f, mu) / f.dirichlet_norm());
    }
    let extremal = AnalyticPoly::monomial(cm.argmax_k, Complex64::new(1.0, 0.0));
    let extremal_ratio = embedding_norm(&extremal, mu) / extremal.dirichlet_norm();
    EmbeddingCheck {
        worst_ratio: worst.max(extremal_ratio),
        norm: cm.norm,
        extremal_ratio,
    }
}

/// `sup_x mu([x, 1)) |log(1 - x)|` over the atom radii.
pub fn segment_sufficient_constant(mu: &RadialMeasure) -> Result<f64> {
    if let Some(a) = mu.atoms.iter().find(|a| a.radius < 0.5) {
        return Err(Error::Precondition(format!(
            "atom at radius {} lies below 1/2",
            a.radius
        )));
    }
    let mut atoms = mu.atoms.clone();
    atoms.sort_by(|a, b| a.gap.total_cmp(&b.gap));
    let mut tail = NeumaierSum::new();
    let mut best: f64 = 0.0;
    let mut i = 0;
    while i < atoms.len() {
        // atoms sharing a radius enter the tail together
        let gap = atoms[i].gap;
        while i < atoms.len() && atoms[i].gap == gap {
            tail.add(atoms[i].weight);
            i += 1;
        }
        best = best.max(tail.value() * -gap.ln());
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XNorm {
    pub norm_sq: f64,
    pub norm: f64,
    pub argmax_k: usize,
}

/// `||c z^n||_X` from `||f||_X^2 = |f(0)|^2 + C(|f'|^2 dA)^2`.
pub fn x_norm_monomial(n: usize, c: Complex64) -> XNorm {
    if n == 0 {
        return XNorm {
            norm_sq: c.norm_sqr(),
            norm: c.norm(),
            argmax_k: 0,
        };
    }
    let cm = cm_norm_radial(&DerivativeMonomialMeasure { n, c });
    XNorm {
        norm_sq: cm.norm_sq,
        norm: cm.norm_sq.sqrt(),
        argmax_k: cm.argmax_k,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XSufficientTests {
    /// `sup_n |b_n| (n + 1)(1 + log(n + 1))`
    pub cond_2a: f64,
    /// `sum_n n log(n + 1) |b_n|^2`
    pub cond_2b: f64,
}

/// Coefficient quantities whose finiteness certifies membership in `X`.
pub fn x_sufficient_tests(b: &AnalyticPoly) -> XSufficientTests {
    let mut cond_2a: f64 = 0.0;
    let mut cond_2b = NeumaierSum::new();
    for (n, c) in b.coeffs().iter().enumerate() {
        let lg = (n as f64).ln_1p();
        cond_2a = cond_2a.max(c.norm() * (n as f64 + 1.0) * (1.0 + lg));
        cond_2b.add(n as f64 * lg * c.norm_sqr());
    }
    XSufficientTests {
        cond_2a,
        cond_2b: cond_2b.value(),
    }
}

/// A finite complex combination of point masses in the disk.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComplexAtomicMeasure {
    pub atoms: Vec<(DiskPoint, Complex64)>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct AtomRecord {
    arg: f64,
    delta: f64,
    w_re: f64,
    w_im: f64,
}

impl ComplexAtomicMeasure {
    pub fn new(atoms: Vec<(DiskPoint, Complex64)>) -> Self {
        ComplexAtomicMeasure { atoms }
    }

    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| w.norm()).sum()
    }

    pub fn total_mass(&self) -> Complex64 {
        let mut acc = ComplexSum::new();
        for (_, w) in &self.atoms {
            acc.add(*w);
        }
        acc.value()
    }

    pub fn is_real_nonnegative(&self) -> bool {
        self.atoms.iter().all(|(_, w)| w.im == 0.0 && w.re >= 0.0)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let recs: Vec<AtomRecord> = serde_json::from_str(text)?;
        let mut atoms = Vec::with_capacity(recs.len());
        for r in recs {
            if !(r.w_re.is_finite() && r.w_im.is_finite()) {
                return Err(Error::NonFinite {
                    field: "weight".into(),
                });
            }
            let p = DiskPoint::from_record(PointRecord {
                arg: r.arg,
                delta: r.delta,
            })?;
            atoms.push((p, Complex64::new(r.w_re, r.w_im)));
        }
        Ok(Self::new(atoms))
    }

    pub fn to_json_string(&self) -> String {
        let recs: Vec<AtomRecord> = self
            .atoms
            .iter()
            .map(|(p, w)| AtomRecord {
                arg: p.arg(),
                delta: p.delta(),
                w_re: w.re,
                w_im: w.im,
            })
            .collect();
        serde_json::to_string(&recs).expect("records serialize")
    }
}

/// Taylor coefficients `c_n = conj(sum_i w_i z_i^n) / n`, `n = 1..N`, of the
/// projection `w -> int log(1 / (1 - w conj(z))) d conj(mu)(z)`.
pub fn dirichlet_projection(mu: &ComplexAtomicMeasure, n_max: usize) -> Result<AnalyticPoly> {
    if n_max < 1 {
        return Err(Error::InvalidInput("projection length must be >= 1".into()));
    }
    let mut sums = vec![ComplexSum::new(); n_max + 1];
    for (p, w) in &mu.atoms {
        let z = p.z();
        let mut pow = *w;
        for s in sums.iter_mut().skip(1) {
            pow *= z;
            s.add(pow);
        }
    }
    let coeffs = sums
        .iter()
        .enumerate()
        .map(|(n, s)| {
            if n == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                s.value().conj() / n as f64
            }
        })
        .collect();
    Ok(AnalyticPoly::new(coeffs))
}

/// The projection in closed form: `sum_i conj(w_i) log(1 / (1 - w conj(z_i)))`.
pub fn projection_value(mu: &ComplexAtomicMeasure, w: &DiskPoint) -> Complex64 {
    let mut acc = ComplexSum::new();
    for (p, weight) in &mu.atoms {
        let one_minus = geometry::one_minus_conj_product(p, w);
        acc.add(-weight.conj() * one_minus.ln());
    }
    acc.value()
}

/// `B_mu(w) = int (pi + arg(1 - w conj(z))) dmu(z)` for a nonnegative measure.
pub fn balayage(mu: &ComplexAtomicMeasure, w: &DiskPoint) -> Result<f64> {
    if !mu.is_real_nonnegative() {
        return Err(Error::Precondition(
            "balayage needs real nonnegative weights".into(),
        ));
    }
    let mut acc = NeumaierSum::new();
    for (p, weight) in &mu.atoms {
        let one_minus = geometry::one_minus_conj_product(p, w);
        acc.add(weight.re * (PI + one_minus.arg()));
    }
    Ok(acc.value())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Majorant {
    pub b: AnalyticPoly,
    pub bound: f64,
}

/// Coefficientwise majorant `sum_j |f_j| * |g_j|` of a factorized function.
pub fn majorant(factorization: &Factorization) -> Result<Majorant> {
    if factorization.pairs.is_empty() {
        return Err(Error::InvalidInput(
            "majorant of an empty factorization".into(),
        ));
    }
    let mut b = AnalyticPoly::zero();
    let mut bound = NeumaierSum::new();
    for (f, g) in &factorization.pairs {
        let ff = f.modulus_coeffs();
        let gg = g.modulus_coeffs();
        b = &b + &ff.multiply(&gg);
        bound.add(ff.dirichlet_norm() * gg.dirichlet_norm());
    }
    Ok(Majorant {
        b,
        bound: bound.value(),
    })
}
