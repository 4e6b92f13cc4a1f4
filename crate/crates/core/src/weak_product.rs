//! The weak product `D ⊙ D`: functions `h = sum_j f_j g_j` normed by the
//! infimum of `sum_j ||f_j||_D ||g_j||_D` over all such representations.
//!
//! Any explicit factorization gives an upper bound. The optimizer below
//! searches for good ones by alternating minimization; lower bounds come from
//! Carleson measures (rigorous, constant 1) or from pairing with monomials
//! (valid only up to an unknown universal constant).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::carleson::{cm_norm_radial, x_norm_monomial, MomentSource, RadialMeasure};
use crate::error::{Error, Result};
use crate::numeric::NeumaierSum;
use crate::series::AnalyticPoly;

/// Residuals with `||r||_D <= FEASIBILITY_TOL * max(1, ||h||_D)` count as zero.
pub const FEASIBILITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub pairs: Vec<(AnalyticPoly, AnalyticPoly)>,
    pub target: AnalyticPoly,
    /// `target - sum_j f_j g_j`
    pub residual: AnalyticPoly,
}

#[derive(Serialize, Deserialize)]
struct FactorizationRecord {
    target: AnalyticPoly,
    pairs: Vec<(AnalyticPoly, AnalyticPoly)>,
}

fn product_sum(pairs: &[(AnalyticPoly, AnalyticPoly)]) -> AnalyticPoly {
    let mut acc = AnalyticPoly::zero();
    for (f, g) in pairs {
        acc = &acc + &f.multiply(g);
    }
    acc
}

impl Factorization {
    pub fn new(target: AnalyticPoly, pairs: Vec<(AnalyticPoly, AnalyticPoly)>) -> Self {
        let residual = &target - &product_sum(&pairs);
        Factorization {
            pairs,
            target,
            residual,
        }
    }

    /// The split `h = h * 1`.
    pub fn trivial(h: &AnalyticPoly) -> Self {
        Self::new(h.clone(), vec![(h.clone(), AnalyticPoly::one())])
    }

    pub fn is_valid(&self) -> bool {
        self.residual.dirichlet_norm() <= FEASIBILITY_TOL * self.target.dirichlet_norm().max(1.0)
    }

    /// `sum_j ||f_j||_D ||g_j||_D`, without checking feasibility.
    pub fn raw_bound(&self) -> f64 {
        self.pairs
            .iter()
            .map(|(f, g)| f.dirichlet_norm() * g.dirichlet_norm())
            .collect::<NeumaierSum>()
            .value()
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let rec: FactorizationRecord = serde_json::from_str(text)?;
        Ok(Self::new(rec.target, rec.pairs))
    }

    pub fn to_json_string(&self) -> String {
        let rec = FactorizationRecord {
            target: self.target.clone(),
            pairs: self.pairs.clone(),
        };
        serde_json::to_string(&rec).expect("factorization serializes")
    }
}

/// Certified upper bound on `||h||_{D⊙D}` from a valid factorization.
pub fn upper_bound(factorization: &Factorization) -> Result<f64> {
    let residual = factorization.residual.dirichlet_norm();
    if !factorization.is_valid() {
        return Err(Error::Infeasible {
            residual,
            tolerance: FEASIBILITY_TOL * factorization.target.dirichlet_norm().max(1.0),
        });
    }
    Ok(factorization.raw_bound())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOptions {
    pub pairs: usize,
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
    /// relative decrease of the objective below which a restart stops
    pub tolerance: f64,
    /// degree of every factor; defaults to `deg h`
    pub factor_degree: Option<usize>,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            pairs: 2,
            restarts: 4,
            iterations: 60,
            seed: 0,
            tolerance: 1e-10,
            factor_degree: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimized {
    pub factorization: Factorization,
    pub bound: f64,
    pub best_restart: usize,
    pub restart_bounds: Vec<f64>,
    /// objective after every sweep of the winning restart
    pub trace: Vec<f64>,
}

type Pairs = Vec<(Vec<Complex64>, Vec<Complex64>)>;

fn dnorm_sq(c: &[Complex64]) -> f64 {
    c.iter()
        .enumerate()
        .map(|(n, a)| (n as f64 + 1.0) * a.norm_sqr())
        .collect::<NeumaierSum>()
        .value()
}

fn padded(p: &AnalyticPoly, len: usize) -> Vec<Complex64> {
    (0..len).map(|n| p.coeff(n)).collect()
}

/// Product sum of coefficient vectors, length `2d + 1`.
fn residual_of(target: &[Complex64], pairs: &Pairs) -> Vec<Complex64> {
    let mut r = target.to_vec();
    for (f, g) in pairs {
        for (i, a) in f.iter().enumerate() {
            if *a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, b) in g.iter().enumerate() {
                r[i + j] -= a * b;
            }
        }
    }
    r
}

/// With the `fixed` factors held, the minimal `sum ||free_j||_D^2` subject to
/// `sum free_j fixed_j = target`, or `None` when the system is inconsistent.
fn half_step(
    target: &[Complex64],
    fixed: &[Vec<Complex64>],
    d: usize,
) -> Option<Vec<Vec<Complex64>>> {
    let rows = 2 * d + 1;
    let m = fixed.len();
    let cols = m * (d + 1);
    let mut a = DMatrix::<Complex64>::zeros(rows, cols);
    for (j, g) in fixed.iter().enumerate() {
        for k in 0..=d {
            let scale = 1.0 / (k as f64 + 1.0).sqrt();
            for (i, gi) in g.iter().enumerate() {
                a[(i + k, j * (d + 1) + k)] = gi * scale;
            }
        }
    }
    let b = DVector::from_column_slice(target);
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return None;
    }
    let y = svd.solve(&b, 1e-13 * smax).ok()?;
    let free = (0..m)
        .map(|j| {
            (0..=d)
                .map(|k| y[j * (d + 1) + k] / (k as f64 + 1.0).sqrt())
                .collect()
        })
        .collect();
    Some(free)
}

fn rebalance(pairs: &mut Pairs) {
    for (f, g) in pairs.iter_mut() {
        let nf = dnorm_sq(f).sqrt();
        let ng = dnorm_sq(g).sqrt();
        if nf == 0.0 || ng == 0.0 {
            // a pair with one zero side contributes nothing; the other side
            // stays as a direction for the next half step
            continue;
        }
        let t = (ng / nf).sqrt();
        f.iter_mut().for_each(|c| *c *= t);
        g.iter_mut().for_each(|c| *c /= t);
    }
}

fn surrogate(pairs: &Pairs) -> f64 {
    pairs
        .iter()
        .map(|(f, g)| 0.5 * (dnorm_sq(f) + dnorm_sq(g)))
        .collect::<NeumaierSum>()
        .value()
}

/// Random coefficients up to degree `d / 2`, zero-padded to length `d + 1`.
fn random_poly(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> Vec<Complex64> {
    let live = d / 2;
    (0..=d)
        .map(|n| {
            if n > live {
                return Complex64::new(0.0, 0.0);
            }
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale
                / (live as f64 + 1.0)
        })
        .collect()
}

/// `(h - sum of the given pairs, 1)` prepended, so the start is feasible.
/// The given pairs must have products of degree at most `d`.
fn close_with_trivial(h: &AnalyticPoly, d: usize, rest: Pairs) -> Pairs {
    let remainder = residual_of(&padded(h, 2 * d + 1), &rest);
    let mut one = vec![Complex64::new(0.0, 0.0); d + 1];
    one[0] = Complex64::new(1.0, 0.0);
    let mut pairs = vec![(remainder[..=d].to_vec(), one)];
    pairs.extend(rest);
    pairs
}

/// Start from `h = z^v u`: pairs `(z^a s, z^b s)` with `s ~ sqrt(u)`.
fn root_start(h: &AnalyticPoly, d: usize) -> Option<Pairs> {
    let v = h.valuation()?;
    let u = AnalyticPoly::new(h.coeffs()[v..].to_vec());
    let half = u.degree().div_ceil(2);
    let s = u.sqrt_series(half).ok()?;
    let a = v / 2;
    let b = v - a;
    if a + s.degree() > d || b + s.degree() > d {
        return None;
    }
    let f = padded(&s.shift(a), d + 1);
    let g = padded(&s.shift(b), d + 1);
    let pairs = vec![(f, g)];
    let r = residual_of(&padded(h, 2 * d + 1), &pairs);
    if r[d + 1..]
        .iter()
        .any(|c| c.norm() > 1e-14 * h.dirichlet_norm().max(1.0))
    {
        return None;
    }
    let mut out = pairs;
    let low: Vec<Complex64> = r[..=d].to_vec();
    if low.iter().any(|c| c.norm() > 0.0) {
        let mut one = vec![Complex64::new(0.0, 0.0); d + 1];
        one[0] = Complex64::new(1.0, 0.0);
        out.push((low, one));
    }
    Some(out)
}

fn starting_pairs(h: &AnalyticPoly, d: usize, opts: &OptimizeOptions, restart: usize) -> Pairs {
    let mut rng = ChaCha8Rng::seed_from_u64(
        opts.seed
            .wrapping_mul(0x9E37_79B9)
            .wrapping_add(restart as u64),
    );
    let extra = opts.pairs.saturating_sub(1);
    let hn = h.dirichlet_norm().max(1e-300);
    let mut pairs = match restart {
        // the exact trivial split; padding below supplies the other pairs
        0 => close_with_trivial(h, d, Vec::new()),
        1 => root_start(h, d).unwrap_or_else(|| close_with_trivial(h, d, Vec::new())),
        _ => {
            let rest = (0..extra)
                .map(|_| {
                    (
                        random_poly(&mut rng, d, hn.sqrt()),
                        random_poly(&mut rng, d, hn.sqrt()),
                    )
                })
                .collect();
            close_with_trivial(h, d, rest)
        }
    };
    // pad to the requested pair count with pairs whose first factor is zero
    while pairs.len() < opts.pairs {
        pairs.push((
            vec![Complex64::new(0.0, 0.0); d + 1],
            random_poly(&mut rng, d, 1e-3 * hn.sqrt()),
        ));
    }
    pairs
}

fn run_restart(
    h: &AnalyticPoly,
    d: usize,
    opts: &OptimizeOptions,
    restart: usize,
) -> (Pairs, Vec<f64>) {
    let target = padded(h, 2 * d + 1);
    let feas = 1e-10 * h.dirichlet_norm().max(1.0);
    let mut pairs = starting_pairs(h, d, opts, restart);
    rebalance(&mut pairs);
    let mut current = surrogate(&pairs);
    let mut trace = vec![current];
    let mut best = (bound_of(&pairs), pairs.clone());
    for _ in 0..opts.iterations {
        let before = current;
        for side in 0..2 {
            let fixed: Vec<Vec<Complex64>> = pairs
                .iter()
                .map(|(f, g)| if side == 0 { g.clone() } else { f.clone() })
                .collect();
            let Some(free) = half_step(&target, &fixed, d) else {
                continue;
            };
            let mut candidate = pairs.clone();
            for (pair, new) in candidate.iter_mut().zip(free) {
                if side == 0 {
                    pair.0 = new;
                } else {
                    pair.1 = new;
                }
            }
            let res = dnorm_sq(&residual_of(&target, &candidate)).sqrt();
            let value = surrogate(&candidate);
            if res <= feas && value <= current * (1.0 + 1e-14) {
                pairs = candidate;
                current = value.min(current);
            }
        }
        rebalance(&mut pairs);
        current = surrogate(&pairs);
        trace.push(current);
        let bound = bound_of(&pairs);
        if bound < best.0 {
            best = (bound, pairs.clone());
        }
        if before - current <= opts.tolerance * current {
            break;
        }
    }
    (best.1, trace)
}

/// `sum ||f_j||_D ||g_j||_D` of coefficient vectors.
fn bound_of(pairs: &Pairs) -> f64 {
    pairs
        .iter()
        .map(|(f, g)| (dnorm_sq(f) * dnorm_sq(g)).sqrt())
        .collect::<NeumaierSum>()
        .value()
}

fn to_factorization(h: &AnalyticPoly, pairs: Pairs) -> Factorization {
    let mut polys: Vec<(AnalyticPoly, AnalyticPoly)> = pairs
        .into_iter()
        .map(|(f, g)| (AnalyticPoly::new(f), AnalyticPoly::new(g)))
        .filter(|(f, g)| !f.is_zero() && !g.is_zero())
        .collect();
    let residual = h - &product_sum(&polys);
    if !residual.is_zero() {
        polys.push((residual, AnalyticPoly::one()));
    }
    Factorization::new(h.clone(), polys)
}

/// Search for a factorization of `h` with a small bound.
///
/// Every restart starts from a feasible point and only accepts steps that
/// keep the product equal to `h` and do not increase
/// `1/2 sum (||f_j||^2 + ||g_j||^2)`; after each sweep the pairs are
/// rebalanced. Each restart returns its iterate of smallest bound, and the
/// first restart starts from the split `h * 1`, so the result never exceeds
/// `||h||_D`. The final rounding residual is absorbed as one extra pair `(r, 1)`.
pub fn optimize_factorization(h: &AnalyticPoly, opts: &OptimizeOptions) -> Result<Optimized> {
    if opts.pairs < 1 || opts.restarts < 1 {
        return Err(Error::InvalidInput(
            "need at least one pair and one restart".into(),
        ));
    }
    if !h.is_finite() {
        return Err(Error::NonFinite {
            field: "target".into(),
        });
    }
    if h.is_zero() {
        return Ok(Optimized {
            factorization: Factorization::new(h.clone(), Vec::new()),
            bound: 0.0,
            best_restart: 0,
            restart_bounds: vec![0.0],
            trace: vec![0.0],
        });
    }
    let d = opts.factor_degree.unwrap_or(h.degree()).max(h.degree());
    let runs: Vec<(Factorization, f64, Vec<f64>)> = (0..opts.restarts)
        .into_par_iter()
        .map(|restart| {
            let (pairs, trace) = run_restart(h, d, opts, restart);
            let fact = to_factorization(h, pairs);
            let bound = fact.raw_bound();
            (fact, bound, trace)
        })
        .collect();
    let restart_bounds: Vec<f64> = runs.iter().map(|r| r.1).collect();
    let (best_restart, _) = restart_bounds
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
        .expect("at least one restart");
    let (factorization, bound, trace) = runs.into_iter().nth(best_restart).expect("index valid");
    if !factorization.is_valid() {
        return Err(Error::Infeasible {
            residual: factorization.residual.dirichlet_norm(),
            tolerance: FEASIBILITY_TOL * h.dirichlet_norm().max(1.0),
        });
    }
    Ok(Optimized {
        factorization,
        bound,
        best_restart,
        restart_bounds,
        trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowerKind {
    RadialMeasure,
    Duality,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormBracket {
    pub lower: f64,
    pub upper: f64,
    pub lower_kind: LowerKind,
    pub description: String,
}

/// Average of `|h|` over `|z| = r`, minus the worst-case trapezoid error, so
/// the value never exceeds the true average.
fn circle_average_lower(h: &AnalyticPoly, r: f64) -> f64 {
    if r == 0.0 {
        return h.coeff(0).norm();
    }
    let m = (16 * (h.degree() + 1)).max(256);
    let sum: NeumaierSum = (0..m)
        .map(|j| {
            let z = Complex64::from_polar(r, 2.0 * PI * j as f64 / m as f64);
            h.eval_raw(z).norm()
        })
        .collect();
    // |h| is Lipschitz in theta with constant sum n |h_n| r^n
    let lip: f64 = h
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| n as f64 * c.norm() * r.powi(n as i32))
        .sum();
    (sum.value() / m as f64 - lip * PI / (2.0 * m as f64)).max(0.0)
}

/// `int |h| dmu / C(mu)^2`, a lower bound for `||h||_{D⊙D}` with constant 1.
pub fn lower_certificate_measure(h: &AnalyticPoly, mu: &RadialMeasure) -> Result<f64> {
    let cm = cm_norm_radial(mu);
    if !(cm.norm_sq > 0.0) {
        return Err(Error::Precondition("measure has zero Carleson norm".into()));
    }
    let integral: NeumaierSum = mu
        .atoms()
        .iter()
        .filter(|a| a.weight() > 0.0)
        .map(|a| a.weight() * circle_average_lower(h, a.radius()))
        .collect();
    Ok(integral.value() / cm.norm_sq)
}

/// `|<h, z^n>_D| / ||z^n||_X = (n + 1)|h_n| / sqrt(n)`.
pub fn lower_certificate_duality(h: &AnalyticPoly, n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidInput(
            "duality certificate needs n >= 1".into(),
        ));
    }
    let x = x_norm_monomial(n, Complex64::new(1.0, 0.0));
    Ok((n as f64 + 1.0) * h.coeff(n).norm() / x.norm)
}

/// The largest duality certificate over `1 <= n <= deg h`, with its index.
pub fn best_duality_certificate(h: &AnalyticPoly) -> (usize, f64) {
    (1..=h.degree().max(1))
        .map(|n| (n, lower_certificate_duality(h, n).unwrap_or(0.0)))
        .fold(
            (1, 0.0),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        )
}

/// Pair a measure certificate with a factorization bound.
pub fn norm_bracket(
    h: &AnalyticPoly,
    factorization: &Factorization,
    mu: &RadialMeasure,
) -> Result<NormBracket> {
    let upper = upper_bound(factorization)?;
    let lower = lower_certificate_measure(h, mu)?;
    Ok(NormBracket {
        lower,
        upper,
        lower_kind: LowerKind::RadialMeasure,
        description: format!(
            "radial measure with {} atoms, Carleson norm^2 {:e}",
            mu.atoms().len(),
            mu.moment(0)
        ),
    })
}

/// `sum_n |a_n| / (1 + log(n + 1))`.
pub fn hardy_type_sum(a: &AnalyticPoly) -> f64 {
    a.coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| c.norm() / (1.0 + (n as f64).ln_1p()))
        .collect::<NeumaierSum>()
        .value()
}

/// `sum_{n in set} n |f_n|^2`.
pub fn paley_sum(f: &AnalyticPoly, set: &[usize]) -> f64 {
    set.iter()
        .map(|&n| n as f64 * f.coeff(n).norm_sqr())
        .collect::<NeumaierSum>()
        .value()
}

/// Smallest consecutive ratio `n_{k+1} / n_k` of a strictly increasing set of
/// positive integers; `None` for fewer than two elements or an invalid set.
pub fn lacunary_ratio(set: &[usize]) -> Option<f64> {
    if set.len() < 2 || set[0] == 0 {
        return None;
    }
    let mut best = f64::INFINITY;
    for w in set.windows(2) {
        if w[1] <= w[0] {
            return None;
        }
        best = best.min(w[1] as f64 / w[0] as f64);
    }
    Some(best)
}

/// Whether `n_{k+1} / n_k > q` for all consecutive elements.
pub fn is_lacunary(set: &[usize], q: f64) -> bool {
    if q <= 1.0 {
        return false;
    }
    match set.len() {
        0 => false,
        1 => set[0] > 0,
        _ => lacunary_ratio(set).is_some_and(|r| r > q),
    }
}

/// Rewrite every pair with squares: `fg = ((f+g)/2)^2 - ((f-g)/2)^2`, after
/// balancing `||f|| = ||g||`.
pub fn polarize(factorization: &Factorization) -> Factorization {
    let mut pairs = Vec::with_capacity(2 * factorization.pairs.len());
    for (f, g) in &factorization.pairs {
        let nf = f.dirichlet_norm();
        let ng = g.dirichlet_norm();
        if nf == 0.0 || ng == 0.0 {
            continue;
        }
        let t = (ng / nf).sqrt();
        let f = f.scale_real(t);
        let g = g.scale_real(1.0 / t);
        let a = (&f + &g).scale_real(0.5);
        let b = (&f - &g).scale_real(0.5);
        pairs.push((a.clone(), a));
        pairs.push((-&b, b));
    }
    Factorization::new(factorization.target.clone(), pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn upper_bound_examples() {
        let f = AnalyticPoly::from_real(&[1.0, 0.5, -0.25]);
        let sq = Factorization::new(f.multiply(&f), vec![(f.clone(), f.clone())]);
        assert!((upper_bound(&sq).unwrap() - f.dirichlet_norm_sq()).abs() < 1e-14);
        let z5 = AnalyticPoly::monomial(5, c(1.0, 0.0));
        assert!((upper_bound(&Factorization::trivial(&z5)).unwrap() - 6f64.sqrt()).abs() < 1e-15);
        let empty = Factorization::new(AnalyticPoly::zero(), Vec::new());
        assert_eq!(upper_bound(&empty).unwrap(), 0.0);
        let wrong =
            Factorization::new(z5.clone(), vec![(AnalyticPoly::one(), AnalyticPoly::one())]);
        assert!(matches!(upper_bound(&wrong), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn optimizer_beats_trivial_split() {
        let h = AnalyticPoly::from_real(&[1.0, 2.0, 1.0]);
        let opts = OptimizeOptions {
            pairs: 1,
            ..OptimizeOptions::default()
        };
        let out = optimize_factorization(&h, &opts).unwrap();
        assert!(out.factorization.is_valid());
        assert!(out.bound <= 3.0 + 1e-12, "{}", out.bound);
        assert!(out.bound <= h.dirichlet_norm() + 1e-12);
        let z2 = AnalyticPoly::monomial(2, c(1.0, 0.0));
        let out = optimize_factorization(&z2, &opts).unwrap();
        assert!(out.bound <= 3f64.sqrt() + 1e-12);
        for w in out.trace.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn optimizer_is_deterministic() {
        let h = AnalyticPoly::new(vec![c(0.3, 1.0), c(-1.0, 0.2), c(0.5, 0.5), c(0.0, -0.7)]);
        let opts = OptimizeOptions {
            pairs: 3,
            restarts: 3,
            iterations: 15,
            seed: 11,
            ..OptimizeOptions::default()
        };
        let a = optimize_factorization(&h, &opts).unwrap();
        let b = optimize_factorization(&h, &opts).unwrap();
        assert_eq!(a.bound, b.bound);
        assert_eq!(a.factorization, b.factorization);
        assert!(a.restart_bounds.iter().all(|&x| a.bound <= x));
    }

    #[test]
    fn certificates() {
        let unit = RadialMeasure::from_pairs(&[(0.0, 1.0)]).unwrap();
        assert_eq!(
            lower_certificate_measure(&AnalyticPoly::one(), &unit).unwrap(),
            1.0
        );
        assert_eq!(
            lower_certificate_measure(&AnalyticPoly::zero(), &unit).unwrap(),
            0.0
        );
        assert!(
            lower_certificate_measure(&AnalyticPoly::one(), &RadialMeasure::default()).is_err()
        );
        let z4 = AnalyticPoly::monomial(4, c(1.0, 0.0));
        assert!((lower_certificate_duality(&z4, 4).unwrap() - 2.5).abs() < 1e-15);
        assert_eq!(lower_certificate_duality(&z4, 3).unwrap(), 0.0);
        assert_eq!(best_duality_certificate(&z4).0, 4);

        let h = AnalyticPoly::from_real(&[1.0, 2.0, 1.0]);
        let mu = RadialMeasure::log_tail(0.5, 64, 200.0).unwrap();
        let bracket = norm_bracket(&h, &Factorization::trivial(&h), &mu).unwrap();
        assert!(bracket.lower <= bracket.upper);
        assert!(bracket.lower > 0.0);
    }

    #[test]
    fn coefficient_sums_and_lacunarity() {
        assert_eq!(hardy_type_sum(&AnalyticPoly::zero()), 0.0);
        let z3 = AnalyticPoly::monomial(3, c(1.0, 0.0));
        assert!((hardy_type_sum(&z3) - 1.0 / (1.0 + 4f64.ln())).abs() < 1e-15);
        let z4 = AnalyticPoly::monomial(4, c(1.0, 0.0));
        assert_eq!(paley_sum(&z4, &[4]), 4.0);
        assert!(is_lacunary(&[1, 2, 4, 8, 16], 1.9));
        assert!(!is_lacunary(&[1, 2, 4, 8, 16], 2.0));
        assert!(!is_lacunary(&[1, 2, 3], 2.0));
        assert_eq!(lacunary_ratio(&[1, 2, 3]), Some(1.5));
        assert!(is_lacunary(&[1, 2, 3], 1.2));
        assert_eq!(lacunary_ratio(&[3, 2]), None);
    }

    #[test]
    fn polarization_keeps_the_bound() {
        let f = AnalyticPoly::new(vec![c(1.0, 0.5), c(0.0, -2.0)]);
        let g = AnalyticPoly::from_real(&[0.2, 0.0, 3.0]);
        let fact = Factorization::new(f.multiply(&g), vec![(f, g)]);
        let pol = polarize(&fact);
        assert!(pol.is_valid());
        let ratio = pol.raw_bound() / fact.raw_bound();
        assert!((1.0 - 1e-12..=2.0).contains(&ratio));
    }

    #[test]
    fn factorization_json_round_trip() {
        let fact = Factorization::trivial(&AnalyticPoly::from_real(&[1.0, -1.0]));
        let back = Factorization::from_json_str(&fact.to_json_string()).unwrap();
        assert_eq!(back, fact);
    }
}
