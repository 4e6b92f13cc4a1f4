//! Singular values by one-sided Jacobi orthogonalization.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest number of sweeps before giving up.
const MAX_SWEEPS: usize = 60;

/// Singular values of `a`, nonincreasing.
///
/// Columns are rotated pairwise until every pair is orthogonal to relative
/// accuracy `tolerance`; the singular values are then the column norms.
pub fn jacobi_singular_values(a: &DMatrix<Complex64>, tolerance: f64) -> Result<Vec<f64>> {
    // work on the orientation with fewer columns
    let mut work = if a.ncols() > a.nrows() {
        a.adjoint()
    } else {
        a.clone()
    };
    let n = work.ncols();
    let m = work.nrows();
    let mut norms: Vec<f64> = (0..n).map(|j| work.column(j).norm_squared()).collect();
    let scale = norms.iter().cloned().fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(vec![0.0; n]);
    }
    // columns with negligible mass cannot change the result
    let floor = scale * 1e-300;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha <= floor || beta <= floor {
                    continue;
                }
                let mut gamma = Complex64::new(0.0, 0.0);
                for i in 0..m {
                    gamma += work[(i, p)].conj() * work[(i, q)];
                }
                let g = gamma.norm();
                if g <= tolerance * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // rotate a_q by the phase of gamma so the problem becomes real
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let ap = work[(i, p)];
                    let aq = work[(i, q)] * phase.conj();
                    work[(i, p)] = ap * c - aq * s;
                    work[(i, q)] = ap * s + aq * c;
                }
                norms[p] = work.column(p).norm_squared();
                norms[q] = work.column(q).norm_squared();
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            what: "Jacobi SVD".into(),
            detail: format!("{MAX_SWEEPS} sweeps on a {m}x{n} matrix"),
        });
    }
    let mut sigma: Vec<f64> = norms.iter().map(|x| x.sqrt()).collect();
    sigma.sort_by(|a, b| b.total_cmp(a));
    Ok(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_library_svd_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (rows, cols) in [(5, 5), (8, 3), (3, 8), (20, 20)] {
            let a = DMatrix::from_fn(rows, cols, |_, _| {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            let ours = jacobi_singular_values(&a, 1e-14).unwrap();
            let mut theirs: Vec<f64> = a
                .clone()
                .svd(false, false)
                .singular_values
                .iter()
                .cloned()
                .collect();
            theirs.sort_by(|a, b| b.total_cmp(a));
            assert_eq!(ours.len(), rows.min(cols));
            for (x, y) in ours.iter().zip(&theirs) {
                assert!((x - y).abs() < 1e-12 * theirs[0], "{x} vs {y}");
            }
        }
    }

    #[test]
    fn degenerate_inputs() {
        let zero = DMatrix::<Complex64>::zeros(4, 4);
        assert_eq!(jacobi_singular_values(&zero, 1e-12).unwrap(), vec![0.0; 4]);
        let mut single = DMatrix::<Complex64>::zeros(3, 3);
        single[(0, 0)] = Complex64::new(0.0, 1.5);
        let s = jacobi_singular_values(&single, 1e-12).unwrap();
        assert_eq!(s, vec![1.5, 0.0, 0.0]);
    }
}
