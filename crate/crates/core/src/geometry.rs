//! Points of the unit disk and the pseudohyperbolic / hyperbolic metrics.
//!
//! Near the boundary `|z|` rounds to 1 long before `delta = 1 - |z|^2`
//! underflows, so a [`DiskPoint`] keeps `delta` as the source of truth and
//! derives the coordinate from it. The metrics are evaluated through the
//! identity `|1 - conj(p) q|^2 = |p - q|^2 + delta_p delta_q`, in log space,
//! which stays accurate for `delta` down to `1e-300`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::softplus;

/// A point of the open unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint {
    z: Complex64,
    arg: f64,
    radius: f64,
    /// `1 - |z|`
    gap: f64,
    /// `1 - |z|^2`
    delta: f64,
    /// `1 + log(1/delta)`
    big_l: f64,
}

/// The on-disk record for a point: `{"arg": .., "delta": ..}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub arg: f64,
    pub delta: f64,
}

impl DiskPoint {
    pub fn origin() -> Self {
        DiskPoint {
            z: Complex64::new(0.0, 0.0),
            arg: 0.0,
            radius: 0.0,
            gap: 1.0,
            delta: 1.0,
            big_l: 1.0,
        }
    }

    /// Build from an angle and `delta = 1 - |z|^2 in (0, 1]`.
    pub fn from_polar(arg: f64, delta: f64) -> Result<Self> {
        if !arg.is_finite() {
            return Err(Error::NonFinite {
                field: "arg".into(),
            });
        }
        if !delta.is_finite() {
            return Err(Error::NonFinite {
                field: "delta".into(),
            });
        }
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::InvalidInput(format!("delta {delta} outside (0, 1]")));
        }
        let radius = (1.0 - delta).sqrt();
        let gap = delta / (1.0 + radius);
        Ok(DiskPoint {
            z: Complex64::from_polar(radius, arg),
            arg,
            radius,
            gap,
            delta,
            big_l: 1.0 - delta.ln(),
        })
    }

    /// Build from a coordinate with `|z| < 1`.
    pub fn from_complex(z: Complex64) -> Result<Self> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFinite { field: "z".into() });
        }
        let radius = z.norm();
        if !(radius < 1.0) {
            return Err(Error::OutsideDisk { modulus: radius });
        }
        let gap = 1.0 - radius;
        let delta = gap * (1.0 + radius);
        let arg = if radius == 0.0 { 0.0 } else { z.arg() };
        Ok(DiskPoint {
            z,
            arg,
            radius,
            gap,
            delta,
            big_l: 1.0 - delta.ln(),
        })
    }

    /// A point on the positive real axis.
    pub fn real(x: f64) -> Result<Self> {
        Self::from_complex(Complex64::new(x, 0.0))
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn arg(&self) -> f64 {
        self.arg
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `1 - |z|`, accurate near the boundary.
    pub fn gap(&self) -> f64 {
        self.gap
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `L = 1 + log(1/delta)`.
    pub fn big_l(&self) -> f64 {
        self.big_l
    }

    pub fn record(&self) -> PointRecord {
        PointRecord {
            arg: self.arg,
            delta: self.delta,
        }
    }

    pub fn from_record(rec: PointRecord) -> Result<Self> {
        Self::from_polar(rec.arg, rec.delta)
    }
}

/// Parse the point file format: a JSON array of `{"arg", "delta"}` records.
pub fn points_from_json(text: &str) -> Result<Vec<DiskPoint>> {
    let recs: Vec<PointRecord> = serde_json::from_str(text)?;
    recs.into_iter().map(DiskPoint::from_record).collect()
}

pub fn points_to_json(points: &[DiskPoint]) -> String {
    let recs: Vec<PointRecord> = points.iter().map(DiskPoint::record).collect();
    serde_json::to_string(&recs).expect("records serialize")
}

/// `|p - q|` computed from radii and the angle difference.
pub fn euclidean_distance(p: &DiskPoint, q: &DiskPoint) -> f64 {
    let radial = q.gap - p.gap;
    let half = 0.5 * (q.arg - p.arg);
    let angular = 2.0 * (p.radius * q.radius).sqrt() * half.sin();
    radial.hypot(angular)
}

/// `1 - conj(p) q`, evaluated from the gaps so collinear near-boundary points
/// keep full relative accuracy.
pub fn one_minus_conj_product(p: &DiskPoint, q: &DiskPoint) -> Complex64 {
    let radial = p.gap + q.gap - p.gap * q.gap;
    let rr = p.radius * q.radius;
    let phi = q.arg - p.arg;
    let half = 0.5 * phi;
    // 1 - e^{i phi} = 2 sin^2(phi/2) - i sin(phi)
    Complex64::new(radial + rr * 2.0 * half.sin().powi(2), -rr * phi.sin())
}

/// Log of `delta_p delta_q / |p - q|^2`, or `None` when the points coincide.
fn log_separation(p: &DiskPoint, q: &DiskPoint) -> Option<f64> {
    let d = euclidean_distance(p, q);
    if d == 0.0 {
        return None;
    }
    Some(p.delta.ln() + q.delta.ln() - 2.0 * d.ln())
}

/// Pseudohyperbolic distance `|(p - q) / (1 - conj(p) q)|`.
pub fn pseudo_hyperbolic(p: &DiskPoint, q: &DiskPoint) -> f64 {
    match log_separation(p, q) {
        None => 0.0,
        Some(s) => (-0.5 * softplus(s)).exp(),
    }
}

/// `-log(1 - rho^2)`, the squared norm of a restricted kernel difference.
pub fn log_kernel_gap(p: &DiskPoint, q: &DiskPoint) -> f64 {
    match log_separation(p, q) {
        None => 0.0,
        Some(s) => softplus(-s),
    }
}

/// Hyperbolic distance `log((1 + rho) / (1 - rho))`.
pub fn hyperbolic(p: &DiskPoint, q: &DiskPoint) -> f64 {
    match log_separation(p, q) {
        None => 0.0,
        Some(s) => {
            let rho = (-0.5 * softplus(s)).exp();
            2.0 * rho.ln_1p() + softplus(-s)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_examples() {
        let o = DiskPoint::origin();
        let a = DiskPoint::real(0.5).unwrap();
        let b = DiskPoint::real(0.9).unwrap();
        assert_eq!(pseudo_hyperbolic(&a, &a), 0.0);
        assert!((pseudo_hyperbolic(&o, &b) - 0.9).abs() < 1e-15);
        assert!((pseudo_hyperbolic(&a, &b) - 0.4 / 0.55).abs() < 1e-14);
        assert_eq!(hyperbolic(&b, &b), 0.0);
        assert!((hyperbolic(&o, &a) - 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn delta_round_trip_near_boundary() {
        for delta in [1.0, 0.5, 1e-8, 1e-100, 1e-200, 1e-300] {
            let p = DiskPoint::from_polar(0.3, delta).unwrap();
            assert_eq!(p.delta(), delta);
            assert!((p.big_l() - (1.0 + (1.0 / delta).ln())).abs() <= 1e-12 * p.big_l());
        }
        assert!(DiskPoint::from_polar(0.0, 0.0).is_err());
        assert!(DiskPoint::from_polar(0.0, 1.5).is_err());
        assert!(DiskPoint::from_polar(f64::NAN, 0.5).is_err());
        assert!(DiskPoint::from_complex(Complex64::new(0.6, 0.8)).is_err());
    }

    #[test]
    fn hyperbolic_from_origin_tracks_big_l() {
        // beta(0, z) = log((1+r)/(1-r)) = log((1+r)^2/delta), so beta - L -> 2 log 2 - 1
        let o = DiskPoint::origin();
        for k in 1..=300 {
            let delta = 10f64.powf(-(k as f64));
            let p = DiskPoint::from_polar(1.0, delta).unwrap();
            let diff = hyperbolic(&o, &p) - p.big_l();
            assert!(diff.abs() < 1.0, "delta = {delta:e}: {diff}");
            if k > 20 {
                assert!((diff - (4f64.ln() - 1.0)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn collinear_tiny_deltas_stay_accurate() {
        // points with delta = e^{-32} and e^{-64} on a common ray
        let p = DiskPoint::from_polar(0.0, (-32f64).exp()).unwrap();
        let q = DiskPoint::from_polar(0.0, (-64f64).exp()).unwrap();
        // 1 - rho^2 = dp dq / |1 - pq|^2 with |1 - pq| ~ gap_p + gap_q
        let gp = p.gap();
        let gq = q.gap();
        let expected = -(p.delta().ln() + q.delta().ln() - 2.0 * (gp + gq - gp * gq).ln());
        assert!((log_kernel_gap(&p, &q) - expected).abs() < 1e-9);
        let w = one_minus_conj_product(&p, &q);
        assert!((w.re - (gp + gq - gp * gq)).abs() <= 1e-15 * w.re);
    }
}
