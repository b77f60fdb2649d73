//! Closed-form bounds relating direction counts, curvature and hull error.
//!
//! Curvature `omega` is always relative: a fraction of the total measure of
//! the unit sphere, so it lies in (0, 1).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_open_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} = {v} must lie in (0, 1)")))
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} = {v} must be positive")))
    }
}

/// Chebyshev bound on `P(|K_D(v) - K(v)| > eps)` for `m` uniform directions.
pub fn chebyshev_bound(k: f64, m: u64, eps: f64) -> Result<f64> {
    check_open_unit("K", k)?;
    check_positive("eps", eps)?;
    if m == 0 {
        return Err(Error::invalid("direction count must be positive"));
    }
    Ok((k * (1.0 - k) / (m as f64 * eps * eps)).min(1.0))
}

/// Directions needed to find every vertex of relative curvature at least
/// `omega` with probability at least `1 - p`: `ceil(log(omega p) / log(1 - omega))`.
pub fn direction_count_bound(omega: f64, p: f64) -> Result<u64> {
    check_open_unit("omega", omega)?;
    check_open_unit("p", p)?;
    Ok(count_from_log_ratio(omega * p, omega))
}

fn count_from_log_ratio(target: f64, omega: f64) -> u64 {
    if target >= 1.0 || omega >= 1.0 {
        return 1;
    }
    let raw = target.ln() / (-omega).ln_1p();
    if raw >= u64::MAX as f64 {
        u64::MAX
    } else {
        (raw.ceil() as u64).max(1)
    }
}

/// Lower bound `sin(theta / 2)^(n - 1) / 2` on the relative measure of a
/// spherical cap of angular radius `theta` in S^(n-1).
pub fn cap_lower_bound(theta: f64, n: u32) -> Result<f64> {
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::invalid(format!("theta = {theta} outside [0, pi]")));
    }
    if n < 2 {
        return Err(Error::invalid("dimension must be at least 2"));
    }
    Ok(0.5 * (theta / 2.0).sin().powi(n as i32 - 1))
}

/// Largest Hausdorff distance incurred by deleting vertices of total
/// relative curvature `omega` from a polytope inside a ball of radius `r`:
/// `sqrt(2) pi r (2 omega)^(1 / (n - 1))`.
pub fn aleksandrov_bound(r: f64, n: u32, omega: f64) -> Result<f64> {
    check_positive("r", r)?;
    if n < 2 {
        return Err(Error::invalid("dimension must be at least 2"));
    }
    if !(0.0..=1.0).contains(&omega) {
        return Err(Error::invalid(format!("omega = {omega} outside [0, 1]")));
    }
    Ok(std::f64::consts::SQRT_2
        * std::f64::consts::PI
        * r
        * (2.0 * omega).powf(1.0 / (n - 1) as f64))
}

/// `vol(S^(n-1)) = 2 pi^(n/2) / Gamma(n/2)`, in log space.
pub fn ln_sphere_area(n: u32) -> f64 {
    std::f64::consts::LN_2 + 0.5 * n as f64 * std::f64::consts::PI.ln() - ln_gamma_half(n)
}

/// `ln Gamma(n / 2)` for integer `n >= 1`, exact recurrence from Gamma(1) and Gamma(1/2).
fn ln_gamma_half(n: u32) -> f64 {
    let (mut acc, mut x) = if n.is_multiple_of(2) {
        (0.0, 1.0)
    } else {
        (0.5 * std::f64::consts::PI.ln(), 0.5)
    };
    while x < n as f64 / 2.0 {
        acc += x.ln();
        x += 1.0;
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundQuery {
    pub n: u32,
    pub r: f64,
    pub p: f64,
    pub eps: f64,
    /// Number of true extreme points.
    pub x_count: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InnerErrorVariant {
    /// All missed curvature may pile up at one spot: scale by the extreme-point count.
    WorstCase,
    /// Missed curvature does not accumulate: treat as a single point.
    SinglePoint,
}

impl BoundQuery {
    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid("dimension must be at least 2"));
        }
        check_positive("r", self.r)?;
        check_positive("eps", self.eps)?;
        check_open_unit("p", self.p)?;
        if self.x_count == 0 {
            return Err(Error::invalid("extreme point count must be at least 1"));
        }
        Ok(())
    }

    /// Natural log of the per-vertex curvature level `C` that keeps the inner
    /// error below `eps`.
    pub fn ln_curvature_level(&self, variant: InnerErrorVariant) -> Result<f64> {
        self.validate()?;
        let x = match variant {
            InnerErrorVariant::WorstCase => self.x_count as f64,
            InnerErrorVariant::SinglePoint => 1.0,
        };
        let scale = std::f64::consts::SQRT_2 * std::f64::consts::PI * self.r;
        Ok((self.n - 1) as f64 * (self.eps / scale).ln()
            - std::f64::consts::LN_2
            - x.ln()
            - ln_sphere_area(self.n))
    }
}

/// Directions needed for inner error at most `eps` with probability `1 - p`.
pub fn directions_for_inner_error(q: &BoundQuery, variant: InnerErrorVariant) -> Result<u64> {
    let ln_c = q.ln_curvature_level(variant)?;
    let implied = aleksandrov_bound(q.r, q.n, 1.0)?;
    if q.eps >= implied || ln_c >= 0.0 || ln_c + q.p.ln() >= 0.0 {
        return Ok(1);
    }
    let c = ln_c.exp();
    let raw = (ln_c + q.p.ln()) / (-c).ln_1p();
    Ok(if raw >= u64::MAX as f64 {
        u64::MAX
    } else {
        (raw.ceil() as u64).max(1)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chebyshev_values() {
        assert!((chebyshev_bound(0.25, 1000, 0.05).unwrap() - 0.075).abs() < 1e-15);
        assert!(chebyshev_bound(0.5, 1 << 60, 0.01).unwrap() < 1e-12);
        assert_eq!(chebyshev_bound(0.5, 1, 0.01).unwrap(), 1.0);
        assert!(chebyshev_bound(1.0, 10, 0.1).is_err());
        assert!(chebyshev_bound(0.5, 0, 0.1).is_err());
    }

    #[test]
    fn direction_count_values() {
        assert_eq!(direction_count_bound(0.25, 0.05).unwrap(), 16);
        // 4 * 0.75^16 is below the failure budget.
        assert!(4.0 * 0.75f64.powi(16) <= 0.05);
        assert!(4.0 * 0.75f64.powi(15) > 0.05);
        assert_eq!(direction_count_bound(0.999_999, 0.5).unwrap(), 1);
        assert!(direction_count_bound(0.0, 0.5).is_err());
    }

    #[test]
    fn direction_count_grows_like_inverse_omega() {
        for omega in [0.01, 0.001, 0.0001] {
            let k = direction_count_bound(omega, 0.05).unwrap() as f64;
            let scaled = k * omega;
            assert!(scaled > 1.0 && scaled < 15.0, "{omega}: {scaled}");
        }
    }

    #[test]
    fn cap_bound_values() {
        assert_eq!(cap_lower_bound(std::f64::consts::PI, 5).unwrap(), 0.5);
        assert_eq!(cap_lower_bound(0.0, 3).unwrap(), 0.0);
        let b = cap_lower_bound(std::f64::consts::FRAC_PI_2, 2).unwrap();
        assert!((b - 0.353_553_390_593_273_8).abs() < 1e-15);
        assert!(cap_lower_bound(4.0, 3).is_err());
    }

    #[test]
    fn aleksandrov_values() {
        let b = aleksandrov_bound(1.0, 2, 0.01).unwrap();
        assert!((b - std::f64::consts::SQRT_2 * std::f64::consts::PI * 0.02).abs() < 1e-15);
        assert!((b - 0.08886).abs() < 1e-5);
        assert_eq!(aleksandrov_bound(1.0, 3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn sphere_areas() {
        let pi = std::f64::consts::PI;
        assert!((ln_sphere_area(2).exp() - 2.0 * pi).abs() < 1e-12);
        assert!((ln_sphere_area(3).exp() - 4.0 * pi).abs() < 1e-12);
        assert!((ln_sphere_area(4).exp() - 2.0 * pi * pi).abs() < 1e-12);
        assert!((ln_sphere_area(5).exp() - 8.0 * pi * pi / 3.0).abs() < 1e-11);
    }

    #[test]
    fn large_error_target_needs_one_direction() {
        for n in 2..8 {
            let eps = aleksandrov_bound(1.0, n, 1.0).unwrap();
            let q = BoundQuery {
                n,
                r: 1.0,
                p: 0.05,
                eps,
                x_count: 10,
            };
            assert_eq!(
                directions_for_inner_error(&q, InnerErrorVariant::WorstCase).unwrap(),
                1
            );
        }
    }
}
