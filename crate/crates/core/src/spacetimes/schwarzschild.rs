//! Closed forms for the Schwarzschild interior `0 < r < 2m`.

use std::f64::consts::PI;

use crate::{Error, Result};

fn check_mass(m: f64) -> Result<()> {
    if m > 0.0 && m.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("m", m, "(0, ∞)"))
    }
}

/// Maximal proper time from the level `r` to the singularity `r = 0`:
/// `πm − √(2mr − r²) − 2m·arctan√((2m − r)/r)`.
pub fn tau_to_singularity(m: f64, r: f64) -> Result<f64> {
    check_mass(m)?;
    if !(r > 0.0 && r <= 2.0 * m) {
        return Err(Error::domain("r", r, format!("(0, {}]", 2.0 * m)));
    }
    let v = PI * m - (2.0 * m * r - r * r).max(0.0).sqrt() - 2.0 * m * ((2.0 * m - r) / r).sqrt().atan();
    Ok(v.max(0.0))
}

/// Inverse of [`tau_to_singularity`] on `(0, 2m]`.
pub fn radius_at_tau(m: f64, tau: f64) -> Result<f64> {
    check_mass(m)?;
    if !(0.0..=PI * m).contains(&tau) {
        return Err(Error::domain("tau", tau, format!("[0, {}]", PI * m)));
    }
    if tau == 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0f64, 2.0 * m);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if tau_to_singularity(m, mid)? < tau {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Volume of `{0 < r < 2m, t ∈ [a, b]}`: `32π m³ (b − a)/3`.
pub fn slab_volume(m: f64, a: f64, b: f64) -> Result<f64> {
    check_mass(m)?;
    if b < a {
        return Err(Error::invalid(format!("slab [{a}, {b}] is reversed")));
    }
    Ok(32.0 * PI * m.powi(3) * (b - a) / 3.0)
}

/// Area of `{r = r0, t ∈ [a, b]}` in the induced metric
/// `(2m/r − 1)dt² + r²dΩ²`.
pub fn slice_area(m: f64, r0: f64, a: f64, b: f64) -> Result<f64> {
    check_mass(m)?;
    if !(r0 > 0.0 && r0 < 2.0 * m) {
        return Err(Error::domain("r0", r0, format!("(0, {})", 2.0 * m)));
    }
    Ok(4.0 * PI * r0 * r0 * (2.0 * m / r0 - 1.0).sqrt() * (b - a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn tau_closed_form_examples() {
        assert_abs_diff_eq!(tau_to_singularity(1.0, 2.0).unwrap(), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(tau_to_singularity(3.0, 6.0).unwrap(), 3.0 * PI, epsilon = 1e-14);
        assert_abs_diff_eq!(tau_to_singularity(1.0, 1.0).unwrap(), PI / 2.0 - 1.0, epsilon = 1e-15);
        assert!(tau_to_singularity(1.0, 1e-12).unwrap() < 1e-12);
        assert!(tau_to_singularity(1.0, 0.0).is_err());
        assert!(tau_to_singularity(1.0, 2.5).is_err());
    }

    #[test]
    fn tau_is_the_radial_proper_time_integral() {
        // dτ = dr / √(2m/r − 1) along radial infall at fixed t
        for &(m, r) in &[(1.0, 0.3), (1.0, 1.7), (2.5, 4.0)] {
            let q = crate::quadrature::integrate(|s: f64| (s / (2.0 * m - s)).sqrt(), 0.0, r, 1e-13).unwrap();
            assert_abs_diff_eq!(tau_to_singularity(m, r).unwrap(), q, epsilon = 1e-10);
        }
    }

    #[test]
    fn tau_increases_with_r() {
        let mut prev = 0.0;
        for i in 1..=400 {
            let v = tau_to_singularity(1.0, 2.0 * i as f64 / 400.0).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn radius_inverts_tau() {
        for &r in &[0.01, 0.5, 1.0, 1.99] {
            let t = tau_to_singularity(1.0, r).unwrap();
            assert_abs_diff_eq!(radius_at_tau(1.0, t).unwrap(), r, epsilon = 1e-12);
        }
    }

    #[test]
    fn slab_and_slice_examples() {
        assert_abs_diff_eq!(slab_volume(1.0, 0.0, 1.0).unwrap(), 32.0 * PI / 3.0, epsilon = 1e-13);
        assert_abs_diff_eq!(slab_volume(2.0, 0.0, 1.0).unwrap(), 256.0 * PI / 3.0, epsilon = 1e-12);
        assert_eq!(slab_volume(1.0, 3.0, 3.0).unwrap(), 0.0);
        assert_abs_diff_eq!(slice_area(1.0, 1.0, 0.0, 1.0).unwrap(), 4.0 * PI, epsilon = 1e-13);
        assert!(slice_area(1.0, 2.0 - 1e-12, 0.0, 1.0).unwrap() < 1e-4);
        assert_abs_diff_eq!(
            slice_area(1.0, 0.5, 0.0, 2.0).unwrap(),
            4.0 * PI * 0.25 * 3f64.sqrt() * 2.0,
            epsilon = 1e-12
        );
        assert!(slice_area(1.0, 2.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn slab_volume_matches_density_integral() {
        // ∫∫∫ r² sin θ over r ∈ (0, 2), θ ∈ (0, π), φ ∈ (0, 2π)
        let radial = crate::quadrature::integrate(|r: f64| r * r, 0.0, 2.0, 1e-14).unwrap();
        let polar = crate::quadrature::integrate(f64::sin, 0.0, PI, 1e-14).unwrap();
        assert_abs_diff_eq!(radial * polar * 2.0 * PI, slab_volume(1.0, 0.0, 1.0).unwrap(), epsilon = 1e-11);
    }
}
