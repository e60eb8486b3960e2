//! Distortion coefficients and model profiles for `(K, N)` curvature checks.
//!
//! Everything here is a pure function of its arguments.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::quadrature::Quadrature;
use crate::{Error, Result};

/// Lower timelike Ricci bound `K` and dimension bound `N ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureParams {
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "N")]
    pub n: f64,
}

impl CurvatureParams {
    pub fn new(k: f64, n: f64) -> Result<Self> {
        let p = Self { k, n };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.k.is_finite() {
            return Err(Error::invalid(format!("K must be finite, got {}", self.k)));
        }
        if !(self.n >= 1.0) || !self.n.is_finite() {
            return Err(Error::invalid(format!("N must be a finite real >= 1, got {}", self.n)));
        }
        Ok(())
    }

    /// `K/(N-1)`, the curvature of the one-dimensional model.
    ///
    /// Undefined for `N = 1`; callers treat that case separately.
    pub fn ray_kappa(&self) -> f64 {
        self.k / (self.n - 1.0)
    }

    /// `T_{K,N} = sup{t > 0 : 𝔰_{K/(N-1)}(t) > 0}`.
    pub fn max_time(&self) -> f64 {
        if self.k > 0.0 {
            PI * ((self.n - 1.0) / self.k).sqrt()
        } else {
            f64::INFINITY
        }
    }
}

/// A real number or `+∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    PosInfinity,
}

impl ExtendedReal {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedReal::PosInfinity)
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::PosInfinity => None,
        }
    }

    /// The value as an `f64`, with `+∞` mapped to `f64::INFINITY`.
    pub fn to_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::PosInfinity => f.write_str("+inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::serde_ext::ext_f64::serialize(&self.to_f64(), s)
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = crate::serde_ext::ext_f64::deserialize(d)?;
        if v == f64::INFINITY {
            Ok(ExtendedReal::PosInfinity)
        } else if v.is_finite() {
            Ok(ExtendedReal::Finite(v))
        } else {
            Err(serde::de::Error::custom("extended real must be finite or +inf"))
        }
    }
}

/// `𝔰_κ(θ)`: `sin(√κθ)/√κ`, `θ`, or `sinh(√-κθ)/√-κ` by the sign of `κ`.
pub fn sin_kappa(kappa: f64, theta: f64) -> f64 {
    if kappa > 0.0 {
        let r = kappa.sqrt();
        (r * theta).sin() / r
    } else if kappa < 0.0 {
        let r = (-kappa).sqrt();
        (r * theta).sinh() / r
    } else {
        theta
    }
}

/// `𝔰_κ(x)/x` as a truncated series in `v = κx²`.
fn sin_kappa_series_ratio(v: f64) -> f64 {
    1.0 - v / 6.0 + v * v / 120.0 - v * v * v / 5040.0
}

/// Below this `|κ|θ²` the ratio in [`sigma`] is evaluated by series.
const SERIES_THRESHOLD: f64 = 1e-8;

/// Distortion coefficient `σ_κ^{(t)}(θ)`.
pub fn sigma(kappa: f64, t: f64, theta: f64) -> ExtendedReal {
    let u = kappa * theta * theta;
    if u >= PI * PI {
        return ExtendedReal::PosInfinity;
    }
    if u == 0.0 {
        return ExtendedReal::Finite(t);
    }
    if u.abs() < SERIES_THRESHOLD {
        let num = sin_kappa_series_ratio(u * t * t);
        let den = sin_kappa_series_ratio(u);
        return ExtendedReal::Finite(t * num / den);
    }
    ExtendedReal::Finite(sin_kappa(kappa, t * theta) / sin_kappa(kappa, theta))
}

/// Volume distortion coefficient `τ_{K/N}^{(t)}(θ) = t^{1/N} σ_{K/N}^{(t)}(θ)^{(N-1)/N}`.
pub fn tau_coeff(params: CurvatureParams, t: f64, theta: f64) -> ExtendedReal {
    let n = params.n;
    match sigma(params.k / n, t, theta) {
        ExtendedReal::PosInfinity => ExtendedReal::PosInfinity,
        ExtendedReal::Finite(s) => ExtendedReal::Finite(t.powf(1.0 / n) * s.powf((n - 1.0) / n)),
    }
}

/// Absolute tolerance of the quadrature behind [`profile_d`].
pub const PROFILE_QUAD_TOL: f64 = 1e-10;

/// Isoperimetric profile `𝔇_{K,N}(t) = 𝔰(t)^{1-N} ∫_0^t 𝔰(s)^{N-1} ds`, `𝔰 = 𝔰_{K/(N-1)}`.
///
/// Uses `t/N` when `K = 0` and `t` when `N = 1`; otherwise adaptive quadrature.
pub fn profile_d(params: CurvatureParams, t: f64) -> Result<f64> {
    check_profile_domain(params, t)?;
    if params.n == 1.0 {
        return Ok(t);
    }
    if params.k == 0.0 {
        return Ok(t / params.n);
    }
    profile_d_quadrature(params, t)
}

/// [`profile_d`] evaluated by quadrature regardless of `K`.
pub fn profile_d_quadrature(params: CurvatureParams, t: f64) -> Result<f64> {
    check_profile_domain(params, t)?;
    if params.n == 1.0 {
        return Ok(t);
    }
    let kappa = params.ray_kappa();
    let e = params.n - 1.0;
    let tail = sin_kappa(kappa, t).powf(e);
    // Integrate the ratio directly so large t stays well scaled.
    let q = Quadrature::with_abs_tol(PROFILE_QUAD_TOL);
    let r = q.integrate(|s| (sin_kappa(kappa, s).max(0.0)).powf(e) / tail, 0.0, t)?;
    Ok(r.value)
}

fn check_profile_domain(params: CurvatureParams, t: f64) -> Result<()> {
    params.validate()?;
    let cap = if params.n == 1.0 {
        if params.k > 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        params.max_time()
    };
    if !(t > 0.0) || t >= cap {
        return Err(Error::domain("t", t, format!("(0, {cap})")));
    }
    Ok(())
}
