//! Warped products `-dr² + θ(r)² ĝ` over a flat fiber.
//!
//! In conformal time `u = ∫ dr/θ` the metric reads `θ²(-du² + ĝ)`, so a curve
//! whose fiber speed `dσ/du = v` is constant on an `r`-interval has proper time
//! exactly `Δr·√(1 - v²)` there. The maximization below optimizes over such
//! piecewise curves; every level is the length of an honest causal curve, so
//! the sequence increases towards `τ` from below.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::quadrature::Quadrature;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WarpProfile {
    /// `θ(r) = scale`.
    Constant { scale: f64 },
    /// `θ(r) = r` (the Milne wedge when the fiber is flat and 1D).
    Linear,
    /// `θ(r) = 𝔰_kappa(r)`.
    SinKappa { kappa: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Fiber {
    Flat,
    /// Circle with metric `radius²·dφ²`; the fiber coordinate is the angle.
    Circle { radius: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WarpedProduct {
    pub profile: WarpProfile,
    pub fiber: Fiber,
    pub fiber_dim: usize,
}

const SHOOT_TOL: f64 = 1e-13;
const REFINE_TOL: f64 = 1e-7;
const MAX_KNOTS: usize = 1 << 16;

impl WarpProfile {
    pub fn theta(&self, r: f64) -> f64 {
        match *self {
            WarpProfile::Constant { scale } => scale,
            WarpProfile::Linear => r,
            WarpProfile::SinKappa { kappa } => crate::coefficients::sin_kappa(kappa, r),
        }
    }

    pub fn in_domain(&self, r: f64) -> bool {
        match *self {
            WarpProfile::Constant { .. } => true,
            WarpProfile::Linear => r > 0.0,
            WarpProfile::SinKappa { kappa } => r > 0.0 && (kappa <= 0.0 || r < PI / kappa.sqrt()),
        }
    }

    /// Conformal time `∫_{r0}^{r1} dr/θ(r)`: the largest fiber distance a
    /// causal curve can cover between the two `r`-levels.
    pub fn null_reach(&self, r0: f64, r1: f64) -> f64 {
        match *self {
            WarpProfile::Constant { scale } => (r1 - r0) / scale,
            WarpProfile::Linear => (r1 / r0).ln(),
            WarpProfile::SinKappa { kappa } if kappa == 0.0 => (r1 / r0).ln(),
            WarpProfile::SinKappa { kappa } if kappa > 0.0 => {
                let s = kappa.sqrt();
                ((0.5 * s * r1).tan() / (0.5 * s * r0).tan()).ln()
            }
            WarpProfile::SinKappa { kappa } => {
                let s = (-kappa).sqrt();
                ((0.5 * s * r1).tanh() / (0.5 * s * r0).tanh()).ln()
            }
        }
    }

    fn max_on(&self, lo: f64, hi: f64) -> f64 {
        match *self {
            WarpProfile::Constant { scale } => scale,
            WarpProfile::Linear => hi.abs().max(lo.abs()),
            WarpProfile::SinKappa { kappa } => {
                let mut m = self.theta(lo).max(self.theta(hi));
                if kappa > 0.0 {
                    let peak = 0.5 * PI / kappa.sqrt();
                    if lo <= peak && peak <= hi {
                        m = m.max(self.theta(peak));
                    }
                }
                m
            }
        }
    }
}

/// Result of the radial shooting problem between two `r`-levels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Shot {
    /// Conserved fiber momentum `L = θ² dσ/dτ`.
    pub momentum: f64,
    pub tau: f64,
}

impl WarpedProduct {
    pub(crate) fn from_params(dim: usize, params: &BTreeMap<String, f64>) -> Result<Self> {
        let get = |k: &str| params.get(k).copied();
        let profile = match get("profile").unwrap_or(0.0) {
            p if p == 0.0 => {
                let scale = get("scale").unwrap_or(1.0);
                if !(scale > 0.0) {
                    return Err(Error::invalid(format!("warp scale must be positive, got {scale}")));
                }
                WarpProfile::Constant { scale }
            }
            p if p == 1.0 => WarpProfile::Linear,
            p if p == 2.0 => WarpProfile::SinKappa {
                kappa: get("kappa").unwrap_or(0.0),
            },
            p => return Err(Error::invalid(format!("unknown warp profile id {p}"))),
        };
        let fiber = match get("fiber_radius") {
            None => Fiber::Flat,
            Some(radius) => {
                if dim != 2 {
                    return Err(Error::invalid("a circle fiber needs dimension 2"));
                }
                if !(radius > 0.0) {
                    return Err(Error::invalid(format!("fiber radius must be positive, got {radius}")));
                }
                Fiber::Circle { radius }
            }
        };
        Ok(Self {
            profile,
            fiber,
            fiber_dim: dim - 1,
        })
    }

    /// Fiber distance between the fiber parts of two chart points.
    pub fn fiber_distance(&self, x: &[f64], y: &[f64]) -> f64 {
        match self.fiber {
            Fiber::Flat => crate::spacetimes::spatial_dist2(x, y).sqrt(),
            Fiber::Circle { radius } => radius * wrap_angle(y[0] - x[0]).abs(),
        }
    }

    pub fn volume_density(&self, r: f64) -> f64 {
        let base = self.profile.theta(r).abs().powi(self.fiber_dim as i32);
        match self.fiber {
            Fiber::Flat => base,
            Fiber::Circle { radius } => base * radius,
        }
    }

    pub fn density_bound(&self, lo: f64, hi: f64) -> f64 {
        let base = self.profile.max_on(lo, hi).powi(self.fiber_dim as i32);
        match self.fiber {
            Fiber::Flat => base,
            Fiber::Circle { radius } => base * radius,
        }
    }

    /// Maximal proper time from level `r0` to level `r1` over fiber distance
    /// `d`, by refinement of piecewise-constant conformal fiber speed.
    pub fn maximize_tau(&self, r0: f64, r1: f64, d: f64) -> Result<f64> {
        if r1 <= r0 {
            return Ok(0.0);
        }
        if d == 0.0 {
            return Ok(r1 - r0);
        }
        if d >= self.profile.null_reach(r0, r1) {
            return Ok(0.0);
        }
        let mut prev: Option<(usize, f64)> = None;
        let mut knots = 4;
        while knots <= MAX_KNOTS {
            let segments = knots + 1;
            let value = self.discrete_tau(r0, r1, d, segments);
            if let Some((ps, pv)) = prev {
                if (value - pv).abs() < REFINE_TOL {
                    // second-order scheme: extrapolate in the segment count
                    let (a, b) = ((segments * segments) as f64, (ps * ps) as f64);
                    return Ok(((a * value - b * pv) / (a - b)).max(0.0));
                }
            }
            prev = Some((segments, value));
            knots *= 2;
        }
        Err(Error::NoConvergence(format!(
            "warped time separation did not settle within {MAX_KNOTS} knots (r0={r0}, r1={r1}, d={d})"
        )))
    }

    /// Best proper time over curves with constant conformal speed on each of
    /// `segments` equal `r`-intervals.
    fn discrete_tau(&self, r0: f64, r1: f64, d: f64, segments: usize) -> f64 {
        let h = (r1 - r0) / segments as f64;
        let cells: Vec<(f64, f64)> = (0..segments)
            .map(|j| {
                let a = r0 + h * j as f64;
                let b = if j + 1 == segments { r1 } else { a + h };
                (b - a, self.profile.null_reach(a, b))
            })
            .collect();
        // Stationarity: v/√(1-v²) = λ·du/dr on every cell.
        let speeds = |lambda: f64| {
            cells.iter().map(move |&(dr, du)| {
                let q = lambda * du / dr;
                q / (1.0 + q * q).sqrt()
            })
        };
        let reach = |lambda: f64| -> f64 { speeds(lambda).zip(&cells).map(|(v, c)| v * c.1).sum() };

        let mut hi = 1.0;
        while reach(hi) < d {
            hi *= 2.0;
            if hi > 1e300 {
                return 0.0;
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if reach(mid) < d {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let lambda = 0.5 * (lo + hi);
        speeds(lambda)
            .zip(&cells)
            .map(|(v, &(dr, _))| dr * (1.0 - v * v).max(0.0).sqrt())
            .sum()
    }

    fn sigma_rate(&self, r: f64, l: f64) -> f64 {
        let th = self.profile.theta(r);
        l / (th * (th * th + l * l).sqrt())
    }

    fn tau_rate(&self, r: f64, l: f64) -> f64 {
        let th = self.profile.theta(r);
        th / (th * th + l * l).sqrt()
    }

    fn quad() -> Quadrature {
        Quadrature {
            abs_tol: SHOOT_TOL,
            rel_tol: SHOOT_TOL,
            max_intervals: 20_000,
        }
    }

    /// Solves for the geodesic between levels `r0 < r1` covering fiber
    /// distance `d`, using the conserved fiber momentum.
    pub fn shoot(&self, r0: f64, r1: f64, d: f64) -> Result<Shot> {
        if r1 <= r0 || d >= self.profile.null_reach(r0, r1) {
            return Err(Error::NotChronological);
        }
        if d == 0.0 {
            return Ok(Shot {
                momentum: 0.0,
                tau: r1 - r0,
            });
        }
        let q = Self::quad();
        let phi = |l: f64| -> Result<f64> { Ok(q.integrate(|r| self.sigma_rate(r, l), r0, r1)?.value) };
        let mut hi = 1.0;
        while phi(hi)? < d {
            hi *= 2.0;
            if hi > 1e200 {
                return Err(Error::NoConvergence("geodesic shooting momentum diverged".into()));
            }
        }
        let mut lo = 0.0;
        while hi - lo > 1e-15 * hi {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if phi(mid)? < d {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let momentum = 0.5 * (lo + hi);
        let tau = q.integrate(|r| self.tau_rate(r, momentum), r0, r1)?.value;
        Ok(Shot { momentum, tau })
    }

    /// Point at proper-time fraction `t` along the geodesic from `x` to `y`.
    pub(crate) fn geodesic_point(&self, x: &[f64], y: &[f64], t: f64) -> Result<Vec<f64>> {
        let n = x.len();
        let (r0, r1) = (x[n - 1], y[n - 1]);
        let d = self.fiber_distance(x, y);
        let shot = self.shoot(r0, r1, d)?;
        let l = shot.momentum;
        let target = t * shot.tau;
        let q = Self::quad();
        let tau_to = |r: f64| -> Result<f64> { Ok(q.integrate(|s| self.tau_rate(s, l), r0, r)?.value) };
        let r_t = if t == 0.0 {
            r0
        } else if t == 1.0 {
            r1
        } else if l == 0.0 {
            r0 + target
        } else {
            let (mut lo, mut hi) = (r0, r1);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if tau_to(mid)? < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let covered = if d == 0.0 || t == 0.0 {
            0.0
        } else if t == 1.0 {
            d
        } else {
            q.integrate(|s| self.sigma_rate(s, l), r0, r_t)?.value
        };
        let mut out = x.to_vec();
        out[n - 1] = r_t;
        match self.fiber {
            Fiber::Flat => {
                if d > 0.0 {
                    for i in 0..n - 1 {
                        out[i] = x[i] + covered / d * (y[i] - x[i]);
                    }
                }
            }
            Fiber::Circle { radius } => {
                let dphi = wrap_angle(y[0] - x[0]);
                out[0] = x[0] + dphi.signum() * covered / radius;
            }
        }
        if t == 1.0 {
            out.copy_from_slice(y);
        }
        Ok(out)
    }
}

/// Wraps an angle difference into `(-π, π]`.
fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}
