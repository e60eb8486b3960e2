//! Timelike Minkowski content: the volume of thin future (or past)
//! enlargements `{0 < τ_A < ε}` per unit `ε`, as `ε → 0`.

use serde::{Deserialize, Serialize};

use crate::localization::{DensitySample, RayDecomposition, Side};
use crate::sampler::{sprinkle_with, Predicate, RegionDescriptor, SprinkleOptions};
use crate::spacetimes::rays::RayFamily;
use crate::spacetimes::{AchronalSetDescriptor, Spacetime};
use crate::{Error, Result};

const PILOT_POINTS: usize = 4000;
/// Fraction of the window width added on each side of the pilot bounding box.
const PILOT_MARGIN: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsPoint {
    pub eps: f64,
    /// `vol({0 < ±τ_A < ε} ∩ U) / ε`.
    pub value: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContentEstimate {
    pub value: f64,
    pub stderr: f64,
    pub side: Side,
    pub eps_grid: Vec<f64>,
    pub per_eps: Vec<EpsPoint>,
    pub window: RegionDescriptor,
    /// The box actually sampled, a subset of the window box containing the
    /// widest enlargement.
    pub sampled_bounds: Vec<[f64; 2]>,
    /// `false` when the per-ε values are not monotone in ε beyond noise; the
    /// extrapolated value is then unreliable.
    pub trend_consistent: bool,
    pub seed: u64,
}

impl ContentEstimate {
    /// Largest relative deviation of the per-ε values from their mean.
    pub fn relative_spread(&self) -> f64 {
        let m = self.per_eps.iter().map(|p| p.value).sum::<f64>() / self.per_eps.len() as f64;
        self.per_eps
            .iter()
            .map(|p| ((p.value - m) / m).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Future Minkowski content of `a` inside the window `u`.
///
/// `n` points are sprinkled into the widest enlargement `{0 < τ_A < max ε}`
/// and counted for every ε of the grid; the value is the intercept at `ε = 0`
/// of the least-squares line through the per-ε values.
pub fn future_content(
    a: &AchronalSetDescriptor,
    u: &RegionDescriptor,
    eps_grid: &[f64],
    n: usize,
    seed: u64,
) -> Result<ContentEstimate> {
    content(a, u, eps_grid, n, seed, Side::Future)
}

/// Past Minkowski content of `a` inside the window `u`.
pub fn past_content(
    a: &AchronalSetDescriptor,
    u: &RegionDescriptor,
    eps_grid: &[f64],
    n: usize,
    seed: u64,
) -> Result<ContentEstimate> {
    content(a, u, eps_grid, n, seed, Side::Past)
}

fn band(a: &AchronalSetDescriptor, eps: f64, side: Side) -> Predicate {
    let (lo, hi) = match side {
        Side::Future => (0.0, eps),
        Side::Past => (-eps, 0.0),
    };
    Predicate::TauBand { set: a.clone(), lo, hi }
}

fn content(
    a: &AchronalSetDescriptor,
    u: &RegionDescriptor,
    eps_grid: &[f64],
    n: usize,
    seed: u64,
    side: Side,
) -> Result<ContentEstimate> {
    if eps_grid.len() < 2 {
        return Err(Error::invalid("content needs at least two values of ε"));
    }
    if eps_grid.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(Error::invalid("ε values must be positive"));
    }
    let st = u.st.build()?;
    a.build(&st)?;
    let mut grid = eps_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    if grid.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("ε values must be distinct"));
    }
    let eps_max = grid[grid.len() - 1];
    let restrict = |eps: f64, bounds: Vec<[f64; 2]>| {
        RegionDescriptor::new(u.st.clone(), bounds).with_predicate(Predicate::All {
            parts: vec![u.predicate.clone(), band(a, eps, side)],
        })
    };

    let pilot = sprinkle_with(
        &restrict(eps_max, u.bounds.clone()),
        PILOT_POINTS,
        seed ^ 0x9e37_79b9,
        SprinkleOptions {
            matrix_cap: Some(0),
            ..SprinkleOptions::default()
        },
    )
    .map_err(|e| match e {
        Error::DegenerateRegion { .. } => Error::invalid("the window does not meet the enlargement of A"),
        other => other,
    })?;
    let sampled_bounds = tighten(&u.bounds, pilot.events.iter().map(|e| e.coords.as_slice()));

    // one sprinkling of the widest enlargement; the narrower ones are nested
    let sample = sprinkle_with(
        &restrict(eps_max, sampled_bounds.clone()),
        n,
        seed,
        SprinkleOptions {
            matrix_cap: Some(0),
            ..SprinkleOptions::default()
        },
    )?;
    let aset = a.build(&st)?;
    let depth: Vec<f64> = sample
        .events
        .iter()
        .map(|e| aset.tau_signed(&st, e).map(f64::abs))
        .collect::<Result<_>>()?;
    let volume = sample.total_weight();
    let vol_se = sample.volume_stderr;
    let nf = n as f64;
    // mean and standard error of `volume · mean(g)` for a per-point statistic g
    let estimate = |g: &dyn Fn(f64) -> f64| -> (f64, f64) {
        let (s1, s2) = depth.iter().fold((0.0, 0.0), |(a, b), &d| {
            let v = g(d);
            (a + v, b + v * v)
        });
        let mean = s1 / nf;
        let var = (s2 / nf - mean * mean).max(0.0) / nf;
        (volume * mean, (volume * volume * var + (mean * vol_se).powi(2)).sqrt())
    };
    let per_eps: Vec<EpsPoint> = grid
        .iter()
        .map(|&eps| {
            let (value, stderr) = estimate(&|d| if d < eps { 1.0 / eps } else { 0.0 });
            EpsPoint { eps, value, stderr }
        })
        .collect();

    // intercept at ε = 0 of the least-squares line through the per-ε values
    let k = grid.len() as f64;
    let mean_eps = grid.iter().sum::<f64>() / k;
    let sxx: f64 = grid.iter().map(|e| (e - mean_eps).powi(2)).sum();
    let w: Vec<f64> = grid.iter().map(|e| 1.0 / k - mean_eps * (e - mean_eps) / sxx).collect();
    let (value, stderr) = estimate(&|d| {
        grid.iter()
            .zip(&w)
            .map(|(&e, &wi)| if d < e { wi / e } else { 0.0 })
            .sum()
    });
    let value = value.max(0.0);

    Ok(ContentEstimate {
        value,
        stderr,
        side,
        eps_grid: grid,
        trend_consistent: monotone_within_noise(&per_eps),
        per_eps,
        window: u.clone(),
        sampled_bounds,
        seed,
    })
}

fn tighten<'a>(window: &[[f64; 2]], pts: impl Iterator<Item = &'a [f64]>) -> Vec<[f64; 2]> {
    let mut lo: Vec<f64> = window.iter().map(|_| f64::INFINITY).collect();
    let mut hi: Vec<f64> = window.iter().map(|_| f64::NEG_INFINITY).collect();
    for p in pts {
        for (d, &x) in p.iter().enumerate() {
            lo[d] = lo[d].min(x);
            hi[d] = hi[d].max(x);
        }
    }
    window
        .iter()
        .enumerate()
        .map(|(d, &[a, b])| {
            let m = PILOT_MARGIN * (b - a);
            [(lo[d] - m).max(a), (hi[d] + m).min(b)]
        })
        .collect()
}

fn monotone_within_noise(p: &[EpsPoint]) -> bool {
    let steps: Vec<(f64, f64)> = p
        .windows(2)
        .map(|w| (w[1].value - w[0].value, 2.0 * (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt()))
        .collect();
    steps.iter().all(|&(d, n)| d >= -n) || steps.iter().all(|&(d, n)| d <= n)
}

/// Estimated one-sided content `lim ν((s₀, s₀ + ε))/ε` (future) or
/// `lim ν((s₀ − ε, s₀))/ε` (past) of a tabulated density: the density
/// interpolated linearly between bin centres.
pub fn one_d_content(samples: &[DensitySample], s0: f64, side: Side) -> Result<f64> {
    Ok(interpolate(samples, s0, side)?.0)
}

/// Interpolated density and its standard error.
fn interpolate(samples: &[DensitySample], s0: f64, side: Side) -> Result<(f64, f64)> {
    let n = samples.len();
    if n == 0 {
        return Err(Error::invalid("empty density table"));
    }
    let half = if n > 1 {
        0.5 * (samples[n - 1].s - samples[0].s) / (n - 1) as f64
    } else {
        0.0
    };
    let (lo, hi) = (samples[0].s - half, samples[n - 1].s + half);
    let inside = match side {
        Side::Future => s0 >= lo && s0 < hi,
        Side::Past => s0 > lo && s0 <= hi,
    };
    if !inside {
        return Err(Error::domain("s0", s0, format!("[{lo}, {hi}] on the {side:?} side")));
    }
    let k = samples.partition_point(|d| d.s <= s0);
    Ok(if k == 0 {
        (samples[0].h, samples[0].stderr)
    } else if k == n {
        (samples[n - 1].h, samples[n - 1].stderr)
    } else {
        let (a, b) = (&samples[k - 1], &samples[k]);
        let l = (s0 - a.s) / (b.s - a.s);
        (
            (1.0 - l) * a.h + l * b.h,
            ((1.0 - l).powi(2) * a.stderr.powi(2) + (l * b.stderr).powi(2)).sqrt(),
        )
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayContent {
    pub value: f64,
    pub stderr: f64,
    /// Rays that meet `A` inside their sampled domain.
    pub rays_used: usize,
}

/// `Σ_α q_α h(α, s_α(A))` over the rays of `dec` that meet `a`, where `s_α(A)`
/// is the arclength at which ray `α` crosses `a`.
///
/// When `a` is the level set `V_t` of the decomposition's own `V`, every ray
/// crosses at `s = t` and only rays sampled beyond `t` count. Otherwise the
/// crossing is found by bisection of `τ_A` along the ray through the cell's
/// mean label.
pub fn content_via_rays(dec: &RayDecomposition, a: &AchronalSetDescriptor) -> Result<RayContent> {
    let v = dec
        .v
        .as_ref()
        .ok_or_else(|| Error::invalid("the decomposition carries no achronal set"))?;
    let st = dec.spacetime.build()?;
    let aset = a.build(&st)?;
    let vset = v.build(&st)?;
    let level = match (&aset.level_of, dec.side) {
        (Some((base, t)), Side::Future) if *base == vset.shape => Some(*t),
        _ => None,
    };
    let family = RayFamily::for_set(&st, &vset)?;
    let sign = match dec.side {
        Side::Future => 1.0,
        Side::Past => -1.0,
    };

    let (mut value, mut var, mut used) = (0.0, 0.0, 0usize);
    for (ray, q) in dec.rays.iter().zip(&dec.q_weights) {
        let [s_min, s_max] = ray.domain;
        let crossing = match level {
            Some(t) => (t > s_min && t < s_max).then_some(t),
            None => crossing(&st, &aset, &family, &ray.label, sign, s_min, s_max)?,
        };
        let Some(s) = crossing else { continue };
        let Ok((h, se)) = interpolate(&ray.density_samples, s, Side::Future) else {
            continue;
        };
        value += q * h;
        var += (q * se).powi(2);
        used += 1;
    }
    Ok(RayContent {
        value,
        stderr: var.sqrt(),
        rays_used: used,
    })
}

const BISECTION_STEPS: usize = 100;

pub(crate) fn crossing(
    st: &Spacetime,
    a: &crate::spacetimes::AchronalSet,
    family: &RayFamily,
    label: &[f64],
    sign: f64,
    s_min: f64,
    s_max: f64,
) -> Result<Option<f64>> {
    let g = |s: f64| -> Result<Option<f64>> {
        match family.point(label, sign * s) {
            Some(x) if st.in_chart(&x) => Ok(Some(a.tau_signed_coords(st, &x)?)),
            _ => Ok(None),
        }
    };
    let (Some(g0), Some(g1)) = (g(s_min)?, g(s_max)?) else {
        return Ok(None);
    };
    // τ_A increases along future-directed timelike curves where it is finite
    let (mut lo, mut hi) = if sign > 0.0 { (s_min, s_max) } else { (s_max, s_min) };
    let (glo, ghi) = if sign > 0.0 { (g0, g1) } else { (g1, g0) };
    if !(glo <= 0.0 && ghi > 0.0) {
        return Ok(None);
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        match g(mid)? {
            Some(v) if v > 0.0 => hi = mid,
            Some(_) => lo = mid,
            None => return Ok(None),
        }
        if (hi - lo).abs() <= 1e-13 * (1.0 + hi.abs()) {
            break;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}
