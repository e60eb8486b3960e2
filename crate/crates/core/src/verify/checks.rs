use super::{Relation, VerificationReport};
use crate::coefficients::{profile_d, sin_kappa, CurvatureParams};
use crate::content::{content_via_rays, crossing, future_content};
use crate::localization::{build_ray_decomposition_with, DecompositionOptions};
use crate::quadrature::Quadrature;
use crate::sampler::{estimate_volume, sprinkle_with, Predicate, RegionDescriptor, SprinkleOptions};
use crate::spacetimes::rays::RayFamily;
use crate::spacetimes::{schwarzschild, AchronalSet, AchronalSetDescriptor, SetShape, Spacetime};
use crate::{Error, Result};

/// Tolerance of the sharpness quadrature identity.
pub const SHARP_IDENTITY_TOL: f64 = 1e-8;
/// Tolerance of the closed-form Schwarzschild bound.
pub const SCHWARZSCHILD_TOL: f64 = 1e-12;
/// Monte-Carlo checks pass within this many standard errors.
pub const SIGMAS: f64 = 4.0;

/// Checks `∫₁^{√(1+a²)} [n(x²−1)^{(n−2)/2} + (n+1)(x²−1)^{n/2}] dx = aⁿ√(1+a²)`.
pub fn check_claim_sharp_identity(n: u32, a: f64) -> Result<VerificationReport> {
    if n < 2 {
        return Err(Error::invalid(format!("n must be at least 2, got {n}")));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::invalid(format!("a must be positive, got {a}")));
    }
    let nf = n as f64;
    let top = (1.0 + a * a).sqrt();
    let q = Quadrature {
        abs_tol: 1e-13,
        rel_tol: 1e-13,
        ..Quadrature::default()
    };
    let res = q.integrate(
        |x| {
            let u = (x * x - 1.0).max(0.0);
            nf * u.powf((nf - 2.0) / 2.0) + (nf + 1.0) * u.powf(nf / 2.0)
        },
        1.0,
        top,
    )?;
    let rhs = a.powi(n as i32) * top;
    Ok(
        VerificationReport::new("sharp_identity", Relation::Eq, res.value, rhs, SHARP_IDENTITY_TOL, res.error)
            .with("n", n)
            .with("a", a),
    )
}

/// Checks `Area({r = r0} ∩ slab) · τ_Σ(r0) ≤ 4·Vol(slab) = (128/3)π m³ (b − a)` for each
/// `r0` of the grid.
pub fn check_schwarzschild_bound(m: f64, a: f64, b: f64, r0_grid: &[f64]) -> Result<Vec<VerificationReport>> {
    if !(b > a) {
        return Err(Error::invalid(format!("empty slab [{a}, {b}]")));
    }
    let rhs = 4.0 * schwarzschild::slab_volume(m, a, b)?;
    r0_grid
        .iter()
        .map(|&r0| {
            let area = schwarzschild::slice_area(m, r0, a, b)?;
            let tau = schwarzschild::tau_to_singularity(m, r0)?;
            Ok(VerificationReport::new(
                format!("schwarzschild_bound[r0={r0}]"),
                Relation::Le,
                area * tau,
                rhs,
                SCHWARZSCHILD_TOL * rhs,
                0.0,
            )
            .with("m", m)
            .with("slab", [a, b])
            .with("r0", r0)
            .with("area", area)
            .with("tau_to_singularity", tau))
        })
        .collect()
}

/// Options of the Monte-Carlo checks.
#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarlo {
    pub n: usize,
    pub seed: u64,
    /// Relative ε grid of the content estimator, as fractions of `dist(V, S)`.
    pub eps_fractions: Vec<f64>,
}

impl MonteCarlo {
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            n,
            seed,
            eps_fractions: vec![0.005, 0.01, 0.02],
        }
    }
}

const PILOT: usize = 2000;
const REFINE_TOL: f64 = 1e-9;

/// Isoperimetric inequality `𝔪⁺(S)·𝔇_{K,N}(dist(V, S)) ≤ 𝔪(C(V, S))`.
///
/// `window` fixes the spacetime and a coordinate box containing `C(V, S)`
/// and the thin future enlargements of `S` used for its content.
pub fn check_isoperimetric(
    window: &RegionDescriptor,
    v: &AchronalSetDescriptor,
    s: &AchronalSetDescriptor,
    params: CurvatureParams,
    mc: &MonteCarlo,
) -> Result<VerificationReport> {
    params.validate()?;
    let st = window.st.build()?;
    let vset = v.build(&st)?;
    let sset = s.build(&st)?;
    let family = RayFamily::for_set(&st, &vset)?;
    let cone = window.clone().with_predicate(Predicate::All {
        parts: vec![
            window.predicate.clone(),
            Predicate::ConeBetween {
                v: v.clone(),
                s: s.clone(),
            },
        ],
    });
    let pilot = sprinkle_with(
        &cone,
        PILOT,
        mc.seed ^ 0x150,
        SprinkleOptions {
            matrix_cap: Some(0),
            ..SprinkleOptions::default()
        },
    )
    .map_err(|e| match e {
        Error::DegenerateRegion { .. } => Error::Hypothesis("S does not lie in the future of V inside the window".into()),
        other => other,
    })?;
    let dist = match closed_form_dist(&vset, &sset) {
        Some(d) => d,
        None => numeric_dist(&st, &family, &sset, pilot.events.iter().map(|e| e.coords.as_slice()))?,
    };
    if !(dist > 0.0) {
        return Err(Error::Hypothesis(format!("dist(V, S) = {dist} is not positive")));
    }
    let profile = profile_d(params, dist)?;
    let eps: Vec<f64> = mc.eps_fractions.iter().map(|f| f * dist).collect();
    let content = future_content(s, window, &eps, mc.n, mc.seed)?;
    let volume = estimate_volume(&cone, mc.n, mc.seed.wrapping_add(1000))?;

    let lhs = content.value * profile;
    let stderr = ((content.stderr * profile).powi(2) + volume.stderr.powi(2)).sqrt();
    Ok(
        VerificationReport::new("isoperimetric", Relation::Le, lhs, volume.value, SIGMAS * stderr, stderr)
            .with("spacetime", &window.st)
            .with("K", params.k)
            .with("N", params.n)
            .with("n", mc.n)
            .with("seed", mc.seed)
            .with("dist", dist)
            .with("profile", profile)
            .with("content", content.value)
            .with("content_stderr", content.stderr)
            .with("content_trend_consistent", content.trend_consistent)
            .with("cone_volume", volume.value)
            .with("cone_volume_stderr", volume.stderr),
    )
}

fn closed_form_dist(v: &AchronalSet, s: &AchronalSet) -> Option<f64> {
    if let Some((base, t)) = &s.level_of {
        if *base == v.shape {
            return Some(*t);
        }
    }
    match (&v.shape, &s.shape) {
        (SetShape::Point(c), SetShape::Hyperboloid { center, radius }) if c == center => Some(*radius),
        (
            SetShape::Hyperboloid { center: c, radius: r },
            SetShape::Hyperboloid { center, radius },
        ) if c == center => Some(radius - r),
        _ => None,
    }
}

/// `min τ_V` over `S`: the smallest ray crossing over pilot labels, refined by
/// a shrinking pattern search in label space.
fn numeric_dist<'a>(
    st: &Spacetime,
    family: &RayFamily,
    s: &AchronalSet,
    pts: impl Iterator<Item = &'a [f64]>,
) -> Result<f64> {
    let upper = |label: &[f64]| -> f64 {
        let exit = family.chart_exit(st, label);
        if exit.is_finite() {
            exit
        } else {
            1e6
        }
    };
    let hit = |label: &[f64]| -> Result<Option<f64>> { crossing(st, s, family, label, 1.0, 1e-12, upper(label)) };
    let mut best: Option<(Vec<f64>, f64)> = None;
    for p in pts {
        let Some((label, _)) = family.foot(p) else { continue };
        if let Some(d) = hit(&label)? {
            if best.as_ref().is_none_or(|b| d < b.1) {
                best = Some((label, d));
            }
        }
    }
    let (mut label, mut d) = best.ok_or_else(|| Error::Hypothesis("no ray of V meets S".into()))?;
    let mut step = 0.1 * (1.0 + label.iter().map(|x| x.abs()).fold(0.0, f64::max));
    while step > REFINE_TOL {
        let mut improved = false;
        for k in 0..label.len() {
            for dir in [-1.0, 1.0] {
                let mut trial = label.clone();
                trial[k] += dir * step;
                if let Some(dt) = hit(&trial)? {
                    if dt < d {
                        d = dt;
                        label = trial;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(d)
}

/// Checks that `𝔪⁺(V_t)/𝔰_{K/(N−1)}(t)^{N−1}` does not increase along
/// `t_grid`, one report per consecutive pair.
///
/// The contents come from a single ray decomposition of
/// `window ∩ {t_min − w/2 < τ_V < t_max + w/2}`. A uniformly spaced grid is
/// placed at bin centres; otherwise 64 bins are used and the density is
/// interpolated.
pub fn check_monotonicity(
    window: &RegionDescriptor,
    v: &AchronalSetDescriptor,
    params: CurvatureParams,
    t_grid: &[f64],
    mc: &MonteCarlo,
) -> Result<Vec<VerificationReport>> {
    params.validate()?;
    if t_grid.is_empty() || t_grid.windows(2).any(|w| !(w[1] > w[0])) || !(t_grid[0] > 0.0) {
        return Err(Error::invalid("t grid must be positive and strictly increasing"));
    }
    if params.n > 1.0 && params.k > 0.0 {
        let cap = std::f64::consts::PI / params.ray_kappa().sqrt();
        if t_grid[t_grid.len() - 1] >= cap {
            return Err(Error::domain("t", t_grid[t_grid.len() - 1], format!("(0, {cap})")));
        }
    }
    let (t0, t1) = (t_grid[0], t_grid[t_grid.len() - 1]);
    let (s_range, bins) = if t_grid.len() < 2 {
        ([0.5 * t0, 1.5 * t0], 1)
    } else {
        let d = (t1 - t0) / (t_grid.len() - 1) as f64;
        let uniform = t_grid.windows(2).all(|w| ((w[1] - w[0]) - d).abs() <= 1e-9 * d);
        if uniform && t0 > 0.5 * d {
            ([t0 - 0.5 * d, t1 + 0.5 * d], t_grid.len())
        } else {
            ([0.0, t1 * 1.05], 64)
        }
    };
    let region = window.clone().with_predicate(Predicate::All {
        parts: vec![
            window.predicate.clone(),
            Predicate::TauBand {
                set: v.clone(),
                lo: s_range[0],
                hi: s_range[1],
            },
        ],
    });
    let dec = build_ray_decomposition_with(
        &region,
        v,
        mc.n,
        bins,
        mc.seed,
        &DecompositionOptions {
            s_range: Some(s_range),
            curvature: Some(params),
            ..DecompositionOptions::default()
        },
    )?;
    let kappa = params.ray_kappa();
    let ratios: Vec<(f64, f64, f64)> = t_grid
        .iter()
        .map(|&t| {
            let c = content_via_rays(&dec, &AchronalSetDescriptor::level(v.clone(), t))?;
            let scale = sin_kappa(kappa, t).powf(params.n - 1.0);
            Ok((t, c.value / scale, c.stderr / scale))
        })
        .collect::<Result<_>>()?;
    let meta = |r: VerificationReport| {
        r.with("spacetime", &window.st)
            .with("K", params.k)
            .with("N", params.n)
            .with("n", mc.n)
            .with("seed", mc.seed)
    };
    if ratios.len() == 1 {
        let (t, j, se) = ratios[0];
        return Ok(vec![meta(
            VerificationReport::new("monotonicity", Relation::Le, j, j, 0.0, se).with("t", [t, t]),
        )]);
    }
    Ok(ratios
        .windows(2)
        .map(|w| {
            let ((ta, ja, sa), (tb, jb, sb)) = (w[0], w[1]);
            let se = (sa * sa + sb * sb).sqrt();
            meta(
                VerificationReport::new(format!("monotonicity[t={ta}->{tb}]"), Relation::Le, jb, ja, SIGMAS * se, se)
                    .with("t", [ta, tb]),
            )
        })
        .collect())
}
