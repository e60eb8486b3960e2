use std::collections::HashSet;

use super::{Relation, VerificationReport, SIGMAS};
use crate::coefficients::{tau_coeff, CurvatureParams, ExtendedReal};
use crate::sampler::CausalSample;
use crate::{Error, Result};

/// Volume of a point cloud by box counting on a grid that exactly tiles the
/// cloud's bounding box with cells of side close to `eps`. Returns the volume
/// and the volume of the boundary cells: covered cells next to an uncovered
/// cell or to the edge of the grid.
fn covered_volume(sample: &CausalSample, pts: &[Vec<f64>], eps: f64) -> (f64, f64) {
    let Some(first) = pts.first() else { return (0.0, 0.0) };
    let dim = first.len();
    let mut lo = first.clone();
    let mut hi = first.clone();
    for p in pts {
        for d in 0..dim {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    if (0..dim).any(|d| !(hi[d] > lo[d])) {
        return (0.0, 0.0);
    }
    let counts: Vec<i64> = (0..dim)
        .map(|d| (((hi[d] - lo[d]) / eps).round() as i64).max(1))
        .collect();
    let side: Vec<f64> = (0..dim).map(|d| (hi[d] - lo[d]) / counts[d] as f64).collect();
    let cell = |p: &[f64]| -> Vec<i64> {
        (0..dim)
            .map(|d| (((p[d] - lo[d]) / side[d]) as i64).min(counts[d] - 1))
            .collect()
    };
    let covered: HashSet<Vec<i64>> = pts.iter().map(|p| cell(p)).collect();
    let st = sample.spacetime();
    let cell_volume: f64 = side.iter().product();
    let (mut volume, mut edge) = (0.0, 0.0);
    for c in &covered {
        let centre: Vec<f64> = (0..dim).map(|d| lo[d] + (c[d] as f64 + 0.5) * side[d]).collect();
        let v = cell_volume * st.volume_density(&crate::spacetimes::Event::new(st.chart(), centre));
        volume += v;
        let exposed = (0..dim).any(|d| {
            [-1, 1].iter().any(|&step| {
                let mut nb = c.clone();
                nb[d] += step;
                nb[d] < 0 || nb[d] >= counts[d] || !covered.contains(&nb)
            })
        });
        if exposed {
            edge += v;
        }
    }
    (volume, edge)
}

fn finite(x: ExtendedReal) -> f64 {
    match x {
        ExtendedReal::Finite(v) => v,
        ExtendedReal::PosInfinity => f64::INFINITY,
    }
}

/// Timelike Brunn–Minkowski inequality
/// `𝔪(A_t)^{1/N} ≥ τ^{(1−t)}_{K,N}(θ) 𝔪(A₀)^{1/N} + τ^{(t)}_{K,N}(θ) 𝔪(A₁)^{1/N}`
/// for two subsets of a sample.
///
/// `𝔪(A_i)` is the sample weight of `A_i`. `A_t` is the set of `t`-intermediate
/// points of all pairs in `A₀ × A₁`, measured by box counting with cells the
/// size of the sample spacing. `θ` is the smallest cross time separation when
/// `K ≥ 0` and the largest when `K < 0`; both are recorded.
pub fn check_brunn_minkowski(
    sample: &CausalSample,
    a0: &[usize],
    a1: &[usize],
    t: f64,
    params: CurvatureParams,
) -> Result<VerificationReport> {
    params.validate()?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::domain("t", t, "[0, 1]"));
    }
    if let Some(&i) = a0.iter().chain(a1).find(|&&i| i >= sample.len()) {
        return Err(Error::invalid(format!("index {i} is outside the sample")));
    }
    let base = |r: VerificationReport| {
        r.with("spacetime", &sample.spacetime)
            .with("K", params.k)
            .with("N", params.n)
            .with("t", t)
            .with("seed", sample.seed)
            .with("sizes", [a0.len(), a1.len()])
    };
    // single points are null sets
    if a0.len() < 2 || a1.len() < 2 {
        return Ok(base(VerificationReport::new("brunn_minkowski", Relation::Ge, 0.0, 0.0, 0.0, 0.0)));
    }

    let (mut theta_inf, mut theta_sup) = (f64::INFINITY, 0.0f64);
    for &i in a0 {
        for &j in a1 {
            let tau = sample.tau(i, j)?;
            if !(tau > 0.0) {
                return Err(Error::Hypothesis(format!(
                    "events {i} and {j} are not chronologically related"
                )));
            }
            theta_inf = theta_inf.min(tau);
            theta_sup = theta_sup.max(tau);
        }
    }
    let theta = if params.k < 0.0 { theta_sup } else { theta_inf };

    let st = sample.spacetime();
    let mut mid = Vec::with_capacity(a0.len() * a1.len());
    for &i in a0 {
        for &j in a1 {
            mid.push(st.geodesic_point(&sample.events[i], &sample.events[j], t)?.coords);
        }
    }
    let mass = |a: &[usize]| a.iter().map(|&i| sample.weights[i]).sum::<f64>();
    let (m0, m1) = (mass(a0), mass(a1));
    let dim = st.dim() as f64;
    let spacing = |m: f64, k: usize| (m / k as f64).powf(1.0 / dim);
    let eps = spacing(m0, a0.len()).max(spacing(m1, a1.len()));
    let (mt, boundary) = covered_volume(sample, &mid, eps);
    // the sampled sets miss a layer of roughly eps·k^{-(d-1)/d} along their
    // boundary, k points per set
    let k = a0.len().min(a1.len()) as f64;
    let mt_se = boundary * k.powf(-(dim - 1.0) / dim);

    let rel = if sample.total_weight() > 0.0 {
        sample.volume_stderr / sample.total_weight()
    } else {
        0.0
    };
    let inv = 1.0 / params.n;
    let c0 = finite(tau_coeff(params, 1.0 - t, theta));
    let c1 = finite(tau_coeff(params, t, theta));
    let term = |c: f64, m: f64| if m == 0.0 { 0.0 } else { c * m.powf(inv) };
    let lhs = mt.powf(inv);
    let rhs = term(c0, m0) + term(c1, m1);
    let lhs_se = if mt > 0.0 { inv * mt.powf(inv - 1.0) * mt_se } else { 0.0 };
    let rhs_se = inv * rel * rhs;
    let stderr = (lhs_se * lhs_se + rhs_se * rhs_se).sqrt();
    Ok(base(VerificationReport::new(
        "brunn_minkowski",
        Relation::Ge,
        lhs,
        rhs,
        SIGMAS * stderr,
        stderr,
    ))
    .with("theta", theta)
    .with("theta_inf", theta_inf)
    .with("theta_sup", theta_sup)
    .with("mass_a0", m0)
    .with("mass_a1", m1)
    .with("mass_at", mt)
    .with("cell", eps))
}
