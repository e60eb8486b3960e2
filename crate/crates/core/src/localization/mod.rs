//! Ray decompositions of `I^±(V)` and one-dimensional curvature checks.
//!
//! Sampled points are assigned to the closed-form rays of `V`, the ray labels
//! are grouped into equal-mass cells, and each cell gets a histogram estimate
//! `h(α, s)` of its conditional density along the arclength `s = |τ_V|`.

use serde::{Deserialize, Serialize};

use crate::coefficients::{sin_kappa, CurvatureParams};
use crate::sampler::{sprinkle_with, Predicate, RegionDescriptor, SprinkleOptions};
use crate::spacetimes::rays::RayFamily;
use crate::spacetimes::{AchronalSetDescriptor, SpacetimeDescriptor};
use crate::verify::{Relation, VerificationReport};
use crate::{Error, Result};

mod zero_mean;

pub use zero_mean::{localize_zero_mean, ZeroMeanRay, ZeroMeanReport};

/// Which half of the decomposition is built.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `I⁺(V)`, arclength `s = τ_V`.
    #[default]
    Future,
    /// `I⁻(V)`, arclength `s = −τ_V`.
    Past,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DecompositionOptions {
    pub side: Side,
    /// Upper bound on the number of quotient cells (default `⌊√n⌋`).
    pub max_cells: Option<usize>,
    /// Arclength range covered by the histogram bins (default `[0, max s]`).
    pub s_range: Option<[f64; 2]>,
    /// Curvature bounds attached to the decomposition (default `K = 0`, `N = dim`).
    pub curvature: Option<CurvatureParams>,
}

/// One histogram bin of a ray's conditional density.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensitySample {
    pub s: f64,
    pub h: f64,
    pub stderr: f64,
    pub count: u64,
}

/// A quotient cell of rays, treated as one ray with an averaged density.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub alpha: usize,
    /// Mean label of the member points.
    pub label: Vec<f64>,
    pub label_min: Vec<f64>,
    pub label_max: Vec<f64>,
    /// Observed arclength range `[s_min, s_max]`.
    pub domain: [f64; 2],
    pub count: u64,
    pub density_samples: Vec<DensitySample>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayDecomposition {
    pub spacetime: SpacetimeDescriptor,
    pub v: Option<AchronalSetDescriptor>,
    pub side: Side,
    pub curvature: CurvatureParams,
    pub rays: Vec<Ray>,
    /// Quotient weights: the volume carried by each cell.
    pub q_weights: Vec<f64>,
    pub bins: usize,
    pub bin_width: f64,
    pub s_lo: f64,
    pub n: usize,
    pub assigned: usize,
    pub unassigned: usize,
    /// Volume of the sampled part of `region ∩ I^±(V)` and its standard error.
    pub volume: f64,
    pub volume_stderr: f64,
    pub seed: u64,
}

/// Sprinkles `region ∩ I⁺(V)` and builds the ray decomposition.
pub fn build_ray_decomposition(
    region: &RegionDescriptor,
    v: &AchronalSetDescriptor,
    n: usize,
    bins: usize,
    seed: u64,
) -> Result<RayDecomposition> {
    build_ray_decomposition_with(region, v, n, bins, seed, &DecompositionOptions::default())
}

pub fn build_ray_decomposition_with(
    region: &RegionDescriptor,
    v: &AchronalSetDescriptor,
    n: usize,
    bins: usize,
    seed: u64,
    opts: &DecompositionOptions,
) -> Result<RayDecomposition> {
    if bins == 0 {
        return Err(Error::invalid("decomposition needs at least one bin"));
    }
    let st = region.st.build()?;
    let vset = v.build(&st)?;
    let family = RayFamily::for_set(&st, &vset)?;
    let curvature = match opts.curvature {
        Some(c) => {
            c.validate()?;
            c
        }
        None => CurvatureParams::new(0.0, st.dim() as f64)?,
    };

    let band = match opts.side {
        Side::Future => Predicate::TauBand {
            set: v.clone(),
            lo: 0.0,
            hi: f64::MAX,
        },
        Side::Past => Predicate::TauBand {
            set: v.clone(),
            lo: -f64::MAX,
            hi: 0.0,
        },
    };
    let sampled = region.clone().with_predicate(Predicate::All {
        parts: vec![region.predicate.clone(), band],
    });
    let sprinkle_opts = SprinkleOptions {
        matrix_cap: Some(0),
        ..SprinkleOptions::default()
    };
    let sample = sprinkle_with(&sampled, n, seed, sprinkle_opts).map_err(|e| match e {
        Error::DegenerateRegion { .. } => Error::invalid("the region does not meet the chosen side of V"),
        other => other,
    })?;

    let sign = match opts.side {
        Side::Future => 1.0,
        Side::Past => -1.0,
    };
    let mut labels = Vec::with_capacity(n);
    let mut arclengths = Vec::with_capacity(n);
    for e in &sample.events {
        if let Some((label, s)) = family.foot(&e.coords) {
            if sign * s > 0.0 {
                labels.push(label);
                arclengths.push(sign * s);
            }
        }
    }
    let assigned = labels.len();
    if assigned == 0 {
        return Err(Error::invalid("no sampled point lies on a ray of V"));
    }
    let point_weight = sample.total_weight() / n as f64;
    let [s_lo, s_hi] = opts
        .s_range
        .unwrap_or([0.0, arclengths.iter().copied().fold(0.0, f64::max)]);
    if !(s_lo < s_hi) {
        return Err(Error::invalid(format!("empty arclength range [{s_lo}, {s_hi}]")));
    }
    let width = (s_hi - s_lo) / bins as f64;

    let target = opts
        .max_cells
        .unwrap_or(usize::MAX)
        .min((assigned as f64).sqrt().floor() as usize)
        .max(1);
    let mut order: Vec<usize> = (0..assigned).collect();
    let mut cells = Vec::with_capacity(target);
    equal_mass_cells(&labels, &mut order, target, &mut cells);

    let mut rays = Vec::with_capacity(cells.len());
    let mut q_weights = Vec::with_capacity(cells.len());
    for (alpha, members) in cells.into_iter().enumerate() {
        let count = members.len() as u64;
        let dim = labels[members[0]].len();
        let mut mean = vec![0.0; dim];
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        let mut hist = vec![0u64; bins];
        let (mut dmin, mut dmax) = (f64::INFINITY, f64::NEG_INFINITY);
        for &k in &members {
            for (d, &x) in labels[k].iter().enumerate() {
                mean[d] += x / count as f64;
                lo[d] = lo[d].min(x);
                hi[d] = hi[d].max(x);
            }
            let s = arclengths[k];
            dmin = dmin.min(s);
            dmax = dmax.max(s);
            if s >= s_lo && s < s_hi {
                hist[(((s - s_lo) / width) as usize).min(bins - 1)] += 1;
            }
        }
        let norm = count as f64 * width;
        let density_samples = hist
            .iter()
            .enumerate()
            .filter_map(|(b, &c)| {
                let s = s_lo + (b as f64 + 0.5) * width;
                (s >= dmin && s <= dmax).then(|| DensitySample {
                    s,
                    h: c as f64 / norm,
                    stderr: (c as f64).sqrt() / norm,
                    count: c,
                })
            })
            .collect();
        q_weights.push(count as f64 * point_weight);
        rays.push(Ray {
            alpha,
            label: mean,
            label_min: lo,
            label_max: hi,
            domain: [dmin, dmax],
            count,
            density_samples,
        });
    }

    let volume = assigned as f64 * point_weight;
    let rel = sample.volume_stderr / sample.total_weight();
    Ok(RayDecomposition {
        spacetime: region.st.clone(),
        v: Some(v.clone()),
        side: opts.side,
        curvature,
        rays,
        q_weights,
        bins,
        bin_width: width,
        s_lo,
        n,
        assigned,
        unassigned: n - assigned,
        volume,
        volume_stderr: volume * rel,
        seed,
    })
}

/// Splits `order` (indices into `labels`) into `k` cells of equal size ±1 by
/// recursive median cuts along the label coordinate of widest spread.
fn equal_mass_cells(labels: &[Vec<f64>], order: &mut [usize], k: usize, out: &mut Vec<Vec<usize>>) {
    if k <= 1 || order.len() <= 1 {
        out.push(order.to_vec());
        return;
    }
    let dim = labels[order[0]].len();
    let spread = |d: usize| {
        let (lo, hi) = order.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
            (lo.min(labels[i][d]), hi.max(labels[i][d]))
        });
        hi - lo
    };
    let axis = (0..dim)
        .max_by(|&a, &b| spread(a).total_cmp(&spread(b)))
        .unwrap_or(0);
    order.sort_by(|&a, &b| labels[a][axis].total_cmp(&labels[b][axis]).then(a.cmp(&b)));
    let k1 = k / 2;
    let cut = order.len() * k1 / k;
    let (left, right) = order.split_at_mut(cut);
    equal_mass_cells(labels, left, k1, out);
    equal_mass_cells(labels, right, k - k1, out);
}

impl RayDecomposition {
    /// A decomposition built from given density tables, one per ray, with
    /// unit quotient weights; used to check injected densities.
    pub fn from_tables(
        spacetime: SpacetimeDescriptor,
        curvature: CurvatureParams,
        tables: Vec<Vec<DensitySample>>,
        bin_width: f64,
    ) -> Result<Self> {
        if tables.iter().any(|t| t.is_empty()) {
            return Err(Error::invalid("density tables must be non-empty"));
        }
        let bins = tables.iter().map(Vec::len).max().unwrap_or(0);
        let rays: Vec<Ray> = tables
            .into_iter()
            .enumerate()
            .map(|(alpha, t)| Ray {
                alpha,
                label: vec![alpha as f64],
                label_min: vec![alpha as f64],
                label_max: vec![alpha as f64],
                domain: [t[0].s, t[t.len() - 1].s],
                count: t.iter().map(|d| d.count).sum(),
                density_samples: t,
            })
            .collect();
        let s_lo = rays.iter().map(|r| r.domain[0]).fold(f64::INFINITY, f64::min) - 0.5 * bin_width;
        Ok(Self {
            spacetime,
            v: None,
            side: Side::Future,
            curvature,
            q_weights: vec![1.0; rays.len()],
            rays,
            bins,
            bin_width,
            s_lo,
            n: 0,
            assigned: 0,
            unassigned: 0,
            volume: 0.0,
            volume_stderr: 0.0,
            seed: 0,
        })
    }

    /// `Σ_α q_α ∫ h(α, s) ds` with its Monte-Carlo standard error.
    pub fn disintegrated_mass(&self) -> (f64, f64) {
        let mut total = 0.0;
        let mut var = 0.0;
        for (ray, q) in self.rays.iter().zip(&self.q_weights) {
            let int: f64 = ray.density_samples.iter().map(|d| d.h * self.bin_width).sum();
            let se: f64 = ray
                .density_samples
                .iter()
                .map(|d| (d.stderr * self.bin_width).powi(2))
                .sum::<f64>()
                .sqrt();
            total += q * int;
            var += (q * se).powi(2);
        }
        (total, var.sqrt())
    }

    /// Fraction of sampled points not assigned to any ray.
    pub fn unassigned_fraction(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.unassigned as f64 / self.n as f64
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Least-squares power law `h ∝ s^β` with a common exponent and per-ray
/// prefactors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub stderr: f64,
    pub points: usize,
}

pub fn fit_power_exponent(dec: &RayDecomposition) -> Result<PowerFit> {
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut rows: Vec<Vec<(f64, f64, f64)>> = Vec::new();
    for ray in &dec.rays {
        let pts: Vec<(f64, f64, f64)> = ray
            .density_samples
            .iter()
            .filter(|d| d.h > 0.0 && d.s > 0.0)
            .map(|d| {
                let w = if d.stderr > 0.0 { (d.h / d.stderr).powi(2) } else { 1.0 };
                (d.s.ln(), d.h.ln(), w)
            })
            .collect();
        if pts.len() < 2 {
            continue;
        }
        let wsum: f64 = pts.iter().map(|p| p.2).sum();
        let xm = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / wsum;
        let ym = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / wsum;
        let centered: Vec<_> = pts.iter().map(|&(x, y, w)| (x - xm, y - ym, w)).collect();
        for &(x, y, w) in &centered {
            sxx += w * x * x;
            sxy += w * x * y;
        }
        rows.push(centered);
    }
    let points: usize = rows.iter().map(Vec::len).sum();
    if sxx <= 0.0 || points < 3 {
        return Err(Error::invalid("not enough populated bins for a power fit"));
    }
    let beta = sxy / sxx;
    let rss: f64 = rows.iter().flatten().map(|&(x, y, w)| w * (y - beta * x).powi(2)).sum();
    let dof = points.saturating_sub(rows.len() + 1).max(1);
    Ok(PowerFit {
        exponent: beta,
        stderr: (rss / dof as f64 / sxx).sqrt(),
        points,
    })
}

/// Bins whose relative standard error exceeds this are left out of the
/// curvature checks.
pub const MAX_REL_STDERR: f64 = 0.316;
/// Fraction of checks that must hold for a density check to pass.
pub const PASS_FRACTION: f64 = 0.95;
const MIN_DENSITY_SAMPLES: usize = 8;

fn rel_var(d: &DensitySample) -> Option<f64> {
    if d.h <= 0.0 {
        return None;
    }
    let r = d.stderr / d.h;
    (r <= MAX_REL_STDERR).then_some(r * r)
}

/// Checks `(log h)'' + ((log h)')²/(N−1) ≤ −K + tol` at interior bins of
/// every ray, using central differences of the 3-bin moving average of
/// `log h`. A point passes when the estimate is within three standard errors
/// of the bound.
pub fn check_cd_density(dec: &RayDecomposition, params: CurvatureParams, tol: f64) -> Result<VerificationReport> {
    params.validate()?;
    if params.n <= 1.0 {
        return Err(Error::invalid("the density inequality needs N > 1"));
    }
    if dec.bins < MIN_DENSITY_SAMPLES {
        return Err(Error::invalid(format!(
            "density check needs at least {MIN_DENSITY_SAMPLES} bins, got {}",
            dec.bins
        )));
    }
    let w = dec.bin_width;
    // smoothed second and first differences as stencils on L_{i-2..=i+2}
    let c2 = [1.0, -1.0, 0.0, -1.0, 1.0].map(|c| c / (3.0 * w * w));
    let c1 = [-1.0, -1.0, 0.0, 1.0, 1.0].map(|c| c / (6.0 * w));
    let bound = -params.k + tol;
    let (mut checked, mut passed, mut short) = (0usize, 0usize, 0usize);
    let mut worst = f64::NEG_INFINITY;
    for ray in &dec.rays {
        let ds = &ray.density_samples;
        if ds.len() < MIN_DENSITY_SAMPLES {
            short += 1;
            continue;
        }
        for i in 2..ds.len() - 2 {
            let win = &ds[i - 2..=i + 2];
            let vars: Option<Vec<f64>> = win.iter().map(rel_var).collect();
            let Some(vars) = vars else { continue };
            let logs: Vec<f64> = win.iter().map(|d| d.h.ln()).collect();
            let d2: f64 = c2.iter().zip(&logs).map(|(c, l)| c * l).sum();
            let d1: f64 = c1.iter().zip(&logs).map(|(c, l)| c * l).sum();
            let lhs = d2 + d1 * d1 / (params.n - 1.0);
            let grad = |k: usize| c2[k] + 2.0 * d1 / (params.n - 1.0) * c1[k];
            let sigma = (0..5).map(|k| grad(k).powi(2) * vars[k]).sum::<f64>().sqrt();
            checked += 1;
            worst = worst.max(lhs - bound);
            if lhs <= bound + 3.0 * sigma {
                passed += 1;
            }
        }
    }
    if checked == 0 {
        return Err(Error::invalid("no interior bins with enough counts for the density check"));
    }
    let fraction = passed as f64 / checked as f64;
    Ok(VerificationReport::new("cd_density", Relation::Ge, fraction, PASS_FRACTION, 0.0, 0.0)
        .with("K", params.k)
        .with("N", params.n)
        .with("tol", tol)
        .with("checked", checked)
        .with("passed", passed)
        .with("short_rays", short)
        .with("max_excess", worst))
}

/// Checks the one-dimensional measure contraction bounds
/// `(𝔰(b−s₁)/𝔰(b−s₀))^{N−1} ≤ h(s₁)/h(s₀) ≤ (𝔰(s₁−a)/𝔰(s₀−a))^{N−1}`
/// on every pair of bins `a < s₀ < s₁ < b` of each ray; `b` may be infinite.
pub fn check_mcp_bound(dec: &RayDecomposition, params: CurvatureParams, a: f64, b: f64) -> Result<VerificationReport> {
    params.validate()?;
    if params.n <= 1.0 {
        return Err(Error::invalid("the contraction bound needs N > 1"));
    }
    if !(a < b) {
        return Err(Error::invalid(format!("need a < b, got a = {a}, b = {b}")));
    }
    let kappa = params.k / (params.n - 1.0);
    if kappa > 0.0 && b - a > std::f64::consts::PI / kappa.sqrt() {
        return Err(Error::domain("b - a", b - a, format!("(0, {}]", std::f64::consts::PI / kappa.sqrt())));
    }
    let e = params.n - 1.0;
    let lower = |s0: f64, s1: f64| -> f64 {
        if b.is_infinite() {
            if kappa < 0.0 {
                (-(-kappa).sqrt() * (s1 - s0) * e).exp()
            } else {
                1.0
            }
        } else {
            (sin_kappa(kappa, b - s1) / sin_kappa(kappa, b - s0)).powf(e)
        }
    };
    let upper = |s0: f64, s1: f64| (sin_kappa(kappa, s1 - a) / sin_kappa(kappa, s0 - a)).powf(e);

    let (mut checked, mut passed) = (0usize, 0usize);
    let mut worst = 0.0f64;
    for ray in &dec.rays {
        let ds: Vec<(&DensitySample, f64)> = ray
            .density_samples
            .iter()
            .filter(|d| d.s > a && d.s < b)
            .filter_map(|d| rel_var(d).map(|v| (d, v)))
            .collect();
        for (x, d0) in ds.iter().enumerate() {
            for d1 in &ds[x..] {
                let (s0, s1) = (d0.0.s, d1.0.s);
                let ratio = d1.0.h / d0.0.h;
                let slack = 1.0 + 5.0 * (d0.1 + d1.1).sqrt() + 1e-12;
                let (lo, hi) = (lower(s0, s1), upper(s0, s1));
                checked += 1;
                if ratio <= hi * slack && ratio * slack >= lo {
                    passed += 1;
                } else {
                    worst = worst.max((ratio / hi).max(lo / ratio));
                }
            }
        }
    }
    if checked == 0 {
        return Err(Error::invalid("no bin pairs inside (a, b) with enough counts"));
    }
    let fraction = passed as f64 / checked as f64;
    Ok(VerificationReport::new("mcp_bound", Relation::Ge, fraction, PASS_FRACTION, 0.0, 0.0)
        .with("K", params.k)
        .with("N", params.n)
        .with("a", a)
        .with("b", if b.is_finite() { serde_json::json!(b) } else { serde_json::json!("inf") })
        .with("checked", checked)
        .with("passed", passed)
        .with("worst_ratio", worst))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spacetimes::Chart;
    use approx::assert_abs_diff_eq;

    fn table(h: impl Fn(f64) -> f64, count: u64, lo: f64, w: f64, bins: usize) -> Vec<DensitySample> {
        (0..bins)
            .map(|b| {
                let s = lo + (b as f64 + 0.5) * w;
                DensitySample {
                    s,
                    h: h(s),
                    stderr: 0.0,
                    count,
                }
            })
            .collect()
    }

    fn synthetic(h: impl Fn(f64) -> f64, n: f64) -> RayDecomposition {
        let st = SpacetimeDescriptor::new(Chart::Minkowski, 2);
        RayDecomposition::from_tables(
            st,
            CurvatureParams::new(0.0, n).unwrap(),
            vec![table(h, 1000, 0.5, 0.1, 12)],
            0.1,
        )
        .unwrap()
    }

    #[test]
    fn power_law_is_the_cd_equality_case() {
        for n in [2.0, 3.0, 4.0] {
            let dec = synthetic(|s| 3.0 * s.powf(n - 1.0), n);
            let k = CurvatureParams::new(0.0, n).unwrap();
            let r = check_cd_density(&dec, k, 1e-9).unwrap();
            // the discrete stencil of a power law is not exactly zero, but
            // the moving average biases it downwards only
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn constant_density_passes() {
        let dec = synthetic(|_| 0.7, 2.0);
        let r = check_cd_density(&dec, CurvatureParams::new(0.0, 2.0).unwrap(), 0.0).unwrap();
        assert!(r.pass);
        assert_eq!(r.lhs, 1.0);
    }

    #[test]
    fn injected_gaussian_growth_fails() {
        let dec = synthetic(|s| (s * s).exp(), 2.0);
        let r = check_cd_density(&dec, CurvatureParams::new(0.0, 2.0).unwrap(), 0.1).unwrap();
        assert!(!r.pass);
        assert_eq!(r.lhs, 0.0);
        assert!(r.metadata["max_excess"].as_f64().unwrap() > 1.5);
    }

    #[test]
    fn too_few_bins_is_an_error() {
        let st = SpacetimeDescriptor::new(Chart::Minkowski, 2);
        let dec = RayDecomposition::from_tables(
            st,
            CurvatureParams::new(0.0, 2.0).unwrap(),
            vec![table(|_| 1.0, 100, 0.0, 0.1, 5)],
            0.1,
        )
        .unwrap();
        assert!(check_cd_density(&dec, CurvatureParams::new(0.0, 2.0).unwrap(), 0.0).is_err());
    }

    #[test]
    fn mcp_power_law_saturates_the_upper_bound() {
        let dec = synthetic(|s| s * s, 3.0);
        let k = CurvatureParams::new(0.0, 3.0).unwrap();
        let r = check_mcp_bound(&dec, k, 0.0, f64::INFINITY).unwrap();
        assert!(r.pass);
        assert_eq!(r.lhs, 1.0);
        // a density growing faster than s^{N−1} violates the upper bound
        let dec = synthetic(|s| s.powi(4), 3.0);
        let r = check_mcp_bound(&dec, k, 0.0, f64::INFINITY).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn mcp_domain_precondition() {
        let dec = synthetic(|_| 1.0, 3.0);
        let k = CurvatureParams::new(2.0, 3.0).unwrap();
        assert!(check_mcp_bound(&dec, k, 0.0, 10.0).is_err());
        assert!(check_mcp_bound(&dec, k, 0.0, 2.0).is_ok());
    }

    #[test]
    fn equal_mass_cells_balance() {
        let labels: Vec<Vec<f64>> = (0..103).map(|i| vec![(i as f64 * 0.37).sin(), i as f64]).collect();
        let mut order: Vec<usize> = (0..103).collect();
        let mut cells = Vec::new();
        equal_mass_cells(&labels, &mut order, 10, &mut cells);
        assert_eq!(cells.len(), 10);
        let sizes: Vec<usize> = cells.iter().map(Vec::len).collect();
        assert!(sizes.iter().all(|&s| s == 10 || s == 11), "{sizes:?}");
        assert_eq!(sizes.iter().sum::<usize>(), 103);
    }

    #[test]
    fn point_decomposition_in_a_two_dimensional_cone() {
        let st = SpacetimeDescriptor::new(Chart::Cone, 2).with("aperture", 2.0);
        let o = AchronalSetDescriptor::point(&[0.0, 0.0]);
        let region = RegionDescriptor::new(st, vec![[-1.2, 1.2], [0.0, 1.6]]).with_predicate(Predicate::TauBand {
            set: o.clone(),
            lo: 0.5,
            hi: 1.1,
        });
        let opts = DecompositionOptions {
            max_cells: Some(8),
            s_range: Some([0.5, 1.1]),
            ..Default::default()
        };
        let dec = build_ray_decomposition_with(&region, &o, 40_000, 12, 3, &opts).unwrap();
        assert_eq!(dec.unassigned, 0);
        assert_eq!(dec.rays.len(), 8);
        let fit = fit_power_exponent(&dec).unwrap();
        assert!((fit.exponent - 1.0).abs() < 0.1, "{fit:?}");
        let (mass, se) = dec.disintegrated_mass();
        assert_abs_diff_eq!(mass, dec.volume, epsilon = 4.0 * se + 1e-12);
        // exact volume: ∫ s ds over (0.5, 1.1) times the rapidity range 2·artanh(1/√2)
        let exact = 0.5 * (1.21 - 0.25) * 2.0 * (1.0 / 2f64.sqrt()).atanh();
        assert!((dec.volume - exact).abs() < 4.0 * dec.volume_stderr, "{} vs {exact}", dec.volume);
    }
}
