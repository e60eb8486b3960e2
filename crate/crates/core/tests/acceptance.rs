//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the binary exits non-zero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use timelike::coefficients::CurvatureParams;
use timelike::config::joint;
use timelike::content::{content_via_rays, future_content};
use timelike::localization::{
    build_ray_decomposition_with, check_cd_density, check_mcp_bound, fit_power_exponent, localize_zero_mean,
    DecompositionOptions,
};
use timelike::sampler::{sprinkle, CausalSample, Predicate, RegionDescriptor};
use timelike::spacetimes::{AchronalSetDescriptor, Chart, SpacetimeDescriptor};
use timelike::transport::{brute_force_optimal, check_cyclical_monotonicity, solve_lp_optimal, DiscreteMeasure};
use timelike::verify::{
    check_brunn_minkowski, check_claim_sharp_identity, check_isoperimetric, check_monotonicity,
    check_schwarzschild_bound, MonteCarlo,
};

type Outcome = Result<(bool, String), String>;

/// Composite Simpson rule.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn truncated_window(dim: usize, a: f64) -> RegionDescriptor {
    let st = SpacetimeDescriptor::new(Chart::Cone, dim).with("a", a);
    let mut b = vec![[-a, a]; dim - 1];
    b.push([0.0, 1.1 * (1.0 + a * a).sqrt()]);
    RegionDescriptor::new(st, b)
}

fn aperture_window(dim: usize, ap: f64, s_max: f64) -> RegionDescriptor {
    let st = SpacetimeDescriptor::new(Chart::Cone, dim).with("aperture", ap);
    let half = s_max / (ap - 1.0).sqrt();
    let mut b = vec![[-half, half]; dim - 1];
    b.push([0.0, s_max * (ap / (ap - 1.0)).sqrt()]);
    RegionDescriptor::new(st, b)
}

fn origin(dim: usize) -> AchronalSetDescriptor {
    AchronalSetDescriptor::point(&vec![0.0; dim])
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

/// 2D truncated cones: the hyperboloid cap is extremal.
fn isoperimetric_2d() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for a in [0.5f64, 1.0, 2.0] {
        // area of {t = √(1+x²), |x| ≤ a} and volume of the truncated cone
        let c = (1.0 + a * a).sqrt() / a;
        let area = 2.0 * simpson(|x| 1.0 / (1.0 + x * x).sqrt(), 0.0, a, 20_000);
        let vol = 2.0 * simpson(|x| (1.0 + x * x).sqrt() - c * x, 0.0, a, 20_000);
        let quad = rel(area / 2.0, vol);
        ok &= quad <= 1e-10 && rel(vol, a.asinh()) <= 1e-10;

        let params = CurvatureParams::new(0.0, 2.0).map_err(e)?;
        let s = AchronalSetDescriptor::hyperboloid(&[0.0, 0.0], 1.0);
        let r = check_isoperimetric(&truncated_window(2, a), &origin(2), &s, params, &MonteCarlo::new(1_000_000, 11))
            .map_err(e)?;
        let mc = rel(r.lhs, r.rhs).max(rel(r.rhs, vol));
        ok &= r.pass && mc <= 0.01;
        notes.push(format!(
            "a={a}: quad {quad:.1e}, area x profile {:.4} vs volume {:.4} (exact {:.4}), {:.2}% off",
            r.lhs,
            r.rhs,
            vol,
            100.0 * mc
        ));
    }
    Ok((ok, notes.join("; ")))
}

fn sharp_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for n in 2..=5u32 {
        for a in [0.5f64, 1.0, 2.0, 4.0] {
            let r = check_claim_sharp_identity(n, a).map_err(e)?;
            let exact = a.powi(n as i32) * (1.0 + a * a).sqrt();
            let d = (r.lhs - exact).abs();
            worst = worst.max(d);
            ok &= r.pass && d <= 1e-8;
        }
    }
    Ok((ok, format!("max |lhs - a^n sqrt(1+a^2)| = {worst:.1e}")))
}

fn isoperimetric_4d() -> Outcome {
    let params = CurvatureParams::new(0.0, 4.0).map_err(e)?;
    let s = AchronalSetDescriptor::hyperboloid(&[0.0; 4], 1.0);
    let r = check_isoperimetric(&truncated_window(4, 1.0), &origin(4), &s, params, &MonteCarlo::new(1_000_000, 12))
        .map_err(e)?;
    let area = r.metadata["content"].as_f64().unwrap_or(f64::NAN);
    let exact_area = 4.0 * PI * simpson(|r| r.sinh().powi(2), 0.0, 1f64.asinh(), 10_000);
    let gap = rel(area, 4.0 * r.rhs);
    Ok((
        gap <= 0.03,
        format!(
            "area {area:.4} (exact {exact_area:.4}), 4 vol {:.4} (exact {:.4}), gap {:.2}%",
            4.0 * r.rhs,
            exact_area,
            100.0 * gap
        ),
    ))
}

fn schwarzschild() -> Outcome {
    let m = 1.0;
    let grid: Vec<f64> = (0..50).map(|i| 2.0 * m * (i as f64 + 0.5) / 50.0).collect();
    let reports = check_schwarzschild_bound(m, 0.0, 1.0, &grid).map_err(e)?;
    let all = reports.iter().all(|r| r.pass && r.slack > 0.0);
    // τ(r) = 2m(θ − sin θ cos θ) with r = 2m sin²θ
    let spot = &check_schwarzschild_bound(m, 0.0, 1.0, &[1.0]).map_err(e)?[0];
    let th = (1.0f64 / 2.0).sqrt().asin();
    let exact = 4.0 * PI * 2.0 * (th - th.sin() * th.cos());
    let d = (spot.lhs - exact).abs();
    Ok((
        all && d <= 1e-10,
        format!("{} radii, spot lhs {:.6} (|err| {d:.1e}), rhs {:.4}", reports.len(), spot.lhs, spot.rhs),
    ))
}

fn monotonicity() -> Outcome {
    let grid: Vec<f64> = (0..10).map(|k| 1.0 + 0.1 * k as f64).collect();
    let t_max = grid[9] + 0.1;
    let mut ok = true;
    let mut notes = Vec::new();
    for dim in [2usize, 4] {
        let params = CurvatureParams::new(0.0, dim as f64).map_err(e)?;
        let w = aperture_window(dim, 2.0, t_max);
        let reports =
            check_monotonicity(&w, &origin(dim), params, &grid, &MonteCarlo::new(1_000_000, 20 + dim as u64)).map_err(e)?;
        let passed = reports.iter().filter(|r| r.pass).count();
        ok &= passed == reports.len();
        let mut note = format!("{dim}D {passed}/{} pairs", reports.len());
        if dim == 2 {
            let exact = 2.0 * (0.5f64.sqrt()).atanh();
            let worst = reports
                .iter()
                .flat_map(|r| [r.lhs, r.rhs])
                .map(|j| rel(j, exact))
                .fold(0.0, f64::max);
            ok &= worst <= 0.02;
            note.push_str(&format!(", constant within {:.2}%", 100.0 * worst));
        }
        notes.push(note);
    }
    Ok((ok, notes.join("; ")))
}

fn diamond_point(rng: &mut ChaCha8Rng, dim: usize, t0: f64, half: f64) -> Vec<f64> {
    loop {
        let mut x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-half..half)).collect();
        let r = x[..dim - 1].iter().map(|v| v * v).sum::<f64>().sqrt();
        if r + x[dim - 1].abs() < half {
            x[dim - 1] += t0 + half;
            return x;
        }
    }
}

fn transport_brute_force() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut worst, mut feasible, mut audited) = (0.0f64, 0, 0);
    let mut ok = true;
    for inst in 0..200 {
        let dim = 2 + (inst / 2) % 2;
        let k = rng.gen_range(1..=8);
        let st = SpacetimeDescriptor::new(Chart::Minkowski, dim);
        // every other instance draws the sources below (0, 1) and the targets
        // above it, which guarantees a timelike coupling
        let split = inst % 2 == 0;
        let pts: Vec<Vec<f64>> = (0..2 * k)
            .map(|i| match (split, i < k) {
                (true, true) => diamond_point(&mut rng, dim, 0.0, 0.5),
                (true, false) => diamond_point(&mut rng, dim, 1.0, 0.5),
                _ => diamond_point(&mut rng, dim, 0.0, 1.0),
            })
            .collect();
        let sample = CausalSample::from_coords(&st, pts).map_err(e)?;
        let mut idx: Vec<usize> = (0..2 * k).collect();
        if inst % 4 == 1 {
            idx.sort_by(|&a, &b| sample.events[a].coords[dim - 1].total_cmp(&sample.events[b].coords[dim - 1]));
        }
        let mu = DiscreteMeasure::uniform(idx[..k].to_vec()).map_err(e)?;
        let nu = DiscreteMeasure::uniform(idx[k..].to_vec()).map_err(e)?;
        let p = [0.25, 0.5, 0.75, 1.0][rng.gen_range(0..4)];
        let lp = solve_lp_optimal(&sample, &mu, &nu, p).map_err(e)?;
        let bf = brute_force_optimal(&sample, &mu, &nu, p).map_err(e)?;
        if lp.feasible != bf.feasible {
            ok = false;
            continue;
        }
        if !lp.feasible {
            continue;
        }
        feasible += 1;
        let d = (lp.value - bf.value).abs();
        worst = worst.max(d);
        ok &= d <= 1e-10;
        let audit = check_cyclical_monotonicity(&lp, &sample, 4).map_err(e)?;
        ok &= audit.monotone;
        audited += 1;
    }
    Ok((
        ok && feasible > 0,
        format!("200 instances, {feasible} feasible, max |LP - brute| = {worst:.1e}, {audited} audits"),
    ))
}

fn cone_decomposition() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for dim in [2usize, 3] {
        let band = [0.3, 1.5];
        let o = origin(dim);
        let reg = aperture_window(dim, 2.0, band[1]).with_predicate(Predicate::TauBand {
            set: o.clone(),
            lo: band[0],
            hi: band[1],
        });
        let params = CurvatureParams::new(0.0, dim as f64).map_err(e)?;
        let dec = build_ray_decomposition_with(
            &reg,
            &o,
            100_000,
            12,
            70 + dim as u64,
            &DecompositionOptions {
                max_cells: Some(16),
                s_range: Some(band),
                curvature: Some(params),
                ..DecompositionOptions::default()
            },
        )
        .map_err(e)?;
        let cd = check_cd_density(&dec, params, 0.0).map_err(e)?;
        let mcp = check_mcp_bound(&dec, params, 0.0, f64::INFINITY).map_err(e)?;
        let fit = fit_power_exponent(&dec).map_err(e)?;
        let target = dim as f64 - 1.0;
        ok &= cd.pass && mcp.pass && (fit.exponent - target).abs() <= 0.1;
        notes.push(format!(
            "{dim}D: CD {:.1}%, MCP {}, exponent {:.3} vs {target}",
            100.0 * cd.lhs,
            if mcp.pass { "ok" } else { "fail" },
            fit.exponent
        ));
    }
    Ok((ok, notes.join("; ")))
}

fn content_agreement() -> Outcome {
    let o = origin(2);
    let band = [0.25, 2.25];
    let window = aperture_window(2, 2.0, 2.4);
    let reg = window.clone().with_predicate(Predicate::TauBand {
        set: o.clone(),
        lo: band[0],
        hi: band[1],
    });
    let dec = build_ray_decomposition_with(
        &reg,
        &o,
        1_000_000,
        20,
        80,
        &DecompositionOptions {
            max_cells: Some(32),
            s_range: Some(band),
            ..DecompositionOptions::default()
        },
    )
    .map_err(e)?;
    let mut ok = true;
    let mut notes = Vec::new();
    for (i, t) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        let vt = AchronalSetDescriptor::level(o.clone(), t);
        let eps: Vec<f64> = [0.005, 0.01, 0.02].iter().map(|f| f * t).collect();
        let direct = future_content(&vt, &window, &eps, 1_000_000, 81 + i as u64).map_err(e)?;
        let rays = content_via_rays(&dec, &vt).map_err(e)?;
        let se = direct.stderr.hypot(rays.stderr);
        let z = (direct.value - rays.value).abs() / se;
        ok &= z <= 4.0;
        notes.push(format!("t={t}: {:.4} vs {:.4} ({z:.1} sigma)", direct.value, rays.value));
    }
    Ok((ok, notes.join("; ")))
}

fn zero_mean() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let st = SpacetimeDescriptor::new(Chart::Minkowski, 2);
    let (mut rays, mut worst) = (0, 0.0f64);
    let mut ok = true;
    for _ in 0..50 {
        // lower half in the diamond below (0, 1), upper half above it, so every
        // lower event precedes every upper one
        let mut pts: Vec<Vec<f64>> = (0..10).map(|_| diamond_point(&mut rng, 2, 0.0, 0.5)).collect();
        pts.extend((0..10).map(|_| diamond_point(&mut rng, 2, 1.0, 0.5)));
        let sample = CausalSample::from_coords(&st, pts).map_err(e)?;
        let mut f: Vec<f64> = (0..20)
            .map(|i| {
                let v = if rng.gen_bool(0.2) && i % 10 != 0 { 0.0 } else { rng.gen_range(0.1..1.0) };
                if i < 10 {
                    v
                } else {
                    -v
                }
            })
            .collect();
        let pos: f64 = f[..10].iter().sum();
        let neg: f64 = -f[10..].iter().sum::<f64>();
        for v in &mut f[10..] {
            *v *= pos / neg;
        }
        let report = localize_zero_mean(&sample, &f).map_err(e)?;
        ok &= report.all_balanced && report.rays.iter().all(|r| r.balanced);
        rays += report.rays.len();
        for r in &report.rays {
            worst = worst.max(r.balance.abs() / r.mass);
        }
    }
    Ok((ok, format!("50 functions, {rays} rays, max |balance|/mass = {worst:.1e}")))
}

fn brunn_minkowski() -> Outcome {
    let st = SpacetimeDescriptor::new(Chart::Minkowski, 2);
    let s0 = sprinkle(&RegionDescriptor::new(st.clone(), vec![[0.0, 1.0], [0.0, 1.0]]), 400, 100).map_err(e)?;
    let s1 = sprinkle(&RegionDescriptor::new(st.clone(), vec![[0.0, 1.0], [3.0, 4.0]]), 400, 101).map_err(e)?;
    let sample = joint(&st, &s0, &s1).map_err(e)?;
    let a0: Vec<usize> = (0..400).collect();
    let a1: Vec<usize> = (400..800).collect();
    let params = CurvatureParams::new(0.0, 2.0).map_err(e)?;
    let r = check_brunn_minkowski(&sample, &a0, &a1, 0.5, params).map_err(e)?;
    let gap = rel(r.lhs, r.rhs);
    Ok((
        r.lhs >= r.rhs - 4.0 * r.stderr && gap <= 0.03,
        format!("lhs {:.4}, rhs {:.4}, stderr {:.4}, gap {:.2}%", r.lhs, r.rhs, r.stderr, 100.0 * gap),
    ))
}

fn main() -> ExitCode {
    // name, check, runtime limit in seconds
    let criteria: [(&str, fn() -> Outcome, f64); 10] = [
        ("2D isoperimetric extremal cones", isoperimetric_2d, 30.0),
        ("sharpness identity", sharp_identity, 1.0),
        ("4D isoperimetric extremal cone", isoperimetric_4d, 120.0),
        ("Schwarzschild interior bound", schwarzschild, 1.0),
        ("monotonicity of normalized content", monotonicity, 60.0),
        ("transport LP vs brute force", transport_brute_force, 30.0),
        ("cone ray decomposition", cone_decomposition, 60.0),
        ("content directly and via rays", content_agreement, 60.0),
        ("zero-mean localization", zero_mean, 10.0),
        ("Brunn-Minkowski equality case", brunn_minkowski, 60.0),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(r) => r,
            Err(msg) => (false, format!("error: {msg}")),
        };
        let secs = start.elapsed().as_secs_f64();
        let pass = pass && secs < *limit;
        failed += usize::from(!pass);
        println!(
            "criterion {:>2} {} {name}: {detail} [{secs:.1}s of {limit}s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
