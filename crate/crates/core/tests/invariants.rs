use approx::assert_relative_eq;
use proptest::prelude::*;

use timelike::coefficients::{profile_d, profile_d_quadrature, tau_coeff, CurvatureParams};
use timelike::sampler::CausalSample;
use timelike::spacetimes::rays::RayFamily;
use timelike::spacetimes::{AchronalSetDescriptor, Chart, Event, Spacetime, SpacetimeDescriptor};
use timelike::transport::{solve_lp_optimal, DiscreteMeasure};
use timelike::verify::{Relation, VerificationReport};

/// A future-directed timelike step: spatial part `v`, time part above `|v|`.
fn step(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    (prop::collection::vec(-1.0..1.0f64, dim - 1), 0.05..2.0f64).prop_map(|(v, extra)| {
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut s = v;
        s.push(r + extra);
        s
    })
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reverse_triangle_inequality(x in prop::collection::vec(-1.0..1.0f64, 3), a in step(3), b in step(3)) {
        let st = Spacetime::minkowski(3).unwrap();
        let y = add(&x, &a);
        let z = add(&y, &b);
        let ev = |c: &Vec<f64>| Event::new(Chart::Minkowski, c.clone());
        let (xy, yz, xz) = (
            st.tau(&ev(&x), &ev(&y)).unwrap(),
            st.tau(&ev(&y), &ev(&z)).unwrap(),
            st.tau(&ev(&x), &ev(&z)).unwrap(),
        );
        prop_assert!(xy > 0.0 && yz > 0.0);
        prop_assert!(xz >= xy + yz - 1e-12);
    }

    #[test]
    fn geodesic_points_split_tau(a in step(2), t in 0.0..1.0f64) {
        let st = Spacetime::truncated_cone(2, 1.0).unwrap();
        let x = Event::new(Chart::Cone, vec![0.0, 0.1]);
        let y = Event::new(Chart::Cone, vec![0.05 * a[0], 0.1 + a[1]]);
        prop_assume!(st.contains(&y));
        let total = st.tau(&x, &y).unwrap();
        let mid = st.geodesic_point(&x, &y, t).unwrap();
        assert_relative_eq!(st.tau(&x, &mid).unwrap(), t * total, epsilon = 1e-10);
        assert_relative_eq!(st.tau(&mid, &y).unwrap(), (1.0 - t) * total, epsilon = 1e-10);
    }

    #[test]
    fn rays_are_unit_speed(dir in step(3), s in 0.01..3.0f64) {
        let st = Spacetime::minkowski(3).unwrap();
        let o = AchronalSetDescriptor::point(&[0.0, 0.0, 0.0]).build(&st).unwrap();
        let fam = RayFamily::for_set(&st, &o).unwrap();
        let (label, s0) = fam.foot(&dir).unwrap();
        let p = fam.point(&label, s).unwrap();
        let (back, s1) = fam.foot(&p).unwrap();
        assert_relative_eq!(s1, s, epsilon = 1e-10);
        for (u, v) in back.iter().zip(&label) {
            assert_relative_eq!(u, v, epsilon = 1e-9);
        }
        let q = fam.point(&label, s0).unwrap();
        for (u, v) in q.iter().zip(&dir) {
            assert_relative_eq!(u, v, epsilon = 1e-9);
        }
    }

    #[test]
    fn distortion_coefficients_order_by_curvature(k in -3.0..3.0f64, n in 1.5..6.0f64, t in 0.0..1.0f64, theta in 0.01..1.0f64) {
        let p = CurvatureParams::new(k, n).unwrap();
        let c = tau_coeff(p, t, theta).to_f64();
        // positive curvature helps, negative curvature hurts
        prop_assert!(k.signum() * (c - t) >= -1e-12, "K = {k}: {c} vs {t}");
        let flat = tau_coeff(CurvatureParams::new(0.0, n).unwrap(), t, theta).to_f64();
        assert_relative_eq!(flat, t, epsilon = 1e-12);
    }

    #[test]
    fn profile_matches_its_quadrature(k in -2.0..0.5f64, n in 2.0..5.0f64, t in 0.05..1.5f64) {
        let p = CurvatureParams::new(k, n).unwrap();
        let closed = profile_d(p, t).unwrap();
        let quad = profile_d_quadrature(p, t).unwrap();
        assert_relative_eq!(closed, quad, epsilon = 1e-9);
        prop_assert!(closed > 0.0);
    }

    #[test]
    fn report_pass_flag_is_recomputable(lhs in -10.0..10.0f64, rhs in -10.0..10.0f64, tol in 0.0..1.0f64, which in 0..3usize) {
        let rel = [Relation::Le, Relation::Ge, Relation::Eq][which];
        let r = VerificationReport::new("r", rel, lhs, rhs, tol, 0.0);
        prop_assert_eq!(r.pass, r.recomputed_pass());
        let json = serde_json::to_string(&r).unwrap();
        let back: VerificationReport = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back.pass, r.pass);
        prop_assert_eq!(back.lhs, r.lhs);
    }

    #[test]
    fn optimal_plans_have_the_right_marginals(seed in 0u64..1000, k in 1usize..6) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let st = SpacetimeDescriptor::new(Chart::Minkowski, 2);
        let mut pts: Vec<Vec<f64>> = (0..k).map(|_| vec![rng.gen_range(-0.2..0.2), rng.gen_range(0.0..0.3)]).collect();
        pts.extend((0..k).map(|_| vec![rng.gen_range(-0.2..0.2), rng.gen_range(1.0..1.3)]));
        let sample = CausalSample::from_coords(&st, pts).unwrap();
        let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..1.0)).collect();
        let mu = DiscreteMeasure::normalized((0..k).collect(), &w).unwrap();
        let nu = DiscreteMeasure::uniform((k..2 * k).collect()).unwrap();
        let plan = solve_lp_optimal(&sample, &mu, &nu, 0.5).unwrap();
        prop_assert!(plan.feasible && plan.timelike);
        for (a, &i) in mu.support.iter().enumerate() {
            let out: f64 = plan.entries.iter().filter(|e| e.i == i).map(|e| e.mass).sum();
            assert_relative_eq!(out, mu.masses[a], epsilon = 1e-12);
        }
        for &j in &nu.support {
            let inflow: f64 = plan.entries.iter().filter(|e| e.j == j).map(|e| e.mass).sum();
            assert_relative_eq!(inflow, 1.0 / k as f64, epsilon = 1e-12);
        }
        let gap = plan.certificate.as_ref().unwrap().gap.abs();
        prop_assert!(gap <= 1e-9);
    }
}
