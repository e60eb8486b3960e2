//! Ray decomposition of a sprinkled flat cone from its vertex, with the
//! one-dimensional curvature checks and the fitted density exponent.

use timelike::coefficients::CurvatureParams;
use timelike::localization::{
    build_ray_decomposition_with, check_cd_density, check_mcp_bound, fit_power_exponent, DecompositionOptions,
};
use timelike::sampler::{Predicate, RegionDescriptor};
use timelike::spacetimes::{AchronalSetDescriptor, Chart, SpacetimeDescriptor};

fn main() -> timelike::Result<()> {
    let st = SpacetimeDescriptor::new(Chart::Cone, 3).with("aperture", 2.0);
    let o = AchronalSetDescriptor::point(&[0.0, 0.0, 0.0]);
    let band = [0.3, 1.5];
    let region = RegionDescriptor::new(st, vec![[-1.5, 1.5], [-1.5, 1.5], [0.0, 2.2]]).with_predicate(Predicate::TauBand {
        set: o.clone(),
        lo: band[0],
        hi: band[1],
    });
    let params = CurvatureParams::new(0.0, 3.0)?;
    let dec = build_ray_decomposition_with(
        &region,
        &o,
        50_000,
        12,
        1,
        &DecompositionOptions {
            max_cells: Some(16),
            s_range: Some(band),
            curvature: Some(params),
            ..DecompositionOptions::default()
        },
    )?;
    let (mass, se) = dec.disintegrated_mass();
    println!("{} rays, mass {mass:.4} ± {se:.4}, volume {:.4}", dec.rays.len(), dec.volume);
    let fit = fit_power_exponent(&dec)?;
    println!("density exponent {:.3} ± {:.3} (expect 2)", fit.exponent, fit.stderr);
    for r in [check_cd_density(&dec, params, 0.0)?, check_mcp_bound(&dec, params, 0.0, f64::INFINITY)?] {
        println!("{}: lhs {:.4}, rhs {:.4}, pass {}", r.name, r.lhs, r.rhs, r.pass);
    }
    Ok(())
}
