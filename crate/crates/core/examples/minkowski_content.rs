//! Future Minkowski content of a hyperboloid cap, estimated directly and from
//! a ray decomposition.

use timelike::content::{content_via_rays, future_content};
use timelike::localization::{build_ray_decomposition_with, DecompositionOptions};
use timelike::sampler::{Predicate, RegionDescriptor};
use timelike::spacetimes::{AchronalSetDescriptor, Chart, SpacetimeDescriptor};

fn main() -> timelike::Result<()> {
    let st = SpacetimeDescriptor::new(Chart::Cone, 2).with("aperture", 2.0);
    let window = RegionDescriptor::new(st, vec![[-1.6, 1.6], [0.0, 2.3]]);
    let o = AchronalSetDescriptor::point(&[0.0, 0.0]);
    let level = AchronalSetDescriptor::level(o.clone(), 1.0);

    let direct = future_content(&level, &window, &[0.005, 0.01, 0.02], 200_000, 3)?;
    println!("direct: {:.4} ± {:.4}", direct.value, direct.stderr);
    for p in &direct.per_eps {
        println!("  eps {:.3}: {:.4}", p.eps, p.value);
    }

    let band = [0.5, 1.5];
    let region = window.with_predicate(Predicate::TauBand {
        set: o.clone(),
        lo: band[0],
        hi: band[1],
    });
    let opts = DecompositionOptions {
        s_range: Some(band),
        max_cells: Some(32),
        ..DecompositionOptions::default()
    };
    let dec = build_ray_decomposition_with(&region, &o, 200_000, 10, 4, &opts)?;
    let rays = content_via_rays(&dec, &level)?;
    println!("via rays: {:.4} ± {:.4} over {} rays", rays.value, rays.stderr, rays.rays_used);
    println!("exact: {:.4}", 2.0 * 0.5f64.sqrt().atanh());
    Ok(())
}
