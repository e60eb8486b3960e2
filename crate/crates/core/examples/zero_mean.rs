//! Splits a zero-mean function on a small sample into balanced rays.

use timelike::localization::localize_zero_mean;
use timelike::sampler::CausalSample;
use timelike::spacetimes::{Chart, SpacetimeDescriptor};

fn main() -> timelike::Result<()> {
    let st = SpacetimeDescriptor::new(Chart::Minkowski, 2);
    let coords = vec![
        vec![0.0, 0.0],
        vec![5.0, 0.0],
        vec![0.1, 1.0],
        vec![4.9, 1.2],
        vec![0.0, 2.0],
    ];
    let sample = CausalSample::from_coords(&st, coords)?;
    let f = [1.0, 2.0, -0.5, -2.0, -0.5];
    let report = localize_zero_mean(&sample, &f)?;
    for ray in &report.rays {
        println!("members {:?}: mass {:.3}, balance {:.1e}, balanced {}", ray.members, ray.mass, ray.balance, ray.balanced);
    }
    println!("all balanced: {}", report.all_balanced);
    Ok(())
}
