//! Sprinkles the future light cone of the origin inside a box and estimates
//! its volume (exactly 3).

use timelike::sampler::{estimate_volume, sprinkle, Predicate, RegionDescriptor};
use timelike::spacetimes::{AchronalSetDescriptor, Chart, SpacetimeDescriptor};

fn main() -> timelike::Result<()> {
    let st = SpacetimeDescriptor::new(Chart::Minkowski, 2);
    let region = RegionDescriptor::new(st, vec![[-1.0, 1.0], [0.0, 2.0]]).with_predicate(Predicate::TauBand {
        set: AchronalSetDescriptor::point(&[0.0, 0.0]),
        lo: 0.0,
        hi: 2.0,
    });
    let sample = sprinkle(&region, 1000, 42)?;
    println!("{} events, total weight {:.4} ± {:.4}", sample.len(), sample.total_weight(), sample.volume_stderr);
    let vol = estimate_volume(&region, 200_000, 7)?;
    println!("volume {:.4} ± {:.4}", vol.value, vol.stderr);
    for e in sample.events.iter().take(5) {
        println!("  {:?}", e.coords);
    }
    Ok(())
}
