//! Normalized content of the level sets of a flat cone's vertex distance.

use timelike::coefficients::CurvatureParams;
use timelike::sampler::RegionDescriptor;
use timelike::spacetimes::{AchronalSetDescriptor, Chart, SpacetimeDescriptor};
use timelike::verify::{check_monotonicity, MonteCarlo};

fn main() -> timelike::Result<()> {
    let st = SpacetimeDescriptor::new(Chart::Cone, 2).with("aperture", 2.0);
    let window = RegionDescriptor::new(st, vec![[-1.7, 1.7], [0.0, 2.4]]);
    let o = AchronalSetDescriptor::point(&[0.0, 0.0]);
    let grid: Vec<f64> = (1..=6).map(|k| 0.25 * k as f64).collect();
    let params = CurvatureParams::new(0.0, 2.0)?;
    for r in check_monotonicity(&window, &o, params, &grid, &MonteCarlo::new(200_000, 2))? {
        println!("{}: {:.4} <= {:.4} (± {:.4}) {}", r.name, r.lhs, r.rhs, r.stderr, r.pass);
    }
    println!("constant for this cone: {:.4}", 2.0 * 0.5f64.sqrt().atanh());
    Ok(())
}
