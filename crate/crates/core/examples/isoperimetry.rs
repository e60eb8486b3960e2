//! Isoperimetric check in a truncated cone: the hyperboloid cap is extremal,
//! a flat cap is not.

use timelike::coefficients::CurvatureParams;
use timelike::sampler::RegionDescriptor;
use timelike::spacetimes::{AchronalSetDescriptor, Chart, SpacetimeDescriptor};
use timelike::verify::{check_isoperimetric, MonteCarlo};

fn main() -> timelike::Result<()> {
    let a: f64 = 1.0;
    let st = SpacetimeDescriptor::new(Chart::Cone, 2).with("a", a);
    let window = RegionDescriptor::new(st, vec![[-a, a], [0.0, 1.1 * (1.0 + a * a).sqrt()]]);
    let o = AchronalSetDescriptor::point(&[0.0, 0.0]);
    let params = CurvatureParams::new(0.0, 2.0)?;
    let mc = MonteCarlo::new(200_000, 1);
    for (name, s) in [
        ("hyperboloid", AchronalSetDescriptor::hyperboloid(&[0.0, 0.0], 1.0)),
        ("flat cap", AchronalSetDescriptor::slice(1.2)),
    ] {
        let r = check_isoperimetric(&window, &o, &s, params, &mc)?;
        println!(
            "{name}: content x profile = {:.4}, cone volume = {:.4}, slack {:.4} ± {:.4}, pass {}",
            r.lhs, r.rhs, r.slack, r.stderr, r.pass
        );
    }
    Ok(())
}
