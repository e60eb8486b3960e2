//! Brunn–Minkowski check for two time-translated squares.

use timelike::coefficients::CurvatureParams;
use timelike::config::joint;
use timelike::sampler::{sprinkle, RegionDescriptor};
use timelike::spacetimes::{Chart, SpacetimeDescriptor};
use timelike::verify::check_brunn_minkowski;

fn main() -> timelike::Result<()> {
    let st = SpacetimeDescriptor::new(Chart::Minkowski, 2);
    let s0 = sprinkle(&RegionDescriptor::new(st.clone(), vec![[0.0, 1.0], [0.0, 1.0]]), 300, 1)?;
    let s1 = sprinkle(&RegionDescriptor::new(st.clone(), vec![[0.0, 1.0], [3.0, 4.0]]), 300, 2)?;
    let sample = joint(&st, &s0, &s1)?;
    let a0: Vec<usize> = (0..s0.len()).collect();
    let a1: Vec<usize> = (s0.len()..sample.len()).collect();
    for t in [0.25, 0.5, 0.75] {
        let r = check_brunn_minkowski(&sample, &a0, &a1, t, CurvatureParams::new(0.0, 2.0)?)?;
        println!("t = {t}: {:.4} >= {:.4} (± {:.4}) {}", r.lhs, r.rhs, r.stderr, r.pass);
    }
    Ok(())
}
