//! Time separation and intermediate points in the model charts.

use timelike::spacetimes::{schwarzschild, Spacetime};

fn main() -> timelike::Result<()> {
    let mink = Spacetime::minkowski(3)?;
    let x = mink.event(vec![0.0, 0.0, 0.0])?;
    let y = mink.event(vec![0.3, 0.4, 2.0])?;
    println!("minkowski: tau(x, y) = {:.6}", mink.tau(&x, &y)?);
    let mid = mink.geodesic_point(&x, &y, 0.5)?;
    println!("midpoint {:?}, tau(x, mid) = {:.6}", mid.coords, mink.tau(&x, &mid)?);

    let cone = Spacetime::truncated_cone(2, 1.0)?;
    let o = cone.event(vec![0.0, 0.0])?;
    let p = cone.event(vec![0.2, 1.0])?;
    println!("truncated cone: tau(o, p) = {:.6}", cone.tau(&o, &p)?);

    for r in [0.5, 1.0, 1.5] {
        println!("schwarzschild m=1: tau to r=0 from r={r} is {:.6}", schwarzschild::tau_to_singularity(1.0, r)?);
    }
    Ok(())
}
