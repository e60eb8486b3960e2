//! Optimal coupling between two small point clouds, checked against brute
//! force and audited for cyclical monotonicity.

use timelike::sampler::CausalSample;
use timelike::spacetimes::{Chart, SpacetimeDescriptor};
use timelike::transport::{brute_force_optimal, check_cyclical_monotonicity, displacement, solve_lp_optimal, DiscreteMeasure};

fn main() -> timelike::Result<()> {
    let st = SpacetimeDescriptor::new(Chart::Minkowski, 2);
    let coords = vec![
        vec![-0.2, 0.0],
        vec![0.1, 0.1],
        vec![0.3, 0.05],
        vec![-0.1, 1.0],
        vec![0.4, 1.2],
        vec![0.0, 1.5],
    ];
    let sample = CausalSample::from_coords(&st, coords)?;
    let mu = DiscreteMeasure::uniform(vec![0, 1, 2])?;
    let nu = DiscreteMeasure::uniform(vec![3, 4, 5])?;
    let p = 0.5;
    let plan = solve_lp_optimal(&sample, &mu, &nu, p)?;
    let brute = brute_force_optimal(&sample, &mu, &nu, p)?;
    println!("LP value {:.12}, brute force {:.12}", plan.value, brute.value);
    for e in &plan.entries {
        println!("  {} -> {}: {:.4}", e.i, e.j, e.mass);
    }
    let audit = check_cyclical_monotonicity(&plan, &sample, 3)?;
    println!("cyclically monotone: {} ({} cycles)", audit.monotone, audit.cycles_checked);
    let mid = displacement(&plan, &sample, 0.5)?;
    println!("midpoint measure has {} atoms", mid.events.len());
    Ok(())
}
