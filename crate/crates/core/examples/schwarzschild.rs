//! The closed-form bound inside the Schwarzschild horizon.

use timelike::verify::check_schwarzschild_bound;

fn main() -> timelike::Result<()> {
    let grid: Vec<f64> = (1..=7).map(|k| 0.25 * k as f64).collect();
    for r in check_schwarzschild_bound(1.0, 0.0, 1.0, &grid)? {
        println!("{}: {:.6} <= {:.6} ({})", r.name, r.lhs, r.rhs, if r.pass { "ok" } else { "violated" });
    }
    Ok(())
}
