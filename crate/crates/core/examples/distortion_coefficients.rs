//! Prints distortion coefficients and the isoperimetric profile for a few
//! curvature bounds.

use timelike::coefficients::{profile_d, tau_coeff, CurvatureParams};

fn main() -> timelike::Result<()> {
    let theta = 1.0;
    for k in [-1.0, 0.0, 1.0] {
        let p = CurvatureParams::new(k, 3.0)?;
        let taus: Vec<String> = [0.25, 0.5, 0.75]
            .iter()
            .map(|&t| format!("{:.6}", tau_coeff(p, t, theta).to_f64()))
            .collect();
        println!("K = {k:>4}: tau(t = 1/4, 1/2, 3/4) = [{}], D(1) = {:.6}", taus.join(", "), profile_d(p, theta)?);
    }
    Ok(())
}
