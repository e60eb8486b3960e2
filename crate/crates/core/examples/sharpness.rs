//! The quadrature identity behind the sharpness of the flat profile.

use timelike::verify::check_claim_sharp_identity;

fn main() -> timelike::Result<()> {
    for n in 2..=5 {
        for a in [0.5, 1.0, 2.0] {
            let r = check_claim_sharp_identity(n, a)?;
            println!("n = {n}, a = {a}: {:.12} vs {:.12}", r.lhs, r.rhs);
        }
    }
    Ok(())
}
