//! Exponents of a block upper triangular cocycle.

use subresonant::cocycle::{constant_instance, triangular_merge};

fn main() -> subresonant::Result<()> {
    let (a, b, u) = constant_instance(-1, -2, 1.0, 500)?;
    let r = triangular_merge(&a, &b, &u)?;
    let e = std::f64::consts::E;
    println!("block exponents {:?} and {:?}", r.exponents_a, r.exponents_b);
    println!("full exponents {:?}", r.exponents_l);
    println!("coefficient {:.12} (closed form {:.12})", r.coefficients[0][0], e * e / (e - 1.0));
    println!("uncorrected vector grows at {:.4}", r.uncorrected_exponents[0]);
    println!("corrected vector grows at {:.4}", r.corrected_exponents[0]);
    Ok(())
}
