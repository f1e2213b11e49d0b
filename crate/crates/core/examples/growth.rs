//! Growth constants of a polynomial cocycle, with a super-resonant control.

use subresonant::cocycle::{generate_sequence, growth_check, inject_term, GrowthOptions, Mode};
use subresonant::WeightSpec;

fn main() -> subresonant::Result<()> {
    let ws = WeightSpec::from_ints(&[-2, -1])?;
    let seq = generate_sequence(&ws, Mode::Polynomial, 0.04, 1, 500)?;
    let opts = GrowthOptions::new(0.04, 1);
    let report = growth_check(&seq, &opts)?;
    for d in &report.degrees {
        println!("k = {}: C = {:.4e} (half run {:.4e}) {:?}", d.k, d.bound.c_hat, d.bound.c_hat_half, d.bound.verdict);
    }
    println!("hypotheses hold: {}", report.hypotheses_hold(1e-9));

    // y -> y + y^2 breaks subresonance
    let bad = inject_term(&seq, 1, &[0, 2], 1.0)?;
    for d in growth_check(&bad, &opts)?.degrees {
        println!("control k = {}: {:?}", d.k, d.bound.verdict);
    }
    Ok(())
}
