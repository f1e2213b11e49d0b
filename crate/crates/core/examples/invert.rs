//! Inverting a subresonant map with a translation part.

use subresonant::srpoly::{compose, invert, PolyMap};
use subresonant::WeightSpec;

fn main() -> subresonant::Result<()> {
    let ws = WeightSpec::from_ints(&[-3, -2, -1])?;
    let f = PolyMap::from_terms(
        &ws,
        &ws,
        [
            (0, vec![1, 0, 0], 2.0),
            (0, vec![0, 1, 1], -1.0),
            (0, vec![0, 0, 3], 0.5),
            (0, vec![0, 0, 0], 0.25),
            (1, vec![0, 1, 0], 3.0),
            (1, vec![0, 0, 2], 1.0),
            (2, vec![0, 0, 1], -2.0),
            (2, vec![0, 0, 0], 1.0),
        ],
    )?;
    let g = invert(&f)?;
    println!("inverse has {} terms:", g.terms().count());
    for (j, alpha, c) in g.terms() {
        println!("  out {j} alpha {:?} coeff {c:+.6}", alpha.0);
    }
    let err = compose(&g, &f)?.max_abs_diff(&PolyMap::identity(&ws))?;
    println!("|g o f - id| = {err:.2e}");
    let x = [0.3, -0.7, 1.1];
    println!("g(f(x)) = {:?} for x = {x:?}", g.evaluate(&f.evaluate(&x)?)?);
    Ok(())
}
